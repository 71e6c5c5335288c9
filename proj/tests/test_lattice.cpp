#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>

#include "loewner_lab/errors.hpp"
#include "loewner_lab/lattice.hpp"

using namespace loewner_lab;
using cplx = std::complex<double>;

namespace {

std::string word(const std::vector<char>& v) { return {v.begin(), v.end()}; }
std::vector<char> chars(const std::string& s) { return {s.begin(), s.end()}; }

std::string path_key(const InterfacePath& p) {
    std::string s;
    for (const auto& [b, w] : p.edges)
        s += std::to_string(b.q) + ',' + std::to_string(b.r) + '|' + std::to_string(w.q) + ',' + std::to_string(w.r) + ';';
    return s;
}

double tv(const std::map<std::string, double>& a, const std::map<std::string, double>& b) {
    std::set<std::string> keys;
    for (const auto& [k, v] : a) keys.insert(k);
    for (const auto& [k, v] : b) keys.insert(k);
    double t = 0.0;
    for (const auto& k : keys) t += std::abs((a.count(k) ? a.at(k) : 0.0) - (b.count(k) ? b.at(k) : 0.0));
    return 0.5 * t;
}

void check_interface(const HexDomain& d, const InterfacePath& p) {
    REQUIRE(p.vertices.size() == p.edges.size() + 1);
    HexDomain c = d;
    for (const auto& [h, s] : p.decided) c.set(h, s);
    for (const auto& [b, w] : p.edges) {
        CHECK(c.state(b) == HexState::black);
        CHECK(c.state(w) == HexState::white);
        const Hex diff = w - b;
        CHECK(std::find(hex_dirs.begin(), hex_dirs.end(), diff) != hex_dirs.end());
    }
    // simple: no vertex visited twice
    std::vector<std::pair<long, long>> seen;
    for (cplx v : p.vertices) seen.emplace_back(std::lround(v.real() * 1e6), std::lround(v.imag() * 1e6));
    std::sort(seen.begin(), seen.end());
    CHECK(std::adjacent_find(seen.begin(), seen.end()) == seen.end());
}

}  // namespace

TEST_CASE("loop erasure of the month strings") {
    CHECK(word(loop_erase(chars("jfmamjjasond"))) == "jasond");
    CHECK(word(loop_erase(chars("dnosajjmamfj"))) == "dnosamfj");
    CHECK(word(loop_erase(chars("abcdef"))) == "abcdef");
    for (const std::string s : {"jfmamjjasond", "dnosajjmamfj", "abacabadabacaba"}) {
        const auto once = loop_erase(chars(s));
        CHECK(loop_erase(once) == once);
        CHECK(once.front() == s.front());
        CHECK(once.back() == s.back());
    }
}

TEST_CASE("percolation exploration on a fully coloured domain is forced") {
    const HexDomain d = HexDomain::ring({{0, 0}});
    HexDomain coloured = d;
    coloured.set({0, 0}, HexState::black);
    const InterfacePath p = percolation_interface(coloured, 1);
    CHECK(p.decided.empty());
    check_interface(coloured, p);
}

TEST_CASE("three hexagons: exploration law equals the enumeration") {
    const std::vector<Hex> inner{{0, 0}, {1, 0}, {0, 1}};
    const HexDomain d = HexDomain::ring(inner);
    std::map<std::string, double> exact;
    for (int m = 0; m < 8; ++m) {
        HexDomain c = d;
        for (int i = 0; i < 3; ++i) c.set(inner[i], (m >> i & 1) ? HexState::black : HexState::white);
        exact[path_key(explore_coloured(c))] += 1.0 / 8.0;
    }
    const int n = 100000;
    std::map<std::string, double> seen;
    for (int i = 0; i < n; ++i) {
        Rng r = Rng::substream(4, static_cast<std::uint64_t>(i));
        const InterfacePath p = percolation_interface(d, r);
        seen[path_key(p)] += 1.0 / n;
        CHECK(std::ldexp(1.0, -static_cast<int>(p.decided.size())) == doctest::Approx(exact[path_key(p)]));
    }
    CHECK(tv(seen, exact) < 0.01);
}

// Conditioning on the first coin equals exploring the domain with that
// hexagon coloured in advance.
TEST_CASE("percolation domain Markov spot check") {
    const std::vector<Hex> inner{{0, 0}, {1, 0}, {0, 1}, {1, 1}, {-1, 1}};
    const HexDomain d = HexDomain::ring(inner);
    const int n = 100000;
    std::map<std::string, std::map<std::string, double>> cond;
    std::map<std::string, int> count;
    Hex first{};
    for (int i = 0; i < n; ++i) {
        Rng r = Rng::substream(7, static_cast<std::uint64_t>(i));
        const InterfacePath p = percolation_interface(d, r);
        REQUIRE_FALSE(p.decided.empty());
        first = p.decided.front().first;
        const std::string c = p.decided.front().second == HexState::black ? "b" : "w";
        cond[c][path_key(p)] += 1.0;
        ++count[c];
    }
    for (auto& [c, m] : cond) {
        for (auto& [k, v] : m) v /= count[c];
        HexDomain cut = d;
        cut.set(first, c == "b" ? HexState::black : HexState::white);
        std::map<std::string, double> direct;
        for (int i = 0; i < n / 2; ++i) {
            Rng r = Rng::substream(8, static_cast<std::uint64_t>(i));
            direct[path_key(percolation_interface(cut, r))] += 2.0 / n;
        }
        CHECK(tv(m, direct) < 0.02);
    }
}

TEST_CASE("interfaces separate black from white") {
    const HexDomain d = HexDomain::rectangle(20, 20);
    check_interface(d, percolation_interface(d, 3));
    for (auto v : {NavigatorVariant::harmonic, NavigatorVariant::anti, NavigatorVariant::percolation_nav,
                   NavigatorVariant::boundary_harmonic})
        check_interface(d, navigator_interface(d, 5, v));
    CHECK(path_key(percolation_interface(d, 9)) == path_key(percolation_interface(d, 9)));
}

TEST_CASE("harmonic navigator on a symmetric single hexagon is a fair coin") {
    const HexDomain d = HexDomain::ring({{0, 0}});
    const int n = 100000;
    int black = 0;
    for (int i = 0; i < n; ++i) {
        Rng r = Rng::substream(10, static_cast<std::uint64_t>(i));
        const InterfacePath p = navigator_interface(d, r, NavigatorVariant::harmonic);
        REQUIRE(p.decided.size() == 1);
        black += p.decided.front().second == HexState::black ? 1 : 0;
    }
    CHECK(std::abs(black / static_cast<double>(n) - 0.5) < 5.0 * std::sqrt(0.25 / n));
}

TEST_CASE("half-plane LERW") {
    for (int n : {1, 5, 40}) {
        const LatticeWalk w = lerw_halfplane(n, static_cast<std::uint64_t>(n));
        CHECK(w.sites.front() == Site{0, 0});
        CHECK(w.sites.back().y == n);
        CHECK(w.length() >= static_cast<std::size_t>(n));
        for (std::size_t k = 1; k < w.sites.size(); ++k) {
            const Site s = w.sites[k] - w.sites[k - 1];
            CHECK(std::abs(s.x) + std::abs(s.y) == 1);
            CHECK(w.sites[k].y >= 1);
            if (k + 1 < w.sites.size()) CHECK(w.sites[k].y < n);
        }
        CHECK(loop_erase_sites(w.sites) == w.sites);
    }
    Rng g2(2);
    const LatticeWalk r = lerw_reflecting(20.0, g2);
    CHECK(loop_erase_sites(r.sites) == r.sites);
}

TEST_CASE("LERW in a small domain matches the exact law") {
    SquareDomain d;
    for (int x = 1; x <= 2; ++x)
        for (int y = 1; y <= 2; ++y) d.inner.push_back({x, y});
    d.a = {0, 1};
    d.b = {3, 2};
    double tail = 1.0;
    const auto exact = lerw_domain_exact(d, 1e-13, &tail);
    CHECK(tail < 1e-10);
    double total = 0.0;
    std::map<std::string, double> e;
    auto key = [](const std::vector<Site>& p) {
        std::string s;
        for (Site q : p) s += std::to_string(q.x) + ',' + std::to_string(q.y) + ';';
        return s;
    };
    for (const auto& pw : exact) {
        e[key(pw.path)] = pw.probability;
        total += pw.probability;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
    const int n = 50000;
    std::map<std::string, double> seen;
    Rng r(13);
    for (int i = 0; i < n; ++i) seen[key(lerw_domain(d, r).sites)] += 1.0 / n;
    CHECK(tv(seen, e) < 0.01);
}

TEST_CASE("pivot moves keep walks self-avoiding") {
    std::vector<Site> w;
    for (int i = 0; i <= 30; ++i) w.push_back({i, 0});
    Rng r(6);
    for (int k = 0; k < 2000; ++k) {
        bool acc = false;
        const auto next = saw_pivot(w, r, &acc);
        CHECK(next.size() == w.size());
        CHECK(next.front() == w.front());
        CHECK(is_self_avoiding(next));
        if (!acc) CHECK(next == w);
        w = next;
    }
}

TEST_CASE("pivot chain on 3-step walks is uniform") {
    const auto all = enumerate_saws(3);
    CHECK(all.size() == 36);
    std::map<std::vector<std::pair<int, int>>, double> freq;
    auto key = [](const std::vector<Site>& w) {
        std::vector<std::pair<int, int>> k;
        for (Site s : w) k.emplace_back(s.x, s.y);
        return k;
    };
    std::vector<Site> w{{0, 0}, {1, 0}, {2, 0}, {3, 0}};
    Rng r(21);
    const int n = 1000000;
    for (int k = 0; k < n; ++k) {
        w = saw_pivot(w, r);
        freq[key(w)] += 1.0 / n;
    }
    double t = 0.0;
    for (const auto& s : all) t += std::abs((freq.count(key(s)) ? freq[key(s)] : 0.0) - 1.0 / all.size());
    CHECK(0.5 * t < 0.01);
}

TEST_CASE("pivot chain end-to-end exponent") {
    // R ~ N^{3/4}: fit over two lengths
    Rng r(4);
    const SawStats a = saw_pivot_chain(25, 20000, 4000, 10, r);
    const SawStats b = saw_pivot_chain(200, 20000, 4000, 10, r);
    const double nu = 0.5 * std::log(b.mean_r2 / a.mean_r2) / std::log(8.0);
    CHECK(std::abs(nu - 0.75) < 0.05);
}

TEST_CASE("triangle crossing") {
    const int n = 10000;
    int hits = 0;
    for (int i = 0; i < n; ++i) {
        Rng r = Rng::substream(3, static_cast<std::uint64_t>(i));
        const double reach = triangle_crossing_reach(64, r);
        CHECK(reach <= 1.0);
        CHECK(reach >= 0.0);
        hits += reach <= 0.3 ? 1 : 0;
    }
    CHECK(std::abs(hits / static_cast<double>(n) - 0.3) < 3.0 * std::sqrt(0.21 / n) + 0.01);
}

TEST_CASE("domain validation") {
    CHECK_THROWS_AS(HexDomain::rectangle(1, 5), InvalidArgument);
    CHECK_THROWS_AS(HexDomain::ring({}), InvalidArgument);
}
