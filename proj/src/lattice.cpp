#include "loewner_lab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <unordered_set>

#include "loewner_lab/errors.hpp"

namespace loewner_lab {

namespace {

constexpr double sqrt3 = 1.7320508075688772;

int mod6(int k) { return ((k % 6) + 6) % 6; }

int direction_between(Hex from, Hex to) {
    const Hex d = to - from;
    for (int k = 0; k < 6; ++k)
        if (hex_dirs[k] == d) return k;
    return -1;
}

std::complex<double> vertex_of(Hex a, Hex b, Hex c) {
    return (hex_center(a) + hex_center(b) + hex_center(c)) / 3.0;
}

bool coloured(HexState s) { return s == HexState::black || s == HexState::white; }

HexState opposite(HexState s) { return s == HexState::black ? HexState::white : HexState::black; }

}  // namespace

std::complex<double> hex_center(Hex h) { return {sqrt3 * (h.q + 0.5 * h.r), 1.5 * h.r}; }

// ---------------------------------------------------------------- HexDomain

HexDomain::HexDomain(const std::vector<std::pair<Hex, HexState>>& cells, Hex start_left, Hex start_right) {
    if (cells.empty()) throw InvalidArgument("HexDomain: no cells");
    int qmin = std::numeric_limits<int>::max(), qmax = std::numeric_limits<int>::min();
    int rmin = qmin, rmax = qmax;
    for (const auto& [h, s] : cells) {
        if (s == HexState::outside) throw InvalidArgument("HexDomain: cell state cannot be outside");
        qmin = std::min(qmin, h.q);
        qmax = std::max(qmax, h.q);
        rmin = std::min(rmin, h.r);
        rmax = std::max(rmax, h.r);
    }
    q0_ = qmin;
    r0_ = rmin;
    nq_ = qmax - qmin + 1;
    nr_ = rmax - rmin + 1;
    state_.assign(static_cast<std::size_t>(nq_) * nr_, static_cast<std::uint8_t>(HexState::outside));
    for (const auto& [h, s] : cells) {
        auto& slot = state_[index(h)];
        if (slot != static_cast<std::uint8_t>(HexState::outside)) throw InvalidArgument("HexDomain: duplicate cell");
        slot = static_cast<std::uint8_t>(s);
    }
    initial_ = state_;
    left0_ = start_left;
    right0_ = start_right;
    dir0_ = direction_between(start_left, start_right);
    validate();
}

bool HexDomain::in_box(Hex h) const {
    return h.q >= q0_ && h.q < q0_ + nq_ && h.r >= r0_ && h.r < r0_ + nr_;
}

std::size_t HexDomain::index(Hex h) const {
    return static_cast<std::size_t>(h.r - r0_) * nq_ + static_cast<std::size_t>(h.q - q0_);
}

HexState HexDomain::state(Hex h) const {
    return in_box(h) ? static_cast<HexState>(state_[index(h)]) : HexState::outside;
}

HexState HexDomain::initial_state(Hex h) const {
    return in_box(h) ? static_cast<HexState>(initial_[index(h)]) : HexState::outside;
}

void HexDomain::set(Hex h, HexState s) {
    if (!in_box(h) || state_[index(h)] == static_cast<std::uint8_t>(HexState::outside))
        throw InvalidArgument("HexDomain::set: cell not in domain");
    if (s == HexState::outside) throw InvalidArgument("HexDomain::set: cannot remove a cell");
    state_[index(h)] = static_cast<std::uint8_t>(s);
}

std::size_t HexDomain::inner_count() const {
    return static_cast<std::size_t>(
        std::count(state_.begin(), state_.end(), static_cast<std::uint8_t>(HexState::undecided)));
}

std::vector<Hex> HexDomain::cells() const {
    std::vector<Hex> out;
    for (int r = 0; r < nr_; ++r)
        for (int q = 0; q < nq_; ++q) {
            const Hex h{q0_ + q, r0_ + r};
            if (contains(h)) out.push_back(h);
        }
    return out;
}

void HexDomain::validate() const {
    if (dir0_ < 0) throw InvalidArgument("HexDomain: start cells must be adjacent");
    if (state(left0_) != HexState::black || state(right0_) != HexState::white)
        throw InvalidArgument("HexDomain: start edge needs black on the left and white on the right");
    for (const Hex h : cells()) {
        if (state(h) != HexState::undecided) continue;
        for (const Hex d : hex_dirs)
            if (!contains(h + d)) throw InvalidArgument("HexDomain: inner cell touches the outside");
    }
}

HexDomain HexDomain::rectangle(int width, int height) {
    if (width < 4 || height < 3) throw InvalidArgument("HexDomain::rectangle: needs width >= 4, height >= 3");
    std::vector<std::pair<Hex, HexState>> cells;
    cells.reserve(static_cast<std::size_t>(width) * height);
    auto at = [](int c, int row) { return Hex{c - row / 2, row}; };
    const int half = width / 2;
    for (int row = 0; row < height; ++row)
        for (int c = 0; c < width; ++c) {
            HexState s = HexState::undecided;
            if (row == 0 || row == height - 1)
                s = c < half ? HexState::black : HexState::white;
            else if (c == 0)
                s = HexState::black;
            else if (c == width - 1)
                s = HexState::white;
            cells.emplace_back(at(c, row), s);
        }
    return HexDomain(cells, at(half - 1, 0), at(half, 0));
}

HexDomain HexDomain::ring(const std::vector<Hex>& inner) {
    if (inner.empty()) throw InvalidArgument("HexDomain::ring: no inner cells");
    auto is_inner = [&](Hex h) { return std::find(inner.begin(), inner.end(), h) != inner.end(); };
    std::vector<Hex> ring;
    for (const Hex h : inner)
        for (const Hex d : hex_dirs) {
            const Hex n = h + d;
            if (!is_inner(n) && std::find(ring.begin(), ring.end(), n) == ring.end()) ring.push_back(n);
        }
    std::complex<double> centre = 0.0;
    for (const Hex h : inner) centre += hex_center(h);
    centre /= static_cast<double>(inner.size());
    std::sort(ring.begin(), ring.end(), [&](Hex a, Hex b) {
        return std::arg(hex_center(a) - centre) < std::arg(hex_center(b) - centre);
    });
    const std::size_t n = ring.size();
    const std::size_t half = n / 2;
    std::vector<std::pair<Hex, HexState>> cells;
    for (const Hex h : inner) cells.emplace_back(h, HexState::undecided);
    for (std::size_t i = 0; i < n; ++i) cells.emplace_back(ring[i], i < half ? HexState::black : HexState::white);
    auto contains = [&](Hex h) { return is_inner(h) || std::find(ring.begin(), ring.end(), h) != ring.end(); };
    // The two colour changes along the ring; the one with the outside behind
    // the edge is where the interface starts.
    const std::pair<Hex, Hex> candidates[2] = {{ring[half - 1], ring[half]}, {ring[0], ring[n - 1]}};
    for (const auto& [b, w] : candidates) {
        const int k = direction_between(b, w);
        if (k < 0) continue;
        if (!contains(b + hex_dirs[mod6(k - 1)]) && contains(b + hex_dirs[mod6(k + 1)]))
            return HexDomain(cells, b, w);
    }
    throw InvalidArgument("HexDomain::ring: could not place the start edge");
}

// ---------------------------------------------------------------- exploration

namespace {

template <class Decide>
InterfacePath explore(HexDomain& d, Decide&& decide) {
    InterfacePath path;
    Hex L = d.start_left();
    Hex R = d.start_right();
    int k = d.start_dir();
    path.vertices.push_back(vertex_of(L, R, L + hex_dirs[mod6(k - 1)]));
    const std::size_t cap = 4 * d.cell_count() + 16;
    for (;;) {
        const Hex H = L + hex_dirs[mod6(k + 1)];
        path.edges.emplace_back(L, R);
        path.vertices.push_back(vertex_of(L, R, H));
        HexState s = d.state(H);
        if (s == HexState::outside) break;
        if (s == HexState::undecided) {
            s = decide(H, d, L, R, k);
            d.set(H, s);
            path.decided.emplace_back(H, s);
        }
        if (s == HexState::black) {
            L = H;
            k = mod6(k - 1);
        } else {
            R = H;
            k = mod6(k + 1);
        }
        if (path.edges.size() > cap) throw Error("exploration did not terminate; domain is not admissible");
    }
    return path;
}

HexState walk_colour(const HexDomain& d, Hex start, Rng& rng, bool initial_only) {
    Hex p = start;
    for (;;) {
        p = p + hex_dirs[rng.below(6)];
        const HexState s = initial_only ? d.initial_state(p) : d.state(p);
        if (coloured(s)) return s;
        if (s == HexState::outside) throw Error("navigator walk left the domain");
    }
}

HexState percolation_probe(const HexDomain& d, Hex L, Hex R, int k, Rng& rng) {
    // Temporary exploration from the tip; the first permanently coloured
    // cell it meets ahead decides the colour.
    std::unordered_map<std::uint64_t, HexState> temp;
    auto key = [](Hex h) {
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(h.q)) << 32) | static_cast<std::uint32_t>(h.r);
    };
    for (;;) {
        const Hex H = L + hex_dirs[mod6(k + 1)];
        HexState s = d.state(H);
        if (coloured(s)) return s;
        if (s == HexState::outside) throw Error("percolation navigator probe left the domain");
        auto it = temp.find(key(H));
        if (it == temp.end()) it = temp.emplace(key(H), rng.coin() ? HexState::black : HexState::white).first;
        if (it->second == HexState::black) {
            L = H;
            k = mod6(k - 1);
        } else {
            R = H;
            k = mod6(k + 1);
        }
    }
}

}  // namespace

const char* navigator_name(NavigatorVariant v) {
    switch (v) {
        case NavigatorVariant::harmonic: return "harmonic";
        case NavigatorVariant::anti: return "anti";
        case NavigatorVariant::percolation_nav: return "percolation";
        case NavigatorVariant::boundary_harmonic: return "boundary-harmonic";
    }
    return "?";
}

InterfacePath percolation_interface(HexDomain d, Rng& rng) {
    return explore(d, [&](Hex, const HexDomain&, Hex, Hex, int) {
        return rng.coin() ? HexState::black : HexState::white;
    });
}

InterfacePath percolation_interface(const HexDomain& d, std::uint64_t seed) {
    Rng rng(seed);
    return percolation_interface(d, rng);
}

InterfacePath navigator_interface(HexDomain d, Rng& rng, NavigatorVariant variant) {
    return explore(d, [&](Hex H, const HexDomain& dom, Hex L, Hex R, int k) {
        switch (variant) {
            case NavigatorVariant::harmonic: return walk_colour(dom, H, rng, false);
            case NavigatorVariant::anti: return opposite(walk_colour(dom, H, rng, false));
            case NavigatorVariant::boundary_harmonic: return walk_colour(dom, H, rng, true);
            case NavigatorVariant::percolation_nav: return percolation_probe(dom, L, R, k, rng);
        }
        throw InvalidArgument("unknown navigator variant");
    });
}

InterfacePath navigator_interface(const HexDomain& d, std::uint64_t seed, NavigatorVariant variant) {
    Rng rng(seed);
    return navigator_interface(d, rng, variant);
}

InterfacePath explore_coloured(HexDomain d) {
    return explore(d, [](Hex, const HexDomain&, Hex, Hex, int) -> HexState {
        throw InvalidArgument("explore_coloured: inner cell left undecided");
    });
}

// ---------------------------------------------------------------- loop-erased walks

std::vector<Site> loop_erase_sites(const std::vector<Site>& walk) { return loop_erase<Site, SiteHash>(walk); }

namespace {

// Online loop erasure of a growing walk.
class Eraser {
public:
    void push(Site s) {
        auto it = where_.find(s);
        if (it == where_.end()) {
            where_.emplace(s, path_.size());
            path_.push_back(s);
            return;
        }
        const std::size_t keep = it->second + 1;
        for (std::size_t i = keep; i < path_.size(); ++i) where_.erase(path_[i]);
        path_.resize(keep);
    }
    std::vector<Site> take() { return std::move(path_); }

private:
    std::vector<Site> path_;
    std::unordered_map<Site, std::size_t, SiteHash> where_;
};

}  // namespace

LatticeWalk lerw_halfplane(int n, Rng& rng) {
    if (n < 1) throw InvalidArgument("lerw_halfplane: altitude must be >= 1");
    Eraser er;
    Site p{0, 0};
    er.push(p);
    p = {0, 1};
    er.push(p);
    std::uint64_t steps = 1;
    while (p.y < n) {
        const double u = rng.uniform();
        if (u < 0.25) {
            ++p.x;
        } else if (u < 0.5) {
            --p.x;
        } else {
            const double v = 2.0 * (u - 0.5);
            p.y += v < 0.5 * (1.0 + 1.0 / p.y) ? 1 : -1;
        }
        er.push(p);
        ++steps;
    }
    LatticeWalk w;
    w.sites = er.take();
    w.mode = WalkBoundary::bessel3;
    w.raw_steps = steps;
    return w;
}

LatticeWalk lerw_halfplane(int n, std::uint64_t seed) {
    Rng rng(seed);
    return lerw_halfplane(n, rng);
}

LatticeWalk lerw_reflecting(double R, Rng& rng) {
    if (!(R >= 1.0)) throw InvalidArgument("lerw_reflecting: radius must be >= 1");
    Eraser er;
    Site p{0, 0};
    er.push(p);
    std::uint64_t steps = 0;
    const double r2 = R * R;
    while (static_cast<double>(p.x) * p.x + static_cast<double>(p.y) * p.y <= r2) {
        p = p + square_dirs[rng.below(4)];
        if (p.y < 0) p.y = -p.y;
        er.push(p);
        ++steps;
    }
    LatticeWalk w;
    w.sites = er.take();
    w.mode = WalkBoundary::reflecting;
    w.raw_steps = steps;
    return w;
}

LatticeWalk lerw_domain(const SquareDomain& d, Rng& rng, std::uint64_t max_restarts) {
    const std::unordered_set<Site, SiteHash> inner(d.inner.begin(), d.inner.end());
    if (inner.count(d.a) || inner.count(d.b) || d.a == d.b)
        throw InvalidArgument("lerw_domain: a and b must be distinct boundary points");
    std::uint64_t total = 0;
    for (std::uint64_t attempt = 0; attempt < max_restarts; ++attempt) {
        Eraser er;
        Site p = d.a;
        er.push(p);
        for (;;) {
            p = p + square_dirs[rng.below(4)];
            ++total;
            if (inner.count(p)) {
                er.push(p);
                continue;
            }
            break;
        }
        if (p == d.b) {
            er.push(p);
            LatticeWalk w;
            w.sites = er.take();
            w.mode = WalkBoundary::annihilating;
            w.raw_steps = total;
            return w;
        }
    }
    throw Error("lerw_domain: no walk reached b within the restart budget");
}

std::vector<PathWeight> lerw_domain_exact(const SquareDomain& d, double tail_tol, double* tail) {
    const std::unordered_set<Site, SiteHash> inner(d.inner.begin(), d.inner.end());
    if (inner.count(d.a) || inner.count(d.b) || d.a == d.b)
        throw InvalidArgument("lerw_domain_exact: a and b must be distinct boundary points");
    using Key = std::vector<std::pair<int, int>>;
    auto key_of = [](const std::vector<Site>& p) {
        Key k;
        k.reserve(p.size());
        for (const Site s : p) k.emplace_back(s.x, s.y);
        return k;
    };
    std::map<Key, double> live, done;
    live[key_of({d.a})] = 1.0;
    double live_mass = 1.0, done_mass = 0.0;
    for (int iter = 0; iter < 100000 && live_mass > tail_tol * std::max(done_mass, 1e-300); ++iter) {
        std::map<Key, double> next;
        for (const auto& [k, mass] : live) {
            std::vector<Site> path;
            for (const auto& [x, y] : k) path.push_back({x, y});
            const Site pos = path.back();
            for (const Site dir : square_dirs) {
                const Site nb = pos + dir;
                const double m = 0.25 * mass;
                if (nb == d.b) {
                    auto p2 = path;
                    p2.push_back(nb);
                    done[key_of(p2)] += m;
                    done_mass += m;
                } else if (inner.count(nb)) {
                    auto p2 = path;
                    auto it = std::find(p2.begin(), p2.end(), nb);
                    if (it != p2.end())
                        p2.erase(it + 1, p2.end());
                    else
                        p2.push_back(nb);
                    next[key_of(p2)] += m;
                }
            }
        }
        live.swap(next);
        live_mass = 0.0;
        for (const auto& [k, m] : live) live_mass += m;
    }
    if (!(done_mass > 0.0)) throw DomainError("lerw_domain_exact: b is not reachable from a");
    if (tail) *tail = live_mass / done_mass;
    std::vector<PathWeight> out;
    for (const auto& [k, m] : done) {
        PathWeight pw;
        for (const auto& [x, y] : k) pw.path.push_back({x, y});
        pw.probability = m / done_mass;
        out.push_back(std::move(pw));
    }
    return out;
}

// ---------------------------------------------------------------- SAW

namespace {

// Point group of the square lattice as (a, b, c, d): (x, y) -> (ax + by, cx + dy).
constexpr std::array<std::array<int, 4>, 8> point_group{{{1, 0, 0, 1},
                                                          {0, -1, 1, 0},
                                                          {-1, 0, 0, -1},
                                                          {0, 1, -1, 0},
                                                          {1, 0, 0, -1},
                                                          {-1, 0, 0, 1},
                                                          {0, 1, 1, 0},
                                                          {0, -1, -1, 0}}};

}  // namespace

bool is_self_avoiding(const std::vector<Site>& walk) {
    std::unordered_set<Site, SiteHash> seen;
    for (const Site s : walk)
        if (!seen.insert(s).second) return false;
    return true;
}

std::vector<Site> saw_pivot(const std::vector<Site>& walk, Rng& rng, bool* accepted) {
    if (walk.empty()) throw InvalidArgument("saw_pivot: empty walk");
    const std::size_t n = walk.size() - 1;
    const std::size_t pivot = rng.below(n + 1);
    const auto& g = point_group[rng.below(8)];
    if (accepted) *accepted = false;
    std::unordered_set<Site, SiteHash> head(walk.begin(), walk.begin() + static_cast<std::ptrdiff_t>(pivot) + 1);
    std::vector<Site> out(walk.begin(), walk.begin() + static_cast<std::ptrdiff_t>(pivot) + 1);
    out.reserve(walk.size());
    const Site p = walk[pivot];
    for (std::size_t j = pivot + 1; j <= n; ++j) {
        const Site v = walk[j] - p;
        const Site w = p + Site{g[0] * v.x + g[1] * v.y, g[2] * v.x + g[3] * v.y};
        if (!head.insert(w).second) return walk;
        out.push_back(w);
    }
    if (accepted) *accepted = true;
    return out;
}

std::vector<Site> saw_pivot(const std::vector<Site>& walk, std::uint64_t seed) {
    Rng rng(seed);
    return saw_pivot(walk, rng);
}

std::vector<std::vector<Site>> enumerate_saws(int n) {
    if (n < 0) throw InvalidArgument("enumerate_saws: negative length");
    std::vector<std::vector<Site>> out;
    std::vector<Site> cur{{0, 0}};
    std::function<void()> rec = [&] {
        if (static_cast<int>(cur.size()) == n + 1) {
            out.push_back(cur);
            return;
        }
        for (const Site d : square_dirs) {
            const Site nx = cur.back() + d;
            if (std::find(cur.begin(), cur.end(), nx) != cur.end()) continue;
            cur.push_back(nx);
            rec();
            cur.pop_back();
        }
    };
    rec();
    return out;
}

SawStats saw_pivot_chain(int n, std::size_t burn_in, std::size_t measurements, std::size_t stride, Rng& rng) {
    if (n < 1 || stride < 1) throw InvalidArgument("saw_pivot_chain: needs n >= 1 and stride >= 1");
    std::vector<Site> walk(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) walk[static_cast<std::size_t>(i)] = {i, 0};
    std::size_t acc = 0, moves = 0;
    auto move = [&] {
        bool ok = false;
        walk = saw_pivot(walk, rng, &ok);
        acc += ok;
        ++moves;
    };
    for (std::size_t i = 0; i < burn_in; ++i) move();
    SawStats st;
    double sum = 0.0;
    for (std::size_t m = 0; m < measurements; ++m) {
        for (std::size_t s = 0; s < stride; ++s) move();
        const Site e = walk.back();
        sum += static_cast<double>(e.x) * e.x + static_cast<double>(e.y) * e.y;
    }
    st.samples = measurements;
    st.mean_r2 = measurements ? sum / static_cast<double>(measurements) : 0.0;
    st.acceptance = moves ? static_cast<double>(acc) / static_cast<double>(moves) : 0.0;
    return st;
}

// ---------------------------------------------------------------- triangle crossing

double triangle_crossing_reach(int n, Rng& rng) {
    if (n < 1) throw InvalidArgument("triangle_crossing_reach: n must be >= 1");
    const std::size_t side = static_cast<std::size_t>(n) + 1;
    // 0 unknown, 1 black, 2 white
    std::vector<std::uint8_t> st(side * side, 0);
    auto idx = [side](int i, int j) { return static_cast<std::size_t>(j) * side + static_cast<std::size_t>(i); };
    std::vector<std::pair<int, int>> stack;
    stack.reserve(side * 4);
    int best = std::numeric_limits<int>::max();
    for (int i = 0; i <= n; ++i) {
        st[idx(i, 0)] = 1;
        stack.emplace_back(i, 0);
    }
    best = n;  // the corner (n, 0) lies on the far side
    static constexpr int di[6] = {1, -1, 0, 0, 1, -1};
    static constexpr int dj[6] = {0, 0, 1, -1, -1, 1};
    while (!stack.empty()) {
        const auto [i, j] = stack.back();
        stack.pop_back();
        if (i + j == n) best = std::min(best, i);
        for (int m = 0; m < 6; ++m) {
            const int a = i + di[m], b = j + dj[m];
            if (a < 0 || b < 0 || a + b > n) continue;
            auto& s = st[idx(a, b)];
            if (s != 0) continue;
            s = rng.coin() ? 1 : 2;
            if (s == 1) stack.emplace_back(a, b);
        }
    }
    return static_cast<double>(best) / n;
}

}  // namespace loewner_lab
