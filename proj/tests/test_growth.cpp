#include <doctest.h>

#include <cmath>
#include <set>

#include "loewner_lab/errors.hpp"
#include "loewner_lab/growth.hpp"

using namespace loewner_lab;
using doctest::Approx;

TEST_CASE("disc grows with d(R^2)/dt = 2") {
    LgPolyState s;
    s.coeffs = {cplx(0.7, 0.0)};
    const LgPolyState n = lg_general_step(s, 0.3);
    CHECK(n.radius() * n.radius() == Approx(0.49 + 0.6).epsilon(1e-10));
    CHECK(n.t == Approx(0.3));
}

TEST_CASE("Z_n closed form") {
    const ZnState a = lg_zn_evolve(3, 1.0, 1e-6, 1e-6);
    CHECK(a.R == Approx(std::sqrt(2e-6)).epsilon(1e-3));
    double prev = 0.0;
    for (double t = 0.01; t < 0.24; t += 0.02) {
        const ZnState s = lg_zn_evolve(3, 1.0, t);
        CHECK(s.beta > prev);
        prev = s.beta;
        CHECK(lg_zn_time_at_beta(3, 1.0, s.beta) == Approx(t).epsilon(1e-8));
    }
    CHECK(lg_zn_cusp_time(3, 1.0) == Approx(0.25));
    CHECK(lg_zn_cusp_time(3, 2.0) == Approx(1.0));
    try {
        lg_zn_evolve(3, 1.0, 1.0);
        FAIL("no cusp");
    } catch (const CuspReached& e) {
        CHECK(std::abs(e.t - 0.25) < 1e-3);
    }
}

TEST_CASE("general hierarchy tracks the Z_3 solution and conserves I_k") {
    const int n = 3;
    const double R0 = 0.3;
    LgPolyState s = lg_zn_state(n, R0, R0, 0.0);
    const cplx I2 = lg_conserved(s, 2);
    const double A0 = lg_area(s);
    double beta = 0.0;
    while (beta < 0.9) {
        const double before = lg_area(s);
        s = lg_general_step(s, 2e-3);
        CHECK(lg_area(s) - before == Approx(2.0 * M_PI * 2e-3).epsilon(1e-6));
        beta = (n - 1) * s.coeffs[n].real() / s.radius();
        const ZnState z = lg_zn_evolve(n, 1.0, s.t, R0);
        CHECK(std::abs(z.R - s.radius()) < 1e-6);
        CHECK(std::abs(z.beta - beta) < 1e-6);
        CHECK(std::abs(lg_conserved(s, 2) - I2) <= 1e-6 * std::abs(I2));
        CHECK(std::abs(lg_conserved(s, 0)) < 1e-12);
    }
    CHECK((lg_area(s) - A0) / s.t == Approx(2.0 * M_PI).epsilon(1e-9));
}

TEST_CASE("conserved quantities of a polynomial map") {
    LgPolyState s;
    s.coeffs = {cplx(1.2, 0.0), cplx(0.1, 0.05), cplx(-0.04, 0.02), cplx(0.03, -0.01)};
    const int N = s.degree() + 1;
    // the last nonvanishing one is R^{1-N} conj(f_N) with f_N the top coefficient
    const cplx top = lg_conserved(s, N - 2);
    CHECK(std::abs(top - std::pow(s.radius(), 1 - (N - 1)) * std::conj(s.coeffs[N - 1])) < 1e-12);
    for (int k = N - 1; k < N + 3; ++k) CHECK(std::abs(lg_conserved(s, k)) < 1e-10);
}

TEST_CASE("two routes to the coefficient velocities agree") {
    LgPolyState s;
    s.coeffs = {cplx(1.0, 0.0), cplx(0.05, 0.02), cplx(0.03, -0.04), cplx(-0.02, 0.05)};
    const auto a = lg_coefficient_rates(s);
    const auto b = lg_coefficient_rates_schwarz(s, 512);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(std::abs(a[k] - b[k]) < 1e-10);
}

TEST_CASE("cusp guard stops the general integration") {
    LgPolyState s = lg_zn_state(3, 0.9, 0.9, 0.0);
    CHECK_THROWS_AS(lg_general_step(s, 0.5), CuspReached);
}

TEST_CASE("Hastings-Levitov") {
    HlCluster empty;
    for (const cplx w : hl_boundary(empty, 64)) CHECK(std::abs(w) == Approx(1.0).epsilon(1e-14));

    const double lambda = 0.1;
    // tip at (1 + sin l)/cos l; the square root vanishes at e^{2il}, the foot of the bump
    CHECK(std::abs(hl_bump_map(cplx(1.0, 0.0), lambda, 0.0)) == Approx((1.0 + std::sin(lambda)) / std::cos(lambda)).epsilon(1e-12));
    CHECK(std::abs(hl_bump_map(std::polar(1.0, 2.0 * lambda), lambda, 0.0) - std::polar(1.0, lambda)) < 1e-7);
    // derivative against a difference quotient away from the bump
    const cplx w = std::polar(1.5, 2.0);
    const cplx fd = (hl_bump_map(w + 1e-6, lambda, 0.3) - hl_bump_map(w - 1e-6, lambda, 0.3)) / 2e-6;
    CHECK(std::abs(fd - hl_bump_derivative(w, lambda, 0.3)) < 1e-7);

    HlCluster c = hl_grow(HlCluster{}, 300, 5);
    double prev = 0.0;
    for (std::size_t k = 1; k <= c.size(); ++k) {
        double cap = 0.0;
        for (std::size_t j = 0; j < k; ++j) cap -= std::log(std::cos(c.lambdas[j]));
        CHECK(cap >= prev);
        prev = cap;
    }
    CHECK(prev == Approx(c.log_capacity).epsilon(1e-12));
    for (const cplx b : hl_boundary(c, 2000)) CHECK(std::abs(b) >= 1.0 - 1e-9);
}

TEST_CASE("DLA first particle and connectivity") {
    int counts[4] = {0, 0, 0, 0};
    const int n = 4000;
    for (int i = 0; i < n; ++i) {
        const DlaCluster c = lattice_dla(1, static_cast<std::uint64_t>(i));
        REQUIRE(c.sites.size() == 2);
        CHECK(c.sites[0] == Site{0, 0});
        for (int d = 0; d < 4; ++d) counts[d] += c.sites[1] == square_dirs[d] ? 1 : 0;
    }
    for (int d = 0; d < 4; ++d) CHECK(std::abs(counts[d] / static_cast<double>(n) - 0.25) < 5.0 * std::sqrt(0.1875 / n));

    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const DlaCluster c = lattice_dla(40, seed);
        std::set<std::pair<int, int>> occ;
        for (const Site s : c.sites) {
            if (!occ.empty()) {
                bool touches = false;
                for (const Site d : square_dirs) touches = touches || occ.count({s.x + d.x, s.y + d.y}) > 0;
                CHECK(touches);
            }
            CHECK(occ.insert({s.x, s.y}).second);
        }
    }
    CHECK(radius_of_gyration({{1, 0}, {-1, 0}}) == Approx(1.0));
}
