#include <doctest.h>

#include <cmath>

#include "loewner_lab/errors.hpp"
#include "loewner_lab/estimators.hpp"
#include "loewner_lab/formulas.hpp"
#include "loewner_lab/lattice.hpp"
#include "loewner_lab/sle.hpp"

using namespace loewner_lab;
using doctest::Approx;

TEST_CASE("noiseless power law") {
    std::vector<std::pair<double, double>> s;
    for (double L : {16.0, 32.0, 64.0, 128.0, 256.0}) s.emplace_back(L, std::pow(L, 1.75));
    const FitReport f = fit_dimension(s);
    CHECK(f.exponent == Approx(1.75).epsilon(1e-12));
    CHECK(f.r_squared == Approx(1.0));

    // rescaling every size moves only the intercept
    std::vector<std::pair<double, double>> t;
    for (auto [L, v] : s) t.emplace_back(3.0 * L, v);
    const FitReport g = fit_dimension(t);
    CHECK(g.exponent == Approx(f.exponent).epsilon(1e-12));
    CHECK(g.intercept != Approx(f.intercept));

    CHECK_THROWS_AS(fit_dimension({{1.0, 1.0}, {2.0, 2.0}}), DegenerateFit);
}

TEST_CASE("noisy fit reports a propagated error") {
    Rng r(3);
    std::vector<std::pair<double, double>> s;
    for (double L : {10.0, 20.0, 40.0, 80.0})
        for (int k = 0; k < 50; ++k) s.emplace_back(L, std::pow(L, 1.25) * (1.0 + 0.2 * (r.uniform() - 0.5)));
    const FitReport f = fit_dimension(s);
    CHECK(f.std_error > 0.0);
    CHECK(std::abs(f.exponent - 1.25) < 5.0 * f.std_error);
}

TEST_CASE("Monte Carlo probability") {
    const McEstimate one = mc_probability([](Rng&) { return true; }, 100, 1);
    CHECK(one.p_hat == 1.0);
    CHECK(one.ci_high == 1.0);
    const McEstimate coin = mc_probability([](Rng& r) { return r.coin(); }, 100000, 2);
    CHECK(std::abs(coin.p_hat - 0.5) < 0.01);
    // does not depend on the worker count
    const auto a = mc_probability([](Rng& r) { return r.uniform() < 0.3; }, 5000, 9, 1);
    const auto b = mc_probability([](Rng& r) { return r.uniform() < 0.3; }, 5000, 9, 4);
    CHECK(a.successes == b.successes);
}

TEST_CASE("Wilson interval coverage") {
    const double p = 0.3;
    int covered = 0;
    for (int rep = 0; rep < 1000; ++rep) {
        const McEstimate e =
            mc_probability([p](Rng& r) { return r.uniform() < p; }, 200, 1000 + static_cast<std::uint64_t>(rep), 1);
        covered += (e.ci_low <= p && p <= e.ci_high) ? 1 : 0;
    }
    CHECK(covered >= 930);
}

TEST_CASE("box counting a segment") {
    std::vector<std::complex<double>> seg{{0.0, 0.0}, {1.0, 0.7}};
    std::vector<double> eps;
    for (int k = 0; k < 8; ++k) eps.push_back(0.2 * std::pow(0.5, k));
    const FitReport f = trace_dimension({seg}, eps);
    CHECK(std::abs(f.exponent - 1.0) < 0.02);
    const auto n = box_count(seg, {0.5});
    CHECK(n[0] >= 2.0);
}

TEST_CASE("triangle crossing estimate contains x") {
    const McEstimate e = mc_probability([](Rng& r) { return triangle_crossing_reach(48, r) <= 0.3; }, 10000, 5);
    CHECK(std::abs(e.p_hat - 0.3) < 3.0 * e.sigma() + 0.01);
}

TEST_CASE("dipolar classification") {
    SleParams p;
    p.kappa = 3.0;
    p.T = 30.0;
    p.dt = 1e-3;
    p.geometry = Geometry::dipolar();
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        p.seed = seed;
        const DrivingPath d = sample_dipolar(p);
        // the lower boundary is never touched for kappa < 4; a coarse grid can
        // still step the driving point across a real point, hence the fine dt
        for (double x : {-0.5, -2.0}) {
            DipolarClassifyOptions o;
            o.horizon = 30.0;
            try {
                CHECK(classify_dipolar_outcome(d, cplx(x, 0.0), o) == DipolarOutcome::left);
            } catch (const Undecided&) {
            }
        }
        const cplx z(0.3, 1.2);
        try {
            CHECK(classify_dipolar_outcome(d, z) == classify_dipolar_outcome(d, z));
        } catch (const Undecided&) {
        }
    }
}

TEST_CASE("dipolar outcome map against the harmonic laws") {
    const std::vector<cplx> zs{{0.0, M_PI / 2.0}, {-1.0, M_PI / 4.0}, {1.0, 3.0 * M_PI / 4.0}};
    const auto c4 = dipolar_outcome_map(4.0, zs, 600, 11);
    const auto c6 = dipolar_outcome_map(6.0, zs, 600, 12);
    for (std::size_t k = 0; k < zs.size(); ++k) {
        CHECK(c4[k].total() == 600);
        CHECK(c4[k].inside == 0);
        const double pl = c4[k].left / 600.0, pin = c6[k].inside / 600.0;
        CHECK(std::abs(pl - dipolar_left_prob(zs[k], 4.0)) < 0.07);
        CHECK(std::abs(pin - dipolar_in_prob(zs[k], 6.0)) < 0.07);
    }
}

TEST_CASE("two-point samplers") {
    const McEstimate h = mc_probability([](Rng& r) { return hitting_event(6.0, 1.0, 3.0, r); }, 3000, 4);
    const double ph = 1.0 - hitting_prob(1.0, 3.0, 6.0);
    CHECK(std::abs(h.p_hat - ph) < 4.0 * std::sqrt(ph * (1 - ph) / 3000));
    const McEstimate c = mc_probability([](Rng& r) { return cardy_event(6.0, -1.0, 2.0, r); }, 3000, 5);
    const double pc = cardy_halfplane(-1.0, 2.0, 6.0);
    CHECK(std::abs(c.p_hat - pc) < 4.0 * std::sqrt(pc * (1 - pc) / 3000));
    Rng r(1);
    CHECK_THROWS_AS(hitting_event(8.0, 1.0, 2.0, r), DomainError);
    CHECK_THROWS_AS(cardy_event(6.0, 1.0, 2.0, r), InvalidArgument);
    // kappa <= 4 never touches the axis
    for (int i = 0; i < 50; ++i) CHECK_FALSE(hitting_event(3.0, 1.0, 2.0, r));
}

TEST_CASE("restriction sampler, short run") {
    const double target = restriction_prob_semidisc(1.0, 0.4);
    const McEstimate e = mc_probability([](Rng& r) { return restriction_avoids(8.0 / 3.0, 1.0, 0.4, r); }, 600, 3);
    CHECK(std::abs(e.p_hat - target) < 4.0 * std::sqrt(target * (1 - target) / 600));
}

TEST_CASE("dimension sweep is independent of the worker count") {
    auto stat = [](int L, Rng& g) { return static_cast<double>(lerw_halfplane(L, g).length()); };
    const FitReport a = dimension_sweep({4, 8, 16}, {20, 20, 20}, stat, 3, 1);
    const FitReport b = dimension_sweep({4, 8, 16}, {20, 20, 20}, stat, 3, 3);
    CHECK(a.exponent == b.exponent);
}
