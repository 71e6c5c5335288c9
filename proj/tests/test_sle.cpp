#include <doctest.h>

#include <cmath>

#include "loewner_lab/errors.hpp"
#include "loewner_lab/sle.hpp"

using namespace loewner_lab;
using doctest::Approx;

namespace {
SleParams params(double kappa, std::uint64_t seed, double T = 1.0, double dt = 1e-3) {
    SleParams p;
    p.kappa = kappa;
    p.seed = seed;
    p.T = T;
    p.dt = dt;
    return p;
}
}  // namespace

TEST_CASE("kappa = 0 gives the vertical slit") {
    const DrivingPath d = sample_chordal(params(0.0, 4));
    for (double v : d.values()) CHECK(v == 0.0);
    const TraceSample tr = trace(d);
    CHECK(std::abs(tr.points.back() - cplx(0.0, 2.0)) < 1e-6);
}

TEST_CASE("samplers are pure functions of the seed") {
    const DrivingPath a = sample_chordal(params(6.0, 99));
    const DrivingPath b = sample_chordal(params(6.0, 99));
    const DrivingPath c = sample_chordal(params(6.0, 100));
    CHECK(a.values() == b.values());
    CHECK(a.values() != c.values());
    CHECK(a.values().front() == 0.0);
    CHECK(sample_radial(params(2.0, 5)).values() == sample_radial(params(2.0, 5)).values());
}

TEST_CASE("grid ends exactly at T") {
    const DrivingPath d = sample_chordal(params(3.0, 1, 1.0, 0.3));
    CHECK(d.final_time() == 1.0);
    CHECK(d.steps() == 4);
}

TEST_CASE("driving increments have variance kappa dt") {
    const double kappa = 6.0, dt = 1e-3;
    const DrivingPath d = sample_chordal(params(kappa, 17, 100.0, dt));
    const auto& v = d.values();
    const std::size_t n = v.size() - 1;
    REQUIRE(n == 100000);
    double s2 = 0.0;
    for (std::size_t k = 1; k <= n; ++k) s2 += (v[k] - v[k - 1]) * (v[k] - v[k - 1]);
    const double ratio = s2 / (kappa * dt * static_cast<double>(n));
    // chi-square with n degrees of freedom: sd of the ratio is sqrt(2/n)
    CHECK(std::abs(ratio - 1.0) < 5.0 * std::sqrt(2.0 / static_cast<double>(n)));
}

TEST_CASE("scaled driving has the same quadratic variation per unit time") {
    // lambda * B(t / lambda^2) has the law of B: compare quadratic variation rates
    const double kappa = 4.0, lambda = 2.0;
    const DrivingPath d = sample_chordal(params(kappa, 8, 400.0, 1e-2));
    const auto& v = d.values();
    double qv = 0.0;
    // subsample every lambda^2 steps and rescale by 1/lambda: a path on [0, 100]
    const std::size_t stride = 4;
    for (std::size_t k = stride; k < v.size(); k += stride) {
        const double inc = (v[k] - v[k - stride]) / lambda;
        qv += inc * inc;
    }
    CHECK(qv / (kappa * 100.0) == Approx(1.0).epsilon(0.03));
}

TEST_CASE("SLE(kappa, rho) drift") {
    CHECK(sle_kr_drift(6.0, 0.0) == 0.0);
    CHECK(sle_kr_drift(2.0, 4.0) == Approx(6.0));

    SleParams p = params(2.0, 12, 1.0, 1e-3);
    p.geometry = Geometry::dipolar();
    p.rho = (2.0 - 6.0) / 2.0;
    const DrivingPath kr = sample_sle_kr(p);
    const DrivingPath dip = sample_dipolar(p);
    CHECK(kr.values() == dip.values());

    p.rho = 4.0;
    const int n = 1000;
    double mean = 0.0, m2 = 0.0;
    for (int i = 0; i < n; ++i) {
        p.seed = 1000 + static_cast<std::uint64_t>(i);
        const double u = sample_sle_kr(p).values().back() / p.T;
        mean += u / n;
        m2 += u * u / n;
    }
    const double sd = std::sqrt((m2 - mean * mean) / n);
    CHECK(std::abs(mean - 6.0) < 5.0 * sd);
}

TEST_CASE("parameter validation") {
    SleParams p = params(-1.0, 1);
    CHECK_THROWS_AS(validate(p), InvalidArgument);
    p = params(2.0, 1, 1.0, 0.0);
    CHECK_THROWS_AS(validate(p), InvalidArgument);
    p = params(2.0, 1, 0.0);
    CHECK_THROWS_AS(validate(p), InvalidArgument);
}

TEST_CASE("adaptive trace respects the gap and keeps the grid") {
    const SleParams p = params(6.0, 31, 1.0, 1e-3);
    const AdaptiveTrace a = adaptive_chordal_trace(p, 0.02);
    const auto& pts = a.trace.points;
    REQUIRE(pts.size() == a.driving.times().size());
    CHECK(pts.size() == a.driving.steps() + 1);
    CHECK(a.bridge_points + sample_chordal(p).steps() == a.driving.steps());
    double worst = 0.0;
    for (std::size_t k = 1; k < pts.size(); ++k) worst = std::max(worst, std::abs(pts[k] - pts[k - 1]));
    CHECK(worst <= 0.02);
    for (const cplx z : pts) CHECK(z.imag() >= 0.0);
    // the refined driving function passes through the original grid values
    const DrivingPath base = sample_chordal(p);
    std::size_t j = 0;
    for (std::size_t k = 0; k < base.times().size(); ++k) {
        while (a.driving.times()[j] < base.times()[k]) ++j;
        CHECK(a.driving.times()[j] == base.times()[k]);
        CHECK(a.driving.values()[j] == base.values()[k]);
    }
    // tracing the refined driving from scratch gives the same points
    const TraceSample again = trace(a.driving);
    double diff = 0.0;
    for (std::size_t k = 0; k < pts.size(); ++k) diff = std::max(diff, std::abs(again.points[k] - pts[k]));
    CHECK(diff < 1e-12);
}

TEST_CASE("two-SLE drift is antisymmetric") {
    TwoSleState s;
    s.x1 = -1.0;
    s.x2 = 1.0;
    s.delta = 1.0;
    CHECK(two_sle_drift(s, 2.0, 1) == Approx(-1.0));
    CHECK(two_sle_drift(s, 2.0, 2) == Approx(1.0));
}

// With equal speeds the gap is a Bessel process of dimension 1 + 2 Delta + 4/kappa:
// dimension >= 2 never collides, dimension < 2 always does.
TEST_CASE("two-SLE collisions follow the Bessel dimension of the gap") {
    auto collisions = [](double kappa, double delta) {
        int c = 0;
        for (int i = 0; i < 200; ++i) {
            Rng r = Rng::substream(1, static_cast<std::uint64_t>(i));
            TwoSleState s;
            s.delta = delta;
            c += two_sle_run(s, kappa, 100.0, 1e-2, r).collided ? 1 : 0;
        }
        return c;
    };
    SUBCASE("Delta = 2/kappa: dimension 1 + 8/kappa, no collision") {
        CHECK(collisions(2.0, 1.0) == 0);
        CHECK(collisions(4.0, 0.5) == 0);
    }
    SUBCASE("Delta = (kappa - 6)/kappa at kappa = 2: dimension -1, collision") {
        CHECK(collisions(2.0, -2.0) == 200);
    }
}

TEST_CASE("two-SLE step reports collision below the threshold") {
    TwoSleState s;
    s.x1 = 0.0;
    s.x2 = 5e-5;
    Rng r(3);
    const TwoSleState next = two_sle_step(s, 2.0, 1e-6, r);
    CHECK(next.collided);
}
