#pragma once

#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include "loewner_lab/errors.hpp"
#include "loewner_lab/loewner.hpp"
#include "loewner_lab/parallel.hpp"
#include "loewner_lab/rng.hpp"

namespace loewner_lab {

// ---------------------------------------------------------------- power-law fits

struct FitReport {
    double exponent = 0.0;
    double std_error = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::vector<std::pair<double, double>> points;  // (log size, log mean statistic)
    std::vector<double> point_errors;                // standard error of each log mean, 0 if unknown
};

// Groups (size, statistic) samples by size and fits log mean vs log size by
// ordinary least squares. When every size has at least two samples the
// slope error propagates the per-size standard errors; otherwise it is the
// residual-based OLS error. Throws DegenerateFit with fewer than 3 sizes.
FitReport fit_dimension(const std::vector<std::pair<double, double>>& samples);

// OLS on points that are already logarithmic, with optional per-point errors.
FitReport fit_loglog(const std::vector<std::pair<double, double>>& points,
                     const std::vector<double>& errors = {});

// Size sweep: `per_size[i]` samples of stat(size, rng) at sizes[i], each
// sample on its own substream so the result does not depend on `threads`.
template <class Stat>
FitReport dimension_sweep(const std::vector<int>& sizes, const std::vector<std::size_t>& per_size,
                          Stat&& stat, std::uint64_t seed, int threads = 0) {
    std::vector<std::pair<std::size_t, std::size_t>> jobs;
    for (std::size_t i = 0; i < sizes.size(); ++i)
        for (std::size_t k = 0; k < per_size.at(i); ++k) jobs.emplace_back(i, k);
    std::vector<std::pair<double, double>> samples(jobs.size());
    parallel_for(jobs.size(), threads, [&](std::size_t j) {
        const auto [i, k] = jobs[j];
        Rng rng = Rng::substream(seed ^ Rng::mix64(static_cast<std::uint64_t>(sizes[i])), k);
        samples[j] = {static_cast<double>(sizes[i]), static_cast<double>(stat(sizes[i], rng))};
    });
    return fit_dimension(samples);
}

// ---------------------------------------------------------------- Monte Carlo probabilities

struct McEstimate {
    std::uint64_t successes = 0;
    std::uint64_t trials = 0;
    double p_hat = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;

    double sigma() const;  // binomial standard error at p_hat
};

// Wilson score interval at the given normal quantile (1.96 for 95%).
McEstimate wilson_estimate(std::uint64_t successes, std::uint64_t trials, double z = 1.959963984540054);

// Trial i sees Rng::substream(seed, i).
template <class Event>
McEstimate mc_probability(Event&& event, std::uint64_t n_trials, std::uint64_t seed, int threads = 0) {
    if (n_trials < 1) throw InvalidArgument("mc_probability: n_trials must be >= 1");
    std::vector<std::uint8_t> hit(n_trials, 0);
    parallel_for(n_trials, threads, [&](std::size_t i) {
        Rng rng = Rng::substream(seed, i);
        hit[i] = event(rng) ? 1 : 0;
    });
    std::uint64_t s = 0;
    for (auto h : hit) s += h;
    return wilson_estimate(s, n_trials);
}

// ---------------------------------------------------------------- box counting

// Number of occupied grid cells of side eps for each eps. With polyline =
// true consecutive points are joined and segments are sampled at eps/4.
std::vector<double> box_count(const std::vector<std::complex<double>>& points,
                              const std::vector<double>& epsilons, bool polyline = true);

// Fits log N(eps) vs log(1/eps) over all traces; needs >= 3 scales over >= one decade.
FitReport trace_dimension(const std::vector<std::vector<std::complex<double>>>& traces,
                          const std::vector<double>& epsilons);

// ---------------------------------------------------------------- dipolar classification

enum class DipolarOutcome { left, right, inside };

const char* outcome_name(DipolarOutcome o);

struct DipolarClassifyOptions {
    double threshold = 8.0;   // in units of the strip scale Delta
    double horizon = 200.0;   // capacity time T
    LoewnerOptions loewner{};
};

// Runs the forward map of a dipolar path to min(horizon, final time):
// swallowed -> inside, Re h_T < -threshold -> left, > threshold -> right,
// otherwise Undecided.
DipolarOutcome classify_dipolar_outcome(const DrivingPath& d, std::complex<double> z,
                                        const DipolarClassifyOptions& opt = {});

// ---------------------------------------------------------------- two-point samplers
//
// For two real marked points, scale invariance reduces the pair of images
// under g_t - xi to one coordinate. After a random time change its logit is
// a diffusion with constant noise sqrt(kappa) and bounded drift, simulated
// by Euler steps; nothing is lost but the step error.

struct TrackingOptions {
    double step_factor = 1e-2;   // Euler step in the intrinsic clock
    double return_tol = 1e-9;    // stop once coming back is less likely than this
    std::uint64_t max_steps = 20000000;
};

// Chordal SLE (kappa < 8), 0 < x < X: whether the curve touches [x, X].
bool hitting_event(double kappa, double x, double X, Rng& rng, const TrackingOptions& opt = {});

// Chordal SLE (kappa < 8), a < 0 < b: whether a is swallowed before b.
bool cardy_event(double kappa, double a, double b, Rng& rng, const TrackingOptions& opt = {});

// ---------------------------------------------------------------- point-tracking samplers
//
// These follow only the images of a few marked points under one sampled
// driving function, on an adaptive grid dt = c * (distance to the driving
// point)^2. The Brownian path is sampled on that grid, and each interval uses
// the exact constant-driving map, so no trace is built.

struct RestrictionOptions {
    double step_factor = 2e-3;
    int initial_points = 64;   // on the arc, feet included
    double refine_ratio = 0.25;  // split a pair once its image gap exceeds this times its distance
    double eps_hit = 1e-6;     // hit once min |h| < eps_hit * image diameter
    double escape_ratio = 0.01;  // miss once image diameter < escape_ratio * distance
    std::size_t max_points = 20000;
    std::uint64_t max_steps = 20000000;
};

// Chordal SLE_kappa (kappa <= 4) and the half disc of radius r about x > r:
// true when the curve avoids it. The arc is tracked by marked points that
// are refined (by replaying the driving history) wherever the curve comes
// close, so the detection scale follows the curve down to eps_hit.
bool restriction_avoids(double kappa, double x, double r, Rng& rng, const RestrictionOptions& opt = {});

struct DipolarCounts {
    std::uint64_t left = 0, right = 0, inside = 0, undecided = 0;
    std::uint64_t total() const { return left + right + inside + undecided; }
};

// Dipolar SLE_kappa in the strip of width pi: classifies every z in `zs`
// against the same driving path, n_paths times. Far out h drifts away at unit
// speed against noise of variance kappa, so it comes back from distance L
// with probability exp(-2L/kappa); the side threshold used here is raised to
// make that below 1e-7 whatever cls.threshold says.
std::vector<DipolarCounts> dipolar_outcome_map(double kappa, const std::vector<std::complex<double>>& zs,
                                               std::uint64_t n_paths, std::uint64_t seed, int threads = 0,
                                               const DipolarClassifyOptions& cls = {},
                                               double step_factor = 3e-3);

}  // namespace loewner_lab
