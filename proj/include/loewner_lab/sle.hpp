#pragma once

#include <cstdint>

#include "loewner_lab/loewner.hpp"
#include "loewner_lab/rng.hpp"

namespace loewner_lab {

struct SleParams {
    double kappa = 6.0;
    double rho = 0.0;  // SLE(kappa, rho) only
    Geometry geometry = Geometry::chordal();
    double T = 1.0;
    double dt = 1e-3;
    std::uint64_t seed = 0;
};

void validate(const SleParams& p);

// xi_t = sqrt(kappa) B_t on the grid t_k = k*dt (last step shortened to hit T).
DrivingPath sample_chordal(const SleParams& p);
DrivingPath sample_radial(const SleParams& p);
DrivingPath sample_dipolar(const SleParams& p);

// U_t = sqrt(kappa) B_t + alpha t with alpha = rho - (kappa - 6)/2, strip geometry.
// Uses the same normal draws as sample_dipolar for a given seed.
DrivingPath sample_sle_kr(const SleParams& p);

double sle_kr_drift(double kappa, double rho);

struct AdaptiveTrace {
    DrivingPath driving;
    TraceSample trace;
    std::size_t bridge_points = 0;  // points added by refinement
};

// Chordal trace on the sample_chordal grid, refined where it is coarse in
// space: while two consecutive trace points are more than max_gap apart and
// their capacity interval exceeds min_dt, the Brownian path is bisected by
// a bridge draw and the new point is traced. Uniform capacity steps leave
// the fjords of the curve badly undersampled, which this corrects.
AdaptiveTrace adaptive_chordal_trace(const SleParams& p, double max_gap, double min_dt = 1e-12,
                                     std::size_t max_points = 2000000);

struct TwoSleState {
    double x1 = -0.5;
    double x2 = 0.5;
    double a1 = 0.5;
    double a2 = 0.5;
    double delta = 0.0;  // Z = (x2 - x1)^delta
    double t = 0.0;
    bool collided = false;
};

// Deterministic drift of driven point i (1 or 2) at the current state.
double two_sle_drift(const TwoSleState& s, double kappa, int i);

// One Euler-Maruyama step. dt is capped at 1e-4 * gap^2. Sets `collided`
// once the gap falls below eps_collide.
TwoSleState two_sle_step(const TwoSleState& s, double kappa, double dt, Rng& rng,
                         double eps_collide = 1e-4);

struct TwoSleOutcome {
    bool collided = false;
    double time = 0.0;
    double gap = 0.0;
    std::uint64_t steps = 0;
};

// Steps until collision or time T with the nominal step dt_max.
TwoSleOutcome two_sle_run(TwoSleState s, double kappa, double T, double dt_max, Rng& rng,
                          double eps_collide = 1e-4);

}  // namespace loewner_lab
