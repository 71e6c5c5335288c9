#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "loewner_lab/lattice.hpp"
#include "loewner_lab/rng.hpp"

namespace loewner_lab {

using cplx = std::complex<double>;

// ---------------------------------------------------------------- Laplacian growth

// f(w) = sum_{n=0}^{N} f_n w^{1-n} maps the exterior of the unit disc onto
// the exterior of the growing domain; f_0 = R > 0.
struct LgPolyState {
    std::vector<cplx> coeffs;
    double t = 0.0;

    int degree() const { return static_cast<int>(coeffs.size()) - 1; }
    double radius() const { return coeffs.front().real(); }
    cplx eval(cplx w) const;
    cplx derivative(cplx w) const;
};

struct LgOptions {
    double eps_cusp = 1e-3;  // stop once min |f'| / f_0 on the circle drops below this
    double rtol = 1e-12;
    double atol = 1e-14;
    int nodes = 0;  // circle quadrature nodes; 0 picks max(16 (N + 1), 256)
};

int lg_nodes(const LgPolyState& s, const LgOptions& opt = {});

struct ZnState {
    double R = 0.0;
    double beta = 0.0;
    double t = 0.0;
};

// Z_n-symmetric solution f = R w + f_n w^{1-n}, beta = (n-1) f_n / R, with
// d(R^2)/dt = 2 / (1 - beta^2) and beta = (R / R_c)^{n-2}; R(0) = R0.
ZnState lg_zn_evolve(int n, double Rc, double t, double R0 = 0.0, double eps_cusp = 1e-3);

// Closed form of the same dynamics: t(R) - t(R0) with t(R) = R^2 (1 - beta^2/(n-1)) / 2.
double lg_zn_time_at_beta(int n, double Rc, double beta, double R0 = 0.0);

// Cusp time (beta = 1) starting from R0.
double lg_zn_cusp_time(int n, double Rc, double R0 = 0.0);

LgPolyState lg_zn_state(int n, double R, double beta, double t = 0.0);

// Coefficient velocities from the linear hierarchy obtained by matching
// powers of w in Re[df/dt conj(w f')] = 1 on |w| = 1.
std::vector<cplx> lg_coefficient_rates(const LgPolyState& s);

// Same velocities from df/dt = w f'(w) H(w), where H is the Schwarz integral
// of |f'|^{-2} sampled on the circle. Used as an independent check.
std::vector<cplx> lg_coefficient_rates_schwarz(const LgPolyState& s, int nodes);

// min over the circle of |f'(w)| / f_0.
double lg_min_derivative(const LgPolyState& s, int nodes);

// Advances by dt with an adaptive Dormand-Prince integration of the
// hierarchy. Throws CuspReached if the cusp guard trips.
LgPolyState lg_general_step(const LgPolyState& s, double dt, const LgOptions& opt = {});

// I_k = (1/2pi) \oint u f'(u) conj(f(u)) / f(u)^{k+1} dtheta by the trapezoidal rule.
cplx lg_conserved(const LgPolyState& s, int k, const LgOptions& opt = {});

// pi * sum_n (1 - n) |f_n|^2
double lg_area(const LgPolyState& s);

// ---------------------------------------------------------------- Hastings-Levitov

// Elementary map gluing a bump of size ~ lambda onto the unit circle at angle theta.
cplx hl_bump_map(cplx w, double lambda, double theta);
cplx hl_bump_derivative(cplx w, double lambda, double theta);

struct HlCluster {
    std::vector<double> lambdas;
    std::vector<double> thetas;
    double alpha = 2.0;
    double lambda0 = 0.1;
    double log_capacity = 0.0;  // log F'(infinity) = -sum log cos(lambda_k)

    std::size_t size() const { return lambdas.size(); }
};

// F_(n) = f_1 o ... o f_n and log|F_(n)'(w)|.
cplx hl_map(const HlCluster& c, cplx w, std::size_t upto);
double hl_log_derivative(const HlCluster& c, cplx w, std::size_t upto);

// Appends `steps` bumps: theta uniform, lambda = lambda0 |F'(e^{i theta})|^{-alpha/2},
// capped at 1 so that each elementary map stays univalent.
void hl_grow(HlCluster& c, std::size_t steps, Rng& rng);
HlCluster hl_grow(HlCluster c, std::size_t steps, std::uint64_t seed);

std::vector<cplx> hl_boundary(const HlCluster& c, std::size_t m_points);

// ---------------------------------------------------------------- lattice DLA

struct DlaCluster {
    std::vector<Site> sites;  // attachment order, origin first
    std::size_t particle_count() const { return sites.empty() ? 0 : sites.size() - 1; }
};

struct DlaOptions {
    double launch_margin = 5.0;
    double jump_threshold = 4.0;  // long jumps once this far outside the bounding circle
    double kill_factor = 100.0;   // relaunch beyond kill_factor * launch radius
};

DlaCluster lattice_dla(std::size_t n_particles, Rng& rng, const DlaOptions& opt = {});
DlaCluster lattice_dla(std::size_t n_particles, std::uint64_t seed, const DlaOptions& opt = {});

// Radius of gyration of the first `count` sites (all when count = 0).
double radius_of_gyration(const std::vector<Site>& sites, std::size_t count = 0);

}  // namespace loewner_lab
