#pragma once

#include <cmath>
#include <complex>
#include <vector>

namespace loewner_lab {

using cplx = std::complex<double>;

enum class GeometryKind { chordal, radial, dipolar };

// Reference domain of a Loewner chain. For radial the domain is the
// half-cylinder of circumference pi*scale (Lambda), for dipolar the strip
// of width pi*scale (Delta).
struct Geometry {
    GeometryKind kind = GeometryKind::chordal;
    double scale = 1.0;

    static Geometry chordal() { return {GeometryKind::chordal, 1.0}; }
    static Geometry radial(double lambda = 2.0) { return {GeometryKind::radial, lambda}; }
    static Geometry dipolar(double delta = 1.0) { return {GeometryKind::dipolar, delta}; }
};

const char* geometry_name(GeometryKind kind);

class DrivingPath {
public:
    DrivingPath() = default;
    DrivingPath(std::vector<double> times, std::vector<double> values,
                Geometry geometry = Geometry::chordal());

    const std::vector<double>& times() const { return times_; }
    const std::vector<double>& values() const { return values_; }
    const Geometry& geometry() const { return geometry_; }
    std::size_t steps() const { return times_.empty() ? 0 : times_.size() - 1; }
    double final_time() const { return times_.back(); }

    // Uniform grid t_k = k*T/n, values from a callable xi(t).
    template <class F>
    static DrivingPath from_function(F&& xi, double T, std::size_t n,
                                     Geometry g = Geometry::chordal()) {
        std::vector<double> ts(n + 1), vs(n + 1);
        for (std::size_t k = 0; k <= n; ++k) {
            ts[k] = (k == n) ? T : T * static_cast<double>(k) / static_cast<double>(n);
            vs[k] = xi(ts[k]);
        }
        return DrivingPath(std::move(ts), std::move(vs), g);
    }

private:
    std::vector<double> times_;
    std::vector<double> values_;
    Geometry geometry_;
};

struct TraceSample {
    std::vector<cplx> points;
    std::vector<double> times;
    Geometry geometry;
};

struct SwallowResult {
    cplx value{};
    bool swallowed = false;
    double tau = 0.0;  // capacity time of absorption when swallowed
};

enum class Integrator {
    adaptive_rk45,  // Dormand-Prince 5(4) on the Loewner ODE
    closed_form     // exact constant-driving increment (radial/dipolar)
};

struct LoewnerOptions {
    // A point counts as swallowed once |g - xi|^2 / 4, the capacity needed
    // by a vertical slit to reach it, drops below eps_swallow.
    double eps_swallow = 1e-6;
    double eps_lift = 1e-8;
    double rtol = 1e-11;
    double atol = 1e-13;
    Integrator integrator = Integrator::adaptive_rk45;
};

namespace detail {

// Root of q in the closed upper half plane; on the real axis the sign
// follows `side` so boundary points stay on their side of the tip.
// Written out in reals: this is the inner loop of the zipper.
inline cplx upper_root(cplx q, cplx side) {
    const double a = q.real(), b = q.imag();
    const double r = std::sqrt(a * a + b * b);
    // larger component from the non-cancelling sum, smaller by division;
    // selects instead of branches keep the zipper loop pipelined
    const double big = std::sqrt(0.5 * (r + std::abs(a)));
    const double small = big > 0.0 ? std::abs(b) / (2.0 * big) : 0.0;
    const double re = a >= 0.0 ? big : small;
    const double im = a >= 0.0 ? small : big;
    const double sign_src = b != 0.0 ? b : side.real();
    return {std::copysign(re, sign_src < 0.0 ? -1.0 : 1.0), im};
}

}  // namespace detail

// Inverse slit map: xi + sqrt((w - xi)^2 - 4 dt), root in the closed upper half plane.
inline cplx chordal_slit_step(cplx w, double xi, double dt) {
    const double x = w.real() - xi, y = w.imag();
    const cplx r = detail::upper_root(cplx(x * x - y * y - 4.0 * dt, 2.0 * x * y), cplx(x, y));
    return {xi + r.real(), r.imag()};
}

// Forward slit map g(z) = xi + sqrt((z - xi)^2 + 4 dt) with absorption test.
SwallowResult chordal_forward_step(cplx z, double xi, double dt, double eps_swallow = 1e-6);

// Vector field of dg/dt = V(g - xi) for each geometry.
cplx loewner_velocity(const Geometry& g, cplx h);

// One constant-driving increment of length dt for any geometry.
// forward = true advances g; forward = false applies the inverse map.
SwallowResult flow_step(const Geometry& g, cplx z, double xi, double dt, bool forward,
                        const LoewnerOptions& opt = {});

// Closed-form increments: cos(u/L) = cos(u0/L) exp(-2dt/L^2) for radial and
// cosh(u/2D) = cosh(u0/2D) exp(dt/2D^2) for dipolar, u = g - xi.
cplx exact_flow_step(const Geometry& g, cplx z, double xi, double dt, bool forward);

TraceSample trace(const DrivingPath& d, const LoewnerOptions& opt = {});

// Chordal trace points for k in [first, n] of a piecewise-constant driving
// function given by grid arrays; points[0..first) are left untouched.
// Points are traced in interleaved groups, which is several times faster
// than one dependency chain at a time.
void chordal_trace_points(const std::vector<double>& times, const std::vector<double>& values, double eps_lift,
                          std::vector<cplx>& points, std::size_t first = 1);

SwallowResult forward_map(const DrivingPath& d, cplx z, double T, const LoewnerOptions& opt = {});

// rho_T(z0) = |2 Im h_T(z0) / h_T'(z0)| with h = g - xi (chordal only).
double conformal_radius(const DrivingPath& d, cplx z0, double T, const LoewnerOptions& opt = {});

}  // namespace loewner_lab
