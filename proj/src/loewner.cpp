#include "loewner_lab/loewner.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

#include "loewner_lab/errors.hpp"

namespace loewner_lab {

namespace {

using detail::upper_root;

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// min over f in [f0, f1] of |w*f - 1| and the minimizing f (w scaled along its ray).
std::pair<double, double> closest_to_one(cplx w, double f0, double f1) {
    const double a = std::abs(w);
    if (a == 0.0) return {1.0, f0};
    const double c = w.real() / a;  // cos of the ray angle
    double f = std::clamp(c / a, std::min(f0, f1), std::max(f0, f1));
    return {std::abs(w * f - 1.0), f};
}

// Dormand-Prince 5(4) on dz/ds = sign * V(z - xi) over [0, span].
struct FlowOutcome {
    cplx z;
    bool hit = false;
    double s_hit = 0.0;
};

FlowOutcome integrate_flow(const Geometry& g, cplx z, double xi, double span, bool forward,
                           const LoewnerOptions& opt) {
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    const double sign = forward ? 1.0 : -1.0;
    const double guard = 10.0 * opt.eps_swallow;
    auto near = [&](cplx p) { return forward && std::norm(p - xi) / 4.0 < guard; };
    auto f = [&](cplx p) { return sign * loewner_velocity(g, p - xi); };

    FlowOutcome out{z};
    double s = 0.0;
    double h = span;
    cplx k1 = f(z);
    int budget = 200000;
    while (s < span) {
        if (forward && std::norm(out.z - xi) / 4.0 < opt.eps_swallow) {
            out.hit = true;
            out.s_hit = s;
            return out;
        }
        if (--budget < 0) throw StepFailure("Loewner flow: step budget exhausted");
        h = std::min(h, span - s);
        const cplx y = out.z;
        const cplx p2 = y + h * a21 * k1;
        const cplx k2 = f(p2);
        const cplx p3 = y + h * (a31 * k1 + a32 * k2);
        const cplx k3 = f(p3);
        const cplx p4 = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
        const cplx k4 = f(p4);
        const cplx p5 = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        const cplx k5 = f(p5);
        const cplx p6 = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        const cplx k6 = f(p6);
        const cplx y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const cplx k7 = f(y5);
        const bool bad = !finite(y5) || !finite(k7) || near(p2) || near(p3) || near(p4) ||
                         near(p5) || near(p6) || near(y5);
        if (bad) {
            h *= 0.25;
            if (h < 1e-18 * std::max(1.0, span)) {
                if (near(out.z) || near(y5)) {
                    out.hit = true;
                    out.s_hit = s;
                    return out;
                }
                throw StepFailure("Loewner flow: step size underflow");
            }
            continue;
        }
        const cplx err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        const double scale = opt.atol + opt.rtol * std::max(std::abs(y), std::abs(y5));
        const double ratio = std::abs(err) / scale;
        if (ratio <= 1.0) {
            s += h;
            out.z = y5;
            k1 = k7;
            const double grow = ratio == 0.0 ? 5.0 : std::min(5.0, 0.9 * std::pow(ratio, -0.2));
            h *= grow;
        } else {
            h *= std::max(0.1, 0.9 * std::pow(ratio, -0.2));
            if (h < 1e-18 * std::max(1.0, span)) throw StepFailure("Loewner flow: tolerance not met");
        }
    }
    if (forward && std::norm(out.z - xi) / 4.0 < opt.eps_swallow) {
        out.hit = true;
        out.s_hit = span;
    }
    return out;
}

// Picks, among +-c shifted by whole periods, the representative in the
// domain sheet (Im >= 0) nearest to the previous position v.
cplx pick_radial(cplx c, cplx v) {
    cplx cand = (c.imag() > 0.0) ? c : (c.imag() < 0.0 ? -c : c);
    if (c.imag() == 0.0) {
        const double vr = std::remainder(v.real(), 2.0 * M_PI);
        if ((vr < 0.0) != (cand.real() < 0.0)) cand = -cand;
    }
    const double k = std::round((v.real() - cand.real()) / (2.0 * M_PI));
    return cand + 2.0 * M_PI * k;
}

cplx pick_dipolar(cplx c, cplx v) {
    if (c.imag() > 0.0) return c;
    if (c.imag() < 0.0) return -c;
    return (v.real() < 0.0) == (c.real() < 0.0) ? c : -c;
}

}  // namespace

const char* geometry_name(GeometryKind kind) {
    switch (kind) {
        case GeometryKind::chordal: return "chordal";
        case GeometryKind::radial: return "radial";
        case GeometryKind::dipolar: return "dipolar";
    }
    return "unknown";
}

DrivingPath::DrivingPath(std::vector<double> times, std::vector<double> values, Geometry geometry)
    : times_(std::move(times)), values_(std::move(values)), geometry_(geometry) {
    if (times_.empty() || times_.size() != values_.size())
        throw InvalidArgument("DrivingPath: times and values must be nonempty and of equal length");
    if (times_.front() != 0.0) throw InvalidArgument("DrivingPath: t_0 must be 0");
    for (std::size_t k = 1; k < times_.size(); ++k)
        if (!(times_[k] > times_[k - 1]))
            throw InvalidArgument("DrivingPath: times must be strictly increasing");
    for (double v : values_)
        if (!std::isfinite(v)) throw InvalidArgument("DrivingPath: values must be finite");
    if (!(geometry_.scale > 0.0)) throw InvalidArgument("DrivingPath: geometry scale must be positive");
}

SwallowResult chordal_forward_step(cplx z, double xi, double dt, double eps_swallow) {
    const cplx h = z - xi;
    const cplx a = h * h;
    // |h(s)|^2 = |a + 4s|; its minimum over the step decides absorption.
    const double s_star = std::clamp(-a.real() / 4.0, 0.0, dt);
    const double closest = std::abs(a + 4.0 * s_star);
    SwallowResult r;
    if (closest / 4.0 < eps_swallow) {
        r.swallowed = true;
        r.tau = s_star;
        r.value = xi;
        return r;
    }
    r.value = xi + upper_root(a + 4.0 * dt, h);
    return r;
}

cplx loewner_velocity(const Geometry& g, cplx h) {
    switch (g.kind) {
        case GeometryKind::chordal: return 2.0 / h;
        case GeometryKind::radial: return (2.0 / g.scale) / std::tan(h / g.scale);
        case GeometryKind::dipolar: return (1.0 / g.scale) / std::tanh(h / (2.0 * g.scale));
    }
    return {};
}

cplx exact_flow_step(const Geometry& g, cplx z, double xi, double dt, bool forward) {
    switch (g.kind) {
        case GeometryKind::chordal: {
            if (forward) return chordal_forward_step(z, xi, dt, 0.0).value;
            return chordal_slit_step(z, xi, dt);
        }
        case GeometryKind::radial: {
            const double L = g.scale;
            const cplx v = (z - xi) / L;
            const double f = std::exp((forward ? -2.0 : 2.0) * dt / (L * L));
            const cplx c = std::acos(std::cos(v) * f);
            return xi + L * pick_radial(c, v);
        }
        case GeometryKind::dipolar: {
            const double D = g.scale;
            const cplx v = (z - xi) / (2.0 * D);
            // sinh^2 form of cosh(v') = cosh(v) e^s; keeps relative accuracy as v -> 0.
            const double s = (forward ? 1.0 : -1.0) * dt / (2.0 * D * D);
            const cplx sh = std::sinh(v);
            const cplx c = std::asinh(std::sqrt(sh * sh * std::exp(2.0 * s) + std::expm1(2.0 * s)));
            cplx w = pick_dipolar(c, v);
            // On the far edge asinh cannot tell x + i pi/2 from -x + i pi/2.
            if (std::abs(w.imag() - M_PI / 2.0) < 1e-12 && (w.real() < 0.0) != (v.real() < 0.0))
                w = cplx(-w.real(), w.imag());
            return xi + 2.0 * D * w;
        }
    }
    return z;
}

SwallowResult flow_step(const Geometry& g, cplx z, double xi, double dt, bool forward,
                        const LoewnerOptions& opt) {
    SwallowResult r;
    if (g.kind == GeometryKind::chordal) {
        if (forward) return chordal_forward_step(z, xi, dt, opt.eps_swallow);
        r.value = chordal_slit_step(z, xi, dt);
        return r;
    }
    if (opt.integrator == Integrator::closed_form) {
        if (forward) {
            // Along the exact flow cos/cosh of the rescaled h moves on a ray,
            // and h -> 0 exactly when that value reaches 1.
            const double L = g.scale;
            double closest, f_star, weight;
            if (g.kind == GeometryKind::radial) {
                const cplx w = std::cos((z - xi) / L);
                std::tie(closest, f_star) = closest_to_one(w, std::exp(-2.0 * dt / (L * L)), 1.0);
                weight = 2.0 * L * L;
                if (weight * closest / 4.0 < opt.eps_swallow) {
                    r.swallowed = true;
                    r.tau = -std::log(f_star) * L * L / 2.0;
                    r.value = xi;
                    return r;
                }
            } else {
                const cplx w = std::cosh((z - xi) / (2.0 * L));
                std::tie(closest, f_star) = closest_to_one(w, 1.0, std::exp(dt / (2.0 * L * L)));
                weight = 8.0 * L * L;
                if (weight * closest / 4.0 < opt.eps_swallow) {
                    r.swallowed = true;
                    r.tau = std::log(f_star) * 2.0 * L * L;
                    r.value = xi;
                    return r;
                }
            }
        }
        r.value = exact_flow_step(g, z, xi, dt, forward);
        return r;
    }
    const FlowOutcome o = integrate_flow(g, z, xi, dt, forward, opt);
    r.value = o.hit ? cplx(xi) : o.z;
    r.swallowed = o.hit;
    r.tau = o.s_hit;
    return r;
}

void chordal_trace_points(const std::vector<double>& ts, const std::vector<double>& xs, double eps_lift,
                          std::vector<cplx>& points, std::size_t first) {
    const std::size_t n = ts.size() - 1;
    points.resize(n + 1);
    points[0] = cplx(xs[0], 0.0);
    constexpr std::size_t G = 8;
    for (std::size_t k0 = std::max<std::size_t>(first, 1); k0 <= n; k0 += G) {
        const std::size_t b = std::min(G, n + 1 - k0);
        cplx w[G];
        // lane i starts at its own tip and catches up to the group's first index
        for (std::size_t i = 0; i < b; ++i) {
            const std::size_t k = k0 + i;
            w[i] = cplx(xs[k], eps_lift);
            for (std::size_t j = k; j >= k0; --j) w[i] = chordal_slit_step(w[i], xs[j], ts[j] - ts[j - 1]);
        }
        for (std::size_t j = k0 - 1; j >= 1; --j) {
            const double xj = xs[j], dj = ts[j] - ts[j - 1];
            for (std::size_t i = 0; i < G; ++i) w[i] = chordal_slit_step(w[i], xj, dj);
        }
        for (std::size_t i = 0; i < b; ++i) points[k0 + i] = w[i].imag() < 0.0 ? cplx(w[i].real(), 0.0) : w[i];
    }
}

TraceSample trace(const DrivingPath& d, const LoewnerOptions& opt) {
    const auto& ts = d.times();
    const auto& xs = d.values();
    const std::size_t n = d.steps();
    TraceSample out;
    out.geometry = d.geometry();
    out.times = ts;
    const Geometry& g = d.geometry();
    if (g.kind == GeometryKind::chordal) {
        chordal_trace_points(ts, xs, opt.eps_lift, out.points);
        return out;
    }
    out.points.resize(n + 1);
    out.points[0] = cplx(xs[0], 0.0);
    for (std::size_t k = 1; k <= n; ++k) {
        cplx p(xs[k], opt.eps_lift);
        for (std::size_t j = k; j >= 1; --j) {
            const double dt = ts[j] - ts[j - 1];
            p = flow_step(g, p, xs[j], dt, false, opt).value;
        }
        if (g.kind != GeometryKind::radial && p.imag() < 0.0) p = cplx(p.real(), 0.0);
        out.points[k] = p;
    }
    return out;
}

SwallowResult forward_map(const DrivingPath& d, cplx z, double T, const LoewnerOptions& opt) {
    const auto& ts = d.times();
    const auto& xs = d.values();
    if (T < 0.0 || T > ts.back() * (1.0 + 1e-12))
        throw InvalidArgument("forward_map: T must lie within the driving grid");
    SwallowResult cur;
    cur.value = z;
    for (std::size_t j = 1; j < ts.size() && ts[j - 1] < T; ++j) {
        const double dt = std::min(ts[j], T) - ts[j - 1];
        if (dt <= 0.0) break;
        const SwallowResult s = flow_step(d.geometry(), cur.value, xs[j], dt, true, opt);
        if (s.swallowed) {
            SwallowResult r = s;
            r.tau = ts[j - 1] + s.tau;
            return r;
        }
        cur.value = s.value;
    }
    return cur;
}

double conformal_radius(const DrivingPath& d, cplx z0, double T, const LoewnerOptions& opt) {
    if (d.geometry().kind != GeometryKind::chordal)
        throw InvalidArgument("conformal_radius: chordal driving path required");
    if (!(z0.imag() > 0.0)) throw InvalidArgument("conformal_radius: z0 must lie in the upper half plane");
    const auto& ts = d.times();
    const auto& xs = d.values();
    if (T < 0.0 || T > ts.back() * (1.0 + 1e-12))
        throw InvalidArgument("conformal_radius: T must lie within the driving grid");
    cplx z = z0;
    cplx deriv = 1.0;
    double xi_T = xs[0];
    for (std::size_t j = 1; j < ts.size() && ts[j - 1] < T; ++j) {
        const double dt = std::min(ts[j], T) - ts[j - 1];
        if (dt <= 0.0) break;
        const SwallowResult s = chordal_forward_step(z, xs[j], dt, opt.eps_swallow);
        if (s.swallowed) throw Swallowed("conformal_radius: point swallowed", ts[j - 1] + s.tau);
        // d/dz [xi + sqrt((z-xi)^2 + 4dt)] = (z - xi)/(g - xi)
        deriv *= (z - xs[j]) / (s.value - xs[j]);
        z = s.value;
        xi_T = xs[j];
    }
    const cplx h = z - xi_T;
    return std::abs(2.0 * h.imag() / deriv);
}

}  // namespace loewner_lab
