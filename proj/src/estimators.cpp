#include "loewner_lab/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_set>

#include "loewner_lab/errors.hpp"

namespace loewner_lab {

using cplx = std::complex<double>;

// ---------------------------------------------------------------- fits

FitReport fit_loglog(const std::vector<std::pair<double, double>>& points, const std::vector<double>& errors) {
    const std::size_t n = points.size();
    if (n < 3) throw DegenerateFit("fit: need at least 3 points");
    double mx = 0.0, my = 0.0;
    for (const auto& [x, y] : points) {
        if (!std::isfinite(x) || !std::isfinite(y)) throw InvalidArgument("fit: non-finite point");
        mx += x;
        my += y;
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& [x, y] : points) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if (!(sxx > 0.0)) throw DegenerateFit("fit: all sizes equal");

    FitReport r;
    r.points = points;
    r.exponent = sxy / sxx;
    r.intercept = my - r.exponent * mx;
    double ssr = 0.0;
    for (const auto& [x, y] : points) {
        const double e = y - r.intercept - r.exponent * x;
        ssr += e * e;
    }
    r.r_squared = syy > 0.0 ? 1.0 - ssr / syy : 1.0;

    const bool propagated = errors.size() == n &&
                            std::all_of(errors.begin(), errors.end(), [](double e) { return e > 0.0; });
    if (propagated) {
        r.point_errors = errors;
        double var = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double w = (points[i].first - mx) / sxx;
            var += w * w * errors[i] * errors[i];
        }
        r.std_error = std::sqrt(var);
    } else {
        r.point_errors.assign(n, 0.0);
        r.std_error = std::sqrt(std::max(0.0, ssr / static_cast<double>(n - 2)) / sxx);
    }
    return r;
}

FitReport fit_dimension(const std::vector<std::pair<double, double>>& samples) {
    std::map<double, std::vector<double>> by_size;
    for (const auto& [L, S] : samples) {
        if (!(L > 0.0) || !std::isfinite(L)) throw InvalidArgument("fit_dimension: sizes must be positive");
        if (!std::isfinite(S)) throw InvalidArgument("fit_dimension: non-finite statistic");
        by_size[L].push_back(S);
    }
    if (by_size.size() < 3) throw DegenerateFit("fit_dimension: need at least 3 distinct sizes");

    std::vector<std::pair<double, double>> pts;
    std::vector<double> errs;
    bool replicated = true;
    for (const auto& [L, v] : by_size) {
        double m = 0.0;
        for (double s : v) m += s;
        m /= static_cast<double>(v.size());
        if (!(m > 0.0)) throw InvalidArgument("fit_dimension: mean statistic must be positive");
        pts.emplace_back(std::log(L), std::log(m));
        if (v.size() < 2) {
            replicated = false;
            errs.push_back(0.0);
            continue;
        }
        double ss = 0.0;
        for (double s : v) ss += (s - m) * (s - m);
        const double sem = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
        errs.push_back(sem / m);  // delta method for log of the mean
    }
    return fit_loglog(pts, replicated ? errs : std::vector<double>{});
}

// ---------------------------------------------------------------- Monte Carlo

double McEstimate::sigma() const {
    if (trials == 0) return 0.0;
    return std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(trials));
}

McEstimate wilson_estimate(std::uint64_t successes, std::uint64_t trials, double z) {
    if (trials == 0) throw InvalidArgument("wilson_estimate: no trials");
    if (successes > trials) throw InvalidArgument("wilson_estimate: successes exceed trials");
    McEstimate e;
    e.successes = successes;
    e.trials = trials;
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    e.p_hat = p;
    const double z2 = z * z;
    const double centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    const double half = z / (1.0 + z2 / n) * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
    e.ci_low = std::clamp(centre - half, 0.0, p);
    e.ci_high = std::clamp(centre + half, p, 1.0);
    return e;
}

// ---------------------------------------------------------------- box counting

namespace {

struct CellHash {
    std::size_t operator()(const std::pair<long long, long long>& c) const noexcept {
        return static_cast<std::size_t>(Rng::mix64(static_cast<std::uint64_t>(c.first) * 0x9E3779B97F4A7C15ULL ^
                                                   static_cast<std::uint64_t>(c.second)));
    }
};

}  // namespace

std::vector<double> box_count(const std::vector<cplx>& points, const std::vector<double>& epsilons, bool polyline) {
    std::vector<double> out;
    out.reserve(epsilons.size());
    for (double eps : epsilons) {
        if (!(eps > 0.0)) throw InvalidArgument("box_count: scales must be positive");
        std::unordered_set<std::pair<long long, long long>, CellHash> cells;
        auto add = [&](cplx p) {
            cells.emplace(static_cast<long long>(std::floor(p.real() / eps)),
                          static_cast<long long>(std::floor(p.imag() / eps)));
        };
        for (std::size_t i = 0; i < points.size(); ++i) {
            add(points[i]);
            if (!polyline || i + 1 == points.size()) continue;
            const cplx a = points[i], b = points[i + 1];
            const int pieces = static_cast<int>(std::ceil(std::abs(b - a) / (0.25 * eps)));
            for (int k = 1; k < pieces; ++k) add(a + (b - a) * (static_cast<double>(k) / pieces));
        }
        out.push_back(static_cast<double>(cells.size()));
    }
    return out;
}

FitReport trace_dimension(const std::vector<std::vector<cplx>>& traces, const std::vector<double>& epsilons) {
    if (epsilons.size() < 3) throw DegenerateFit("trace_dimension: need at least 3 scales");
    const auto [lo, hi] = std::minmax_element(epsilons.begin(), epsilons.end());
    if (*hi < 10.0 * *lo * (1.0 - 1e-12)) throw DegenerateFit("trace_dimension: scales must span a decade");
    if (traces.empty()) throw InvalidArgument("trace_dimension: no traces");
    std::vector<std::pair<double, double>> samples;
    for (const auto& tr : traces) {
        const auto counts = box_count(tr, epsilons);
        for (std::size_t k = 0; k < epsilons.size(); ++k) samples.emplace_back(1.0 / epsilons[k], counts[k]);
    }
    return fit_dimension(samples);
}

// ---------------------------------------------------------------- dipolar classification

const char* outcome_name(DipolarOutcome o) {
    switch (o) {
        case DipolarOutcome::left: return "left";
        case DipolarOutcome::right: return "right";
        case DipolarOutcome::inside: return "inside";
    }
    return "unknown";
}

DipolarOutcome classify_dipolar_outcome(const DrivingPath& d, cplx z, const DipolarClassifyOptions& opt) {
    const Geometry& g = d.geometry();
    if (g.kind != GeometryKind::dipolar) throw InvalidArgument("classify_dipolar_outcome: path must be dipolar");
    if (z.imag() < 0.0 || z.imag() > M_PI * g.scale) throw InvalidArgument("classify_dipolar_outcome: z outside the strip");
    const double T = std::min(opt.horizon, d.final_time());
    const SwallowResult r = forward_map(d, z, T, opt.loewner);
    if (r.swallowed) return DipolarOutcome::inside;
    const auto& ts = d.times();
    const std::size_t k = static_cast<std::size_t>(std::lower_bound(ts.begin(), ts.end(), T) - ts.begin());
    const double xi = d.values()[std::min(k, ts.size() - 1)];
    const double x = (r.value.real() - xi) / g.scale;
    if (x < -opt.threshold) return DipolarOutcome::left;
    if (x > opt.threshold) return DipolarOutcome::right;
    throw Undecided("classify_dipolar_outcome: point has not escaped by the time horizon");
}

// ---------------------------------------------------------------- point tracking

namespace {

// Forward chordal slit map for constant driving, root in the closed upper
// half plane; real points keep their side of xi.
inline cplx slit_forward(cplx z, double xi, double dt) {
    const cplx h = z - xi;
    cplx s = std::sqrt(h * h + 4.0 * dt);
    if (s.imag() < 0.0 || (s.imag() == 0.0 && (s.real() < 0.0) != (h.real() < 0.0))) s = -s;
    return xi + s;
}

inline double real_forward(double h, double dt) {
    const double s = std::sqrt(h * h + 4.0 * dt);
    return h < 0.0 ? -s : s;
}

void check_kappa(double kappa, const char* who) {
    if (!(kappa > 0.0) || !std::isfinite(kappa)) throw InvalidArgument(std::string(who) + ": kappa must be positive");
}

}  // namespace

namespace {

// Runs dz = mu(z) ds - sqrt(kappa) dW until z leaves [-lo, hi]; true when
// it leaves below. lo and hi are set so that the chance of coming back
// from there (drifted Brownian motion with the limiting drifts) is below tol.
template <class Drift>
bool logit_exit_low(double z, double kappa, double mu_lo, double mu_hi, Drift&& mu, Rng& rng,
                    const TrackingOptions& opt) {
    const double log_tol = -std::log(opt.return_tol);
    auto level = [&](double drift) { return drift > 0.0 ? kappa * log_tol / (2.0 * drift) + 5.0 : 1e300; };
    const double lo = level(-mu_lo), hi = level(mu_hi);
    const double ds = opt.step_factor, sd = std::sqrt(kappa * ds);
    for (std::uint64_t step = 0; step < opt.max_steps; ++step) {
        if (z < -lo) return true;
        if (z > hi) return false;
        z += mu(z) * ds - sd * rng.normal();
    }
    throw Undecided("logit_exit_low: step budget exhausted");
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

bool hitting_event(double kappa, double x, double X, Rng& rng, const TrackingOptions& opt) {
    check_kappa(kappa, "hitting_event");
    if (!(kappa < 8.0)) throw DomainError("hitting_event: needs kappa < 8");
    if (!(0.0 < x && x < X)) throw InvalidArgument("hitting_event: need 0 < x < X");
    // r = h(x)/h(X) with h = g_t - xi. In the clock ds = dt / h(x)^2 the
    // logit z of r is a diffusion with unit-order drift 2 - kappa/2 + 2r.
    // r -> 0 (x swallowed alone, the curve touched [x, X]) is z -> -inf.
    const double base = 2.0 - 0.5 * kappa;
    return logit_exit_low(std::log(x / (X - x)), kappa, base, base + 2.0,
                          [&](double z) { return base + 2.0 * sigmoid(z); }, rng, opt);
}

bool cardy_event(double kappa, double a, double b, Rng& rng, const TrackingOptions& opt) {
    check_kappa(kappa, "cardy_event");
    if (!(kappa < 8.0)) throw DomainError("cardy_event: needs kappa < 8");
    if (!(a < 0.0 && 0.0 < b)) throw InvalidArgument("cardy_event: need a < 0 < b");
    // w = -h(a) / (h(b) - h(a)); in a suitable clock its logit has drift
    // (2 - kappa/2)(1 - 2w). w -> 0 means a is swallowed first.
    const double base = 2.0 - 0.5 * kappa;
    return logit_exit_low(std::log(-a / b), kappa, base, -base,
                          [&](double z) { return base * (1.0 - 2.0 * sigmoid(z)); }, rng, opt);
}

bool restriction_avoids(double kappa, double x, double r, Rng& rng, const RestrictionOptions& opt) {
    check_kappa(kappa, "restriction_avoids");
    if (kappa > 4.0) throw DomainError("restriction_avoids: needs a simple curve, kappa <= 4");
    if (!(r > 0.0 && x > r)) throw InvalidArgument("restriction_avoids: need x > r > 0");
    if (opt.initial_points < 3) throw InvalidArgument("restriction_avoids: need at least 3 arc points");

    struct Marked {
        double phi;  // arc angle, 0 at x + r and pi at x - r
        cplx h;      // current image minus the driving value
    };
    std::vector<std::pair<double, double>> history;  // (xi, dt) per step
    auto arc_point = [&](double phi) {
        if (phi == 0.0) return cplx(x + r, 0.0);
        if (phi == M_PI) return cplx(x - r, 0.0);
        return cplx(x + r * std::cos(phi), r * std::sin(phi));
    };
    double xi = 0.0;
    auto replay = [&](double phi) {
        cplx z = arc_point(phi);
        for (const auto& [xk, dk] : history) z = slit_forward(z, xk, dk);
        return z - xi;
    };

    std::vector<Marked> pts;
    pts.reserve(static_cast<std::size_t>(opt.initial_points) * 4);
    for (int i = 0; i < opt.initial_points; ++i) {
        const double phi = (i == opt.initial_points - 1) ? M_PI : M_PI * i / (opt.initial_points - 1);
        pts.push_back({phi, arc_point(phi)});
    }
    const double min_gap = 1e-13;
    const double sk = std::sqrt(kappa);

    for (std::uint64_t step = 0; step < opt.max_steps; ++step) {
        // refine where the image polygon is coarse compared to its distance to xi
        for (std::size_t i = 0; i + 1 < pts.size();) {
            const double gap = std::abs(pts[i + 1].h - pts[i].h);
            const double near = std::min(std::abs(pts[i].h), std::abs(pts[i + 1].h));
            if (gap > opt.refine_ratio * near && pts[i + 1].phi - pts[i].phi > min_gap &&
                pts.size() < opt.max_points) {
                const double phi = 0.5 * (pts[i].phi + pts[i + 1].phi);
                pts.insert(pts.begin() + static_cast<std::ptrdiff_t>(i + 1), Marked{phi, replay(phi)});
                continue;
            }
            ++i;
        }

        double dmin = std::abs(pts[0].h);
        double lo_x = pts[0].h.real(), hi_x = lo_x, lo_y = pts[0].h.imag(), hi_y = lo_y;
        for (const auto& p : pts) {
            dmin = std::min(dmin, std::abs(p.h));
            lo_x = std::min(lo_x, p.h.real());
            hi_x = std::max(hi_x, p.h.real());
            lo_y = std::min(lo_y, p.h.imag());
            hi_y = std::max(hi_y, p.h.imag());
        }
        const double diam = std::hypot(hi_x - lo_x, hi_y - lo_y);
        if (dmin < opt.eps_hit * diam) return false;
        if (diam < opt.escape_ratio * dmin) return true;

        const double dt = opt.step_factor * dmin * dmin;
        const double dxi = sk * std::sqrt(dt) * rng.normal();
        xi += dxi;
        history.emplace_back(xi, dt);
        for (auto& p : pts) {
            const cplx h = p.h - dxi;
            cplx s = std::sqrt(h * h + 4.0 * dt);
            if (s.imag() < 0.0 || (s.imag() == 0.0 && (s.real() < 0.0) != (h.real() < 0.0))) s = -s;
            p.h = s;
        }
    }
    throw Undecided("restriction_avoids: step budget exhausted");
}

std::vector<DipolarCounts> dipolar_outcome_map(double kappa, const std::vector<cplx>& zs, std::uint64_t n_paths,
                                               std::uint64_t seed, int threads, const DipolarClassifyOptions& cls,
                                               double step_factor) {
    check_kappa(kappa, "dipolar_outcome_map");
    for (cplx z : zs)
        if (z.imag() < 0.0 || z.imag() > M_PI) throw InvalidArgument("dipolar_outcome_map: z outside the strip");
    // Absorption once log|h| < -depth. For kappa > 4 log|h| near the
    // driving point drifts down at rate kappa/2 - 2 against noise kappa, so
    // the chance of returning from -depth is exp(-(kappa - 4) depth / kappa).
    // For kappa <= 4 no point is swallowed; the walk continues and a point
    // that gets absurdly close is settled by the side it is on.
    const double depth = kappa > 4.0 ? std::min(600.0, kappa * 7.0 * std::log(10.0) / (kappa - 4.0)) : 600.0;
    const double side = std::max(cls.threshold, 0.5 * kappa * 7.0 * std::log(10.0));
    const std::size_t m = zs.size();
    std::vector<std::uint8_t> label(n_paths * m, 3);  // 0 left, 1 right, 2 inside, 3 undecided

    parallel_for(n_paths, threads, [&](std::size_t path) {
        Rng rng = Rng::substream(seed, path);
        std::vector<cplx> h(zs);  // g_t(z) - xi_t
        std::vector<std::uint8_t> alive(m, 1);
        std::size_t n_alive = m;
        double t = 0.0;
        const double sk = std::sqrt(kappa);
        std::uint8_t* out = &label[path * m];
        auto settle = [&](std::size_t i) {
            std::uint8_t v = 3;
            if (std::log(std::abs(h[i])) < -depth) v = kappa > 4.0 ? 2 : (h[i].real() < 0.0 ? 0 : 1);
            else if (h[i].real() < -side) v = 0;
            else if (h[i].real() > side) v = 1;
            if (v != 3) {
                out[i] = v;
                alive[i] = 0;
                --n_alive;
            }
        };
        for (std::size_t i = 0; i < m; ++i) settle(i);
        while (n_alive > 0 && t < cls.horizon) {
            double dmin = 1e300;
            for (std::size_t i = 0; i < m; ++i)
                if (alive[i]) dmin = std::min(dmin, std::abs(h[i]));
            const double dt = std::min({step_factor * dmin * dmin, 0.25, cls.horizon - t});
            const double dB = std::sqrt(dt) * rng.normal();
            t += dt;
            for (std::size_t i = 0; i < m; ++i) {
                if (!alive[i]) continue;
                // Euler step for log h under dh = coth(h/2) dt - sqrt(kappa) dB;
                // its coefficients stay bounded as h -> 0 in the clock dt/|h|^2.
                const cplx hi = h[i];
                const cplx du = (1.0 / (hi * std::tanh(0.5 * hi)) - 0.5 * kappa / (hi * hi)) * dt - sk * dB / hi;
                cplx nh = hi * std::exp(du);
                nh.imag(std::clamp(nh.imag(), 0.0, M_PI));
                h[i] = nh;
                settle(i);
            }
        }
    });

    std::vector<DipolarCounts> counts(m);
    for (std::size_t p = 0; p < n_paths; ++p)
        for (std::size_t i = 0; i < m; ++i) {
            switch (label[p * m + i]) {
                case 0: ++counts[i].left; break;
                case 1: ++counts[i].right; break;
                case 2: ++counts[i].inside; break;
                default: ++counts[i].undecided; break;
            }
        }
    return counts;
}

}  // namespace loewner_lab
