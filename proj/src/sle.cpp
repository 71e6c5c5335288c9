#include "loewner_lab/sle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <vector>

#include "loewner_lab/errors.hpp"

namespace loewner_lab {

namespace {

std::vector<double> grid(double T, double dt) {
    const double n_real = std::ceil(T / dt - 1e-9);
    const auto n = static_cast<std::size_t>(std::max(1.0, n_real));
    std::vector<double> ts(n + 1);
    for (std::size_t k = 0; k <= n; ++k) ts[k] = std::min(T, dt * static_cast<double>(k));
    ts[n] = T;
    return ts;
}

DrivingPath brownian_path(const SleParams& p, Geometry g, double drift) {
    validate(p);
    std::vector<double> ts = grid(p.T, p.dt);
    std::vector<double> xs(ts.size(), 0.0);
    Rng rng(p.seed);
    const double s = std::sqrt(p.kappa);
    double b = 0.0;
    for (std::size_t k = 1; k < ts.size(); ++k) {
        const double h = ts[k] - ts[k - 1];
        b += std::sqrt(h) * rng.normal();
        xs[k] = s * b + drift * ts[k];
    }
    return DrivingPath(std::move(ts), std::move(xs), g);
}

}  // namespace

void validate(const SleParams& p) {
    if (!(p.kappa >= 0.0) || !std::isfinite(p.kappa)) throw InvalidArgument("kappa must be >= 0");
    if (!(p.dt > 0.0)) throw InvalidArgument("dt must be positive");
    if (!(p.T >= p.dt)) throw InvalidArgument("T must be at least dt");
}

DrivingPath sample_chordal(const SleParams& p) { return brownian_path(p, Geometry::chordal(), 0.0); }

DrivingPath sample_radial(const SleParams& p) {
    Geometry g = p.geometry.kind == GeometryKind::radial ? p.geometry : Geometry::radial();
    return brownian_path(p, g, 0.0);
}

DrivingPath sample_dipolar(const SleParams& p) {
    Geometry g = p.geometry.kind == GeometryKind::dipolar ? p.geometry : Geometry::dipolar();
    return brownian_path(p, g, 0.0);
}

namespace {

struct BridgeRefiner {
    double kappa, max_gap, min_dt;
    Rng rng;
    std::size_t added = 0;

    // Pieces to split an interval into, 0 when it is fine as it is.
    std::size_t pieces(double gap, double span) const {
        if (!(gap > max_gap) || !(span > 2.0 * min_dt)) return 0;
        int depth = std::clamp(static_cast<int>(std::ceil(std::log2(gap / max_gap))), 1, 8);
        while (depth > 1 && span / std::ldexp(1.0, depth) < min_dt) --depth;
        return std::size_t{1} << depth;
    }

    // Dyadic Brownian bridge from x0 to x1 over span; returns the interior values.
    std::vector<double> bridge(double x0, double x1, double span, std::size_t n) {
        std::vector<double> sub(n + 1);
        sub[0] = x0;
        sub[n] = x1;
        for (std::size_t h = n / 2; h >= 1; h /= 2)
            for (std::size_t m = h; m < n; m += 2 * h)
                sub[m] = 0.5 * (sub[m - h] + sub[m + h]) +
                         std::sqrt(kappa * span * static_cast<double>(h) / static_cast<double>(n) / 2.0) * rng.normal();
        added += n - 1;
        return {sub.begin() + 1, sub.end() - 1};
    }
};

}  // namespace

AdaptiveTrace adaptive_chordal_trace(const SleParams& p, double max_gap, double min_dt, std::size_t max_points) {
    if (!(max_gap > 0.0)) throw InvalidArgument("adaptive_chordal_trace: max_gap must be positive");
    const DrivingPath coarse = sample_chordal(p);
    BridgeRefiner ref{p.kappa, max_gap, min_dt, Rng::substream(p.seed, 0xB81D6EULL)};
    const double lift = LoewnerOptions{}.eps_lift;

    std::vector<double> ts = coarse.times(), xs = coarse.values();
    std::vector<cplx> pts;
    std::size_t first = 1;

    // Phase 1: whole-trace passes. Every too-long interval is bisected at
    // once and the trace is redone from the first change; cheap per point
    // because the batched kernel keeps all lanes busy. Stops paying off once
    // a pass adds few points.
    for (;;) {
        chordal_trace_points(ts, xs, lift, pts, first);
        std::vector<double> nt{ts[0]}, nx{xs[0]};
        std::vector<cplx> np{pts[0]};
        std::size_t changed = 0;
        for (std::size_t k = 1; k < ts.size(); ++k) {
            const double span = ts[k] - ts[k - 1];
            const std::size_t n = nt.size() + ts.size() - k < max_points ? ref.pieces(std::abs(pts[k] - pts[k - 1]), span) : 0;
            if (n > 0) {
                if (changed == 0) changed = nt.size();
                const auto mid = ref.bridge(xs[k - 1], xs[k], span, n);
                for (std::size_t m = 1; m < n; ++m) {
                    nt.push_back(ts[k - 1] + span * static_cast<double>(m) / static_cast<double>(n));
                    nx.push_back(mid[m - 1]);
                    np.push_back(cplx{});
                }
            }
            nt.push_back(ts[k]);
            nx.push_back(xs[k]);
            np.push_back(pts[k]);
        }
        const std::size_t grew = nt.size() - ts.size();
        ts = std::move(nt);
        xs = std::move(nx);
        pts = std::move(np);
        first = changed;
        if (changed == 0) break;
        if (5 * grew < ts.size()) break;
    }

    // Phase 2: one sweep in time order from the first stale point, accepting
    // points one at a time and bisecting in place on a long step. The next
    // few candidates are traced together as if all will be accepted.
    if (first > 0) {
        std::vector<std::pair<double, double>> pending;  // nearest last
        for (std::size_t k = ts.size() - 1; k >= first; --k) pending.emplace_back(ts[k], xs[k]);
        ts.resize(first);
        xs.resize(first);
        pts.resize(first);
        constexpr std::size_t kMaxWidth = 16;
        std::size_t width = 8;
        std::array<cplx, kMaxWidth> w{};
        while (!pending.empty()) {
            const std::size_t b = std::min(width, pending.size());
            auto cand = [&](std::size_t i) { return pending[pending.size() - 1 - i]; };
            auto t_before = [&](std::size_t i) { return i == 0 ? ts.back() : cand(i - 1).first; };
            for (std::size_t i = 0; i < b; ++i) {
                const auto [t, x] = cand(i);
                w[i] = chordal_slit_step(cplx(x, lift), x, t - t_before(i));
                for (std::size_t m = i; m-- > 0;) w[i] = chordal_slit_step(w[i], cand(m).second, cand(m).first - t_before(m));
            }
            for (std::size_t j = ts.size() - 1; j >= 1; --j) {
                const double xj = xs[j], dj = ts[j] - ts[j - 1];
                for (std::size_t i = 0; i < b; ++i) w[i] = chordal_slit_step(w[i], xj, dj);
            }
            std::size_t accepted = 0;
            for (std::size_t i = 0; i < b; ++i) {
                const auto [t, x] = pending.back();
                const cplx wi = w[i].imag() < 0.0 ? cplx(w[i].real(), 0.0) : w[i];
                const double span = t - ts.back();
                const std::size_t n = ts.size() + pending.size() < max_points ? ref.pieces(std::abs(wi - pts.back()), span) : 0;
                if (n > 0) {
                    const auto mid = ref.bridge(xs.back(), x, span, n);
                    const double t0 = ts.back();
                    for (std::size_t m = n - 1; m >= 1; --m)
                        pending.emplace_back(t0 + span * static_cast<double>(m) / static_cast<double>(n), mid[m - 1]);
                    break;
                }
                pending.pop_back();
                ts.push_back(t);
                xs.push_back(x);
                pts.push_back(wi);
                ++accepted;
            }
            width = accepted == b ? std::min(kMaxWidth, 2 * width) : std::max<std::size_t>(1, accepted);
        }
    }

    AdaptiveTrace out;
    out.bridge_points = ref.added;
    out.trace.points = std::move(pts);
    out.trace.times = ts;
    out.trace.geometry = Geometry::chordal();
    out.driving = DrivingPath(std::move(ts), std::move(xs), Geometry::chordal());
    return out;
}

double sle_kr_drift(double kappa, double rho) { return rho - (kappa - 6.0) / 2.0; }

DrivingPath sample_sle_kr(const SleParams& p) {
    Geometry g = p.geometry.kind == GeometryKind::dipolar ? p.geometry : Geometry::dipolar();
    return brownian_path(p, g, sle_kr_drift(p.kappa, p.rho));
}

double two_sle_drift(const TwoSleState& s, double kappa, int i) {
    const double gap = s.x2 - s.x1;
    // kappa a_i d_i log Z + sum_{j != i} 2 a_j / (X_i - X_j), Z = gap^delta
    if (i == 1) return kappa * s.a1 * (-s.delta / gap) + 2.0 * s.a2 / (s.x1 - s.x2);
    if (i == 2) return kappa * s.a2 * (s.delta / gap) + 2.0 * s.a1 / (s.x2 - s.x1);
    throw InvalidArgument("two_sle_drift: index must be 1 or 2");
}

TwoSleState two_sle_step(const TwoSleState& s, double kappa, double dt, Rng& rng,
                         double eps_collide) {
    if (!(s.x1 < s.x2)) throw InvalidArgument("two_sle_step: requires x1 < x2");
    if (std::abs(s.a1 + s.a2 - 1.0) > 1e-12) throw InvalidArgument("two_sle_step: a1 + a2 must be 1");
    TwoSleState n = s;
    if (s.collided) return n;
    const double gap = s.x2 - s.x1;
    const double h = std::min(dt, 1e-4 * gap * gap);
    const double d1 = two_sle_drift(s, kappa, 1);
    const double d2 = two_sle_drift(s, kappa, 2);
    const double n1 = rng.normal();
    const double n2 = rng.normal();
    n.x1 = s.x1 + d1 * h + std::sqrt(kappa * s.a1 * h) * n1;
    n.x2 = s.x2 + d2 * h + std::sqrt(kappa * s.a2 * h) * n2;
    n.t = s.t + h;
    if (n.x2 - n.x1 < eps_collide) n.collided = true;
    return n;
}

TwoSleOutcome two_sle_run(TwoSleState s, double kappa, double T, double dt_max, Rng& rng,
                          double eps_collide) {
    TwoSleOutcome out;
    while (!s.collided && s.t < T) {
        s = two_sle_step(s, kappa, std::min(dt_max, T - s.t), rng, eps_collide);
        ++out.steps;
    }
    out.collided = s.collided;
    out.time = s.t;
    out.gap = s.x2 - s.x1;
    return out;
}

}  // namespace loewner_lab
