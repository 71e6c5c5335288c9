#include "loewner_lab/growth.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <unordered_set>

#include "loewner_lab/errors.hpp"

namespace loewner_lab {

namespace {

constexpr double pi = std::numbers::pi;
namespace ode = boost::numeric::odeint;

}  // namespace

// ---------------------------------------------------------------- Laplacian growth

cplx LgPolyState::eval(cplx w) const {
    cplx acc = 0.0;
    cplx p = w;  // w^{1-n}
    for (const cplx& c : coeffs) {
        acc += c * p;
        p /= w;
    }
    return acc;
}

cplx LgPolyState::derivative(cplx w) const {
    cplx acc = 0.0;
    cplx p = 1.0;  // w^{-n}
    for (std::size_t n = 0; n < coeffs.size(); ++n) {
        acc += (1.0 - static_cast<double>(n)) * coeffs[n] * p;
        p /= w;
    }
    return acc;
}

int lg_nodes(const LgPolyState& s, const LgOptions& opt) {
    if (opt.nodes > 0) return opt.nodes;
    return std::max(16 * (s.degree() + 1), 256);
}

namespace {

void check_state(const LgPolyState& s) {
    if (s.coeffs.empty()) throw InvalidArgument("LgPolyState: no coefficients");
    if (!(s.coeffs[0].real() > 0.0) || s.coeffs[0].imag() != 0.0)
        throw InvalidArgument("LgPolyState: f_0 must be real and positive");
}

}  // namespace

double lg_zn_time_at_beta(int n, double Rc, double beta, double R0) {
    if (n < 3) throw InvalidArgument("lg_zn: n must be >= 3");
    if (!(Rc > 0.0) || !(beta >= 0.0 && beta <= 1.0)) throw InvalidArgument("lg_zn: need Rc > 0, beta in [0, 1]");
    auto t_of = [&](double R) {
        const double b = std::pow(R / Rc, n - 2);
        return 0.5 * R * R * (1.0 - b * b / (n - 1));
    };
    const double R = Rc * std::pow(beta, 1.0 / (n - 2));
    return t_of(R) - t_of(R0);
}

double lg_zn_cusp_time(int n, double Rc, double R0) { return lg_zn_time_at_beta(n, Rc, 1.0, R0); }

ZnState lg_zn_evolve(int n, double Rc, double t, double R0, double eps_cusp) {
    if (n < 3) throw InvalidArgument("lg_zn_evolve: n must be >= 3");
    if (!(Rc > 0.0) || !(R0 >= 0.0) || R0 >= Rc) throw InvalidArgument("lg_zn_evolve: need 0 <= R0 < Rc");
    if (!(t >= 0.0)) throw InvalidArgument("lg_zn_evolve: t must be >= 0");
    using State = std::array<double, 1>;  // R^2
    const double rc2 = Rc * Rc;
    auto beta_of = [&](double u) { return std::pow(std::max(u, 0.0) / rc2, 0.5 * (n - 2)); };
    auto rhs = [&](const State& u, State& du, double) {
        const double b = beta_of(u[0]);
        du[0] = 2.0 / (1.0 - b * b);
    };
    auto stepper = ode::make_controlled(1e-14, 1e-13, ode::runge_kutta_dopri5<State>());
    State u{R0 * R0};
    double tt = 0.0, h = 1e-6;
    const double limit = 1.0 - eps_cusp;
    if (beta_of(u[0]) >= limit) throw CuspReached(0.0);
    std::size_t guard = 0;
    while (tt < t) {
        if (++guard > 10000000) throw StepFailure("lg_zn_evolve: step budget exhausted");
        h = std::min(h, t - tt);
        const State keep = u;
        const double tkeep = tt, hkeep = h;
        if (stepper.try_step(rhs, u, tt, h) != ode::success) continue;
        if (!std::isfinite(u[0]) || beta_of(u[0]) >= limit) {
            // Shrink the last step until the crossing is located.
            u = keep;
            tt = tkeep;
            h = 0.5 * hkeep;
            if (h < 1e-13 * std::max(1.0, tt)) throw CuspReached(tt);
            continue;
        }
    }
    ZnState out;
    out.R = std::sqrt(u[0]);
    out.beta = beta_of(u[0]);
    out.t = tt;
    return out;
}

LgPolyState lg_zn_state(int n, double R, double beta, double t) {
    if (n < 2) throw InvalidArgument("lg_zn_state: n must be >= 2");
    if (!(R > 0.0)) throw InvalidArgument("lg_zn_state: R must be positive");
    LgPolyState s;
    s.coeffs.assign(static_cast<std::size_t>(n) + 1, cplx(0.0));
    s.coeffs[0] = R;
    s.coeffs[static_cast<std::size_t>(n)] = R * beta / (n - 1);
    s.t = t;
    return s;
}

std::vector<cplx> lg_coefficient_rates(const LgPolyState& s) {
    check_state(s);
    const int N = s.degree();
    const auto& f = s.coeffs;
    const int dim = 2 * N + 1;
    // Unknowns: x0 = d f_0/dt (real), then (Re, Im) of d f_j/dt for j >= 1.
    auto unpack = [&](const Eigen::VectorXd& x) {
        std::vector<cplx> fd(static_cast<std::size_t>(N) + 1);
        fd[0] = x[0];
        for (int j = 1; j <= N; ++j) fd[static_cast<std::size_t>(j)] = {x[2 * j - 1], x[2 * j]};
        return fd;
    };
    // E_m = sum_{j-k=m} (1-k) f_k conj(fd_j) + sum_{k-j=m} (1-k) conj(f_k) fd_j
    auto residual = [&](const std::vector<cplx>& fd) {
        Eigen::VectorXd e(dim);
        for (int m = 0; m <= N; ++m) {
            cplx acc = 0.0;
            for (int k = 0; k + m <= N; ++k) {
                acc += (1.0 - k) * f[static_cast<std::size_t>(k)] * std::conj(fd[static_cast<std::size_t>(k + m)]);
                acc += (1.0 - (k + m)) * std::conj(f[static_cast<std::size_t>(k + m)]) * fd[static_cast<std::size_t>(k)];
            }
            if (m == 0) {
                e[0] = acc.real();
            } else {
                e[2 * m - 1] = acc.real();
                e[2 * m] = acc.imag();
            }
        }
        return e;
    };
    Eigen::MatrixXd A(dim, dim);
    for (int i = 0; i < dim; ++i) {
        Eigen::VectorXd unit = Eigen::VectorXd::Zero(dim);
        unit[i] = 1.0;
        A.col(i) = residual(unpack(unit));
    }
    Eigen::VectorXd b = Eigen::VectorXd::Zero(dim);
    b[0] = 2.0;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    if (qr.rank() < dim) throw CuspReached(s.t);
    return unpack(qr.solve(b));
}

std::vector<cplx> lg_coefficient_rates_schwarz(const LgPolyState& s, int nodes) {
    check_state(s);
    const int M = nodes;
    if (M < 8) throw InvalidArgument("lg_coefficient_rates_schwarz: too few nodes");
    std::vector<cplx> w(static_cast<std::size_t>(M)), fp(w.size());
    std::vector<double> rho(w.size());
    for (int j = 0; j < M; ++j) {
        w[static_cast<std::size_t>(j)] = std::polar(1.0, 2.0 * pi * j / M);
        fp[static_cast<std::size_t>(j)] = s.derivative(w[static_cast<std::size_t>(j)]);
        rho[static_cast<std::size_t>(j)] = 1.0 / std::norm(fp[static_cast<std::size_t>(j)]);
    }
    // Fourier coefficients c_{-m} = mean rho e^{i m theta}.
    const int mmax = M / 2 - 1;
    std::vector<cplx> cneg(static_cast<std::size_t>(mmax) + 1);
    for (int m = 0; m <= mmax; ++m) {
        cplx acc = 0.0;
        for (int j = 0; j < M; ++j) acc += rho[static_cast<std::size_t>(j)] * std::pow(w[static_cast<std::size_t>(j)], m);
        cneg[static_cast<std::size_t>(m)] = acc / static_cast<double>(M);
    }
    std::vector<cplx> out(s.coeffs.size());
    for (int j = 0; j < M; ++j) {
        const cplx wj = w[static_cast<std::size_t>(j)];
        cplx H = cneg[0];
        cplx p = 1.0;
        for (int m = 1; m <= mmax; ++m) {
            p /= wj;
            H += 2.0 * cneg[static_cast<std::size_t>(m)] * p;
        }
        const cplx fdot = wj * fp[static_cast<std::size_t>(j)] * H;
        // fdot = sum_n fd_n w^{1-n}  =>  fd_n = mean fdot w^{n-1}
        cplx q = 1.0 / wj;
        for (std::size_t n = 0; n < out.size(); ++n) {
            out[n] += fdot * q;
            q *= wj;
        }
    }
    for (auto& c : out) c /= static_cast<double>(M);
    return out;
}

double lg_min_derivative(const LgPolyState& s, int nodes) {
    check_state(s);
    double m = std::numeric_limits<double>::infinity();
    for (int j = 0; j < nodes; ++j) m = std::min(m, std::abs(s.derivative(std::polar(1.0, 2.0 * pi * j / nodes))));
    return m / s.coeffs[0].real();
}

LgPolyState lg_general_step(const LgPolyState& s, double dt, const LgOptions& opt) {
    check_state(s);
    if (!(dt >= 0.0)) throw InvalidArgument("lg_general_step: dt must be >= 0");
    const int N = s.degree();
    const int nodes = lg_nodes(s, opt);
    using State = std::vector<double>;
    auto pack = [&](const std::vector<cplx>& c) {
        State x(static_cast<std::size_t>(2 * N + 1));
        x[0] = c[0].real();
        for (int j = 1; j <= N; ++j) {
            x[static_cast<std::size_t>(2 * j - 1)] = c[static_cast<std::size_t>(j)].real();
            x[static_cast<std::size_t>(2 * j)] = c[static_cast<std::size_t>(j)].imag();
        }
        return x;
    };
    auto unpack = [&](const State& x, double t) {
        LgPolyState st;
        st.coeffs.resize(static_cast<std::size_t>(N) + 1);
        st.coeffs[0] = x[0];
        for (int j = 1; j <= N; ++j)
            st.coeffs[static_cast<std::size_t>(j)] = {x[static_cast<std::size_t>(2 * j - 1)], x[static_cast<std::size_t>(2 * j)]};
        st.t = t;
        return st;
    };
    auto rhs = [&](const State& x, State& dx, double t) { dx = pack(lg_coefficient_rates(unpack(x, t))); };
    if (lg_min_derivative(s, nodes) < opt.eps_cusp) throw CuspReached(s.t);
    State x = pack(s.coeffs);
    double t = s.t;
    const double t_end = s.t + dt;
    double h = std::min(dt, 1e-3);
    auto stepper = ode::make_controlled(opt.atol, opt.rtol, ode::runge_kutta_dopri5<State>());
    std::size_t guard = 0;
    while (t < t_end) {
        if (++guard > 1000000) throw StepFailure("lg_general_step: step budget exhausted");
        h = std::min(h, t_end - t);
        const double tkeep = t;
        if (stepper.try_step(rhs, x, t, h) != ode::success) continue;
        if (lg_min_derivative(unpack(x, t), nodes) < opt.eps_cusp) throw CuspReached(tkeep);
    }
    return unpack(x, t_end);
}

cplx lg_conserved(const LgPolyState& s, int k, const LgOptions& opt) {
    check_state(s);
    if (k < 0) throw InvalidArgument("lg_conserved: k must be >= 0");
    const int M = lg_nodes(s, opt);
    cplx acc = 0.0;
    for (int j = 0; j < M; ++j) {
        const cplx u = std::polar(1.0, 2.0 * pi * j / M);
        const cplx fu = s.eval(u);
        acc += u * s.derivative(u) * std::conj(fu) / std::pow(fu, k + 1);
    }
    return acc / static_cast<double>(M);
}

double lg_area(const LgPolyState& s) {
    double a = 0.0;
    for (std::size_t n = 0; n < s.coeffs.size(); ++n) a += (1.0 - static_cast<double>(n)) * std::norm(s.coeffs[n]);
    return pi * a;
}

// ---------------------------------------------------------------- Hastings-Levitov

namespace {

// f(v) = (v + 1 + S) / (2 cos l), S = v sqrt(1 - 2 cos(2l)/v + 1/v^2). Both
// factors of the radicand have positive real part for |v| > 1, so the
// principal root is continuous there and S ~ v at infinity.
cplx bump_S(cplx v, double lambda) {
    const cplx iv = 1.0 / v;
    return v * std::sqrt(1.0 - 2.0 * std::cos(2.0 * lambda) * iv + iv * iv);
}

}  // namespace

cplx hl_bump_map(cplx w, double lambda, double theta) {
    const cplx rot = std::polar(1.0, theta);
    const cplx v = w / rot;
    return rot * (v + 1.0 + bump_S(v, lambda)) / (2.0 * std::cos(lambda));
}

cplx hl_bump_derivative(cplx w, double lambda, double theta) {
    const cplx v = w / std::polar(1.0, theta);
    return (1.0 + (v - std::cos(2.0 * lambda)) / bump_S(v, lambda)) / (2.0 * std::cos(lambda));
}

cplx hl_map(const HlCluster& c, cplx w, std::size_t upto) {
    upto = std::min(upto, c.size());
    for (std::size_t k = upto; k-- > 0;) w = hl_bump_map(w, c.lambdas[k], c.thetas[k]);
    return w;
}

double hl_log_derivative(const HlCluster& c, cplx w, std::size_t upto) {
    upto = std::min(upto, c.size());
    double acc = 0.0;
    for (std::size_t k = upto; k-- > 0;) {
        acc += std::log(std::abs(hl_bump_derivative(w, c.lambdas[k], c.thetas[k])));
        w = hl_bump_map(w, c.lambdas[k], c.thetas[k]);
    }
    return acc;
}

void hl_grow(HlCluster& c, std::size_t steps, Rng& rng) {
    if (!(c.lambda0 > 0.0) || !(c.alpha >= 0.0 && c.alpha <= 2.0))
        throw InvalidArgument("hl_grow: need lambda0 > 0 and alpha in [0, 2]");
    constexpr double log_floor = -690.7755278982137;  // log(1e-300)
    for (std::size_t s = 0; s < steps; ++s) {
        double theta = 0.0, logd = 0.0;
        // A draw landing exactly on an earlier bump's base has |F'| = inf; redraw.
        for (int tries = 0; tries < 64; ++tries) {
            theta = 2.0 * pi * rng.uniform();
            logd = hl_log_derivative(c, std::polar(1.0, theta), c.size());
            if (std::isfinite(logd) || logd < 0.0) break;
        }
        if (!(logd < std::numeric_limits<double>::infinity())) throw StepFailure("hl_grow: no finite growth site");
        if (logd < log_floor) throw DerivativeUnderflow("hl_grow: |F'| below 1e-300 at the growth site");
        const double lambda = std::min(1.0, c.lambda0 * std::exp(-0.5 * c.alpha * logd));
        c.lambdas.push_back(lambda);
        c.thetas.push_back(theta);
        c.log_capacity -= std::log(std::cos(lambda));
    }
}

HlCluster hl_grow(HlCluster c, std::size_t steps, std::uint64_t seed) {
    Rng rng(seed);
    hl_grow(c, steps, rng);
    return c;
}

std::vector<cplx> hl_boundary(const HlCluster& c, std::size_t m_points) {
    std::vector<cplx> out(m_points);
    for (std::size_t j = 0; j < m_points; ++j)
        out[j] = hl_map(c, std::polar(1.0, 2.0 * pi * static_cast<double>(j) / static_cast<double>(m_points)), c.size());
    return out;
}

// ---------------------------------------------------------------- lattice DLA

DlaCluster lattice_dla(std::size_t n_particles, Rng& rng, const DlaOptions& opt) {
    if (n_particles < 1) throw InvalidArgument("lattice_dla: needs at least one particle");
    DlaCluster c;
    c.sites.reserve(n_particles + 1);
    std::unordered_set<Site, SiteHash> occ;
    c.sites.push_back({0, 0});
    occ.insert({0, 0});
    double rmax = 0.0;
    auto occupied_neighbour = [&](Site p) {
        for (const Site d : square_dirs)
            if (occ.count(p + d)) return true;
        return false;
    };
    auto round_site = [](double x, double y) {
        return Site{static_cast<int>(std::lround(x)), static_cast<int>(std::lround(y))};
    };
    for (std::size_t n = 0; n < n_particles; ++n) {
        const double launch = rmax + opt.launch_margin;
        auto launch_point = [&] {
            const double phi = 2.0 * pi * rng.uniform();
            return round_site(launch * std::cos(phi), launch * std::sin(phi));
        };
        Site p = launch_point();
        for (;;) {
            const double d = std::hypot(static_cast<double>(p.x), static_cast<double>(p.y));
            if (d > opt.kill_factor * launch) {
                p = launch_point();
                continue;
            }
            const double gap = d - rmax;
            if (gap > opt.jump_threshold) {
                // A circle of radius gap - 2 around p stays clear of the cluster;
                // the walk leaves it at a uniform point.
                const double rho = gap - 2.0;
                const double phi = 2.0 * pi * rng.uniform();
                p = round_site(p.x + rho * std::cos(phi), p.y + rho * std::sin(phi));
                continue;
            }
            if (gap <= 1.5 && !occ.count(p) && occupied_neighbour(p)) {
                occ.insert(p);
                c.sites.push_back(p);
                rmax = std::max(rmax, d);
                break;
            }
            p = p + square_dirs[rng.below(4)];
        }
    }
    return c;
}

DlaCluster lattice_dla(std::size_t n_particles, std::uint64_t seed, const DlaOptions& opt) {
    Rng rng(seed);
    return lattice_dla(n_particles, rng, opt);
}

double radius_of_gyration(const std::vector<Site>& sites, std::size_t count) {
    if (count == 0 || count > sites.size()) count = sites.size();
    if (count == 0) throw InvalidArgument("radius_of_gyration: empty cluster");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        mx += sites[i].x;
        my += sites[i].y;
    }
    mx /= static_cast<double>(count);
    my /= static_cast<double>(count);
    double r2 = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        const double dx = sites[i].x - mx, dy = sites[i].y - my;
        r2 += dx * dx + dy * dy;
    }
    return std::sqrt(r2 / static_cast<double>(count));
}

}  // namespace loewner_lab
