#include "loewner_lab/formulas.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <numbers>

#include "loewner_lab/errors.hpp"

namespace loewner_lab {

namespace {

constexpr double pi = std::numbers::pi;
using cd = std::complex<double>;

void require_kappa(double kappa) {
    if (!(kappa > 0.0) || !std::isfinite(kappa)) throw InvalidArgument("kappa must be positive");
}

// Shared integrators; construction builds abscissa tables, so keep one per thread.
boost::math::quadrature::tanh_sinh<double>& ts() {
    thread_local boost::math::quadrature::tanh_sinh<double> q(15);
    return q;
}
boost::math::quadrature::exp_sinh<double>& es() {
    thread_local boost::math::quadrature::exp_sinh<double> q(12);
    return q;
}

constexpr double quad_tol = 1e-14;

}  // namespace

// ---------------------------------------------------------------- CFT data

double CftData::h_1_nplus1(int n) const { return n * (4.0 + 2.0 * n - kappa) / (2.0 * kappa); }

double CftData::h0_n_bulk(int n) const {
    return (4.0 * n * n - (kappa - 4.0) * (kappa - 4.0)) / (32.0 * kappa);
}

double CftData::d_kappa_n(int n) const {
    return ((kappa + 4.0) * (kappa + 4.0) - 4.0 * n * n) / (8.0 * kappa);
}

double central_charge(double kappa) {
    require_kappa(kappa);
    return (6.0 - kappa) * (3.0 * kappa - 8.0) / (2.0 * kappa);
}

CftData cft_data(double kappa, double rho) {
    require_kappa(kappa);
    CftData d;
    d.kappa = kappa;
    d.rho = rho;
    d.c = central_charge(kappa);
    d.h12 = (6.0 - kappa) / (2.0 * kappa);
    d.h13 = d.h_1_nplus1(2);
    d.h0_half = d.h0_n_bulk(1);
    d.h_plus = rho * (rho + 4.0 - kappa) / (4.0 * kappa);
    d.h_minus = (rho + 2.0) * (rho + 6.0 - kappa) / (4.0 * kappa);
    d.d_kappa = 1.0 + kappa / 8.0;
    return d;
}

double brownian_zeta(int n) { return (4.0 * n * n - 1.0) / 24.0; }
double brownian_zeta_tilde(int n) { return n * (2.0 * n + 1.0) / 6.0; }

// ---------------------------------------------------------------- hitting

double hitting_prob(double x, double X, double kappa) {
    if (!(kappa > 4.0 && kappa < 8.0)) throw DomainError("hitting_prob: kappa must lie in (4, 8)");
    if (!(x > 0.0 && X > x)) throw InvalidArgument("hitting_prob: requires 0 < x < X");
    const double s = x / X;
    const double p = kappa / (kappa - 4.0);
    const double e = (8.0 - 2.0 * kappa) / kappa;
    // sigma = u^p removes the sigma^{-4/kappa} singularity at 0.
    auto f = [&](double u, double uc) {
        // 1 - s u^p, written via the distance to u = 1 when that is the nearer end.
        double one_minus;
        if (u > 0.5) {
            const double upc = -std::expm1(p * std::log1p(-uc));  // 1 - u^p
            one_minus = (1.0 - s) + s * upc;
        } else {
            one_minus = 1.0 - s * std::pow(u, p);
        }
        return p * std::pow(one_minus, e);
    };
    const double integral = ts().integrate(f, 0.0, 1.0, quad_tol);
    const double pref = std::pow(s, (kappa - 4.0) / kappa) * std::tgamma(4.0 / kappa) /
                        (std::tgamma((kappa - 4.0) / kappa) * std::tgamma((8.0 - kappa) / kappa));
    return std::clamp(pref * integral, 0.0, 1.0);
}

// ---------------------------------------------------------------- Cardy

double cardy_halfplane(double a, double b, double kappa) {
    if (!(kappa > 4.0 && kappa < 8.0)) throw DomainError("cardy_halfplane: kappa must lie in (4, 8)");
    if (!(a <= 0.0 && b >= 0.0) || (a == 0.0 && b == 0.0))
        throw InvalidArgument("cardy_halfplane: requires a <= 0 <= b, not both zero");
    if (a == 0.0) return 1.0;
    if (b == 0.0) return 0.0;
    const double r = -a / b;
    const double al = (kappa - 4.0) / kappa;
    const double C = std::tgamma(2.0 * al) / (std::tgamma(al) * std::tgamma(al));
    const double e = (8.0 - 2.0 * kappa) / kappa;
    auto phi = [&](double s) { return std::pow(s, -4.0 / kappa) * std::pow(1.0 + s, e); };
    // Tail beyond max(r, 1) on the raw integrand.
    const double lo = std::max(r, 1.0);
    const double tail = es().integrate([&](double t) { return phi(lo + t); }, quad_tol);
    double head = 0.0;
    if (r < 1.0) {
        // sigma = u^{1/al} on [r, 1].
        auto g = [&](double u) { return (1.0 / al) * std::pow(1.0 + std::pow(u, 1.0 / al), e); };
        head = ts().integrate(g, std::pow(r, al), 1.0, quad_tol);
    }
    return std::clamp(C * (head + tail), 0.0, 1.0);
}

namespace {

double agm(double a, double g) {
    for (int i = 0; i < 64 && std::abs(a - g) > 1e-16 * a; ++i) {
        const double an = 0.5 * (a + g);
        g = std::sqrt(a * g);
        a = an;
    }
    return a;
}

}  // namespace

double elliptic_k(double m) {
    if (!(m >= 0.0 && m < 1.0)) throw DomainError("elliptic_k: parameter must lie in [0, 1)");
    return pi / (2.0 * agm(1.0, std::sqrt(1.0 - m)));
}

// The aspect-ratio relation uses K in the parameter convention. With the
// modulus convention the square would not come out at 1/2.
// K(1-k^2) / (2 K(k^2)) = agm(1, sqrt(1-k^2)) / (2 agm(1, k)), which stays
// accurate at both ends of (0, 1).
double cardy_rectangle_modulus(double r) {
    if (!(r > 0.0) || !std::isfinite(r)) throw InvalidArgument("cardy_rectangle: r must be positive");
    auto f = [r](double k) { return agm(1.0, std::sqrt((1.0 - k) * (1.0 + k))) / (2.0 * agm(1.0, k)) - r; };
    const double lo = 1e-300, hi = std::nextafter(1.0, 0.0);
    if (f(lo) < 0.0 || f(hi) > 0.0) throw DomainError("cardy_rectangle: aspect ratio out of range");
    boost::uintmax_t iters = 200;
    auto res = boost::math::tools::toms748_solve(f, lo, hi, boost::math::tools::eps_tolerance<double>(52),
                                                 iters);
    return 0.5 * (res.first + res.second);
}

double cardy_rectangle(double r) {
    const double k = cardy_rectangle_modulus(r);
    const double q = (1.0 - k) / (1.0 + k);
    const double upper = std::cbrt(q * q);  // eta^{1/3}
    // eta^{1/3} 2F1(1/3, 2/3; 4/3; eta) = int_0^{eta^{1/3}} (1 - v^3)^{-2/3} dv
    auto f = [](double v) { return std::pow((1.0 - v) * (1.0 + v + v * v), -2.0 / 3.0); };
    const double integral = ts().integrate(f, 0.0, upper, quad_tol);
    const double g13 = std::tgamma(1.0 / 3.0);
    return std::clamp(3.0 * std::tgamma(2.0 / 3.0) / (g13 * g13) * integral, 0.0, 1.0);
}

double cardy_triangle(double x) {
    if (!(x >= 0.0 && x <= 1.0)) throw InvalidArgument("cardy_triangle: x must lie in [0, 1]");
    return x;
}

// ---------------------------------------------------------------- dipolar

namespace {

cd sinh_pow(cd u, double kappa) { return std::pow(std::sinh(0.5 * u), -4.0 / kappa); }

// int_a^b sinh(u/2)^{-4/kappa} du along the straight segment; the b end may be singular.
cd segment_integral(cd a, cd b, double kappa) {
    const cd d = b - a;
    auto point = [&](double t, double tc) { return t < 0.5 ? a + t * d : b - tc * d; };
    auto re = [&](double t, double tc) { return std::real(sinh_pow(point(t, tc), kappa) * d); };
    auto im = [&](double t, double tc) { return std::imag(sinh_pow(point(t, tc), kappa) * d); };
    const double x = ts().integrate(re, 0.0, 1.0, 1e-13);
    const double y = ts().integrate(im, 0.0, 1.0, 1e-13);
    return {x, y};
}

constexpr double tail_anchor = 40.0;

cd fhat_left_tail(cd u0, double kappa) {
    return std::pow(2.0, 4.0 / kappa) * std::exp(cd(0.0, -4.0 * pi / kappa)) * (kappa / 2.0) *
           std::exp(2.0 * u0 / kappa);
}

void require_strip(cd z) {
    if (!(z.imag() >= 0.0 && z.imag() <= pi) || !std::isfinite(z.real()))
        throw InvalidArgument("dipolar: z must lie in the closed strip 0 <= Im z <= pi");
}

}  // namespace

cd dipolar_fhat(cd z, double kappa) {
    require_kappa(kappa);
    require_strip(z);
    const double mid = pi / 2.0;
    const double left = std::min(-tail_anchor, z.real() - 5.0);
    const cd u0(left, mid);
    const cd corner(z.real(), mid);
    cd acc = fhat_left_tail(u0, kappa);
    acc += segment_integral(u0, corner, kappa);
    if (z != corner) acc += segment_integral(corner, z, kappa);
    return acc;
}

static cd dipolar_fhat_inf(double kappa) {
    const cd u1(tail_anchor, pi / 2.0);
    const cd right_tail = std::pow(2.0, 4.0 / kappa) * (kappa / 2.0) * std::exp(-2.0 * u1 / kappa);
    return dipolar_fhat(u1, kappa) + right_tail;
}

double dipolar_J(double kappa) {
    if (!(kappa > 4.0)) throw DomainError("dipolar_J: diverges for kappa <= 4");
    const double s = 4.0 / kappa;
    auto f = [s](double y) { return std::pow(std::sinh(0.5 * y), -s); };
    return ts().integrate(f, 0.0, 2.0, quad_tol) + es().integrate([&](double t) { return f(2.0 + t); }, quad_tol);
}

double dipolar_I(double kappa) {
    require_kappa(kappa);
    const double s = 4.0 / kappa;
    return 2.0 * es().integrate([s](double y) { return std::pow(std::cosh(0.5 * y), -s); }, quad_tol);
}

double dipolar_left_prob(cd z, double kappa) {
    require_kappa(kappa);
    require_strip(z);
    if (kappa < 4.0) throw DomainError("dipolar_left_prob: needs kappa >= 4");
    if (kappa == 4.0) {
        if (z.imag() == 0.0) return z.real() < 0.0 ? 1.0 : 0.0;
        return std::clamp(std::imag(std::log(std::tanh(z / 4.0))) / pi, 0.0, 1.0);
    }
    const double num = std::imag(dipolar_fhat(z, kappa));
    const double den = std::imag(dipolar_fhat_inf(kappa));
    return std::clamp(1.0 - num / den, 0.0, 1.0);
}

double dipolar_in_prob(cd z, double kappa) {
    require_kappa(kappa);
    require_strip(z);
    if (kappa < 4.0) throw DomainError("dipolar_in_prob: needs kappa >= 4");
    if (kappa == 4.0) return 0.0;
    const cd rot = std::exp(cd(0.0, 2.0 * pi / kappa));
    const double num = std::imag(rot * dipolar_fhat(z, kappa));
    const double den = -std::sin(2.0 * pi / kappa) * dipolar_J(kappa);
    return std::clamp(num / den, 0.0, 1.0);
}

double dipolar_right_prob(cd z, double kappa) {
    return std::clamp(1.0 - dipolar_left_prob(z, kappa) - dipolar_in_prob(z, kappa), 0.0, 1.0);
}

double dipolar_exit_density(double x, double kappa) {
    require_kappa(kappa);
    return std::pow(std::cosh(0.5 * x), -4.0 / kappa) / dipolar_I(kappa);
}

double dipolar_exit_cdf_left(double x, double kappa) {
    require_kappa(kappa);
    const double s = 4.0 / kappa;
    auto f = [s](double y) { return std::pow(std::cosh(0.5 * y), -s); };
    const double I = dipolar_I(kappa);
    // Integrate the smaller side to keep relative accuracy in the tails.
    if (x <= 0.0) {
        const double left = es().integrate([&](double t) { return f(x - t); }, quad_tol);
        return std::clamp(1.0 - left / I, 0.0, 1.0);
    }
    const double right = es().integrate([&](double t) { return f(x + t); }, quad_tol);
    return std::clamp(right / I, 0.0, 1.0);
}

// ---------------------------------------------------------------- multifractal

double multifractal_tau(double n, double kappa) {
    require_kappa(kappa);
    const double disc = 16.0 * n * kappa + (kappa - 4.0) * (kappa - 4.0);
    if (disc < 0.0) throw DomainError("multifractal_tau: n below the branch point");
    return (n - 1.0) / 2.0 + (kappa + 4.0) / (16.0 * kappa) * (std::sqrt(disc) - (kappa + 4.0));
}

double multifractal_f(double alpha, double kappa) {
    require_kappa(kappa);
    if (!(alpha > 0.5)) throw DomainError("multifractal_f: alpha must exceed 1/2");
    const double a = (kappa + 4.0) * (kappa + 4.0) / (16.0 * kappa);
    const double b = (kappa - 4.0) * (kappa - 4.0) / (16.0 * kappa);
    return a * (3.0 * alpha - 2.0) / (2.0 * alpha - 1.0) - b * alpha;
}

double restriction_prob_semidisc(double x, double r) {
    if (!(r > 0.0) || !(x > 0.0)) throw InvalidArgument("restriction_prob_semidisc: x, r must be positive");
    if (r >= x) throw DomainError("restriction_prob_semidisc: semi-disc must not contain the origin");
    return std::pow(1.0 - (r * r) / (x * x), 5.0 / 8.0);
}

// ---------------------------------------------------------------- arch partition functions

namespace {

// G solves kappa^2 x(1-x) G'' + 8 kappa (1-2x) G' - 4(12-kappa) G = 0, i.e. the
// hypergeometric equation with a = 4/kappa, b = (12-kappa)/kappa, c = 8/kappa.
// The solution regular at 0 is summed as a power series up to x = 1/2 and then
// continued with an adaptive Dormand-Prince integration.
std::array<double, 2> regular_series(double x, double a, double b, double c) {
    double term = 1.0, sum = 1.0, dsum = 0.0;
    for (int n = 0; n < 400; ++n) {
        const double ratio = (a + n) * (b + n) / ((c + n) * (n + 1.0));
        const double next = term * ratio * x;
        dsum += (n + 1.0) * term * ratio;  // (n+1) t_{n+1} / x
        term = next;
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum) && n > 5) break;
    }
    return {sum, dsum};
}

double regular_g(double x, double kappa) {
    const double a = 4.0 / kappa, b = (12.0 - kappa) / kappa, c = 8.0 / kappa;
    constexpr double x_switch = 0.5;
    if (x <= x_switch) return regular_series(x, a, b, c)[0];
    using State = std::array<double, 2>;
    State y = regular_series(x_switch, a, b, c);
    auto rhs = [&](const State& s, State& ds, double t) {
        ds[0] = s[1];
        ds[1] = (a * b * s[0] - (c - (a + b + 1.0) * t) * s[1]) / (t * (1.0 - t));
    };
    namespace ode = boost::numeric::odeint;
    auto stepper = ode::make_controlled(1e-14, 1e-14, ode::runge_kutta_dopri5<State>());
    const std::size_t steps = ode::integrate_adaptive(stepper, rhs, y, x_switch, x, 1e-4);
    if (steps > 1000000 || !std::isfinite(y[0])) throw StepFailure("arch_partition: ODE integration failed");
    return y[0];
}

}  // namespace

double arch_partition(double x, double kappa, ArchConfig which) {
    if (!(kappa > 0.0 && kappa < 8.0)) throw DomainError("arch_partition: kappa must lie in (0, 8)");
    if (!(x > 0.0 && x < 1.0)) throw InvalidArgument("arch_partition: x must lie in (0, 1)");
    const double y = which == ArchConfig::II ? x : 1.0 - x;  // Z_I(x) = Z_II(1 - x)
    const double a = 4.0 / kappa, b = (12.0 - kappa) / kappa, c = 8.0 / kappa;
    // Normalized so that Z_I(x) ~ x^{(kappa-6)/kappa} as x -> 0.
    const double C = std::tgamma(a) * std::tgamma(b) / (std::tgamma(c) * std::tgamma(a + b - c));
    return C * std::pow(y * (1.0 - y), 2.0 / kappa) * regular_g(y, kappa);
}

double arch_prob_I(double x, double kappa, double p_I, double p_II) {
    if (!(p_I >= 0.0 && p_II >= 0.0) || p_I + p_II == 0.0)
        throw InvalidArgument("arch_prob_I: weights must be nonnegative and not both zero");
    const double zi = p_I * arch_partition(x, kappa, ArchConfig::I);
    const double zii = p_II * arch_partition(x, kappa, ArchConfig::II);
    return zi / (zi + zii);
}

// ---------------------------------------------------------------- loop measure

namespace {

Eigen::MatrixXd to_eigen(const WeightMatrix& A) {
    if (A.n <= 0 || A.a.size() != static_cast<std::size_t>(A.n) * A.n)
        throw InvalidArgument("WeightMatrix: size mismatch");
    Eigen::MatrixXd m(A.n, A.n);
    for (int i = 0; i < A.n; ++i)
        for (int j = 0; j < A.n; ++j) m(i, j) = A(i, j);
    return m;
}

double spectral_radius(const Eigen::MatrixXd& m) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

LoopSeries loop_measure_total(const WeightMatrix& A, double alpha, double lambda, int n_max) {
    if (n_max < 1) throw InvalidArgument("loop_measure_total: n_max must be >= 1");
    const Eigen::MatrixXd m = alpha * to_eigen(A);
    const double rho = spectral_radius(m);
    if (rho >= 1.0) throw DivergentSeries("loop_measure_total: spectral radius of alpha*A >= 1");
    LoopSeries out;
    out.spectral_radius = rho;
    Eigen::MatrixXd p = m;
    double sum = 0.0;
    for (int k = 1; k <= n_max; ++k) {
        sum += p.trace() / k;
        if (k < n_max) p = p * m;
    }
    out.value = lambda * sum;
    // |Tr M^k| <= d rho^k, summed geometrically past n_max.
    out.remainder_bound = std::abs(lambda) * A.n * std::pow(rho, n_max + 1) / ((n_max + 1) * (1.0 - rho));
    return out;
}

double loop_log_det_total(const WeightMatrix& A, double alpha, double lambda) {
    const Eigen::MatrixXd m = alpha * to_eigen(A);
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(A.n, A.n);
    const double det = (id - m).partialPivLu().determinant();
    if (!(det > 0.0)) throw DivergentSeries("loop_log_det_total: det(1 - alpha A) <= 0");
    return -lambda * std::log(det);
}

double unrooted_loop_weight(const std::vector<int>& cycle, const WeightMatrix& A, double alpha,
                            double lambda) {
    const std::size_t n = cycle.size();
    if (n == 0) throw InvalidArgument("unrooted_loop_weight: empty cycle");
    double prod = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const int u = cycle[i], v = cycle[(i + 1) % n];
        if (u < 0 || v < 0 || u >= A.n || v >= A.n) throw InvalidArgument("unrooted_loop_weight: vertex out of range");
        const double w = A(u, v);
        if (!(w > 0.0)) throw InvalidArgument("unrooted_loop_weight: cycle uses a zero-weight edge");
        prod *= w;
    }
    // |Aut| counts the cyclic shifts that leave the vertex sequence unchanged.
    int aut = 0;
    for (std::size_t s = 0; s < n; ++s) {
        bool same = true;
        for (std::size_t i = 0; i < n && same; ++i) same = cycle[i] == cycle[(i + s) % n];
        if (same) ++aut;
    }
    return lambda * std::pow(alpha, static_cast<double>(n)) * prod / aut;
}

}  // namespace loewner_lab
