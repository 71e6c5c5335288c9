#pragma once

#include <complex>
#include <vector>

namespace loewner_lab {

struct CftData {
    double kappa = 0.0;
    double rho = 0.0;
    double c = 0.0;       // central charge
    double h12 = 0.0;     // boundary curve-creating weight
    double h13 = 0.0;
    double h0_half = 0.0; // bulk weight h_{0;1/2}
    double h_plus = 0.0;  // SLE(kappa,rho) marked-point weights
    double h_minus = 0.0;
    double d_kappa = 0.0; // trace dimension 1 + kappa/8

    double h_1_nplus1(int n) const;  // n(4 + 2n - kappa)/(2 kappa)
    double h0_n_bulk(int n) const;   // [4n^2 - (kappa-4)^2]/(32 kappa)
    double d_kappa_n(int n) const;   // [(kappa+4)^2 - 4n^2]/(8 kappa)
};

CftData cft_data(double kappa, double rho = 0.0);

double central_charge(double kappa);

// Brownian intersection exponents, exposed as constants only.
double brownian_zeta(int n);        // (4n^2 - 1)/24
double brownian_zeta_tilde(int n);  // n(2n + 1)/6

// P[SLE_kappa does not touch [x, X]], 0 < x < X, 4 < kappa < 8.
double hitting_prob(double x, double X, double kappa);

// P[tau_a < tau_b] for a < 0 < b, 4 < kappa < 8.
double cardy_halfplane(double a, double b, double kappa);

// Top-to-bottom crossing of a rectangle with r = width/height.
double cardy_rectangle(double r);

// Elliptic modulus k solving r = K(1-k^2) / (2 K(k^2)) (K in the parameter convention).
double cardy_rectangle_modulus(double r);

// Complete elliptic integral of the first kind, parameter m = k^2, via AGM.
double elliptic_k(double m);

double cardy_triangle(double x);

// Dipolar SLE in the strip 0 < Im z < pi (Delta = 1), marked points at +-infinity.
std::complex<double> dipolar_fhat(std::complex<double> z, double kappa);
double dipolar_J(double kappa);  // int_0^inf sinh(y/2)^{-4/kappa} dy
double dipolar_I(double kappa);  // int_R cosh(y/2)^{-4/kappa} dy
double dipolar_left_prob(std::complex<double> z, double kappa);
double dipolar_right_prob(std::complex<double> z, double kappa);
double dipolar_in_prob(std::complex<double> z, double kappa);
// Density of the exit point of the trace on the upper boundary.
double dipolar_exit_density(double x, double kappa);
// P_l on the upper boundary, 1 - (1/I) int_{-inf}^x cosh(y/2)^{-4/kappa} dy.
double dipolar_exit_cdf_left(double x, double kappa);

double multifractal_tau(double n, double kappa);
double multifractal_f(double alpha, double kappa);

// (1 - r^2/x^2)^{5/8}
double restriction_prob_semidisc(double x, double r);

enum class ArchConfig { I, II };

// Four-point arch partition functions with points 0 < x < 1 < infinity.
// Z_I pairs (0, x), Z_II pairs (x, 1); Z_I(x) = Z_II(1 - x).
double arch_partition(double x, double kappa, ArchConfig which);
double arch_prob_I(double x, double kappa, double p_I = 1.0, double p_II = 1.0);

struct LoopSeries {
    double value = 0.0;
    double remainder_bound = 0.0;
    double spectral_radius = 0.0;  // of alpha * A
};

// Row-major square matrix.
struct WeightMatrix {
    int n = 0;
    std::vector<double> a;
    double operator()(int i, int j) const { return a[static_cast<std::size_t>(i * n + j)]; }
};

// lambda * sum_{k <= n_max} alpha^k Tr(A^k) / k with a rigorous tail bound.
LoopSeries loop_measure_total(const WeightMatrix& A, double alpha, double lambda, int n_max);
double loop_log_det_total(const WeightMatrix& A, double alpha, double lambda);  // -lambda log det(1 - alpha A)
double unrooted_loop_weight(const std::vector<int>& cycle, const WeightMatrix& A, double alpha,
                            double lambda);

}  // namespace loewner_lab
