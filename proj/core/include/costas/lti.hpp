#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace costas {

/// Single-input single-output state-space filter
///
///   dx/dt = A x + b u,   y = c . x + h u
///
/// used both for the loop filter and for the two branch low-pass filters.
struct LtiFilter {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  Eigen::VectorXd c;
  double h = 0.0;

  Eigen::Index order() const { return a.rows(); }

  /// Human-readable dimension problems; empty when the realization is consistent.
  std::vector<std::string> dimension_errors() const;
};

/// Internal state of a filter; its length must equal the filter order.
using FilterState = Eigen::VectorXd;

/// How make_first_order_lpf maps 1/(s/w + 1) onto (A, b, c).
enum class LpfRealization {
  /// a = -w, b = w, c = 1: unit DC gain, the state equals the output.
  kUnitDcGain,
  /// a = -w, b = 1, c = 1 as commonly written, which realizes 1/(s + w)
  /// and so carries a 1/w gain error. Kept for fidelity experiments.
  kPrinted,
};

/// Proportional-integral loop filter (tau2 s + 1) / (tau1 s).
LtiFilter make_pi_loop_filter(double tau1, double tau2);

LtiFilter make_first_order_lpf(double omega_lpf,
                               LpfRealization realization = LpfRealization::kUnitDcGain);

double output(const LtiFilter& f, const FilterState& x, double u);
Eigen::VectorXd derivative(const LtiFilter& f, const FilterState& x, double u);

/// exp(A t). Closed form for 1x1, Pade scaling-and-squaring otherwise.
Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& a, double t);

/// Zero-input output c . exp(A t) x0.
double free_response(const LtiFilter& f, const FilterState& x0, double t);

/// Impulse response c . exp(A t) b (the feedthrough impulse is not included).
double impulse_response(const LtiFilter& f, double t);

/// H(s) = -c (A - sI)^-1 b + h. Throws SingularEvaluation when s is an
/// eigenvalue of A.
std::complex<double> transfer_eval(const LtiFilter& f, std::complex<double> s);

/// Output of the filter computed from the closed-form convolution solution
///
///   y(t) = c exp(At) x0 + h u(t) + int_0^t gamma(t - tau) u(tau) dtau
///
/// on a uniform grid. u[k] is the input held on [t_k, t_{k+1}); the integral
/// is evaluated with the trapezoid rule on each grid interval. Intended as an
/// independent check of ODE integration, not as a simulation path.
std::vector<double> convolution_solution(const LtiFilter& f, const FilterState& x0,
                                         std::span<const double> u,
                                         std::span<const double> t_grid);

/// Numerator M(s) and denominator N(s) = det(sI - A) of H(s), coefficients in
/// descending powers of s.
struct TransferPolynomials {
  std::vector<double> numerator;
  std::vector<double> denominator;
};
TransferPolynomials transfer_polynomials(const LtiFilter& f);

/// True when every eigenvalue of A has strictly negative real part.
bool is_hurwitz_matrix(const Eigen::MatrixXd& a);

}  // namespace costas
