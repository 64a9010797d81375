#include "costas/lti.hpp"

#include <cmath>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "costas/error.hpp"
#include "costas/poly.hpp"

namespace costas {

std::vector<std::string> LtiFilter::dimension_errors() const {
  std::vector<std::string> errors;
  if (a.rows() < 1) {
    errors.emplace_back("A must be at least 1x1");
    return errors;
  }
  if (a.rows() != a.cols()) {
    std::ostringstream os;
    os << "A must be square, got " << a.rows() << "x" << a.cols();
    errors.push_back(os.str());
  }
  if (b.size() != a.rows()) {
    std::ostringstream os;
    os << "b has length " << b.size() << ", expected " << a.rows();
    errors.push_back(os.str());
  }
  if (c.size() != a.rows()) {
    std::ostringstream os;
    os << "c has length " << c.size() << ", expected " << a.rows();
    errors.push_back(os.str());
  }
  return errors;
}

LtiFilter make_pi_loop_filter(double tau1, double tau2) {
  if (!(tau1 > 0.0)) throw InvalidArgument("PI loop filter needs tau1 > 0");
  if (!(tau2 >= 0.0)) throw InvalidArgument("PI loop filter needs tau2 >= 0");
  LtiFilter f;
  f.a = Eigen::MatrixXd::Zero(1, 1);
  f.b = Eigen::VectorXd::Ones(1);
  f.c = Eigen::VectorXd::Constant(1, 1.0 / tau1);
  f.h = tau2 / tau1;
  return f;
}

LtiFilter make_first_order_lpf(double omega_lpf, LpfRealization realization) {
  if (!(omega_lpf > 0.0)) throw InvalidArgument("low-pass filter needs omega_lpf > 0");
  LtiFilter f;
  f.a = Eigen::MatrixXd::Constant(1, 1, -omega_lpf);
  f.b = Eigen::VectorXd::Constant(
      1, realization == LpfRealization::kUnitDcGain ? omega_lpf : 1.0);
  f.c = Eigen::VectorXd::Ones(1);
  f.h = 0.0;
  return f;
}

double output(const LtiFilter& f, const FilterState& x, double u) {
  return f.c.dot(x) + f.h * u;
}

Eigen::VectorXd derivative(const LtiFilter& f, const FilterState& x, double u) {
  return f.a * x + f.b * u;
}

Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& a, double t) {
  if (a.rows() == 1 && a.cols() == 1) {
    return Eigen::MatrixXd::Constant(1, 1, std::exp(a(0, 0) * t));
  }
  const Eigen::MatrixXd at = a * t;
  return at.exp();
}

double free_response(const LtiFilter& f, const FilterState& x0, double t) {
  if (x0.size() != f.order()) throw InvalidArgument("free_response: state dimension mismatch");
  if (x0.isZero(0.0)) return 0.0;
  return f.c.dot(matrix_exponential(f.a, t) * x0);
}

double impulse_response(const LtiFilter& f, double t) {
  return f.c.dot(matrix_exponential(f.a, t) * f.b);
}

std::complex<double> transfer_eval(const LtiFilter& f, std::complex<double> s) {
  using CMatrix = Eigen::MatrixXcd;
  const Eigen::Index n = f.order();
  CMatrix m = f.a.cast<std::complex<double>>();
  m.diagonal().array() -= s;
  Eigen::FullPivLU<CMatrix> lu(m);
  // Relative threshold on the pivots; exact poles give an exact zero pivot
  // for the filters in scope.
  lu.setThreshold(1e-14);
  if (!lu.isInvertible()) {
    std::ostringstream os;
    os << "transfer_eval: s = " << s << " is an eigenvalue of A";
    throw SingularEvaluation(os.str());
  }
  const Eigen::VectorXcd bc = f.b.cast<std::complex<double>>();
  const Eigen::VectorXcd sol = lu.solve(bc);
  std::complex<double> acc = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) acc += f.c(k) * sol(k);
  return -acc + f.h;
}

std::vector<double> convolution_solution(const LtiFilter& f, const FilterState& x0,
                                         std::span<const double> u,
                                         std::span<const double> t_grid) {
  if (t_grid.empty()) throw InvalidArgument("convolution_solution: empty grid");
  if (u.size() != t_grid.size()) {
    throw InvalidArgument("convolution_solution: input and grid lengths differ");
  }
  const std::size_t n = t_grid.size();
  const double dt = n > 1 ? t_grid[1] - t_grid[0] : 0.0;
  if (n > 1) {
    for (std::size_t k = 1; k < n; ++k) {
      const double step = t_grid[k] - t_grid[k - 1];
      if (!(step > 0.0) || std::abs(step - dt) > 1e-9 * std::abs(dt)) {
        throw InvalidArgument("convolution_solution: grid must be uniform and increasing");
      }
    }
  }

  // Impulse response on the lag grid gamma_k = gamma(k dt).
  std::vector<double> gamma(n);
  for (std::size_t k = 0; k < n; ++k) gamma[k] = impulse_response(f, static_cast<double>(k) * dt);

  const bool zero_state = x0.isZero(0.0);
  std::vector<double> y(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double tk = t_grid[k] - t_grid[0];
    double integral = 0.0;
    // Interval [t_j, t_j+1) carries u[j]; lags are k - j and k - j - 1.
    for (std::size_t j = 0; j < k; ++j) {
      integral += 0.5 * dt * (gamma[k - j] + gamma[k - j - 1]) * u[j];
    }
    const double alpha = zero_state ? 0.0 : free_response(f, x0, tk);
    y[k] = alpha + f.h * u[k] + integral;
  }
  return y;
}

TransferPolynomials transfer_polynomials(const LtiFilter& f) {
  // c (sI - A)^-1 b = det(sI - A + b c^T) / det(sI - A) - 1
  const std::vector<double> den = poly::characteristic(f.a);
  const Eigen::MatrixXd shifted = f.a - f.b * f.c.transpose();
  const std::vector<double> shifted_den = poly::characteristic(shifted);
  std::vector<double> num = poly::add(shifted_den, poly::scale(den, f.h - 1.0));
  return {poly::trim(num), den};
}

bool is_hurwitz_matrix(const Eigen::MatrixXd& a) {
  if (a.rows() == 0) return true;
  Eigen::EigenSolver<Eigen::MatrixXd> es(a, false);
  return (es.eigenvalues().real().array() < 0.0).all();
}

}  // namespace costas
