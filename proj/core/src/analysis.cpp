#include "costas/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "costas/detector.hpp"
#include "costas/dynamics.hpp"
#include "costas/error.hpp"
#include "costas/math.hpp"
#include "costas/poly.hpp"

namespace costas {

namespace {

double wrap_two_pi(double theta) {
  double w = std::fmod(theta, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w = 0.0;
  return w;
}

// Largest |component| of the averaged right-hand side at (x, theta).
double residual(const LoopConfig& config, const Eigen::VectorXd& x, double theta) {
  ModelState st{ModelVariant::kAveragedPhase, 0.0, {}};
  st.y.assign(x.data(), x.data() + x.size());
  st.y.push_back(theta);
  const auto dy = rhs_averaged(0.0, st, config);
  double r = 0.0;
  for (double v : dy) r = std::max(r, std::abs(v));
  return r;
}

}  // namespace

EquilibriumReport equilibria(const LoopConfig& config) {
  const LtiFilter& lf = config.loop_filter;
  if (const auto errors = lf.dimension_errors(); !errors.empty()) {
    throw InvalidArgument("equilibria: " + errors.front());
  }
  const double k = config.k_vco;
  const double w_delta = omega_delta_free(config);
  const double p = static_cast<double>(config.detector_polarity);

  EquilibriumReport report;
  std::vector<std::pair<double, Eigen::VectorXd>> found;

  Eigen::FullPivLU<Eigen::MatrixXd> lu(lf.a);
  if (lu.isInvertible()) {
    // A x + b phi = 0 and w_delta - K (c.x + h phi) = 0 give
    // phi = w_delta / (K (h - c.A^-1 b)) = w_delta / (K H(0)).
    report.kind = EquilibriumKind::kNonsingularA;
    const Eigen::VectorXd a_inv_b = lu.solve(lf.b);
    const double dc_gain = config.vco_detector_gain() - lf.c.dot(a_inv_b);
    if (dc_gain == 0.0) throw SingularEvaluation("equilibria: loop DC gain is zero");
    const double gamma = w_delta / (k * dc_gain);
    report.gamma = gamma;
    const double target = gamma / p;  // value of pd_piecewise at equilibrium
    if (std::abs(target) <= kInvSqrt2 * (1.0 + 1e-15)) {
      const double principal = -std::asin(std::clamp(target, -1.0, 1.0));
      const Eigen::VectorXd x_eq = -a_inv_b * gamma;
      for (int q = 0; q < 4; ++q) {
        found.emplace_back(wrap_two_pi(principal + q * kHalfPi), x_eq);
      }
    }
  } else {
    // Singular A: the detector output must vanish unless b lies in range(A).
    report.kind = EquilibriumKind::kIntegratorFilter;
    Eigen::MatrixXd ab(lf.a.rows(), lf.a.cols() + 1);
    ab << lf.a, lf.b;
    Eigen::FullPivLU<Eigen::MatrixXd> lu_ab(ab);
    if (lu_ab.rank() == lu.rank()) {
      throw InvalidArgument("equilibria: singular A with b in range(A) is not an integrator filter");
    }
    const Eigen::MatrixXd kernel = lu.kernel();
    const Eigen::RowVectorXd ck = lf.c.transpose() * kernel;
    Eigen::VectorXd x_eq = Eigen::VectorXd::Zero(lf.order());
    bool solvable = true;
    if (ck.squaredNorm() > 0.0) {
      x_eq = kernel * (ck.transpose() / ck.squaredNorm()) * (w_delta / k);
    } else {
      solvable = w_delta == 0.0;
    }
    if (solvable) {
      for (int q = 0; q < 4; ++q) found.emplace_back(q * kHalfPi, x_eq);
    }
  }

  std::sort(found.begin(), found.end(),
            [](const auto& l, const auto& r) { return l.first < r.first; });
  const double scale = 1.0 + std::abs(w_delta);
  for (auto& [theta, x] : found) {
    // Candidates on a detector boundary only survive if the right-limit
    // convention actually balances the loop there.
    if (residual(config, x, theta) > 1e-9 * scale) continue;
    report.theta_eq.push_back(theta);
    report.x_eq.push_back(x);
  }
  return report;
}

Eigen::MatrixXd linearize(const LoopConfig& config, const Eigen::VectorXd& x_eq,
                          double theta_eq) {
  (void)x_eq;  // the averaged model is affine in x
  if (distance_to_pd_boundary(theta_eq) < 1e-9) {
    std::ostringstream os;
    os << "linearize: theta_eq = " << theta_eq << " lies on a detector boundary";
    throw InvalidArgument(os.str());
  }
  const LtiFilter& lf = config.loop_filter;
  const Eigen::Index n = lf.order();
  const double p = static_cast<double>(config.detector_polarity);
  const double k = config.k_vco;
  const double slope = p * pd_piecewise_slope(theta_eq);

  Eigen::MatrixXd j(n + 1, n + 1);
  j.topLeftCorner(n, n) = lf.a;
  j.topRightCorner(n, 1) = lf.b * slope;
  j.bottomLeftCorner(1, n) = -k * lf.c.transpose();
  j(n, n) = -k * config.vco_detector_gain() * slope;
  return j;
}

Eigen::MatrixXd linearize(const LoopConfig& config, double theta_eq) {
  const EquilibriumReport eq = equilibria(config);
  const double wrapped = wrap_two_pi(theta_eq);
  for (std::size_t idx = 0; idx < eq.theta_eq.size(); ++idx) {
    const double d = std::abs(eq.theta_eq[idx] - wrapped);
    if (d < 1e-9 || std::abs(d - kTwoPi) < 1e-9) return linearize(config, eq.x_eq[idx], theta_eq);
  }
  std::ostringstream os;
  os << "linearize: theta = " << theta_eq << " is not an equilibrium";
  throw InvalidArgument(os.str());
}

CharPoly char_poly(const LoopConfig& config, double theta_eq) {
  CharPoly out;
  out.jacobian = poly::characteristic(linearize(config, theta_eq));

  const TransferPolynomials tf = transfer_polynomials(config.loop_filter);
  const double kc = config.k_vco * std::cos(theta_eq);
  // -N(s) (K cos th - s) + M(s) K cos th
  const std::vector<double> lhs = poly::multiply(tf.denominator, {1.0, -kc});
  out.closed_form = poly::trim(poly::add(lhs, poly::scale(tf.numerator, kc)));
  return out;
}

bool hurwitz(const std::vector<double>& coeffs) {
  if (coeffs.size() < 2) throw InvalidArgument("hurwitz: polynomial degree must be at least 1");
  if (coeffs.front() == 0.0) throw InvalidArgument("hurwitz: zero leading coefficient");
  const auto r = poly::roots(coeffs);
  double max_abs = 0.0;
  for (const auto& z : r) max_abs = std::max(max_abs, std::abs(z));
  if (max_abs == 0.0) return false;
  return std::all_of(r.begin(), r.end(),
                     [&](const std::complex<double>& z) { return z.real() < -1e-12 * max_abs; });
}

StabilityReport stability(const LoopConfig& config, double theta_eq) {
  StabilityReport rep;
  rep.theta_eq = theta_eq;
  const CharPoly cp = char_poly(config, theta_eq);
  rep.chi_coeffs = cp.jacobian;
  rep.closed_form_coeffs = cp.closed_form;
  rep.roots = poly::roots(cp.jacobian);
  rep.hurwitz = hurwitz(cp.jacobian);
  return rep;
}

BandCheckReport lpf_band_check(const LtiFilter& f, double omega_low, double omega_high) {
  if (!(omega_low < omega_high)) throw InvalidArgument("lpf_band_check: need omega_low < omega_high");
  BandCheckReport rep;
  rep.omega_low = omega_low;
  rep.omega_high = omega_high;
  const auto h_low = transfer_eval(f, {0.0, omega_low});
  const auto h_high = transfer_eval(f, {0.0, omega_high});
  rep.magnitude_low = std::abs(h_low);
  rep.phase_lag_low = -std::arg(h_low);
  rep.magnitude_high = std::abs(h_high);
  rep.pass = rep.magnitude_low >= 0.9 && rep.magnitude_low <= 1.1 && rep.magnitude_high <= 0.3;
  return rep;
}

double default_eps_f(const LoopConfig& config) { return std::max(100.0, 1e-4 * config.omega_ref); }

double lock_window(double horizon, const LoopConfig& config, const LockThresholds& thresholds) {
  double window = thresholds.window.value_or(0.2 * horizon);
  const double w_delta = std::abs(omega_delta_free(config));
  if (w_delta >= thresholds.eps_f.value_or(default_eps_f(config))) {
    window = std::max(window, 100.0 / w_delta);
  }
  return window;
}

LockVerdict detect_lock(const Trace& trace, const LoopConfig& config,
                        const LockThresholds& thresholds) {
  if (trace.size() < 2) throw TraceTooShort("detect_lock: trace has fewer than two samples");
  const double t_end = trace.t.back();
  const double horizon = t_end - trace.t.front();
  const double window = lock_window(horizon, config, thresholds);
  if (horizon < 5.0 * window * (1.0 - 1e-9)) {
    std::ostringstream os;
    os << "detect_lock: trace spans " << horizon << " s, needs five windows of " << window << " s";
    throw TraceTooShort(os.str());
  }

  // Last sample at or before t_end - window.
  const double t_start = t_end - window;
  auto it = std::upper_bound(trace.t.begin(), trace.t.end(), t_start + 1e-12 * std::abs(t_end));
  std::size_t j = static_cast<std::size_t>(std::distance(trace.t.begin(), it));
  j = j == 0 ? 0 : j - 1;
  const std::size_t last = trace.size() - 1;
  if (j == last) j = last - 1;

  LockVerdict v;
  v.window = window;
  v.eps_theta = thresholds.eps_theta;
  v.eps_f = thresholds.eps_f.value_or(default_eps_f(config));
  v.theta_drift = trace.theta_delta[last] - trace.theta_delta[j];
  // Time average of w_ref - w_vco = d theta_delta / dt over the window.
  v.mean_freq_error = v.theta_drift / (t_end - trace.t[j]);
  double m = std::fmod(trace.theta_delta[last], kHalfPi);
  if (m < 0.0) m += kHalfPi;
  if (m >= kHalfPi) m = 0.0;
  v.final_theta_mod = m;
  v.locked = std::abs(v.mean_freq_error) < v.eps_f && std::abs(v.theta_drift) < v.eps_theta;
  return v;
}

}  // namespace costas
