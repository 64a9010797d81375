#pragma once

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "costas/config.hpp"
#include "costas/integrate.hpp"

namespace costas {

enum class EquilibriumKind { kNonsingularA, kIntegratorFilter };

/// Equilibria of the averaged phase model.
struct EquilibriumReport {
  EquilibriumKind kind = EquilibriumKind::kNonsingularA;
  /// Detector value phi must take at equilibrium; only for nonsingular A.
  std::optional<double> gamma;
  std::vector<double> theta_eq;             // in [0, 2 pi), ascending
  std::vector<Eigen::VectorXd> x_eq;        // one per theta_eq
};

/// Every equilibrium (x_eq, theta_eq) of the averaged model. An empty set is a
/// result, not an error. Throws SingularEvaluation when the DC loop gain is
/// zero, and InvalidArgument for a singular A that is not an integrator.
EquilibriumReport equilibria(const LoopConfig& config);

/// Jacobian of the averaged right-hand side at (x_eq, theta_eq), state order
/// (x, theta). Throws InvalidArgument within 1e-9 of a detector boundary.
Eigen::MatrixXd linearize(const LoopConfig& config, const Eigen::VectorXd& x_eq,
                          double theta_eq);
/// Uses the equilibrium filter state that belongs to theta_eq.
Eigen::MatrixXd linearize(const LoopConfig& config, double theta_eq);

/// Both characteristic polynomials at an equilibrium.
struct CharPoly {
  /// det(sI - J) with J from linearize(); monic.
  std::vector<double> jacobian;
  /// -N(s)(K cos th - s) + M(s) K cos th with H = M/N and N monic.
  std::vector<double> closed_form;
};
CharPoly char_poly(const LoopConfig& config, double theta_eq);

/// True iff every root has real part below -1e-12 * max |root|.
/// Throws InvalidArgument for a zero leading coefficient or degree 0.
bool hurwitz(const std::vector<double>& coeffs);

struct StabilityReport {
  double theta_eq = 0.0;
  std::vector<double> chi_coeffs;           // Jacobian path
  std::vector<double> closed_form_coeffs;   // diagnostic
  std::vector<std::complex<double>> roots;  // of chi_coeffs
  bool hurwitz = false;
};
StabilityReport stability(const LoopConfig& config, double theta_eq);

struct BandCheckReport {
  double omega_low = 0.0;
  double omega_high = 0.0;
  double magnitude_low = 0.0;
  double phase_lag_low = 0.0;  // rad, -arg H(i omega_low)
  double magnitude_high = 0.0;
  bool pass = false;
};

/// Passband/stopband check of a branch filter: passes when
/// |H(i omega_low)| in [0.9, 1.1] and |H(i omega_high)| <= 0.3.
BandCheckReport lpf_band_check(const LtiFilter& f, double omega_low, double omega_high);

struct LockThresholds {
  std::optional<double> window;     // s; default 20% of the horizon
  std::optional<double> eps_f;      // rad/s; default max(100, 1e-4 w_ref)
  double eps_theta = 0.2;           // rad
};

struct LockVerdict {
  bool locked = false;
  double mean_freq_error = 0.0;  // mean of w_ref - w_vco over the window, rad/s
  double theta_drift = 0.0;      // rad over the window
  double window = 0.0;
  double final_theta_mod = 0.0;  // theta_delta(t_end) mod pi/2
  double eps_f = 0.0;
  double eps_theta = 0.0;
};

/// max(100, 1e-4 w_ref) rad/s.
double default_eps_f(const LoopConfig& config);

/// Lock decision over the trailing window of a trace. The window is at least
/// 100 / |w_delta_free| when the detuning is at least eps_f (smaller detunings
/// are inside the frequency tolerance anyway); the trace must span five
/// windows or TraceTooShort is thrown.
LockVerdict detect_lock(const Trace& trace, const LoopConfig& config,
                        const LockThresholds& thresholds = {});

/// Window detect_lock would use for a horizon, before the length check.
double lock_window(double horizon, const LoopConfig& config,
                   const LockThresholds& thresholds = {});

}  // namespace costas
