#pragma once

namespace costas {

/// Branch outputs and the resulting detector signal at one instant.
struct PdSample {
  double q = 0.0;
  double i = 0.0;
  double phi = 0.0;
};

/// Limiter-based QPSK detector: i * sign(q) - q * sign(i), with sign(0) = +1.
double pd_quadrature(double q, double i);
PdSample pd_sample(double q, double i);

struct QiPair {
  double q = 0.0;
  double i = 0.0;
};

/// Low-frequency branch signals after ideal low-pass filtering:
///   q = (m1 cos th + m2 sin th) / 2,  i = (-m1 sin th + m2 cos th) / 2.
QiPair baseband_qi(double theta_delta, double m1, double m2);

/// Index 0..3 of the quarter interval [-pi/4 + k pi/2, pi/4 + k pi/2) that
/// contains theta after wrapping to [-pi/4, 7pi/4).
int pd_branch(double theta_delta);

/// Averaged detector characteristic: -sin, cos, sin, -cos on the four quarter
/// intervals. Accepts unwrapped angles; at a boundary the right-limit branch
/// is used.
double pd_piecewise(double theta_delta);

/// d/dtheta of pd_piecewise on the active branch.
double pd_piecewise_slope(double theta_delta);

/// Distance from theta to the nearest branch boundary pi/4 + k pi/2.
double distance_to_pd_boundary(double theta_delta);

/// The same characteristic in sin/sign form:
///   (sin(th + pi/4) sign(sin(th - pi/4)) - sin(th - pi/4) sign(sin(th + pi/4))) / sqrt(2)
double pd_sin_form(double theta_delta);

}  // namespace costas
