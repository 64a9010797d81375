#include "costas/detector.hpp"

#include <algorithm>
#include <cmath>

#include "costas/math.hpp"

namespace costas {

double pd_quadrature(double q, double i) {
  return i * limiter_sign(q) - q * limiter_sign(i);
}

PdSample pd_sample(double q, double i) { return {q, i, pd_quadrature(q, i)}; }

QiPair baseband_qi(double theta_delta, double m1, double m2) {
  const double c = std::cos(theta_delta);
  const double s = std::sin(theta_delta);
  return {0.5 * (m1 * c + m2 * s), 0.5 * (-m1 * s + m2 * c)};
}

int pd_branch(double theta_delta) {
  double w = std::fmod(theta_delta + kQuarterPi, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  const int k = static_cast<int>(std::floor(w / kHalfPi));
  return std::clamp(k, 0, 3);
}

double pd_piecewise(double theta_delta) {
  switch (pd_branch(theta_delta)) {
    case 0:
      return -std::sin(theta_delta);
    case 1:
      return std::cos(theta_delta);
    case 2:
      return std::sin(theta_delta);
    default:
      return -std::cos(theta_delta);
  }
}

double pd_piecewise_slope(double theta_delta) {
  switch (pd_branch(theta_delta)) {
    case 0:
      return -std::cos(theta_delta);
    case 1:
      return -std::sin(theta_delta);
    case 2:
      return std::cos(theta_delta);
    default:
      return std::sin(theta_delta);
  }
}

double distance_to_pd_boundary(double theta_delta) {
  double w = std::fmod(theta_delta - kQuarterPi, kHalfPi);
  if (w < 0.0) w += kHalfPi;
  return std::min(w, kHalfPi - w);
}

double pd_sin_form(double theta_delta) {
  const double plus = std::sin(theta_delta + kQuarterPi);
  const double minus = std::sin(theta_delta - kQuarterPi);
  return kInvSqrt2 * (plus * limiter_sign(minus) - minus * limiter_sign(plus));
}

}  // namespace costas
