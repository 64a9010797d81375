#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "costas/lti.hpp"

namespace costas {

enum class DataKind { kConstant, kSquare };

/// Data signal m(t): a constant symbol or the square wave sign(sin(omega_m t)).
struct DataSignalSpec {
  DataKind kind = DataKind::kConstant;
  double value = 1.0;    // constant kind
  double omega_m = 0.0;  // square kind, rad/s

  static DataSignalSpec constant(double v) { return {DataKind::kConstant, v, 0.0}; }
  static DataSignalSpec square(double omega_m) { return {DataKind::kSquare, 1.0, omega_m}; }

  bool operator==(const DataSignalSpec&) const = default;
};

/// m(t) for t >= 0. Square waves map sin(omega_m t) == 0 to +1.
double data_eval(const DataSignalSpec& spec, double t);

/// Gain applied to the phase-detector term entering the VCO.
enum class VcoPdGain {
  /// VCO input is K * g with g = c.x + h*phi, h taken from the loop filter.
  kLoopFilterH,
  /// VCO input is K * (c.x + phi): the detector term enters with unit gain.
  kUnity,
};

/// Every parameter of one Costas loop run. Angular frequencies are rad/s.
struct LoopConfig {
  double omega_ref = 0.0;
  double omega_vco_free = 0.0;
  double k_vco = 0.0;
  double theta_vco_0 = 0.0;
  int detector_polarity = +1;

  LtiFilter loop_filter;
  LtiFilter lpf1;
  LtiFilter lpf2;

  DataSignalSpec m1_spec;
  DataSignalSpec m2_spec;

  FilterState x_lf_0;
  FilterState x_lpf1_0;
  FilterState x_lpf2_0;

  /// Initial phase difference for the phase-domain models. When unset it is
  /// derived as -theta_vco_0 (the reference phase starts at zero).
  std::optional<double> theta_delta_0;

  VcoPdGain vco_pd_gain = VcoPdGain::kLoopFilterH;

  /// Gain in front of the detector term on the VCO path (h or 1).
  double vco_detector_gain() const {
    return vco_pd_gain == VcoPdGain::kLoopFilterH ? loop_filter.h : 1.0;
  }
  double initial_phase_difference() const { return theta_delta_0.value_or(-theta_vco_0); }
};

struct Violation {
  std::string field;
  std::string reason;
};

/// Every invariant breach of the config; empty when valid. Never throws.
std::vector<Violation> validate(const LoopConfig& config);

struct DerivedQuantities {
  double omega_delta_free = 0.0;
};

/// omega_ref - omega_vco_free.
double omega_delta_free(const LoopConfig& config);
DerivedQuantities derived_quantities(const LoopConfig& config);

}  // namespace costas
