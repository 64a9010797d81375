#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "costas/config.hpp"

namespace costas {

/// Model fidelity.
///   kSignalSpace   state (x1, x2, x, theta_vco), carrier-rate signals
///   kBasebandLpf   state (x1, x2, x, theta_delta), branch filters driven by
///                  the low-frequency Q/I approximation
///   kAveragedPhase state (x, theta_delta), ideal branch filters
enum class ModelVariant { kSignalSpace, kBasebandLpf, kAveragedPhase };

std::string_view to_string(ModelVariant v);
std::optional<ModelVariant> parse_variant(std::string_view name);

struct ModelState {
  ModelVariant variant = ModelVariant::kAveragedPhase;
  double t = 0.0;
  std::vector<double> y;
};

/// Signals derived from a state at one instant.
struct Observables {
  double theta_delta = 0.0;
  double omega_vco = 0.0;
  double g = 0.0;  // loop filter output
  double q = 0.0;
  double i = 0.0;
};

/// Right-hand side of one model fidelity, prepared from a LoopConfig.
///
/// Filter matrices are copied into flat row-major buffers so that rhs() does
/// not allocate; it is called four times per RK4 step at carrier resolution.
class LoopModel {
 public:
  LoopModel(const LoopConfig& config, ModelVariant variant);

  ModelVariant variant() const { return variant_; }
  std::size_t dimension() const { return dim_; }
  const LoopConfig& config() const { return config_; }

  /// Offsets of x1, x2, x and the phase coordinate inside the flat state.
  std::size_t lpf1_offset() const { return 0; }
  std::size_t lpf2_offset() const { return n1_; }
  std::size_t loop_filter_offset() const { return lf_off_; }
  std::size_t phase_index() const { return dim_ - 1; }

  void rhs(double t, std::span<const double> y, std::span<double> dy) const;
  Observables observe(double t, std::span<const double> y) const;
  std::vector<double> initial_state() const;

 private:
  struct Block {
    std::size_t n = 0;
    std::vector<double> a;  // row-major n x n
    std::vector<double> b;
    std::vector<double> c;
    double h = 0.0;

    double out(const double* x) const;
    void deriv(const double* x, double u, double* dx) const;
  };

  double detector(std::span<const double> y) const;

  LoopConfig config_;
  ModelVariant variant_;
  Block lpf1_, lpf2_, lf_;
  std::size_t n1_ = 0, n2_ = 0, lf_off_ = 0, dim_ = 0;
  double polarity_ = 1.0;
  double vco_gain_ = 0.0;
  double omega_delta_ = 0.0;
};

ModelState initial_state(const LoopConfig& config, ModelVariant variant);

std::vector<double> rhs_signal_space(double t, const ModelState& state, const LoopConfig& config);
std::vector<double> rhs_baseband_lpf(double t, const ModelState& state, const LoopConfig& config);
std::vector<double> rhs_averaged(double t, const ModelState& state, const LoopConfig& config);

/// omega_vco_free + K g.
double vco_frequency(const LoopConfig& config, double g);

/// VCO frequency at t = 0 from the configured filter states:
///   w_free + K c.x(0) + K h p ((c2.x2(0)) sign(c1.x1(0)) - (c1.x1(0)) sign(c2.x2(0)))
double initial_vco_frequency(const LoopConfig& config);

}  // namespace costas
