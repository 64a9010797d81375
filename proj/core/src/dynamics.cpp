#include "costas/dynamics.hpp"

#include <cmath>
#include <string>

#include "costas/detector.hpp"
#include "costas/error.hpp"
#include "costas/math.hpp"

namespace costas {

std::string_view to_string(ModelVariant v) {
  switch (v) {
    case ModelVariant::kSignalSpace:
      return "signal_space";
    case ModelVariant::kBasebandLpf:
      return "baseband_lpf";
    case ModelVariant::kAveragedPhase:
      return "averaged_phase";
  }
  return "unknown";
}

std::optional<ModelVariant> parse_variant(std::string_view name) {
  if (name == "signal_space") return ModelVariant::kSignalSpace;
  if (name == "baseband_lpf") return ModelVariant::kBasebandLpf;
  if (name == "averaged_phase") return ModelVariant::kAveragedPhase;
  return std::nullopt;
}

namespace {

template <class Block>
Block flatten(const LtiFilter& f) {
  Block blk;
  blk.n = static_cast<std::size_t>(f.order());
  blk.a.resize(blk.n * blk.n);
  for (std::size_t r = 0; r < blk.n; ++r)
    for (std::size_t c = 0; c < blk.n; ++c)
      blk.a[r * blk.n + c] = f.a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  blk.b.assign(f.b.data(), f.b.data() + f.b.size());
  blk.c.assign(f.c.data(), f.c.data() + f.c.size());
  blk.h = f.h;
  return blk;
}

void append(std::vector<double>& y, const FilterState& x) {
  y.insert(y.end(), x.data(), x.data() + x.size());
}

}  // namespace

double LoopModel::Block::out(const double* x) const {
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) acc += c[k] * x[k];
  return acc;
}

void LoopModel::Block::deriv(const double* x, double u, double* dx) const {
  for (std::size_t r = 0; r < n; ++r) {
    double acc = b[r] * u;
    const double* row = a.data() + r * n;
    for (std::size_t k = 0; k < n; ++k) acc += row[k] * x[k];
    dx[r] = acc;
  }
}

LoopModel::LoopModel(const LoopConfig& config, ModelVariant variant)
    : config_(config), variant_(variant) {
  for (const auto* f : {&config.loop_filter, &config.lpf1, &config.lpf2}) {
    const auto errors = f->dimension_errors();
    if (!errors.empty()) throw InvalidArgument("LoopModel: " + errors.front());
  }
  lf_ = flatten<Block>(config.loop_filter);
  polarity_ = static_cast<double>(config.detector_polarity);
  vco_gain_ = config.vco_detector_gain();
  omega_delta_ = omega_delta_free(config);
  if (variant == ModelVariant::kAveragedPhase) {
    lf_off_ = 0;
    dim_ = lf_.n + 1;
  } else {
    lpf1_ = flatten<Block>(config.lpf1);
    lpf2_ = flatten<Block>(config.lpf2);
    n1_ = lpf1_.n;
    n2_ = lpf2_.n;
    lf_off_ = n1_ + n2_;
    dim_ = lf_off_ + lf_.n + 1;
  }
}

double LoopModel::detector(std::span<const double> y) const {
  if (variant_ == ModelVariant::kAveragedPhase) {
    return polarity_ * pd_piecewise(y[phase_index()]);
  }
  const double q = lpf1_.out(y.data());
  const double i = lpf2_.out(y.data() + n1_);
  return polarity_ * pd_quadrature(q, i);
}

void LoopModel::rhs(double t, std::span<const double> y, std::span<double> dy) const {
  const double phi = detector(y);
  const double* x = y.data() + lf_off_;
  const double cx = lf_.out(x);
  lf_.deriv(x, phi, dy.data() + lf_off_);
  const double control = cx + vco_gain_ * phi;
  const double phase = y[phase_index()];

  switch (variant_) {
    case ModelVariant::kSignalSpace: {
      const double m1 = data_eval(config_.m1_spec, t);
      const double m2 = data_eval(config_.m2_spec, t);
      const double theta_ref = config_.omega_ref * t;
      const double input = m1 * std::cos(theta_ref) + m2 * std::sin(theta_ref);
      lpf1_.deriv(y.data(), std::cos(phase) * input, dy.data());
      lpf2_.deriv(y.data() + n1_, std::sin(phase) * input, dy.data() + n1_);
      dy[phase_index()] = config_.omega_vco_free + config_.k_vco * control;
      break;
    }
    case ModelVariant::kBasebandLpf: {
      const double m1 = data_eval(config_.m1_spec, t);
      const double m2 = data_eval(config_.m2_spec, t);
      const QiPair qi = baseband_qi(phase, m1, m2);
      lpf1_.deriv(y.data(), qi.q, dy.data());
      lpf2_.deriv(y.data() + n1_, qi.i, dy.data() + n1_);
      dy[phase_index()] = omega_delta_ - config_.k_vco * control;
      break;
    }
    case ModelVariant::kAveragedPhase:
      dy[phase_index()] = omega_delta_ - config_.k_vco * control;
      break;
  }
}

Observables LoopModel::observe(double t, std::span<const double> y) const {
  Observables obs;
  const double phi = detector(y);
  const double cx = lf_.out(y.data() + lf_off_);
  obs.g = cx + lf_.h * phi;
  obs.omega_vco = config_.omega_vco_free + config_.k_vco * (cx + vco_gain_ * phi);
  const double phase = y[phase_index()];
  switch (variant_) {
    case ModelVariant::kSignalSpace:
      obs.theta_delta = config_.omega_ref * t - phase;
      obs.q = lpf1_.out(y.data());
      obs.i = lpf2_.out(y.data() + n1_);
      break;
    case ModelVariant::kBasebandLpf:
      obs.theta_delta = phase;
      obs.q = lpf1_.out(y.data());
      obs.i = lpf2_.out(y.data() + n1_);
      break;
    case ModelVariant::kAveragedPhase: {
      obs.theta_delta = phase;
      const QiPair qi =
          baseband_qi(phase, data_eval(config_.m1_spec, t), data_eval(config_.m2_spec, t));
      obs.q = qi.q;
      obs.i = qi.i;
      break;
    }
  }
  return obs;
}

std::vector<double> LoopModel::initial_state() const {
  std::vector<double> y;
  y.reserve(dim_);
  if (variant_ != ModelVariant::kAveragedPhase) {
    if (config_.x_lpf1_0.size() != static_cast<Eigen::Index>(n1_) ||
        config_.x_lpf2_0.size() != static_cast<Eigen::Index>(n2_)) {
      throw InvalidArgument("initial low-pass filter state has the wrong dimension");
    }
    append(y, config_.x_lpf1_0);
    append(y, config_.x_lpf2_0);
  }
  if (config_.x_lf_0.size() != static_cast<Eigen::Index>(lf_.n)) {
    throw InvalidArgument("initial loop filter state has the wrong dimension");
  }
  append(y, config_.x_lf_0);
  y.push_back(variant_ == ModelVariant::kSignalSpace ? config_.theta_vco_0
                                                     : config_.initial_phase_difference());
  return y;
}

ModelState initial_state(const LoopConfig& config, ModelVariant variant) {
  return {variant, 0.0, LoopModel(config, variant).initial_state()};
}

namespace {

std::vector<double> eval_rhs(ModelVariant expected, double t, const ModelState& state,
                             const LoopConfig& config) {
  if (state.variant != expected) {
    throw InvalidArgument(std::string("right-hand side for ") + std::string(to_string(expected)) +
                          " called with a " + std::string(to_string(state.variant)) + " state");
  }
  const LoopModel model(config, expected);
  if (state.y.size() != model.dimension()) {
    throw InvalidArgument("state vector length " + std::to_string(state.y.size()) +
                          " does not match model dimension " + std::to_string(model.dimension()));
  }
  std::vector<double> dy(model.dimension());
  model.rhs(t, state.y, dy);
  return dy;
}

}  // namespace

std::vector<double> rhs_signal_space(double t, const ModelState& state, const LoopConfig& config) {
  return eval_rhs(ModelVariant::kSignalSpace, t, state, config);
}

std::vector<double> rhs_baseband_lpf(double t, const ModelState& state, const LoopConfig& config) {
  return eval_rhs(ModelVariant::kBasebandLpf, t, state, config);
}

std::vector<double> rhs_averaged(double t, const ModelState& state, const LoopConfig& config) {
  return eval_rhs(ModelVariant::kAveragedPhase, t, state, config);
}

double vco_frequency(const LoopConfig& config, double g) {
  return config.omega_vco_free + config.k_vco * g;
}

double initial_vco_frequency(const LoopConfig& config) {
  const double q = config.lpf1.c.dot(config.x_lpf1_0);
  const double i = config.lpf2.c.dot(config.x_lpf2_0);
  const double phi = static_cast<double>(config.detector_polarity) * pd_quadrature(q, i);
  return config.omega_vco_free + config.k_vco * config.loop_filter.c.dot(config.x_lf_0) +
         config.k_vco * config.vco_detector_gain() * phi;
}

}  // namespace costas
