#include "costas/integrate.hpp"

#include <algorithm>
#include <cmath>

#include "costas/json_io.hpp"
#include "costas/math.hpp"

namespace costas {

namespace {

double spectral_radius(const Eigen::MatrixXd& a) {
  if (a.rows() == 0) return 0.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(a, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

// Rough angular bandwidth of the closed loop: filter poles, the proportional
// path K h and the integral path sqrt(K |c.b|).
double loop_bandwidth(const LoopConfig& config) {
  const LtiFilter& lf = config.loop_filter;
  const double k = std::abs(config.k_vco);
  return spectral_radius(lf.a) + k * std::abs(config.vco_detector_gain()) +
         std::sqrt(k * std::abs(lf.c.dot(lf.b)));
}

}  // namespace

double default_dt(const LoopConfig& config, ModelVariant variant, double steps_per_period) {
  double fastest = loop_bandwidth(config);
  if (variant != ModelVariant::kAveragedPhase) {
    fastest = std::max({fastest, spectral_radius(config.lpf1.a), spectral_radius(config.lpf2.a)});
  }
  if (variant == ModelVariant::kSignalSpace) {
    fastest = std::max(fastest, 2.0 * config.omega_ref);
  }
  if (!(fastest > 0.0)) fastest = 1.0;
  return kTwoPi / (steps_per_period * fastest);
}

SimPlan default_plan(const LoopConfig& config, ModelVariant variant, double t_end,
                     std::size_t max_samples) {
  SimPlan plan;
  plan.variant = variant;
  plan.t_end = t_end;
  const double dt = default_dt(config, variant);
  const auto raw = static_cast<std::size_t>(std::max(1.0, std::ceil(t_end / dt)));
  const std::size_t cap = std::max<std::size_t>(1, max_samples);
  plan.decimation = std::max<std::size_t>(1, (raw + cap - 1) / cap);
  // round the step count up to a whole number of decimation blocks so the last sample sits at t_end
  const std::size_t steps = (raw + plan.decimation - 1) / plan.decimation * plan.decimation;
  plan.dt = t_end / static_cast<double>(steps);
  return plan;
}

std::vector<double> rk4_step(const RhsFunction& rhs, double t, std::span<const double> y,
                             double dt) {
  std::vector<double> out(y.begin(), y.end());
  Rk4Workspace ws(out.size());
  rk4_step(rhs, t, std::span<double>(out), dt, ws);
  return out;
}

std::uint64_t config_hash(const LoopConfig& config) {
  const std::string text = Json(config).dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

Trace simulate(const LoopConfig& config, const SimPlan& plan) {
  if (const auto errors = validate(plan); !errors.empty()) {
    throw InvalidArgument("invalid plan: " + errors.front());
  }
  if (const auto violations = validate(config); !violations.empty()) {
    throw InvalidArgument("invalid config: " + violations.front().field + ": " +
                          violations.front().reason);
  }
  const auto steps = static_cast<std::size_t>(std::llround(plan.t_end / plan.dt));
  if (steps < plan.decimation) {
    throw InvalidArgument("plan records fewer than two samples");
  }

  const LoopModel model(config, plan.variant);
  std::vector<double> y = model.initial_state();
  Rk4Workspace ws(y.size());
  auto rhs = [&model](double t, std::span<const double> s, std::span<double> ds) {
    model.rhs(t, s, ds);
  };

  Trace trace;
  trace.plan = plan;
  trace.config_hash = config_hash(config);
  trace.reserve(steps / plan.decimation + 1);
  trace.push(0.0, model.observe(0.0, y));

  for (std::size_t n = 0; n < steps; ++n) {
    const double t = static_cast<double>(n) * plan.dt;
    rk4_step(rhs, t, std::span<double>(y), plan.dt, ws);
    if ((n + 1) % plan.decimation == 0) {
      const double t_next = static_cast<double>(n + 1) * plan.dt;
      trace.push(t_next, model.observe(t_next, y));
    }
  }
  return trace;
}

}  // namespace costas
