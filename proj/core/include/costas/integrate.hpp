#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "costas/config.hpp"
#include "costas/dynamics.hpp"
#include "costas/error.hpp"
#include "costas/trace.hpp"

namespace costas {

/// Step size resolving the fastest active time scale with 200 steps per
/// period: 2 w_ref for the signal-space model, w_lpf for the baseband model,
/// and the linearized loop bandwidth for every model.
double default_dt(const LoopConfig& config, ModelVariant variant,
                  double steps_per_period = 200.0);

/// Plan with default_dt and a decimation that keeps about max_samples rows.
SimPlan default_plan(const LoopConfig& config, ModelVariant variant, double t_end,
                     std::size_t max_samples = 20000);

/// Scratch buffers for rk4_step, sized once per run.
struct Rk4Workspace {
  explicit Rk4Workspace(std::size_t n) : k1(n), k2(n), k3(n), k4(n), tmp(n) {}
  std::vector<double> k1, k2, k3, k4, tmp;
};

/// Classical four-stage Runge-Kutta step in place. Discontinuous right-hand
/// sides are evaluated as-is at the stage points. Throws IntegrationDiverged
/// when the new state is not finite.
template <class Rhs>
void rk4_step(Rhs&& rhs, double t, std::span<double> y, double dt, Rk4Workspace& ws) {
  const std::size_t n = y.size();
  auto& k1 = ws.k1;
  auto& k2 = ws.k2;
  auto& k3 = ws.k3;
  auto& k4 = ws.k4;
  auto& tmp = ws.tmp;
  const double half = 0.5 * dt;

  rhs(t, std::span<const double>(y.data(), n), std::span<double>(k1.data(), n));
  for (std::size_t j = 0; j < n; ++j) tmp[j] = y[j] + half * k1[j];
  rhs(t + half, std::span<const double>(tmp.data(), n), std::span<double>(k2.data(), n));
  for (std::size_t j = 0; j < n; ++j) tmp[j] = y[j] + half * k2[j];
  rhs(t + half, std::span<const double>(tmp.data(), n), std::span<double>(k3.data(), n));
  for (std::size_t j = 0; j < n; ++j) tmp[j] = y[j] + dt * k3[j];
  rhs(t + dt, std::span<const double>(tmp.data(), n), std::span<double>(k4.data(), n));

  const double sixth = dt / 6.0;
  bool finite = true;
  for (std::size_t j = 0; j < n; ++j) {
    y[j] += sixth * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    finite = finite && std::isfinite(y[j]);
  }
  if (!finite) {
    throw IntegrationDiverged("integration diverged at t = " + std::to_string(t + dt));
  }
}

using RhsFunction =
    std::function<void(double, std::span<const double>, std::span<double>)>;

/// Allocating convenience overload.
std::vector<double> rk4_step(const RhsFunction& rhs, double t, std::span<const double> y,
                             double dt);

/// Integrates the plan's model fidelity from t = 0 to t_end.
///
/// Samples are recorded at steps 0, k, 2k, ... where k is the decimation;
/// times are computed as n * dt rather than accumulated.
Trace simulate(const LoopConfig& config, const SimPlan& plan);

/// FNV-1a hash of the canonical JSON form of a config.
std::uint64_t config_hash(const LoopConfig& config);

}  // namespace costas
