#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "costas/dynamics.hpp"

namespace costas {

struct SimPlan {
  double t_end = 0.0;
  double dt = 0.0;
  std::size_t decimation = 1;  // record every k-th step
  ModelVariant variant = ModelVariant::kAveragedPhase;
};

std::vector<std::string> validate(const SimPlan& plan);

/// Decimated time series of one run. All arrays share one length.
struct Trace {
  std::vector<double> t;
  std::vector<double> theta_delta;
  std::vector<double> omega_vco;
  std::vector<double> g;
  std::vector<double> q;
  std::vector<double> i;

  std::uint64_t config_hash = 0;
  SimPlan plan;

  std::size_t size() const { return t.size(); }
  void reserve(std::size_t n);
  void push(double time, const Observables& obs);
};

inline constexpr const char* kTraceCsvHeader = "t,theta_delta,omega_vco,g,q,i";

/// One header line, then one row per sample at 17 significant digits.
void write_csv(const Trace& trace, std::ostream& out);
std::string to_csv(const Trace& trace);

}  // namespace costas
