#include "costas/config.hpp"

#include <cmath>
#include <sstream>

namespace costas {

namespace {

void check_filter(const LtiFilter& f, const std::string& name, bool branch_filter,
                  std::vector<Violation>& out) {
  const auto errors = f.dimension_errors();
  for (const auto& e : errors) out.push_back({name, e});
  if (!errors.empty()) return;

  const bool finite = f.a.allFinite() && f.b.allFinite() && f.c.allFinite() && std::isfinite(f.h);
  if (!finite) {
    out.push_back({name, "filter coefficients must be finite"});
    return;
  }
  if (branch_filter) {
    if (f.h != 0.0) out.push_back({name + ".h", "branch low-pass filters have no feedthrough"});
    if (!is_hurwitz_matrix(f.a)) {
      out.push_back({name + ".a", "branch low-pass filter must be stable (Hurwitz A)"});
    }
  }
}

void check_state(const FilterState& x, const LtiFilter& f, const std::string& name,
                 std::vector<Violation>& out) {
  if (x.size() != f.order()) {
    std::ostringstream os;
    os << "initial state has dimension " << x.size() << ", filter order is " << f.order();
    out.push_back({name, os.str()});
  } else if (!x.allFinite()) {
    out.push_back({name, "initial state must be finite"});
  }
}

void check_data(const DataSignalSpec& s, const std::string& name, std::vector<Violation>& out) {
  switch (s.kind) {
    case DataKind::kConstant:
      if (s.value != 1.0 && s.value != -1.0) out.push_back({name, "constant data must be +1 or -1"});
      break;
    case DataKind::kSquare:
      if (!(s.omega_m > 0.0) || !std::isfinite(s.omega_m)) {
        out.push_back({name, "square data needs omega_m > 0"});
      }
      break;
  }
}

}  // namespace

std::vector<Violation> validate(const LoopConfig& c) {
  std::vector<Violation> out;
  if (!(c.omega_ref > 0.0) || !std::isfinite(c.omega_ref)) {
    out.push_back({"omega_ref", "carrier frequency must be positive"});
  }
  if (!std::isfinite(c.omega_vco_free)) {
    out.push_back({"omega_vco_free", "free-running frequency must be finite"});
  }
  if (!(c.k_vco > 0.0) || !std::isfinite(c.k_vco)) {
    out.push_back({"k_vco", "VCO gain must be positive"});
  }
  if (!std::isfinite(c.theta_vco_0)) out.push_back({"theta_vco_0", "must be finite"});
  if (c.detector_polarity != 1 && c.detector_polarity != -1) {
    out.push_back({"detector_polarity", "must be +1 or -1"});
  }
  if (c.theta_delta_0 && !std::isfinite(*c.theta_delta_0)) {
    out.push_back({"theta_delta_0", "must be finite"});
  }

  check_filter(c.loop_filter, "loop_filter", false, out);
  check_filter(c.lpf1, "lpf1", true, out);
  check_filter(c.lpf2, "lpf2", true, out);

  if (c.loop_filter.dimension_errors().empty()) check_state(c.x_lf_0, c.loop_filter, "x_lf_0", out);
  if (c.lpf1.dimension_errors().empty()) check_state(c.x_lpf1_0, c.lpf1, "x_lpf1_0", out);
  if (c.lpf2.dimension_errors().empty()) check_state(c.x_lpf2_0, c.lpf2, "x_lpf2_0", out);

  check_data(c.m1_spec, "m1_spec", out);
  check_data(c.m2_spec, "m2_spec", out);
  return out;
}

double omega_delta_free(const LoopConfig& config) {
  return config.omega_ref - config.omega_vco_free;
}

DerivedQuantities derived_quantities(const LoopConfig& config) {
  return {omega_delta_free(config)};
}

}  // namespace costas
