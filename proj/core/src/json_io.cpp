#include "costas/json_io.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include "costas/error.hpp"

namespace costas {

namespace {

void reject_unknown(const Json& j, std::initializer_list<const char*> allowed, const char* what) {
  if (!j.is_object()) throw InvalidArgument(std::string(what) + " must be a JSON object");
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& item : j.items()) {
    if (!keys.contains(item.key())) {
      throw InvalidArgument(std::string("unknown key '") + item.key() + "' in " + what);
    }
  }
}

Json vector_json(const Eigen::VectorXd& v) {
  Json arr = Json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) arr.push_back(v(k));
  return arr;
}

Eigen::VectorXd vector_from(const Json& j, const char* what) {
  if (!j.is_array()) throw InvalidArgument(std::string(what) + " must be an array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) {
    if (!j[k].is_number()) throw InvalidArgument(std::string(what) + " must contain numbers");
    v(static_cast<Eigen::Index>(k)) = j[k].get<double>();
  }
  return v;
}

double number_from(const Json& j, const char* key) {
  if (!j.contains(key)) throw InvalidArgument(std::string("missing key '") + key + "'");
  if (!j.at(key).is_number()) throw InvalidArgument(std::string("'") + key + "' must be a number");
  return j.at(key).get<double>();
}

const char* kind_name(EquilibriumKind k) {
  return k == EquilibriumKind::kNonsingularA ? "nonsingular_a" : "integrator_filter";
}

Json roots_json(const std::vector<std::complex<double>>& roots) {
  Json arr = Json::array();
  for (const auto& r : roots) arr.push_back(Json::array({r.real(), r.imag()}));
  return arr;
}

Json run_json(const RunOutcome& run) {
  Json j;
  j["expected"] = run.expected_locked ? "lock" : "no-lock";
  j["observed"] = run.verdict.locked ? "lock" : "no-lock";
  j["match"] = run.matches();
  j["verdict"] = run.verdict;
  j["theta_drift_ratio"] = std::abs(run.verdict.theta_drift) / run.verdict.eps_theta;
  j["freq_error_ratio"] = std::abs(run.verdict.mean_freq_error) / run.verdict.eps_f;
  return j;
}

}  // namespace

void to_json(Json& j, const LtiFilter& f) {
  Json a = Json::array();
  for (Eigen::Index r = 0; r < f.a.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < f.a.cols(); ++c) row.push_back(f.a(r, c));
    a.push_back(row);
  }
  j = Json{{"a", a}, {"b", vector_json(f.b)}, {"c", vector_json(f.c)}, {"h", f.h}};
}

void from_json(const Json& j, LtiFilter& f) {
  reject_unknown(j, {"a", "b", "c", "h"}, "filter");
  if (!j.contains("a") || !j.at("a").is_array()) throw InvalidArgument("filter needs matrix 'a'");
  const Json& a = j.at("a");
  const auto rows = static_cast<Eigen::Index>(a.size());
  const auto cols = rows > 0 && a[0].is_array() ? static_cast<Eigen::Index>(a[0].size()) : 0;
  f.a.resize(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Json& row = a[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw InvalidArgument("filter matrix 'a' must be rectangular");
    }
    for (Eigen::Index c = 0; c < cols; ++c) f.a(r, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  if (!j.contains("b") || !j.contains("c")) throw InvalidArgument("filter needs 'b' and 'c'");
  f.b = vector_from(j.at("b"), "filter b");
  f.c = vector_from(j.at("c"), "filter c");
  f.h = j.contains("h") ? number_from(j, "h") : 0.0;
}

void to_json(Json& j, const DataSignalSpec& s) {
  j = Json{{"kind", s.kind == DataKind::kConstant ? "constant" : "square"},
           {"value", s.value},
           {"omega_m", s.omega_m}};
}

void from_json(const Json& j, DataSignalSpec& s) {
  reject_unknown(j, {"kind", "value", "omega_m"}, "data signal");
  const std::string kind = j.value("kind", std::string("constant"));
  if (kind == "constant") {
    s.kind = DataKind::kConstant;
  } else if (kind == "square") {
    s.kind = DataKind::kSquare;
  } else {
    throw InvalidArgument("data signal kind must be 'constant' or 'square', got '" + kind + "'");
  }
  s.value = j.contains("value") ? number_from(j, "value") : 1.0;
  s.omega_m = j.contains("omega_m") ? number_from(j, "omega_m") : 0.0;
}

void to_json(Json& j, const LoopConfig& c) {
  j = Json::object();
  j["omega_ref"] = c.omega_ref;
  j["omega_vco_free"] = c.omega_vco_free;
  j["k_vco"] = c.k_vco;
  j["theta_vco_0"] = c.theta_vco_0;
  j["detector_polarity"] = c.detector_polarity;
  j["loop_filter"] = c.loop_filter;
  j["lpf1"] = c.lpf1;
  j["lpf2"] = c.lpf2;
  j["m1_spec"] = c.m1_spec;
  j["m2_spec"] = c.m2_spec;
  j["x_lf_0"] = vector_json(c.x_lf_0);
  j["x_lpf1_0"] = vector_json(c.x_lpf1_0);
  j["x_lpf2_0"] = vector_json(c.x_lpf2_0);
  j["theta_delta_0"] = c.theta_delta_0 ? Json(*c.theta_delta_0) : Json(nullptr);
  j["vco_pd_gain"] = c.vco_pd_gain == VcoPdGain::kLoopFilterH ? "loop_filter_h" : "unity";
}

void from_json(const Json& j, LoopConfig& c) {
  reject_unknown(j,
                 {"omega_ref", "omega_vco_free", "k_vco", "theta_vco_0", "detector_polarity",
                  "loop_filter", "lpf1", "lpf2", "m1_spec", "m2_spec", "x_lf_0", "x_lpf1_0",
                  "x_lpf2_0", "theta_delta_0", "vco_pd_gain"},
                 "loop config");
  c = LoopConfig{};
  c.omega_ref = number_from(j, "omega_ref");
  c.omega_vco_free = number_from(j, "omega_vco_free");
  c.k_vco = number_from(j, "k_vco");
  c.theta_vco_0 = j.contains("theta_vco_0") ? number_from(j, "theta_vco_0") : 0.0;
  if (j.contains("detector_polarity")) {
    const Json& p = j.at("detector_polarity");
    if (!p.is_number()) throw InvalidArgument("'detector_polarity' must be a number");
    const double v = p.get<double>();
    if (v != std::floor(v)) throw InvalidArgument("'detector_polarity' must be an integer");
    c.detector_polarity = static_cast<int>(v);
  }
  for (const char* key : {"loop_filter", "lpf1", "lpf2"}) {
    if (!j.contains(key)) throw InvalidArgument(std::string("missing key '") + key + "'");
  }
  c.loop_filter = j.at("loop_filter").get<LtiFilter>();
  c.lpf1 = j.at("lpf1").get<LtiFilter>();
  c.lpf2 = j.at("lpf2").get<LtiFilter>();
  if (j.contains("m1_spec")) c.m1_spec = j.at("m1_spec").get<DataSignalSpec>();
  if (j.contains("m2_spec")) c.m2_spec = j.at("m2_spec").get<DataSignalSpec>();
  c.x_lf_0 = j.contains("x_lf_0") ? vector_from(j.at("x_lf_0"), "x_lf_0")
                                  : Eigen::VectorXd::Zero(c.loop_filter.order());
  c.x_lpf1_0 = j.contains("x_lpf1_0") ? vector_from(j.at("x_lpf1_0"), "x_lpf1_0")
                                      : Eigen::VectorXd::Zero(c.lpf1.order());
  c.x_lpf2_0 = j.contains("x_lpf2_0") ? vector_from(j.at("x_lpf2_0"), "x_lpf2_0")
                                      : Eigen::VectorXd::Zero(c.lpf2.order());
  if (j.contains("theta_delta_0") && !j.at("theta_delta_0").is_null()) {
    c.theta_delta_0 = number_from(j, "theta_delta_0");
  }
  if (j.contains("vco_pd_gain")) {
    const std::string mode = j.at("vco_pd_gain").get<std::string>();
    if (mode == "loop_filter_h") {
      c.vco_pd_gain = VcoPdGain::kLoopFilterH;
    } else if (mode == "unity") {
      c.vco_pd_gain = VcoPdGain::kUnity;
    } else {
      throw InvalidArgument("'vco_pd_gain' must be 'loop_filter_h' or 'unity'");
    }
  }
}

void to_json(Json& j, const SimPlan& p) {
  j = Json{{"t_end", p.t_end},
           {"dt", p.dt},
           {"decimation", p.decimation},
           {"variant", std::string(to_string(p.variant))}};
}

void from_json(const Json& j, SimPlan& p) {
  reject_unknown(j, {"t_end", "dt", "decimation", "variant"}, "plan");
  p.t_end = number_from(j, "t_end");
  p.dt = number_from(j, "dt");
  p.decimation = j.value("decimation", std::size_t{1});
  const auto v = parse_variant(j.value("variant", std::string("averaged_phase")));
  if (!v) throw InvalidArgument("unknown model variant in plan");
  p.variant = *v;
}

void to_json(Json& j, const LockVerdict& v) {
  j = Json{{"locked", v.locked},
           {"mean_freq_error", v.mean_freq_error},
           {"theta_drift", v.theta_drift},
           {"window", v.window},
           {"final_theta_mod", v.final_theta_mod},
           {"eps_f", v.eps_f},
           {"eps_theta", v.eps_theta}};
}

void to_json(Json& j, const EquilibriumReport& r) {
  Json xs = Json::array();
  for (const auto& x : r.x_eq) xs.push_back(vector_json(x));
  j = Json{{"kind", kind_name(r.kind)},
           {"gamma", r.gamma ? Json(*r.gamma) : Json(nullptr)},
           {"theta_eq", r.theta_eq},
           {"x_eq", xs}};
}

void to_json(Json& j, const StabilityReport& r) {
  j = Json{{"theta_eq", r.theta_eq},
           {"chi_coeffs", r.chi_coeffs},
           {"closed_form_coeffs", r.closed_form_coeffs},
           {"roots", roots_json(r.roots)},
           {"hurwitz", r.hurwitz}};
}

void to_json(Json& j, const BandCheckReport& r) {
  j = Json{{"omega_low", r.omega_low},
           {"omega_high", r.omega_high},
           {"magnitude_low", r.magnitude_low},
           {"phase_lag_low", r.phase_lag_low},
           {"magnitude_high", r.magnitude_high},
           {"pass", r.pass}};
}

void to_json(Json& j, const VerdictTable& t) {
  Json rows = Json::array();
  for (const auto& row : t.rows) {
    rows.push_back(Json{{"id", row.id},
                        {"description", row.description},
                        {"match", row.matches()},
                        {"red", run_json(row.red)},
                        {"black", run_json(row.black)}});
  }
  j = Json{{"polarity", t.polarity},
           {"all_match", t.all_match()},
           {"runs", t.run_count()},
           {"matching_runs", t.matching_runs()},
           {"scenarios", rows}};
}

LoopConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config file '" + path + "'");
  try {
    return Json::parse(in).get<LoopConfig>();
  } catch (const Json::exception& e) {
    throw InvalidArgument("config '" + path + "': " + e.what());
  }
}

void save_config(const LoopConfig& config, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write config file '" + path + "'");
  out << Json(config).dump(2) << '\n';
}

namespace {

std::vector<std::string> split_path(const std::string& dotted) {
  std::vector<std::string> parts;
  std::stringstream ss(dotted);
  std::string part;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  return parts;
}

bool parse_index(const std::string& s, std::size_t& idx) {
  if (s.empty()) return false;
  for (char ch : s)
    if (ch < '0' || ch > '9') return false;
  idx = std::stoul(s);
  return true;
}

}  // namespace

const Json* find_path(const Json& doc, const std::string& dotted_key) {
  const Json* node = &doc;
  for (const auto& part : split_path(dotted_key)) {
    std::size_t idx = 0;
    if (node->is_object()) {
      auto it = node->find(part);
      if (it == node->end()) return nullptr;
      node = &*it;
    } else if (node->is_array() && parse_index(part, idx)) {
      if (idx >= node->size()) return nullptr;
      node = &(*node)[idx];
    } else {
      return nullptr;
    }
  }
  return node;
}

void apply_override(Json& doc, const std::string& dotted_key, const std::string& value_text) {
  const auto parts = split_path(dotted_key);
  if (parts.empty()) throw InvalidArgument("empty override key");
  Json* node = &doc;
  for (const auto& part : parts) {
    std::size_t idx = 0;
    if (node->is_object()) {
      auto it = node->find(part);
      if (it == node->end()) throw InvalidArgument("unknown config key '" + dotted_key + "'");
      node = &*it;
    } else if (node->is_array() && parse_index(part, idx)) {
      if (idx >= node->size()) throw InvalidArgument("index out of range in '" + dotted_key + "'");
      node = &(*node)[idx];
    } else {
      throw InvalidArgument("unknown config key '" + dotted_key + "'");
    }
  }
  Json value;
  try {
    value = Json::parse(value_text);
  } catch (const Json::parse_error&) {
    value = value_text;
  }
  *node = value;
}

LoopConfig with_override(const LoopConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw InvalidArgument("override must look like key=value, got '" + assignment + "'");
  }
  Json doc = config;
  apply_override(doc, assignment.substr(0, eq), assignment.substr(eq + 1));
  try {
    return doc.get<LoopConfig>();
  } catch (const Json::exception& e) {
    throw InvalidArgument("override '" + assignment + "': " + e.what());
  }
}

}  // namespace costas
