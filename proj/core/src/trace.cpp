#include "costas/trace.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <sstream>

namespace costas {

std::vector<std::string> validate(const SimPlan& plan) {
  std::vector<std::string> out;
  if (!(plan.dt > 0.0) || !std::isfinite(plan.dt)) out.emplace_back("dt must be positive");
  if (!(plan.t_end >= plan.dt) || !std::isfinite(plan.t_end)) {
    out.emplace_back("t_end must be at least one step");
  }
  if (plan.decimation < 1) out.emplace_back("decimation must be at least 1");
  return out;
}

void Trace::reserve(std::size_t n) {
  for (auto* v : {&t, &theta_delta, &omega_vco, &g, &q, &i}) v->reserve(n);
}

void Trace::push(double time, const Observables& obs) {
  t.push_back(time);
  theta_delta.push_back(obs.theta_delta);
  omega_vco.push_back(obs.omega_vco);
  g.push_back(obs.g);
  q.push_back(obs.q);
  i.push_back(obs.i);
}

namespace {

char* put(char* p, char* end, double v) {
  return std::to_chars(p, end, v, std::chars_format::general, 17).ptr;
}

}  // namespace

void write_csv(const Trace& trace, std::ostream& out) {
  out << kTraceCsvHeader << '\n';
  char line[256];
  char* const end = line + sizeof(line);
  for (std::size_t k = 0; k < trace.size(); ++k) {
    char* p = line;
    p = put(p, end, trace.t[k]);
    *p++ = ',';
    p = put(p, end, trace.theta_delta[k]);
    *p++ = ',';
    p = put(p, end, trace.omega_vco[k]);
    *p++ = ',';
    p = put(p, end, trace.g[k]);
    *p++ = ',';
    p = put(p, end, trace.q[k]);
    *p++ = ',';
    p = put(p, end, trace.i[k]);
    *p++ = '\n';
    out.write(line, p - line);
  }
}

std::string to_csv(const Trace& trace) {
  std::ostringstream os;
  write_csv(trace, os);
  return os.str();
}

}  // namespace costas
