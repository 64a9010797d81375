// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "costas/analysis.hpp"
#include "costas/detector.hpp"
#include "costas/dynamics.hpp"
#include "costas/integrate.hpp"
#include "costas/lti.hpp"
#include "costas/math.hpp"
#include "costas/scenarios.hpp"

using namespace costas;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

int failures = 0;

void report(int id, const std::string& name, double budget_s, const std::function<Outcome()>& fn) {
  const auto start = Clock::now();
  Outcome o;
  try {
    o = fn();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
  const bool in_time = elapsed < budget_s;
  const bool pass = o.pass && in_time;
  if (!pass) ++failures;
  std::printf("[%s] %d %s: %s (%.2f s%s)\n", pass ? "PASS" : "FAIL", id, name.c_str(),
              o.detail.c_str(), elapsed, in_time ? "" : ", over budget");
  std::fflush(stdout);
}

std::string fmt(double v, int precision = 4) {
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

// --- 1 and 8 ---------------------------------------------------------------

VerdictTable first_pass;

Outcome scenario_verdicts() {
  const auto all = catalog();
  first_pass = run_scenarios(all, 0, true);
  std::string mismatches;
  for (const auto& row : first_pass.rows) {
    if (!row.red.matches()) mismatches += " " + row.id + "/red";
    if (!row.black.matches()) mismatches += " " + row.id + "/black";
  }
  std::string detail = std::to_string(first_pass.matching_runs()) + "/" +
                       std::to_string(first_pass.run_count()) + " verdicts match";
  if (!mismatches.empty()) detail += ", mismatched:" + mismatches;
  return {first_pass.all_match(), detail};
}

Outcome determinism() {
  namespace fs = std::filesystem;
  const VerdictTable second = run_scenarios(catalog(), 0, true);
  const fs::path dir = fs::temp_directory_path() / "costas_acceptance_traces";
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto dump = [&](const Trace& t, const std::string& name) {
    std::ofstream f(dir / name, std::ios::binary);
    write_csv(t, f);
  };
  auto slurp = [&](const std::string& name) {
    std::ifstream in(dir / name, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  };
  std::size_t identical = 0;
  std::size_t files = 0;
  for (std::size_t k = 0; k < second.rows.size(); ++k) {
    for (const char* side : {"red", "black"}) {
      const bool red = std::string(side) == "red";
      const auto& a = red ? first_pass.rows[k].red : first_pass.rows[k].black;
      const auto& b = red ? second.rows[k].red : second.rows[k].black;
      if (!a.trace || !b.trace) continue;
      const std::string stem = second.rows[k].id + "_" + side;
      dump(*a.trace, stem + "_1.csv");
      dump(*b.trace, stem + "_2.csv");
      ++files;
      if (slurp(stem + "_1.csv") == slurp(stem + "_2.csv")) ++identical;
    }
  }
  fs::remove_all(dir);
  const bool pass = files == 2 * second.rows.size() && identical == files;
  return {pass, std::to_string(identical) + "/" + std::to_string(files) +
                    " repeated trace files bit-identical"};
}

// --- 2 ---------------------------------------------------------------------

Outcome pd_identities() {
  double sin_form = 0.0;
  const int n = 100000;
  for (int k = 0; k < n; ++k) {
    const double th = -2.0 * kTwoPi + 4.0 * kTwoPi * k / n + 1e-7;
    if (distance_to_pd_boundary(th) < 1e-9) continue;
    sin_form = std::max(sin_form, std::abs(pd_sin_form(th) - pd_piecewise(th)));
  }

  // data symbols (m1, m2) rotate the branch signals by quarter turns
  struct Case {
    double m1, m2, s;
    int k;
  };
  double quadrature = 0.0;
  double periodic = 0.0;
  double bound = 0.0;
  for (const Case c : {Case{1, 1, 1, 0}, Case{1, -1, -1, -1}, Case{-1, -1, -1, 0},
                       Case{-1, 1, 1, -1}}) {
    for (int j = 0; j < 20000; ++j) {
      const double th = -kTwoPi + 2.0 * kTwoPi * j / 20000.0 + 1e-7;
      if (distance_to_pd_boundary(th) < 1e-9) continue;
      const QiPair a = baseband_qi(th, c.m1, c.m2);
      const QiPair b = baseband_qi(th + c.k * kHalfPi, 1.0, 1.0);
      quadrature = std::max({quadrature, std::abs(a.q - c.s * b.q), std::abs(a.i - c.s * b.i),
                             std::abs(pd_quadrature(a.q, a.i) - pd_piecewise(th))});
      periodic = std::max(periodic, std::abs(pd_piecewise(th + kHalfPi) - pd_piecewise(th)));
      bound = std::max(bound, std::abs(pd_piecewise(th)));
    }
  }
  const bool pass = sin_form <= 1e-12 && quadrature <= 1e-12 && periodic <= 1e-12 &&
                    bound <= kInvSqrt2 + 1e-15;
  return {pass, "sin form " + fmt(sin_form) + ", quadrature " + fmt(quadrature) +
                    ", quarter period " + fmt(periodic) + ", max |phi| " + fmt(bound, 16)};
}

// --- 3 ---------------------------------------------------------------------

LtiFilter random_stable_filter(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> rate(0.5, 2.0);
  const int n = 1 + static_cast<int>(rng() % 3);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  int k = 0;
  while (k < n) {
    if (k + 1 < n && rng() % 2 == 0) {
      const double sigma = rate(rng);
      const double omega = 1.5 * std::abs(u(rng));
      d(k, k) = -sigma;
      d(k + 1, k + 1) = -sigma;
      d(k, k + 1) = omega;
      d(k + 1, k) = -omega;
      k += 2;
    } else {
      d(k, k) = -rate(rng);
      k += 1;
    }
  }
  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) s(r, c) += 0.3 * u(rng);
  LtiFilter f;
  f.a = s * d * s.inverse();
  f.b = Eigen::VectorXd::NullaryExpr(n, [&] { return u(rng); });
  f.c = Eigen::VectorXd::NullaryExpr(n, [&] { return u(rng); });
  f.h = u(rng);
  return f;
}

double convolution_vs_rk4(const LtiFilter& f, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const std::size_t n = 4001;
  const double dt = 5.0 / (n - 1);
  std::vector<double> t(n), input(n);
  double level = u(rng);
  for (std::size_t k = 0; k < n; ++k) {
    t[k] = dt * static_cast<double>(k);
    if (rng() % 200 == 0) level = u(rng);
    input[k] = level;
  }
  const FilterState x0 = FilterState::NullaryExpr(f.order(), [&] { return u(rng); });
  const auto y = convolution_solution(f, x0, input, t);

  const auto dim = static_cast<std::size_t>(f.order());
  std::vector<double> x(x0.data(), x0.data() + dim);
  Rk4Workspace ws(dim);
  double worst = 0.0;
  double scale = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const Eigen::Map<const Eigen::VectorXd> xv(x.data(), f.order());
    const double yk = output(f, xv, input[k]);
    worst = std::max(worst, std::abs(yk - y[k]));
    scale = std::max(scale, std::abs(yk));
    if (k + 1 == n) break;
    const double uk = input[k];
    rk4_step(
        [&](double, std::span<const double> s, std::span<double> d) {
          const Eigen::Map<const Eigen::VectorXd> sv(s.data(), f.order());
          Eigen::Map<Eigen::VectorXd>(d.data(), f.order()) = derivative(f, sv, uk);
        },
        t[k], std::span<double>(x), dt, ws);
  }
  return worst / std::max(scale, 1e-300);
}

Outcome filter_oracles() {
  std::mt19937_64 rng(20240611);
  double conv = 0.0;
  for (int k = 0; k < 50; ++k) conv = std::max(conv, convolution_vs_rk4(random_stable_filter(rng), rng));

  std::uniform_real_distribution<double> coord(-1e6, 1e6);
  const double tau1 = 20e-6, tau2 = 4e-6, w = 1.2566e6;
  const LtiFilter pi = make_pi_loop_filter(tau1, tau2);
  const LtiFilter lpf = make_first_order_lpf(w);
  double tf = 0.0;
  for (int k = 0; k < 100; ++k) {
    const std::complex<double> s(coord(rng), coord(rng));
    const auto pi_ref = (tau2 * s + 1.0) / (tau1 * s);
    const auto lpf_ref = 1.0 / (s / w + 1.0);
    tf = std::max({tf, std::abs(transfer_eval(pi, s) - pi_ref) / std::abs(pi_ref),
                   std::abs(transfer_eval(lpf, s) - lpf_ref) / std::abs(lpf_ref)});
  }
  return {conv <= 1e-6 && tf <= 1e-12,
          "convolution vs RK4 max rel " + fmt(conv) + " over 50 filters, transfer_eval max rel " +
              fmt(tf) + " over 100 points"};
}

// --- 4 ---------------------------------------------------------------------

double averaging_distance(double scale, bool scale_lpf) {
  LoopConfig c = base_config();
  c.omega_ref *= scale;
  c.omega_vco_free = c.omega_ref - 1e4;
  if (scale_lpf) {
    c.lpf1 = make_first_order_lpf(1.2566e6 * scale);
    c.lpf2 = c.lpf1;
  }
  const double t_end = 2e-3;
  const double dt = t_end / std::ceil(t_end / default_dt(c, ModelVariant::kSignalSpace));
  const Trace fast = simulate(c, SimPlan{t_end, dt, 1, ModelVariant::kSignalSpace});
  const Trace slow = simulate(c, SimPlan{t_end, dt, 1, ModelVariant::kAveragedPhase});
  double sup = 0.0;
  for (std::size_t k = 0; k < fast.size(); ++k) {
    sup = std::max(sup, std::abs(fast.theta_delta[k] - slow.theta_delta[k]));
  }
  return sup;
}

Outcome averaging_convergence() {
  double d[3];
  double fixed[3];
  const double scales[3] = {1.0, 2.0, 4.0};
  for (int k = 0; k < 3; ++k) {
    d[k] = averaging_distance(scales[k], true);
    fixed[k] = averaging_distance(scales[k], false);
  }
  return {d[0] > d[1] && d[1] > d[2],
          "sup distance with w_lpf scaled alongside w_ref x1,x2,x4: " + fmt(d[0]) + ", " +
              fmt(d[1]) + ", " + fmt(d[2]) + " (w_lpf fixed: " + fmt(fixed[0]) + ", " +
              fmt(fixed[1]) + ", " + fmt(fixed[2]) + ")"};
}

// --- 5 ---------------------------------------------------------------------

std::vector<LoopConfig> linearization_configs() {
  std::vector<LoopConfig> out;
  for (int p : {+1, -1}) {
    LoopConfig pi = base_config();
    pi.detector_polarity = p;
    pi.omega_vco_free = pi.omega_ref + 1000.0;
    out.push_back(pi);

    LoopConfig lag = pi;
    lag.loop_filter = make_first_order_lpf(1e5);
    lag.omega_vco_free = lag.omega_ref - 0.3 * lag.k_vco;
    out.push_back(lag);

    LoopConfig second = pi;
    Eigen::MatrixXd a(2, 2);
    a << -2e5, 5e4, -5e4, -1e5;
    second.loop_filter = LtiFilter{a, Eigen::Vector2d(1e5, 3e4), Eigen::Vector2d(1.0, 0.5), 0.1};
    second.x_lf_0 = Eigen::VectorXd::Zero(2);
    second.omega_vco_free = second.omega_ref - 0.2 * second.k_vco;
    out.push_back(second);
  }
  return out;
}

double jacobian_fd_error(const LoopConfig& c, std::size_t& checked) {
  double worst = 0.0;
  const EquilibriumReport r = equilibria(c);
  for (std::size_t e = 0; e < r.theta_eq.size(); ++e) {
    if (distance_to_pd_boundary(r.theta_eq[e]) < 1e-6) continue;
    ++checked;
    const Eigen::MatrixXd j = linearize(c, r.x_eq[e], r.theta_eq[e]);
    std::vector<double> y0(r.x_eq[e].data(), r.x_eq[e].data() + r.x_eq[e].size());
    y0.push_back(r.theta_eq[e]);
    for (std::size_t col = 0; col < y0.size(); ++col) {
      const double h = 1e-7 * std::max(1.0, std::abs(y0[col]));
      auto plus = y0;
      auto minus = y0;
      plus[col] += h;
      minus[col] -= h;
      const auto fp = rhs_averaged(0.0, {ModelVariant::kAveragedPhase, 0.0, plus}, c);
      const auto fm = rhs_averaged(0.0, {ModelVariant::kAveragedPhase, 0.0, minus}, c);
      for (std::size_t row = 0; row < y0.size(); ++row) {
        const double fd = (fp[row] - fm[row]) / (2 * h);
        const double jv = j(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
        worst = std::max(worst, std::abs(jv - fd) / std::max(1.0, std::abs(fd)));
      }
    }
  }
  return worst;
}

// Simulated convergence of the PI loop from a small perturbation of an
// equilibrium. Distances are scaled so that phase and filter state weigh
// alike: d = max(|dtheta|, K |c dx| / w_n) with w_n = sqrt(K |c b|).
bool perturbed_run_converges(const LoopConfig& c, double theta_eq, double slowest_rate) {
  const EquilibriumReport r = equilibria(c);
  std::size_t e = 0;
  while (std::abs(r.theta_eq[e] - theta_eq) > 1e-12) ++e;
  const double k = c.k_vco;
  const double cb = c.loop_filter.c.dot(c.loop_filter.b);
  const double wn = std::sqrt(k * std::abs(cb));
  const double cnorm = c.loop_filter.c(0);
  const double eps = 1e-3;

  const LoopModel model(c, ModelVariant::kAveragedPhase);
  std::vector<double> y{r.x_eq[e](0) + 0.8 * eps * wn / (k * std::abs(cnorm)), theta_eq + 0.6 * eps};
  auto distance = [&](const std::vector<double>& s) {
    return std::max(std::abs(s[1] - theta_eq), k * std::abs(cnorm * (s[0] - r.x_eq[e](0))) / wn);
  };
  const double t_end = 50.0 / slowest_rate;
  const double dt = default_dt(c, ModelVariant::kAveragedPhase);
  const auto steps = static_cast<std::size_t>(std::ceil(t_end / dt));
  Rk4Workspace ws(2);
  auto rhs = [&](double t, std::span<const double> s, std::span<double> d) { model.rhs(t, s, d); };
  for (std::size_t n = 0; n < steps; ++n) {
    rk4_step(rhs, n * dt, std::span<double>(y), dt, ws);
    if (distance(y) > 0.1) return false;
  }
  return distance(y) < eps / 10.0;
}

Outcome linearization_consistency() {
  double fd = 0.0;
  std::size_t checked = 0;
  for (const auto& c : linearization_configs()) fd = std::max(fd, jacobian_fd_error(c, checked));

  int agree = 0;
  std::string cases;
  for (int p : {+1, -1}) {
    for (double th : {0.0, kHalfPi}) {
      LoopConfig c = base_config();
      c.detector_polarity = p;
      c.omega_vco_free = c.omega_ref + 1000.0;
      const StabilityReport st = stability(c, th);
      double slowest = std::numeric_limits<double>::infinity();
      double fastest_growth = 0.0;
      for (auto z : st.roots) {
        slowest = std::min(slowest, std::abs(z.real()));
        fastest_growth = std::max(fastest_growth, z.real());
      }
      const double rate = st.hurwitz ? slowest : fastest_growth;
      const bool converged = perturbed_run_converges(c, th, rate);
      agree += converged == st.hurwitz;
      cases += std::string(" p=") + (p > 0 ? "+1" : "-1") + "/theta=" + fmt(th, 3) + ":" +
               (st.hurwitz ? "stable" : "unstable") + (converged == st.hurwitz ? "" : "(sim disagrees)");
    }
  }
  return {fd <= 1e-5 && checked > 0 && agree == 4,
          "Jacobian vs FD max rel " + fmt(fd) + " at " + std::to_string(checked) +
              " equilibria; hurwitz vs simulation " + std::to_string(agree) + "/4 (" +
              cases.substr(1) + ")"};
}

// --- 6 ---------------------------------------------------------------------

Outcome integrator_order() {
  // stable polarity from inside one detector branch: the trajectory stays smooth
  LoopConfig c = base_config();
  c.detector_polarity = -1;
  c.omega_vco_free = c.omega_ref + 1000.0;
  c.theta_delta_0 = 0.3;
  const double t_end = 1e-4;
  const double dt = 1e-6;
  auto endpoint = [&](double h) {
    const Trace t = simulate(c, SimPlan{t_end, h, 1, ModelVariant::kAveragedPhase});
    return std::array<double, 2>{t.theta_delta.back(), t.g.back()};
  };
  const auto ref = endpoint(dt / 8);
  const auto coarse = endpoint(dt);
  const auto fine = endpoint(dt / 2);
  const double e1 = std::abs(coarse[0] - ref[0]);
  const double e2 = std::abs(fine[0] - ref[0]);
  const double order = std::log2(e1 / e2);
  return {order >= 3.0, "observed order " + fmt(order) + " (endpoint errors " + fmt(e1) + ", " +
                            fmt(e2) + ")"};
}

// --- 7 ---------------------------------------------------------------------

Outcome band_check() {
  LoopConfig ex1 = base_config();
  ex1.omega_vco_free = 2.6314e6;
  const double beat = std::abs(omega_delta_free(ex1));
  const double stop = 2.0 * ex1.omega_ref;
  const BandCheckReport wide = lpf_band_check(make_first_order_lpf(1.2566e6), beat, stop);
  const BandCheckReport narrow = lpf_band_check(make_first_order_lpf(1.5708e5), beat, stop);
  const bool pass = wide.pass && !narrow.pass && wide.magnitude_low >= 4.0 * wide.magnitude_high;
  return {pass, "w_lpf 1.2566e6: |H| " + fmt(wide.magnitude_low) + " at beat, " +
                    fmt(wide.magnitude_high) + " at 2 w_ref (" + (wide.pass ? "pass" : "fail") +
                    "); w_lpf 1.5708e5: |H| " + fmt(narrow.magnitude_low) + " at beat (" +
                    (narrow.pass ? "pass" : "fail") + ")"};
}

}  // namespace

int main() {
  report(1, "scenario verdicts", 180.0, scenario_verdicts);
  report(2, "phase detector identities", 1.0, pd_identities);
  report(3, "filter oracle equivalence", 10.0, filter_oracles);
  report(4, "averaging convergence", 120.0, averaging_convergence);
  report(5, "linearization and stability", 30.0, linearization_consistency);
  report(6, "integrator order", 10.0, integrator_order);
  report(7, "low-pass band check", 1.0, band_check);
  report(8, "determinism", 180.0, determinism);
  return failures == 0 ? 0 : 1;
}
