// Acceptance checks. Prints detail lines followed by one
// "criterion N: PASS|FAIL <summary>" line per criterion; exits non-zero if any
// selected criterion fails.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "commands.hpp"
#include "rpif/closed_form.hpp"
#include "rpif/errors.hpp"
#include "rpif/mathieu.hpp"
#include "rpif/oracle.hpp"
#include "rpif/probability.hpp"
#include "rpif/propagator.hpp"
#include "scenario.hpp"

using namespace rpif;
using std::numbers::pi;

namespace {

const cplx I{0.0, 1.0};
std::string g_data_dir = RPIF_DATA_DIR;

std::string bundled_path() { return g_data_dir + "/paper_s3.scenario"; }

void detail(const char* fmt, auto... args) {
  std::printf("  ");
  std::printf(fmt, args...);
  std::printf("\n");
}

struct Outcome {
  bool pass = false;
  std::string summary;
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1, 2 ----------------------------------------------------------------------

DimensionlessParams bundled_params(Axis axis) {
  const auto s = cli::load_scenario(bundled_path());
  return dimensionless(effective_frequency(derive_frequency_coefficients(s.trap, axis), s.measurement(axis), s.trap));
}

Outcome criterion_alpha() {
  const cplx a = bundled_params(Axis::X).alpha;
  detail("alpha = %.9f %+.6e i", a.real(), a.imag());
  const bool re = std::abs(a.real() + 2.62) <= 0.01;
  const bool im = std::abs(a.imag()) >= 2.7e-11 && std::abs(a.imag()) <= 2.9e-11;
  return {re && im, "alpha = " + sci(a.real()) + " " + sci(a.imag()) + "i"};
}

Outcome criterion_beta() {
  const cplx b = bundled_params(Axis::Z).alpha;
  detail("beta = %.9f %+.6e i (sign not asserted)", b.real(), b.imag());
  const bool re = std::abs(b.real()) >= 1.01 && std::abs(b.real()) <= 1.03;
  const bool im = std::abs(b.imag()) >= 2.7e-11 && std::abs(b.imag()) <= 2.9e-11;
  return {re && im, "|beta| parts = " + sci(std::abs(b.real())) + ", " + sci(std::abs(b.imag()))};
}

// 3 -------------------------------------------------------------------------

Outcome criterion_harmonic() {
  struct Case {
    double m, hbar, w0, t0, T;
  };
  const std::vector<Case> cases{
      {1.0, 1.0, 1.0, 0.0, 0.5},          {1.0, 1.0, 2.3, 0.4, 0.6},
      {2.5, 0.3, 0.7, -1.0, 2.0},         {2.28e-25, kHbarSI, 1.0e5, 0.0, 1.2e-5},
      {2.28e-25, kHbarSI, 3.0e3, 1.0, 4e-4},
  };
  double worst = 0.0;
  for (const auto& c : cases) {
    const EffectiveFrequencySpec spec{cplx(c.w0 * c.w0, 0.0), 0.0, 1.0};
    const double t1 = c.t0 + c.T;
    const cplx expected = std::log(std::sqrt(cplx(c.m * c.w0, 0.0) / (2.0 * pi * I * c.hbar * std::sin(c.w0 * c.T))));
    const auto robust = fluctuation_prefactor_robust(spec, c.m, c.hbar, c.t0, t1);
    const double mid = 0.5 * (c.t0 + t1);
    const auto from_f = fluctuation_prefactor_from_f([&](double t) { return cplx(std::cos(c.w0 * (t - mid))); },
                                                     c.m, c.hbar, c.t0, t1);
    const double e_robust = std::abs(robust.log_value - expected) / std::abs(expected);
    const double e_f = std::abs(std::log(from_f.value) - expected) / std::abs(expected);
    detail("w0 = %.3e T = %.3e: robust %.2e, f-based %.2e", c.w0, c.T, e_robust, e_f);
    worst = std::max({worst, e_robust, e_f});
  }
  return {worst <= 1e-10, "worst relative log-amplitude error " + sci(worst) + " (tol 1e-10)"};
}

// 4 -------------------------------------------------------------------------

struct OracleCheck {
  double logmod_rel = 0.0, phase_abs = 0.0;
  bool ok = false;
  std::string error;
};

OracleCheck compare_with_oracle(const AxisProblem& problem, const PropagatorOptions& options) {
  OracleCheck out;
  try {
    const cplx pipe = restricted_propagator(problem, options).log_amplitude;
    const auto r = richardson(discrete_propagator(problem, 2048), discrete_propagator(problem, 4096));
    out.logmod_rel = std::abs(pipe.real() - r.value.real()) / std::abs(r.value.real());
    out.phase_abs = std::abs(std::remainder(pipe.imag() - r.value.imag(), 2.0 * pi));
    out.ok = out.logmod_rel <= 1e-3 && out.phase_abs <= 1e-3;
  } catch (const Error& e) {
    out.error = std::string(to_string(e.code())) + ": " + e.what();
  }
  return out;
}

AxisProblem random_problem(std::mt19937_64& rng, int kind) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto in = [&](double lo, double hi) { return lo + (hi - lo) * u(rng); };
  for (;;) {
    TrapParameters trap;
    trap.charge = 1.0;
    trap.mass = 1.0;
    trap.half_gap = 1.0;
    trap.drive_omega = in(1.0, 4.0);
    trap.dc_voltage = in(-0.25, 0.25) * trap.drive_omega * trap.drive_omega;
    trap.ac_voltage = in(0.05, 0.5) * trap.drive_omega * trap.drive_omega;
    trap.hbar = in(0.05, 0.5);
    const double T = in(1.0, 4.0) * 2.0 * pi / trap.drive_omega;
    const MeasurementConfig meas{in(0.0, 1.0), 0.0, in(0.3, 1.5)};
    MeasurementConfig m = meas;
    m.t_end = m.t_start + T;
    const auto d = dimensionless(effective_frequency(derive_frequency_coefficients(trap, Axis::X), m, trap));
    if (std::abs(d.p) > 1.0 || std::abs(d.q) > 1.0) continue;
    RecordSpec rec;
    if (kind == 0) {
      rec = ConstantRecord{in(-0.3, 0.3)};
    } else if (kind == 1) {
      rec = SinusoidRecord{in(0.05, 0.3), in(0.2, 3.0), in(0.0, 2.0 * pi)};
    } else {
      std::vector<double> v(9);
      for (auto& x : v) x = in(-0.3, 0.3);
      rec = SampledRecord{v};
    }
    const Axis axis = u(rng) < 0.5 ? Axis::X : Axis::Z;
    const BoundaryConditions bc{in(-0.3, 0.3), in(-0.3, 0.3), m.t_start, m.t_end};
    return {trap, axis, m, render(rec, m, 65), bc};
  }
}

Outcome criterion_oracle() {
  const auto t_begin = std::chrono::steady_clock::now();
  bool all = true;
  double worst_mod = 0.0, worst_phase = 0.0;

  const auto s = cli::load_scenario(bundled_path());
  for (Axis axis : {Axis::X, Axis::Z}) {
    const auto c = compare_with_oracle(cli::make_problem(s, axis), cli::propagator_options(s));
    if (!c.error.empty()) {
      detail("bundled scenario, %s axis: %s", to_string(axis), c.error.c_str());
    } else {
      detail("bundled scenario, %s axis: log-modulus rel %.3e, phase %.3e rad -> %s", to_string(axis), c.logmod_rel,
             c.phase_abs, c.ok ? "ok" : "MISMATCH");
    }
    all = all && c.ok;
    worst_mod = std::max(worst_mod, c.logmod_rel);
    worst_phase = std::max(worst_phase, c.phase_abs);
  }

  std::mt19937_64 rng(20240611);
  static const char* kinds[] = {"constant", "sinusoid", "samples"};
  for (int i = 0; i < 5; ++i) {
    const auto problem = random_problem(rng, i % 3);
    const auto d = dimensionless(problem_spec(problem));
    const auto c = compare_with_oracle(problem, {});
    if (!c.error.empty()) {
      detail("random #%d (%s, %s axis): %s", i, kinds[i % 3], to_string(problem.axis), c.error.c_str());
    } else {
      detail("random #%d (%s record, %s axis, p = %.3f%+.3fi, q = %.3f, T = %.3f): log-modulus rel %.3e, phase %.3e rad",
             i, kinds[i % 3], to_string(problem.axis), d.p.real(), d.p.imag(), d.q, problem.meas.duration(),
             c.logmod_rel, c.phase_abs);
    }
    all = all && c.ok;
    worst_mod = std::max(worst_mod, c.logmod_rel);
    worst_phase = std::max(worst_phase, c.phase_abs);
  }
  const double elapsed = seconds_since(t_begin);
  detail("runtime %.1f s (limit 30 s)", elapsed);
  return {all && elapsed < 30.0,
          "worst log-modulus rel " + sci(worst_mod) + ", worst phase " + sci(worst_phase) + " rad (tol 1e-3)"};
}

// 5 -------------------------------------------------------------------------

Outcome criterion_free() {
  double worst = 0.0;
  struct Case {
    double m, hbar, T, x0, x1;
  };
  for (const auto& c : std::vector<Case>{{1.0, 1.0, 1.0, 0.0, 0.7}, {2.28e-25, kHbarSI, 30.0, 1e-6, -2e-6}}) {
    TrapParameters trap;
    trap.charge = 1.0;
    trap.mass = c.m;
    trap.half_gap = 1.0;
    trap.drive_omega = 1.0;
    trap.hbar = c.hbar;
    const MeasurementConfig meas{0.0, c.T, std::numeric_limits<double>::infinity()};
    const AxisProblem problem{trap, Axis::X, meas, render(ConstantRecord{0.0}, meas, 2), {c.x0, c.x1, 0.0, c.T}};
    const cplx exact = std::log(std::sqrt(cplx(c.m, 0.0) / (2.0 * pi * I * c.hbar * c.T))) +
                       I * c.m * (c.x1 - c.x0) * (c.x1 - c.x0) / (2.0 * c.hbar * c.T);
    for (std::size_t n : {2, 16, 256}) {
      const double e = std::abs(discrete_propagator(problem, n) - exact) / std::abs(exact);
      detail("m = %.3e, N = %zu: relative error %.3e", c.m, n, e);
      worst = std::max(worst, e);
    }
  }
  return {worst <= 1e-12, "worst relative error " + sci(worst) + " (tol 1e-12)"};
}

// 6 -------------------------------------------------------------------------

Outcome criterion_mathieu() {
  const auto d = bundled_params(Axis::X);
  std::vector<double> res;
  for (std::size_t n = 2; n <= 4; ++n) {
    res.push_back(series_residual_max(mathieu_series(d, n), 0.0, pi));
    detail("%zu terms: max residual on [0, pi] = %.6e", n, res.back());
  }
  const bool decreasing = res[1] < res[0] && res[2] < res[1];
  detail("strict decrease 2 -> 3 -> 4: %s", decreasing ? "yes" : "no");

  const auto s4 = mathieu_series(d, 4);
  std::vector<double> pts;
  for (int i = 1; i <= 100; ++i) pts.push_back(0.005 * i);
  const auto sol = integrate_mathieu_ode(d, {0.0, 0.5}, evaluate_f(s4, 0.0), evaluate_f_derivative(s4, 0.0), {1e-12, pts});
  double dev = 0.0;
  for (std::size_t i = 0; i < sol.grid.size(); ++i) dev = std::max(dev, std::abs(sol.psi[i] - evaluate_f(s4, sol.grid[i])));
  const bool match = dev <= 2.0 * res[2];
  detail("4-term series vs ode on [0, 0.5]: max deviation %.6e, bound 2 x %.6e -> %s", dev, res[2], match ? "ok" : "exceeded");
  return {decreasing && match, std::string("residual decrease ") + (decreasing ? "holds" : "does not hold") +
                                   ", series/ode match " + (match ? "holds" : "does not hold")};
}

// 7 -------------------------------------------------------------------------

Outcome criterion_measurement_off() {
  auto s = cli::load_scenario(bundled_path());
  s.measurement_x.resolution = 1e3;
  s.measurement_z.resolution = 1e3;
  auto records = cli::load_record_set(g_data_dir + "/records/candidates.yaml", s);
  records.insert(records.begin(), cli::RecordPair{"scenario", s.record_x, s.record_z});

  double worst = 0.0;
  bool ok = true;
  for (Axis axis : {Axis::X, Axis::Z}) {
    auto measured_opts = cli::propagator_options(s);
    auto unmeasured_opts = measured_opts;
    unmeasured_opts.unmeasured = true;
    const auto& meas = s.measurement(axis);
    const auto& bc = s.boundary(axis);
    const AxisPropagator measured(s.trap, axis, meas, bc, measured_opts);
    const AxisPropagator unmeasured(s.trap, axis, meas, bc, unmeasured_opts);
    const cplx reference = unmeasured.evaluate(render(ConstantRecord{0.0}, meas, 2)).log_amplitude;
    std::vector<double> errors(records.size());
    parallel_for(records.size(), std::thread::hardware_concurrency(), [&](std::size_t i) {
      const auto& spec = axis == Axis::X ? records[i].x : records[i].z;
      const cplx v = measured.evaluate(render(spec, meas, s.numerics.n_samples)).log_amplitude;
      errors[i] = std::abs(v - reference) / std::abs(reference);
    });
    for (std::size_t i = 0; i < records.size(); ++i) {
      detail("%s axis, record %s: relative difference %.3e", to_string(axis), records[i].id.c_str(), errors[i]);
      worst = std::max(worst, errors[i]);
      ok = ok && errors[i] <= 1e-6;
    }
  }
  return {ok, "worst relative difference " + sci(worst) + " (tol 1e-6)"};
}

// 8 -------------------------------------------------------------------------

Outcome criterion_closed_form() {
  const auto s = cli::load_scenario(bundled_path());
  bool complete = true;
  bool matched = true;
  std::size_t itemized = 0;
  for (Axis axis : {Axis::X, Axis::Z}) {
    const auto spec = effective_frequency(derive_frequency_coefficients(s.trap, axis), s.measurement(axis), s.trap);
    const auto d = dimensionless(spec);
    const auto windows = zero_free_windows(d.alpha, spec.drive_omega, 3);
    const auto report = reconcile_closed_form(spec, s.trap.mass, s.trap.hbar, windows);
    for (const auto& item : report.items) {
      if (item.pass) continue;
      ++itemized;
      detail("%s axis, window %zu [%.4e, %.4e] %s: rel %.3e; %s", to_string(axis), item.window, item.t_start,
             item.t_end, item.quantity.c_str(), item.rel_diff, item.note.c_str());
    }
    detail("%s axis: %zu windows, corrected form matches two-term f prefactor: %s, report complete: %s",
           to_string(axis), windows.size(), report.matches ? "yes" : "no", report.complete ? "yes" : "no");
    complete = complete && report.complete && windows.size() == 3;
    matched = matched && report.matches;
  }
  return {complete, std::string("report complete, ") + std::to_string(itemized) + " itemized discrepancies, corrected form " +
                        (matched ? "matches" : "does not match") + " the two-term f prefactor"};
}

// 9 -------------------------------------------------------------------------

std::string data_rows(const std::string& text) {
  std::istringstream in(text);
  std::string out;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line[0] != '#') out += line + "\n";
  }
  return out;
}

Outcome criterion_determinism() {
  const auto s = cli::load_scenario(bundled_path());
  const auto sweep = cli::load_sweep_spec(g_data_dir + "/sweeps/amplitude.yaml");
  cli::RunContext ctx{bundled_path(), 1};
  std::ostringstream a, b;
  const int ca = cli::cmd_sweep(s, sweep, ctx, a);
  ctx.threads = std::max(2U, std::thread::hardware_concurrency());
  const int cb = cli::cmd_sweep(s, sweep, ctx, b);
  const auto ra = data_rows(a.str()), rb = data_rows(b.str());
  const auto rows = static_cast<std::size_t>(std::count(ra.begin(), ra.end(), '\n'));
  detail("run 1 exit %d, run 2 exit %d, %zu data rows each", ca, cb, rows);
  const bool same = ca == 0 && cb == 0 && ra == rb && rows > 1;
  return {same, same ? "data rows byte-identical" : "data rows differ"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rpif acceptance checks"};
  std::vector<int> selected;
  app.add_option("--criterion", selected, "Criteria to run (default: all)")->check(CLI::Range(1, 9));
  app.add_option("--data", g_data_dir, "Data directory");
  CLI11_PARSE(app, argc, argv);

  const std::map<int, std::function<Outcome()>> criteria{
      {1, criterion_alpha},   {2, criterion_beta},           {3, criterion_harmonic},
      {4, criterion_oracle},  {5, criterion_free},           {6, criterion_mathieu},
      {7, criterion_measurement_off}, {8, criterion_closed_form}, {9, criterion_determinism},
  };
  if (selected.empty()) {
    for (const auto& [k, _] : criteria) selected.push_back(k);
  }
  int failures = 0;
  for (int k : selected) {
    Outcome o;
    try {
      o = criteria.at(k)();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %d: %s %s\n", k, o.pass ? "PASS" : "FAIL", o.summary.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
