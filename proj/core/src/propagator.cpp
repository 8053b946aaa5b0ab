#include "rpif/propagator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>

#include "rpif/dop853.hpp"
#include "rpif/errors.hpp"

namespace rpif {
namespace {

constexpr double kPi = std::numbers::pi;

double conjugate_threshold(const PropagatorOptions& options) {
  if (options.conjugate_threshold > 0.0) return options.conjugate_threshold;
  return std::max(1e-8, 1e2 * options.flow.tol);
}

void check_conjugate(const HomogeneousResult& hom, double threshold) {
  if (!(std::abs(hom.h1) > threshold * hom.d_max)) {
    fail(ErrorCode::ConjugatePoint, "conjugate point: D(t'') vanishes relative to its maximum on the window");
  }
}

bool zero_force(const ForcingProfile& force) { return force.empty() || force.identically_zero(); }

// Gauss-Kronrod 7-15 abscissae and weights.
constexpr std::array<double, 8> kXgk{0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                     0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                     0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                     0.207784955007898467600689403773245, 0.0};
constexpr std::array<double, 8> kWgk{0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                     0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                     0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                     0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg{0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct GkEstimate {
  cplx kronrod, gauss;
};

GkEstimate gk15(const std::function<cplx(double)>& g, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const cplx fc = g(c);
  cplx k = kWgk[7] * fc, gs = kWg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const cplx s = g(c - dx) + g(c + dx);
    k += kWgk[j] * s;
    if (j % 2 == 1) gs += kWg[j / 2] * s;
  }
  return {k * h, gs * h};
}

cplx gk_recurse(const std::function<cplx(double)>& g, double a, double b, double abs_tol, int depth,
                const GkEstimate& est) {
  if (std::abs(est.kronrod - est.gauss) <= abs_tol || depth <= 0) return est.kronrod;
  const double m = 0.5 * (a + b);
  const auto left = gk15(g, a, m);
  const auto right = gk15(g, m, b);
  return gk_recurse(g, a, m, 0.5 * abs_tol, depth - 1, left) +
         gk_recurse(g, m, b, 0.5 * abs_tol, depth - 1, right);
}

/// Checks that f stays away from zero on [a, b]: no near-vanishing modulus and no
/// argument jumps that would hide a zero between samples.
void check_zero_free(const std::function<cplx(double)>& f, double a, double b) {
  constexpr int kSamples = 4096;
  double fmax = 0.0, fmin = std::numeric_limits<double>::infinity();
  cplx prev = f(a);
  for (int i = 0; i <= kSamples; ++i) {
    const double t = a + (b - a) * static_cast<double>(i) / kSamples;
    const cplx v = f(t);
    const double m = std::abs(v);
    if (!std::isfinite(m)) fail(ErrorCode::CausticOnWindow, "f is not finite on the window");
    fmax = std::max(fmax, m);
    fmin = std::min(fmin, m);
    if (i > 0 && (v * std::conj(prev)).real() <= 0.0) {
      fail(ErrorCode::CausticOnWindow, "f changes sign (passes through zero) on the window");
    }
    prev = v;
  }
  if (!(fmin > 1e-6 * fmax)) fail(ErrorCode::CausticOnWindow, "f vanishes on the window");
}

}  // namespace

void BoundaryConditions::validate() const {
  if (!std::isfinite(x_start) || !std::isfinite(x_end)) {
    fail(ErrorCode::InvalidArgument, "boundary: positions must be finite");
  }
  if (!std::isfinite(t_start) || !std::isfinite(t_end) || !(t_end > t_start)) {
    fail(ErrorCode::InvalidArgument, "boundary: t_end must exceed t_start");
  }
}

void BoundaryConditions::check_window(const MeasurementConfig& meas) const {
  const double slack = 1e-12 * std::max(1.0, std::abs(meas.duration()));
  if (std::abs(t_start - meas.t_start) > slack || std::abs(t_end - meas.t_end) > slack) {
    fail(ErrorCode::InvalidArgument, "boundary window differs from the measurement window");
  }
}

double wrap_phase(double angle) noexcept {
  double r = std::remainder(angle, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

cplx integrate_gk(const std::function<cplx(double)>& g, double a, double b, double rel_tol, int max_depth) {
  const auto whole = gk15(g, a, b);
  const double scale = std::max(std::abs(whole.kronrod), std::numeric_limits<double>::min());
  return gk_recurse(g, a, b, rel_tol * scale, max_depth, whole);
}

EffectiveFrequencySpec problem_spec(const AxisProblem& problem, bool unmeasured) {
  const auto coeffs = derive_frequency_coefficients(problem.params, problem.axis);
  if (unmeasured) {
    MeasurementConfig off = problem.meas;
    off.resolution = std::numeric_limits<double>::infinity();
    return effective_frequency(coeffs, off, problem.params);
  }
  return effective_frequency(coeffs, problem.meas, problem.params);
}

ForcingProfile problem_forcing(const AxisProblem& problem, bool unmeasured) {
  if (unmeasured || !problem.meas.active()) return {};
  return forcing(problem.record, problem.meas, problem.params);
}

ClassicalSolution classical_trajectory(const EffectiveFrequencySpec& spec, double mass,
                                       const ForcingProfile& force, const BoundaryConditions& bc,
                                       const PropagatorOptions& options) {
  bc.validate();
  const auto hom = propagate_homogeneous(spec, bc.t_start, bc.t_end, options.flow);
  return classical_trajectory(spec, mass, force, bc, hom, options);
}

ClassicalSolution classical_trajectory(const EffectiveFrequencySpec& spec, double mass,
                                       const ForcingProfile& force, const BoundaryConditions& bc,
                                       const HomogeneousResult& hom, const PropagatorOptions& options) {
  bc.validate();
  check_conjugate(hom, conjugate_threshold(options));
  const double t0 = bc.t_start, t1 = bc.t_end;
  cplx particular{};
  if (!zero_force(force)) {
    particular = propagate_forced(spec, mass, force, t0, t1, {}, {}, options.flow).end.q;
  }
  const cplx x0 = bc.x_start, x1 = bc.x_end;
  const cplx v0 = (x1 - x0 * hom.h0 - particular) / hom.h1;
  auto run = propagate_forced(spec, mass, force, t0, t1, x0, v0, options.flow, options.dense_trajectory);

  ClassicalSolution sol;
  sol.grid = std::move(run.grid);
  sol.q = std::move(run.q);
  sol.q_dot = std::move(run.q_dot);
  sol.initial_velocity = v0;
  sol.final_velocity = run.end.q_dot;
  sol.action = run.end.int_lagrangian;
  sol.action_boundary = 0.5 * mass * (run.end.q * run.end.q_dot - x0 * v0) + 0.5 * run.end.int_force_q;
  sol.homogeneous = hom;
  return sol;
}

cplx classical_action(const ClassicalSolution& sol) noexcept { return sol.action; }

cplx classical_action_boundary(const ClassicalSolution& sol) noexcept { return sol.action_boundary; }

cplx log_prefactor_from_d(double mass, double hbar, cplx d, double d_arg) noexcept {
  const double log_mod = std::log(mass / (2.0 * kPi * hbar)) - std::log(std::abs(d));
  return 0.5 * cplx(log_mod, -0.5 * kPi - d_arg);
}

RobustPrefactor fluctuation_prefactor_robust(const EffectiveFrequencySpec& spec, double mass, double hbar,
                                             double t_start, double t_end, const FlowOptions& options,
                                             double conjugate_threshold) {
  const auto hom = propagate_homogeneous(spec, t_start, t_end, options);
  const double thr = conjugate_threshold > 0.0 ? conjugate_threshold : std::max(1e-8, 1e2 * options.tol);
  check_conjugate(hom, thr);
  RobustPrefactor out;
  out.d = hom.h1;
  out.d_arg = hom.d_arg;
  out.turns = hom.d_turns;
  out.log_value = log_prefactor_from_d(mass, hbar, hom.h1, hom.d_arg);
  out.value = std::exp(out.log_value);
  return out;
}

FPrefactor fluctuation_prefactor_from_f(const std::function<cplx(double)>& f, double mass, double hbar,
                                           double t_start, double t_end, std::optional<cplx> reference) {
  if (!(t_end > t_start)) fail(ErrorCode::InvalidArgument, "prefactor: t_end must exceed t_start");
  check_zero_free(f, t_start, t_end);
  FPrefactor out;
  out.f_start = f(t_start);
  out.f_end = f(t_end);
  out.integral = integrate_gk([&f](double t) { const cplx v = f(t); return 1.0 / (v * v); }, t_start, t_end);
  out.product = out.f_start * out.f_end * out.integral;
  out.value = std::sqrt(mass / (2.0 * kPi * cplx(0.0, 1.0) * hbar * out.product));
  if (reference && std::abs(out.value + *reference) < std::abs(out.value - *reference)) out.value = -out.value;
  return out;
}

FPrefactor fluctuation_prefactor_from_f(const EffectiveFrequencySpec& spec, double mass, double hbar,
                                           double t_start, double t_end, FSource source, std::size_t n_terms,
                                           std::optional<cplx> reference) {
  if (source == FSource::Series) {
    const auto series = mathieu_series(dimensionless(spec), n_terms);
    const double half = 0.5 * spec.drive_omega;
    return fluctuation_prefactor_from_f([&series, half](double t) { return evaluate_f(series, half * t); },
                                       mass, hbar, t_start, t_end, reference);
  }
  if (!(t_end > t_start)) fail(ErrorCode::InvalidArgument, "prefactor: t_end must exceed t_start");

  // f with f(t') = 1, f'(t') = 0 carried together with int f^-2.
  std::vector<double> y{1.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  ode::Dop853Options opt;
  opt.rtol = 1e-13;
  opt.n_controlled = 4;
  const double wmax = std::abs(spec.U_tilde) + std::abs(spec.V);
  double max_step = (t_end - t_start) / 64.0;
  if (spec.V != 0.0) max_step = std::min(max_step, spec.period() / 32.0);
  if (wmax > 0.0) max_step = std::min(max_step, 2.0 * kPi / std::sqrt(wmax) / 32.0);
  opt.max_step = max_step;
  ode::Dop853 stepper(opt);
  auto rhs = [&spec](double t, std::span<const double> s, std::span<double> ds) {
    const cplx f{s[0], s[1]}, fd{s[2], s[3]};
    const cplx fdd = -spec.at(t) * f;
    const cplx inv = 1.0 / (f * f);
    ds[0] = fd.real();
    ds[1] = fd.imag();
    ds[2] = fdd.real();
    ds[3] = fdd.imag();
    ds[4] = inv.real();
    ds[5] = inv.imag();
  };
  double fmax = 1.0, fmin = 1.0;
  cplx prev{1.0, 0.0};
  bool crossed = false;
  stepper.integrate(rhs, t_start, t_end, y, [&](double, std::span<const double> s) {
    const cplx f{s[0], s[1]};
    fmax = std::max(fmax, std::abs(f));
    fmin = std::min(fmin, std::abs(f));
    if ((f * std::conj(prev)).real() <= 0.0) crossed = true;
    prev = f;
  });
  if (crossed || !(fmin > 1e-6 * fmax)) fail(ErrorCode::CausticOnWindow, "ODE solution f vanishes on the window");
  FPrefactor out;
  out.f_start = 1.0;
  out.f_end = {y[0], y[1]};
  out.integral = {y[4], y[5]};
  out.product = out.f_start * out.f_end * out.integral;
  out.value = std::sqrt(mass / (2.0 * kPi * cplx(0.0, 1.0) * hbar * out.product));
  if (reference && std::abs(out.value + *reference) < std::abs(out.value - *reference)) out.value = -out.value;
  return out;
}

AxisPropagator::AxisPropagator(const TrapParameters& params, Axis axis, const MeasurementConfig& meas,
                               const BoundaryConditions& bc, const PropagatorOptions& options)
    : params_(params), axis_(axis), meas_(meas), bc_(bc), options_(options) {
  params_.validate();
  meas_.validate();
  bc_.validate();
  bc_.check_window(meas_);
  const auto coeffs = derive_frequency_coefficients(params_, axis_);
  MeasurementConfig m = meas_;
  if (options_.unmeasured) m.resolution = std::numeric_limits<double>::infinity();
  spec_ = effective_frequency(coeffs, m, params_);
  hom_ = propagate_homogeneous(spec_, bc_.t_start, bc_.t_end, options_.flow);
  check_conjugate(hom_, conjugate_threshold(options_));
  log_prefactor_ = log_prefactor_from_d(params_.mass, params_.hbar, hom_.h1, hom_.d_arg);
}

PropagatorResult AxisPropagator::evaluate(const MeasurementRecord& record) const {
  record.check_window(meas_);
  const bool measured = !options_.unmeasured && meas_.active();
  ForcingProfile force;
  if (measured) force = forcing(record, meas_, params_);
  const auto sol = classical_trajectory(spec_, params_.mass, force, bc_, hom_, options_);

  PropagatorResult r;
  r.record_term = measured ? record_term(record, meas_) : 0.0;
  r.action = sol.action;
  r.action_boundary = sol.action_boundary;
  r.action_term = cplx(0.0, 1.0) * sol.action / params_.hbar;
  r.prefactor_term = log_prefactor_;
  r.prefactor_turns = hom_.d_turns;
  r.log_amplitude = r.record_term + r.action_term + r.prefactor_term;
  r.phase = wrap_phase(r.log_amplitude.imag());
  r.winding = std::lround((r.log_amplitude.imag() - r.phase) / (2.0 * kPi));
  r.periods_stepped = hom_.periods_stepped;
  if (!std::isfinite(r.log_amplitude.real()) || !std::isfinite(r.log_amplitude.imag())) {
    fail(ErrorCode::ToleranceNotMet, "propagator log-amplitude is not finite");
  }
  return r;
}

PropagatorResult restricted_propagator(const AxisProblem& problem, const PropagatorOptions& options) {
  const AxisPropagator prop(problem.params, problem.axis, problem.meas, problem.bc, options);
  return prop.evaluate(problem.record);
}

}  // namespace rpif
