#pragma once

// Integration of the complex linear oscillator
//   m q'' + m w~^2(t) q = F(t),   w~^2(t) = U~ - V cos(omega t),
// over a monitoring window. Short windows are integrated directly with DOP853.
// Windows spanning many drive periods use exact period stepping: the one-period
// propagator, forced responses and quadratic moments are tabulated once (the
// coefficient is periodic) and applied period by period; only periods that
// contain a kink of the piecewise-linear forcing and the final partial period
// are integrated directly.

#include <cstddef>
#include <functional>
#include <vector>

#include "rpif/records.hpp"
#include "rpif/trapmodel.hpp"

namespace rpif {

enum class Stepping { Automatic, Direct, Periodic };

struct FlowOptions {
  double tol = 1e-12;
  /// Tolerance used for the one-period tables; errors there accumulate over all periods.
  double period_tol = 1e-14;
  /// Automatic stepping switches to period stepping beyond this many drive periods.
  double min_periods_for_stepping = 64.0;
  /// Samples of the Gelfand-Yaglom solution per drive period for branch tracking.
  int samples_per_period = 16;
  Stepping stepping = Stepping::Automatic;
  /// Upper bound on stored trajectory points (ClassicalSolution::grid).
  std::size_t max_dense_points = 4097;
};

/// Continuous argument of a complex curve sampled densely enough that
/// consecutive samples differ by less than a quarter turn, except across
/// near-zeros. Ambiguous half-turn steps are resolved counter-clockwise, which
/// is the i*delta prescription of a damped oscillator (a zero crossing of a
/// real Gelfand-Yaglom solution adds +pi).
class PhaseTracker {
 public:
  /// `direction` fixes the branch of the first sample (its arg is taken near arg(direction)).
  explicit PhaseTracker(cplx direction = {1.0, 0.0});

  void push(cplx z) noexcept;

  /// Unwrapped argument of the last pushed value.
  double unwrapped() const noexcept;
  /// Integer turns k such that unwrapped() = arg(last) + 2 pi k.
  long turns() const noexcept { return turns_; }
  cplx last() const noexcept { return prev_; }

 private:
  cplx prev_;
  long turns_ = 0;
};

/// Fundamental solutions h0 (h0(t0) = 1, h0'(t0) = 0) and h1 (h1(t0) = 0,
/// h1'(t0) = 1) at t1. h1 is the Gelfand-Yaglom function D.
struct HomogeneousResult {
  cplx h0{}, h0_dot{}, h1{}, h1_dot{};
  /// Continuous arg of h1 from 0 at t0+ up to t1.
  double d_arg = 0.0;
  long d_turns = 0;
  /// Largest sampled |h1| on the window.
  double d_max = 0.0;
  std::size_t periods_stepped = 0;
  std::size_t samples = 0;
};

/// Observer for the sampled Gelfand-Yaglom function: (t, D(t)).
using DSampleObserver = std::function<void(double, cplx)>;

HomogeneousResult propagate_homogeneous(const EffectiveFrequencySpec& spec, double t0, double t1,
                                        const FlowOptions& options,
                                        const DSampleObserver& observer = {});

/// State of a forced trajectory with its running quadratures
/// int F q dt and int L dt, L = m q'^2 / 2 - m w~^2 q^2 / 2 + F q.
struct ForcedState {
  cplx q{}, q_dot{};
  cplx int_force_q{};
  cplx int_lagrangian{};
};

struct ForcedResult {
  ForcedState end;
  std::vector<double> grid;
  std::vector<cplx> q, q_dot;
  std::size_t periods_stepped = 0;
};

/// Integrates the forced oscillator from (q0, v0) at t0 to t1. `force` may be
/// empty (F = 0). When `dense` is set, up to max_dense_points states are kept.
ForcedResult propagate_forced(const EffectiveFrequencySpec& spec, double mass,
                              const ForcingProfile& force, double t0, double t1, cplx q0, cplx v0,
                              const FlowOptions& options, bool dense = false);

/// True when the automatic rule would use period stepping on [t0, t1].
bool uses_period_stepping(const EffectiveFrequencySpec& spec, double t0, double t1,
                          const FlowOptions& options) noexcept;

}  // namespace rpif
