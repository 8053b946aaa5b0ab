#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "rpif/flow.hpp"
#include "rpif/mathieu.hpp"
#include "rpif/records.hpp"
#include "rpif/trapmodel.hpp"

namespace rpif {

struct BoundaryConditions {
  double x_start = 0.0;  // m
  double x_end = 0.0;    // m
  double t_start = 0.0;  // s
  double t_end = 0.0;    // s

  /// Throws InvalidArgument unless t_end > t_start and positions are finite.
  void validate() const;
  /// Throws InvalidArgument if the window differs from the measurement window.
  void check_window(const MeasurementConfig& meas) const;
};

/// Everything needed to evaluate the propagator along one axis.
struct AxisProblem {
  TrapParameters params;
  Axis axis = Axis::X;
  MeasurementConfig meas;
  MeasurementRecord record;
  BoundaryConditions bc;
};

struct PropagatorOptions {
  FlowOptions flow;
  /// Relative threshold on |D(t'')| / max|D| below which the boundary problem is
  /// declared singular. 0 selects max(1e-8, 100 tol).
  double conjugate_threshold = 0.0;
  /// Drops the measurement entirely (unmeasured propagator): U~ = U, F = 0 and no record term.
  bool unmeasured = false;
  /// Keep the trajectory samples in ClassicalSolution.
  bool dense_trajectory = false;
};

struct ClassicalSolution {
  std::vector<double> grid;
  std::vector<cplx> q, q_dot;
  cplx initial_velocity{};
  cplx final_velocity{};
  /// Lagrangian quadrature of the effective action (J s).
  cplx action{};
  /// (m/2)[q q']_{t'}^{t''} + (1/2) int F q dt, valid on-shell.
  cplx action_boundary{};
  HomogeneousResult homogeneous;
};

struct PropagatorResult {
  /// log U = record_term + action_term + prefactor_term.
  cplx log_amplitude{};
  /// i S_cl / hbar.
  cplx action_term{};
  /// Log of the fluctuation prefactor sqrt(m / (2 pi i hbar D(t''))).
  cplx prefactor_term{};
  /// -(2 / (T da^2)) int a^2 dt.
  double record_term = 0.0;
  /// Phase of the amplitude wrapped to (-pi, pi]; Im(log_amplitude) = phase + 2 pi winding.
  double phase = 0.0;
  long winding = 0;
  /// Turns accumulated by the tracked argument of D.
  long prefactor_turns = 0;
  cplx action{};
  cplx action_boundary{};
  std::size_t periods_stepped = 0;
};

/// The effective frequency used for a problem (measurement terms removed when unmeasured).
EffectiveFrequencySpec problem_spec(const AxisProblem& problem, bool unmeasured = false);

/// The complex forcing of a problem (empty when unmeasured).
ForcingProfile problem_forcing(const AxisProblem& problem, bool unmeasured = false);

/// Solves m q'' + m w~^2 q = F with q(t') = x', q(t'') = x'' by superposition.
/// Throws ConjugatePoint when D(t'') is negligible relative to its running maximum.
ClassicalSolution classical_trajectory(const EffectiveFrequencySpec& spec, double mass,
                                       const ForcingProfile& force, const BoundaryConditions& bc,
                                       const PropagatorOptions& options = {});

/// Same, reusing a homogeneous solution already computed on the window.
ClassicalSolution classical_trajectory(const EffectiveFrequencySpec& spec, double mass,
                                       const ForcingProfile& force, const BoundaryConditions& bc,
                                       const HomogeneousResult& homogeneous,
                                       const PropagatorOptions& options = {});

/// Quadrature value of the classical action.
cplx classical_action(const ClassicalSolution& sol) noexcept;

/// Boundary-formula value of the classical action.
cplx classical_action_boundary(const ClassicalSolution& sol) noexcept;

/// log sqrt(m / (2 pi i hbar D)) with arg D taken from the tracked value.
cplx log_prefactor_from_d(double mass, double hbar, cplx d, double d_arg) noexcept;

struct RobustPrefactor {
  cplx value{};
  cplx log_value{};
  cplx d{};
  double d_arg = 0.0;
  long turns = 0;
};

/// Gelfand-Yaglom prefactor: D'' + w~^2 D = 0, D(t') = 0, D'(t') = 1, returns
/// sqrt(m / (2 pi i hbar D(t''))) with the branch fixed by tracking arg D from t'.
RobustPrefactor fluctuation_prefactor_robust(const EffectiveFrequencySpec& spec, double mass, double hbar,
                                             double t_start, double t_end, const FlowOptions& options = {},
                                             double conjugate_threshold = 0.0);

enum class FSource { Series, Ode };

struct FPrefactor {
  cplx value{};
  /// f(t') f(t'') int f^-2 dt, equal to D(t'') for an exact solution f.
  cplx product{};
  cplx integral{};  // int f^-2 dt
  cplx f_start{}, f_end{};
};

/// The f-based prefactor sqrt(m / (2 pi i hbar f(t') f(t'') int f^-2 dt)) for a
/// user-supplied f. The square root is principal unless `reference` is given, in
/// which case the sign closest to it is returned. Throws CausticOnWindow if f
/// vanishes (or nearly so) on the window.
FPrefactor fluctuation_prefactor_from_f(const std::function<cplx(double)>& f, double mass, double hbar,
                                           double t_start, double t_end,
                                           std::optional<cplx> reference = std::nullopt);

/// f from the truncated Mathieu series (n_terms, default two) in t~ = omega t / 2,
/// or from the ODE solution with f(t') = 1, f'(t') = 0.
FPrefactor fluctuation_prefactor_from_f(const EffectiveFrequencySpec& spec, double mass, double hbar,
                                           double t_start, double t_end, FSource source,
                                           std::size_t n_terms = 2,
                                           std::optional<cplx> reference = std::nullopt);

/// Restricted propagator along one axis, assembled in the log domain.
PropagatorResult restricted_propagator(const AxisProblem& problem, const PropagatorOptions& options = {});

/// Caches the record-independent part (frequency, homogeneous solutions, D) of
/// an axis so many records can be evaluated on the same window.
class AxisPropagator {
 public:
  AxisPropagator(const TrapParameters& params, Axis axis, const MeasurementConfig& meas,
                 const BoundaryConditions& bc, const PropagatorOptions& options = {});

  PropagatorResult evaluate(const MeasurementRecord& record) const;

  const EffectiveFrequencySpec& spec() const noexcept { return spec_; }
  const HomogeneousResult& homogeneous() const noexcept { return hom_; }
  cplx prefactor_term() const noexcept { return log_prefactor_; }

 private:
  TrapParameters params_;
  Axis axis_;
  MeasurementConfig meas_;
  BoundaryConditions bc_;
  PropagatorOptions options_;
  EffectiveFrequencySpec spec_;
  HomogeneousResult hom_;
  cplx log_prefactor_{};
};

/// Wraps an angle to (-pi, pi].
double wrap_phase(double angle) noexcept;

/// Adaptive Gauss-Kronrod (7-15) quadrature of a complex integrand.
cplx integrate_gk(const std::function<cplx(double)>& g, double a, double b, double rel_tol = 1e-12,
                  int max_depth = 40);

}  // namespace rpif
