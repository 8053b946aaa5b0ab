#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "rpif/trapmodel.hpp"

namespace rpif {

/// Truncated even Mathieu series f(t~) = sum_k c_{2k+1} cos((2k+1) t~) with at
/// most four terms (c1, c3, c5, c7).
struct SeriesCoefficients {
  std::vector<cplx> c;  // c[k] multiplies cos((2k+1) t~)
  DimensionlessParams params;

  std::size_t terms() const noexcept { return c.size(); }
};

inline constexpr std::size_t kMaxSeriesTerms = 4;

/// Throws ZeroQ if q == 0, OutOfRange unless 1 <= n_terms <= 4.
SeriesCoefficients mathieu_series(const DimensionlessParams& params, std::size_t n_terms);

cplx evaluate_f(const SeriesCoefficients& coeffs, double t_tilde) noexcept;
cplx evaluate_f_derivative(const SeriesCoefficients& coeffs, double t_tilde) noexcept;
cplx evaluate_f_second_derivative(const SeriesCoefficients& coeffs, double t_tilde) noexcept;

/// The residual f'' + (p - 2 q cos 2t~) f of a truncated series is itself a
/// finite cosine sum; entry j is the coefficient of cos(j t~) (odd j only).
std::vector<cplx> series_residual_harmonics(const SeriesCoefficients& coeffs);

cplx series_residual(const SeriesCoefficients& coeffs, double t_tilde);

/// max |residual| over a uniform grid of `samples` points on [lo, hi].
double series_residual_max(const SeriesCoefficients& coeffs, double lo, double hi,
                           std::size_t samples = 4001);

/// Numerical solution of psi'' + (p - 2 q cos 2t~) psi = 0.
struct OdeSolution {
  std::vector<double> grid;
  std::vector<cplx> psi;
  std::vector<cplx> psi_dot;  // d psi / d t~
};

struct MathieuOdeOptions {
  double tol = 1e-12;
  /// If non-empty, the solution is reported exactly at these (sorted) points
  /// instead of at every accepted step. They must lie inside the span.
  std::vector<double> output_points;
};

/// Integrates from span[0] to span[1] starting from (psi0, psi_dot0) at span[0].
/// Throws InvalidArgument for a degenerate span or non-positive tol, and
/// ToleranceNotMet if step control fails.
OdeSolution integrate_mathieu_ode(const DimensionlessParams& params, std::array<double, 2> span,
                                  cplx psi0, cplx psi_dot0, const MathieuOdeOptions& options = {});

}  // namespace rpif
