#pragma once

// Brute-force check of the restricted propagator: the time-sliced path integral
// with the Gaussian measurement weight on (x - a)^2, integrated exactly over
// all interior slice positions by sequential elimination of the tridiagonal
// quadratic form.

#include <cstddef>

#include "rpif/propagator.hpp"

namespace rpif {

enum class SliceSampling {
  /// Coefficients at slice midpoints, trapezoid in x: O(eps^2).
  Midpoint,
  /// Coefficients and x at the left end of each slice: O(eps).
  LeftEndpoint,
};

struct SlicedLattice {
  std::size_t n_slices = 0;
  double t_start = 0.0;
  double epsilon = 0.0;

  /// Throws BadGrid for fewer than two slices or a degenerate window.
  SlicedLattice(double t_start, double t_end, std::size_t n_slices);

  double endpoint(std::size_t k) const noexcept;
  double midpoint(std::size_t k) const noexcept;
};

struct OracleOptions {
  SliceSampling sampling = SliceSampling::Midpoint;
  /// Drop the weight functional entirely (unmeasured propagator).
  bool unmeasured = false;
  /// Pivots with |pivot| below this fraction of the diagonal scale raise SingularSlice.
  double pivot_floor = 1e-13;
};

/// Log-amplitude of the N-slice propagator, normalized by (m / (2 pi i hbar eps))^(N/2).
cplx discrete_propagator(const AxisProblem& problem, std::size_t n_slices, const OracleOptions& options = {});

struct RichardsonResult {
  cplx value{};
  double error = 0.0;
};

/// (4 v_2N - v_N) / 3 with error |v_2N - v_N| / 3. The imaginary parts are
/// first brought onto the same 2 pi sheet.
RichardsonResult richardson(cplx v_n, cplx v_2n) noexcept;

}  // namespace rpif
