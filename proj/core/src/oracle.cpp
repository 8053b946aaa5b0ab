#include "rpif/oracle.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "rpif/errors.hpp"

namespace rpif {

SlicedLattice::SlicedLattice(double t_start_, double t_end, std::size_t n)
    : n_slices(n), t_start(t_start_), epsilon((t_end - t_start_) / static_cast<double>(n)) {
  if (n < 2) fail(ErrorCode::BadGrid, "lattice needs at least two slices");
  if (!(t_end > t_start_) || !std::isfinite(epsilon)) fail(ErrorCode::BadGrid, "lattice window is degenerate");
}

double SlicedLattice::endpoint(std::size_t k) const noexcept {
  return t_start + epsilon * static_cast<double>(k);
}

double SlicedLattice::midpoint(std::size_t k) const noexcept {
  return t_start + epsilon * (static_cast<double>(k) + 0.5);
}

cplx discrete_propagator(const AxisProblem& problem, std::size_t n_slices, const OracleOptions& options) {
  problem.params.validate();
  problem.meas.validate();
  problem.bc.validate();
  problem.bc.check_window(problem.meas);
  const bool measured = !options.unmeasured && problem.meas.active();
  if (measured) problem.record.check_window(problem.meas);

  const SlicedLattice lat(problem.bc.t_start, problem.bc.t_end, n_slices);
  const auto coeffs = derive_frequency_coefficients(problem.params, problem.axis);
  const double m = problem.params.mass, hbar = problem.params.hbar, w = problem.params.drive_omega;
  const double eps = lat.epsilon;
  const double gamma = measured ? 2.0 / (problem.meas.duration() * problem.meas.resolution * problem.meas.resolution)
                                : 0.0;
  const cplx i_hbar{0.0, 1.0 / hbar};
  const bool midpoint = options.sampling == SliceSampling::Midpoint;

  // Exponent = -1/2 sum A_jk x_j x_k + sum b_j x_j + c over x_0..x_N.
  const std::size_t N = n_slices;
  std::vector<cplx> diag(N + 1), lin(N + 1);
  const cplx off = i_hbar * (m / eps);  // A_{k,k+1}
  cplx c{};
  for (std::size_t k = 0; k < N; ++k) {
    const double t = midpoint ? lat.midpoint(k) : lat.endpoint(k);
    const double pot = coeffs.U - coeffs.V * std::cos(w * t);
    const double a = measured ? problem.record.value_at(t) : 0.0;
    // Kinetic m (x_{k+1} - x_k)^2 / (2 eps).
    diag[k] -= 2.0 * i_hbar * (m / (2.0 * eps));
    diag[k + 1] -= 2.0 * i_hbar * (m / (2.0 * eps));
    if (midpoint) {
      // -(eps/2) m W (x_k^2 + x_{k+1}^2)/2 and -gamma eps ((x_k - a)^2 + (x_{k+1} - a)^2)/2.
      const cplx quad = -i_hbar * (eps * m * pot / 4.0) - gamma * eps / 2.0;
      diag[k] -= 2.0 * quad;
      diag[k + 1] -= 2.0 * quad;
      lin[k] += gamma * eps * a;
      lin[k + 1] += gamma * eps * a;
      c -= gamma * eps * a * a;
    } else {
      const cplx quad = -i_hbar * (eps * m * pot / 2.0) - gamma * eps;
      diag[k] -= 2.0 * quad;
      lin[k] += 2.0 * gamma * eps * a;
      c -= gamma * eps * a * a;
    }
  }

  const cplx x0 = problem.bc.x_start, xN = problem.bc.x_end;
  // Fold the fixed endpoints into the constant and the neighbouring linear terms.
  c += -0.5 * diag[0] * x0 * x0 + lin[0] * x0 - 0.5 * diag[N] * xN * xN + lin[N] * xN;
  lin[1] -= off * x0;
  lin[N - 1] -= off * xN;

  const double log_two_pi = std::log(2.0 * std::numbers::pi);
  cplx log_amp = 0.5 * static_cast<double>(N) *
                 cplx(std::log(m / (2.0 * std::numbers::pi * hbar * eps)), -0.5 * std::numbers::pi);
  log_amp += c;

  const double scale = 2.0 * m / (hbar * eps);
  cplx pivot = diag[1], b = lin[1];
  for (std::size_t k = 1; k < N; ++k) {
    if (!(std::abs(pivot) > options.pivot_floor * scale) || !std::isfinite(std::abs(pivot))) {
      fail(ErrorCode::SingularSlice, "oracle: elimination pivot vanished at slice " + std::to_string(k));
    }
    // int dx exp(-pivot x^2 / 2 + b x) = sqrt(2 pi / pivot) exp(b^2 / (2 pivot)).
    log_amp += 0.5 * (log_two_pi - std::log(pivot)) + b * b / (2.0 * pivot);
    if (k + 1 < N) {
      const cplx ratio = off / pivot;
      b = lin[k + 1] - ratio * b;
      pivot = diag[k + 1] - ratio * off;
    }
  }
  return log_amp;
}

RichardsonResult richardson(cplx v_n, cplx v_2n) noexcept {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double shift = two_pi * std::round((v_2n.imag() - v_n.imag()) / two_pi);
  const cplx fine{v_2n.real(), v_2n.imag() - shift};
  RichardsonResult r;
  r.value = (4.0 * fine - v_n) / 3.0;
  r.error = std::abs(fine - v_n) / 3.0;
  r.value.imag(r.value.imag() + shift);
  return r;
}

}  // namespace rpif
