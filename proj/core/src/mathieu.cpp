#include "rpif/mathieu.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rpif/dop853.hpp"
#include "rpif/errors.hpp"

namespace rpif {

SeriesCoefficients mathieu_series(const DimensionlessParams& params, std::size_t n_terms) {
  if (params.q == 0.0) fail(ErrorCode::ZeroQ, "mathieu_series: q = 0");
  if (n_terms < 1 || n_terms > kMaxSeriesTerms) {
    fail(ErrorCode::OutOfRange, "mathieu_series: n_terms must be in 1..4, got " + std::to_string(n_terms));
  }
  const cplx p = params.p;
  const double q = params.q;
  const cplx a = p - 1.0 - q;
  const cplx b = (p - 9.0) * a - q * q;
  const std::array<cplx, kMaxSeriesTerms> all{
      cplx(1.0), a / q, b / (q * q), (p - 25.0) * b / (q * q * q)};
  return {std::vector<cplx>(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n_terms)), params};
}

cplx evaluate_f(const SeriesCoefficients& coeffs, double t_tilde) noexcept {
  cplx sum{0.0, 0.0};
  for (std::size_t k = 0; k < coeffs.c.size(); ++k) {
    sum += coeffs.c[k] * std::cos(static_cast<double>(2 * k + 1) * t_tilde);
  }
  return sum;
}

cplx evaluate_f_derivative(const SeriesCoefficients& coeffs, double t_tilde) noexcept {
  cplx sum{0.0, 0.0};
  for (std::size_t k = 0; k < coeffs.c.size(); ++k) {
    const double j = static_cast<double>(2 * k + 1);
    sum -= j * coeffs.c[k] * std::sin(j * t_tilde);
  }
  return sum;
}

cplx evaluate_f_second_derivative(const SeriesCoefficients& coeffs, double t_tilde) noexcept {
  cplx sum{0.0, 0.0};
  for (std::size_t k = 0; k < coeffs.c.size(); ++k) {
    const double j = static_cast<double>(2 * k + 1);
    sum -= j * j * coeffs.c[k] * std::cos(j * t_tilde);
  }
  return sum;
}

std::vector<cplx> series_residual_harmonics(const SeriesCoefficients& coeffs) {
  // (p - j^2) c_j cos(j t) - q c_j [cos((j+2) t) + cos((j-2) t)], cos(-t) = cos(t).
  const std::size_t top = 2 * coeffs.c.size() + 1;
  std::vector<cplx> h(top + 1, cplx{0.0, 0.0});
  const cplx p = coeffs.params.p;
  const double q = coeffs.params.q;
  for (std::size_t k = 0; k < coeffs.c.size(); ++k) {
    const std::size_t j = 2 * k + 1;
    const cplx cj = coeffs.c[k];
    h[j] += (p - static_cast<double>(j * j)) * cj;
    h[j + 2] -= q * cj;
    h[j == 1 ? 1 : j - 2] -= q * cj;
  }
  return h;
}

cplx series_residual(const SeriesCoefficients& coeffs, double t_tilde) {
  const auto h = series_residual_harmonics(coeffs);
  cplx sum{0.0, 0.0};
  for (std::size_t j = 1; j < h.size(); j += 2) sum += h[j] * std::cos(static_cast<double>(j) * t_tilde);
  return sum;
}

double series_residual_max(const SeriesCoefficients& coeffs, double lo, double hi, std::size_t samples) {
  const auto h = series_residual_harmonics(coeffs);
  double best = 0.0;
  const std::size_t n = std::max<std::size_t>(samples, 2);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    cplx sum{0.0, 0.0};
    for (std::size_t j = 1; j < h.size(); j += 2) sum += h[j] * std::cos(static_cast<double>(j) * t);
    best = std::max(best, std::abs(sum));
  }
  return best;
}

OdeSolution integrate_mathieu_ode(const DimensionlessParams& params, std::array<double, 2> span,
                                  cplx psi0, cplx psi_dot0, const MathieuOdeOptions& options) {
  if (!(span[1] != span[0]) || !std::isfinite(span[0]) || !std::isfinite(span[1])) {
    fail(ErrorCode::InvalidArgument, "integrate_mathieu_ode: degenerate span");
  }
  if (!(options.tol > 0.0)) fail(ErrorCode::InvalidArgument, "integrate_mathieu_ode: tol must be positive");

  const cplx p = params.p;
  const double q = params.q;
  auto rhs = [p, q](double t, std::span<const double> y, std::span<double> dy) {
    const cplx psi(y[0], y[1]);
    const cplx acc = -(p - 2.0 * q * std::cos(2.0 * t)) * psi;
    dy[0] = y[2];
    dy[1] = y[3];
    dy[2] = acc.real();
    dy[3] = acc.imag();
  };

  ode::Dop853Options opt;
  opt.rtol = options.tol;
  opt.atol = 1e-300;
  // Resolve the drive period even when |p| is tiny.
  opt.max_step = 0.25;
  ode::Dop853 stepper(opt);

  std::vector<double> y{psi0.real(), psi0.imag(), psi_dot0.real(), psi_dot0.imag()};
  OdeSolution out;
  auto record = [&out](double t, std::span<const double> s) {
    out.grid.push_back(t);
    out.psi.emplace_back(s[0], s[1]);
    out.psi_dot.emplace_back(s[2], s[3]);
  };
  record(span[0], y);

  if (options.output_points.empty()) {
    stepper.integrate(rhs, span[0], span[1], y, record);
  } else {
    const double dir = span[1] > span[0] ? 1.0 : -1.0;
    double t = span[0];
    for (double target : options.output_points) {
      if ((target - span[0]) * dir < 0.0 || (target - span[1]) * dir > 0.0) {
        fail(ErrorCode::InvalidArgument, "integrate_mathieu_ode: output point outside span");
      }
      if ((target - t) * dir < 0.0) {
        fail(ErrorCode::InvalidArgument, "integrate_mathieu_ode: output points must be sorted");
      }
      if (target == t) continue;
      stepper.integrate(rhs, t, target, y);
      t = target;
      record(t, y);
    }
    if (t != span[1]) {
      stepper.integrate(rhs, t, span[1], y);
      record(span[1], y);
    }
  }
  return out;
}

}  // namespace rpif
