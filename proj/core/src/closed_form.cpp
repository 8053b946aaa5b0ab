#include "rpif/closed_form.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "rpif/errors.hpp"

namespace rpif {
namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI{0.0, 1.0};

cplx two_term_f(cplx alpha, double omega, double t) {
  const double th = 0.5 * omega * t;
  return std::cos(th) + alpha * std::cos(3.0 * th);
}

double rel_diff(cplx a, cplx b) {
  const double scale = std::max(std::abs(b), std::numeric_limits<double>::min());
  return std::abs(a - b) / scale;
}

cplx align_sign(cplx v, cplx ref) { return std::abs(v + ref) < std::abs(v - ref) ? -v : v; }

}  // namespace

const char* to_string(ClosedFormVariant v) noexcept {
  return v == ClosedFormVariant::Literal ? "literal" : "corrected";
}

cplx closed_form_arctan_difference(cplx alpha, double omega, double t_start, double t_end) {
  // atan z = (i/2)[log(1 - i z) - log(1 + i z)], both logs continued along t so
  // that the difference is the antiderivative increment rather than a principal value.
  const cplx s = std::sqrt(3.0 * alpha * alpha - 1.0 + 2.0 * alpha);
  auto w = [&](double t) { return (2.0 * std::exp(kI * (omega * t)) * alpha + 1.0 - alpha) / s; };
  for (int n = 256;; n *= 2) {
    cplx dlog{0.0, 0.0};
    bool coarse = false;
    cplx prev = w(t_start);
    for (int k = 1; k <= n; ++k) {
      const cplx z = w(t_start + (t_end - t_start) * k / n);
      const cplx step = std::log((1.0 - kI * z) / (1.0 - kI * prev)) - std::log((1.0 + kI * z) / (1.0 + kI * prev));
      if (std::abs(step.imag()) > 0.5 * kPi) coarse = true;
      dlog += step;
      prev = z;
    }
    if (!coarse || n >= (1 << 20)) return -4.0 * (0.5 * kI) * dlog;
  }
}

ClosedFormParts closed_form_prefactor(cplx alpha, double omega, double mass, double hbar, double t_start,
                                      double t_end, ClosedFormVariant variant) {
  if (alpha == cplx{}) fail(ErrorCode::InvalidArgument, "closed form: alpha must be non-zero");
  const cplx a = alpha;
  const cplx e1 = std::exp(kI * (omega * t_start));
  const cplx e2 = std::exp(kI * (omega * t_end));

  ClosedFormParts out;
  out.constant = (3.0 * a - 1.0) * (3.0 * a * a + 2.0 * a - 1.0) * omega * mass / (8.0 * kPi * a * hbar);

  const cplx radicand = variant == ClosedFormVariant::Literal ? 3.0 * a * a - kI + 2.0 * a
                                                              : 3.0 * a * a - 1.0 + 2.0 * a;
  out.arctan_term = closed_form_arctan_difference(a, omega, t_start, t_end) / std::sqrt(radicand);

  auto den = [a](cplx e) { return -a * e * e - e + e * a - a; };
  const cplx dd = den(e2) * den(e1);
  const cplx n1 = e2 * e1 * e1 - 2.0 * e1 * e1 + e1 - e2 - e1 * e2 * e2 + 2.0 * e2 * e2;
  const cplx n2 = -e2 * e1 * e1 + e2 + e1 * e2 * e2 - e1;
  out.first_bracket = out.arctan_term + (a + 1.0) * (e2 - e1) / ((e2 + 1.0) * a * (e1 + 1.0)) +
                      n1 * a * a / dd + n2 * a / dd;

  if (variant == ClosedFormVariant::Literal) {
    const cplx u1 = std::exp(kI * (0.5 * omega * t_start));
    const cplx u2 = std::exp(kI * (0.5 * omega * t_end));
    const cplx u13 = u1 * u1 * u1, u23 = u2 * u2 * u2;
    const cplx norm = 1.0 / (u13 * u23);
    out.second_bracket =
        (u13 * u23 * u23 + u13 - u23 * u13 * u13 - u23) * norm * a / 2.0 +
        (u13 * std::pow(u2, 4) + u13 * u2 * u2 - u23 * std::pow(u1, 4) - u23 * u1 * u1) * norm / 2.0;
  } else {
    out.second_bracket = two_term_f(a, omega, t_start) * two_term_f(a, omega, t_end);
  }
  out.value = std::sqrt(out.constant) / std::sqrt(out.first_bracket) / std::sqrt(out.second_bracket);
  return out;
}

ClosedFormParts closed_form_prefactor(const EffectiveFrequencySpec& spec, double mass, double hbar,
                                      double t_start, double t_end, ClosedFormVariant variant) {
  const auto d = dimensionless(spec);
  return closed_form_prefactor(d.alpha, spec.drive_omega, mass, hbar, t_start, t_end, variant);
}

cplx closed_form_first_bracket_reference(cplx alpha, double omega, double t_start, double t_end) {
  const cplx integral = integrate_gk(
      [&](double t) {
        const cplx f = two_term_f(alpha, omega, t);
        return 1.0 / (f * f);
      },
      t_start, t_end, 1e-13);
  return kI * omega * (3.0 * alpha - 1.0) * (3.0 * alpha * alpha + 2.0 * alpha - 1.0) / (4.0 * alpha) * integral;
}

const std::vector<ClosedFormMisprint>& closed_form_misprints() {
  static const std::vector<ClosedFormMisprint> list{
      {"first bracket, prefactor of the arctangent difference", "1/sqrt(3a^2 - i + 2a)", "1/sqrt(3a^2 - 1 + 2a)"},
      {"second bracket (endpoint factor)",
       "exponential sum equal to f(t'') - f(t')", "f(t') f(t'') with f = cos(w t/2) + a cos(3 w t/2)"},
  };
  return list;
}

ReconciliationReport reconcile_closed_form(const EffectiveFrequencySpec& spec, double mass, double hbar,
                                           const std::vector<std::pair<double, double>>& windows,
                                           double tolerance) {
  const auto d = dimensionless(spec);
  const cplx a = d.alpha;
  const double w = spec.drive_omega;
  const auto& misprints = closed_form_misprints();
  ReconciliationReport report;
  report.matches = !windows.empty();

  for (std::size_t k = 0; k < windows.size(); ++k) {
    const auto [t0, t1] = windows[k];
    auto add = [&](std::string quantity, cplx value, cplx reference, double tol, std::string note) {
      ReconciliationItem item;
      item.window = k;
      item.t_start = t0;
      item.t_end = t1;
      item.quantity = std::move(quantity);
      item.value = value;
      item.reference = reference;
      item.rel_diff = rel_diff(value, reference);
      item.tolerance = tol;
      item.pass = std::isfinite(item.rel_diff) && item.rel_diff <= tol;
      if (!item.pass) item.note = std::move(note);
      report.items.push_back(std::move(item));
      return report.items.back().pass;
    };

    const auto f_pref = fluctuation_prefactor_from_f(
        [&](double t) { return two_term_f(a, w, t); }, mass, hbar, t0, t1);
    const cplx x_ref = closed_form_first_bracket_reference(a, w, t0, t1);
    const cplx y_ref = two_term_f(a, w, t0) * two_term_f(a, w, t1);
    const auto lit = closed_form_prefactor(a, w, mass, hbar, t0, t1, ClosedFormVariant::Literal);
    const auto cor = closed_form_prefactor(a, w, mass, hbar, t0, t1, ClosedFormVariant::Corrected);

    const std::string radicand_note = "misprint: " + misprints[0].subexpression + " reads " + misprints[0].literal;
    const std::string endpoint_note = "misprint: " + misprints[1].subexpression + " is " + misprints[1].literal;
    add("first_bracket_literal", lit.first_bracket, x_ref, tolerance, radicand_note);
    add("first_bracket_corrected", cor.first_bracket, x_ref, tolerance,
        "first bracket disagrees with i w (3a-1)(3a^2+2a-1)/(4a) int f^-2 after correction");
    add("second_bracket_literal", lit.second_bracket, y_ref, tolerance, endpoint_note);
    add("second_bracket_corrected", cor.second_bracket, y_ref, tolerance, "endpoint bracket disagrees after correction");
    add("prefactor_literal", align_sign(lit.value, f_pref.value), f_pref.value, tolerance,
        radicand_note + "; " + endpoint_note);
    const bool ok = add("prefactor_corrected", align_sign(cor.value, f_pref.value), f_pref.value, tolerance,
                        "corrected closed form disagrees with the two-term f prefactor");
    report.matches = report.matches && ok;

    try {
      const auto robust = fluctuation_prefactor_robust(spec, mass, hbar, t0, t1);
      add("prefactor_corrected_vs_gelfand_yaglom", align_sign(cor.value, robust.value), robust.value, tolerance,
          "truncation: the two-term f is not an exact solution of the frequency equation (series residual), so its "
          "prefactor differs from the Gelfand-Yaglom value of the full equation");
    } catch (const Error& e) {
      add("prefactor_corrected_vs_gelfand_yaglom", cor.value, cplx(std::nan(""), 0.0), tolerance,
          std::string("Gelfand-Yaglom reference unavailable: ") + e.what());
    }
  }
  report.complete = !report.items.empty();
  for (const auto& item : report.items) {
    if (!item.pass && item.note.empty()) report.complete = false;
  }
  return report;
}

}  // namespace rpif

namespace rpif {

std::vector<std::pair<double, double>> zero_free_windows(cplx alpha, double omega, std::size_t count) {
  // Scan theta = omega t / 2 over [0, pi] (f has period 2 pi in theta, odd about pi/2 up to sign).
  constexpr int kSamples = 4096;
  std::vector<double> theta(kSamples + 1);
  std::vector<cplx> f(kSamples + 1);
  double fmax = 0.0;
  for (int i = 0; i <= kSamples; ++i) {
    theta[i] = std::numbers::pi * i / kSamples;
    f[i] = std::cos(theta[i]) + alpha * std::cos(3.0 * theta[i]);
    fmax = std::max(fmax, std::abs(f[i]));
  }
  const double floor = 0.05 * fmax;
  std::vector<std::pair<double, double>> runs;
  int start = -1;
  for (int i = 0; i <= kSamples; ++i) {
    const bool good = std::abs(f[i]) > floor && (i == 0 || start < 0 || (f[i] * std::conj(f[i - 1])).real() > 0.0);
    if (good && start < 0) start = i;
    if ((!good || i == kSamples) && start >= 0) {
      const int end = good ? i : i - 1;
      if (end > start) runs.emplace_back(theta[start], theta[end]);
      start = (good || std::abs(f[i]) <= floor) ? -1 : i;
    }
  }
  auto longest_first = [](const auto& a, const auto& b) { return a.second - a.first > b.second - b.first; };
  std::stable_sort(runs.begin(), runs.end(), longest_first);
  if (runs.size() > count) runs.resize(count);
  while (!runs.empty() && runs.size() < count) {
    const auto [lo, hi] = runs.front();
    const double mid = 0.5 * (lo + hi);
    runs.front() = {lo, mid};
    runs.emplace_back(mid, hi);
    std::stable_sort(runs.begin(), runs.end(), longest_first);
  }
  std::sort(runs.begin(), runs.end());
  std::vector<std::pair<double, double>> out;
  for (auto [a, b] : runs) {
    const double margin = 0.1 * (b - a);
    out.emplace_back(2.0 * (a + margin) / omega, 2.0 * (b - margin) / omega);
  }
  return out;
}

}  // namespace rpif
