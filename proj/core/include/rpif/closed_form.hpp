#pragma once

// Closed-form fluctuation prefactor of the two-term truncation
//   f(t) = cos(omega t / 2) + alpha cos(3 omega t / 2),
// written as sqrt(C) * X^(-1/2) * Y^(-1/2) with
//   C = (3a - 1)(3a^2 + 2a - 1) omega m / (8 pi a hbar),
//   X = arctangent/exponential bracket, Y = endpoint bracket.
// The literal form carries two misprints, kept selectable so they can be
// demonstrated: the radicand 3a^2 - i + 2a (should be 3a^2 - 1 + 2a) and an
// endpoint bracket that evaluates to f(t'') - f(t') instead of f(t') f(t'').

#include <string>
#include <utility>
#include <vector>

#include "rpif/propagator.hpp"
#include "rpif/trapmodel.hpp"

namespace rpif {

enum class ClosedFormVariant { Literal, Corrected };

const char* to_string(ClosedFormVariant v) noexcept;

struct ClosedFormParts {
  cplx constant{};        // C
  cplx arctan_term{};     // 4 [atan(z') - atan(z'')] / sqrt(radicand)
  cplx first_bracket{};   // X
  cplx second_bracket{};  // Y
  cplx value{};           // principal sqrt(C) * X^(-1/2) * Y^(-1/2)
};

/// The arctangent combination 4 [atan(w(t')) - atan(w(t''))] with
/// w(t) = (2 a e^{i omega t} + 1 - a) / sqrt(3a^2 - 1 + 2a).
cplx closed_form_arctan_difference(cplx alpha, double omega, double t_start, double t_end);

ClosedFormParts closed_form_prefactor(cplx alpha, double omega, double mass, double hbar, double t_start,
                                      double t_end, ClosedFormVariant variant);

/// Convenience overload taking alpha from the frequency spec.
ClosedFormParts closed_form_prefactor(const EffectiveFrequencySpec& spec, double mass, double hbar,
                                      double t_start, double t_end, ClosedFormVariant variant);

/// Expected value of the first bracket for the two-term f:
/// i omega (3a - 1)(3a^2 + 2a - 1) / (4a) * int f^-2 dt.
cplx closed_form_first_bracket_reference(cplx alpha, double omega, double t_start, double t_end);

struct ClosedFormMisprint {
  std::string subexpression;
  std::string literal;
  std::string adopted;
};

/// The misprints corrected by ClosedFormVariant::Corrected.
const std::vector<ClosedFormMisprint>& closed_form_misprints();

struct ReconciliationItem {
  std::size_t window = 0;
  double t_start = 0.0, t_end = 0.0;
  std::string quantity;
  cplx value{}, reference{};
  double rel_diff = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  /// Explanation of a failing comparison (the sub-expression responsible).
  std::string note;
};

struct ReconciliationReport {
  std::vector<ReconciliationItem> items;
  /// Corrected closed form matches the two-term f prefactor on every window.
  bool matches = false;
  /// Every failing item carries a note.
  bool complete = false;
};

/// Compares both variants of the closed form, bracket by bracket, against the
/// two-term f prefactor sqrt(m / (2 pi i hbar f(t') f(t'') int f^-2)) and, for
/// information, against the Gelfand-Yaglom prefactor of the full frequency.
/// Overall square-root signs are aligned to the reference.
ReconciliationReport reconcile_closed_form(const EffectiveFrequencySpec& spec, double mass, double hbar,
                                           const std::vector<std::pair<double, double>>& windows,
                                           double tolerance = 1e-6);

}  // namespace rpif

namespace rpif {

/// `count` windows [t', t''] on which the two-term f has no zero, taken from
/// the longest zero-free stretches of the first drive period (the longest is
/// halved while there are too few), each shrunk by a margin. Sorted by start time.
std::vector<std::pair<double, double>> zero_free_windows(cplx alpha, double omega, std::size_t count = 3);

}  // namespace rpif
