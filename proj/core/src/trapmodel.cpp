#include "rpif/trapmodel.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "rpif/errors.hpp"

namespace rpif {
namespace {

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    fail(ErrorCode::InvalidArgument,
         std::string(name) + " must be positive and finite (got " + std::to_string(value) + ")");
  }
}

}  // namespace

void TrapParameters::validate() const {
  require_positive(mass, "mass");
  require_positive(half_gap, "half_gap");
  require_positive(drive_omega, "drive_omega");
  require_positive(hbar, "hbar");
  if (!std::isfinite(charge) || !std::isfinite(dc_voltage) || !std::isfinite(ac_voltage)) {
    fail(ErrorCode::InvalidArgument, "charge and voltages must be finite");
  }
}

const char* to_string(Axis axis) noexcept { return axis == Axis::X ? "x" : "z"; }

bool MeasurementConfig::active() const noexcept { return std::isfinite(resolution); }

void MeasurementConfig::validate() const {
  if (!std::isfinite(t_start) || !std::isfinite(t_end) || !(t_end > t_start)) {
    fail(ErrorCode::InvalidArgument, "measurement window requires finite t_end > t_start");
  }
  if (!(resolution > 0.0)) {
    fail(ErrorCode::InvalidArgument, "resolution must be positive (use inf to switch it off)");
  }
}

cplx EffectiveFrequencySpec::at(double t) const noexcept {
  return U_tilde - V * std::cos(drive_omega * t);
}

double EffectiveFrequencySpec::period() const noexcept {
  return 2.0 * std::numbers::pi / drive_omega;
}

FrequencyCoefficients derive_frequency_coefficients(const TrapParameters& params, Axis axis) {
  params.validate();
  const double scale = params.charge / (params.mass * params.half_gap * params.half_gap);
  const double sign = axis == Axis::X ? 1.0 : -1.0;
  return {sign * scale * params.dc_voltage, sign * scale * params.ac_voltage, axis};
}

double measurement_shift(const MeasurementConfig& meas, const TrapParameters& params) {
  meas.validate();
  if (!meas.active()) return 0.0;
  const double da = meas.resolution;
  // 4 hbar / (i m T da^2) = -4 i hbar / (m T da^2)
  return -4.0 * params.hbar / (params.mass * meas.duration() * da * da);
}

EffectiveFrequencySpec effective_frequency(const FrequencyCoefficients& coeffs,
                                           const MeasurementConfig& meas,
                                           const TrapParameters& params) {
  params.validate();
  return {cplx(coeffs.U, measurement_shift(meas, params)), coeffs.V, params.drive_omega};
}

DimensionlessParams dimensionless_unchecked(const EffectiveFrequencySpec& spec) noexcept {
  const double w2 = spec.drive_omega * spec.drive_omega;
  DimensionlessParams out;
  out.p = 4.0 * spec.U_tilde / w2;
  out.q = 2.0 * spec.V / w2;
  out.alpha = out.q != 0.0 ? (out.p - 1.0 - out.q) / out.q
                           : cplx(std::numeric_limits<double>::quiet_NaN(), 0.0);
  return out;
}

DimensionlessParams dimensionless(const EffectiveFrequencySpec& spec) {
  if (spec.V == 0.0) {
    fail(ErrorCode::ZeroQ, "q = 0 (no RF drive): alpha is undefined, use the ODE path");
  }
  return dimensionless_unchecked(spec);
}

}  // namespace rpif
