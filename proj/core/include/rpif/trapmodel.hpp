#pragma once

#include <complex>

namespace rpif {

using cplx = std::complex<double>;

/// 2018 SI value of the reduced Planck constant in J s.
inline constexpr double kHbarSI = 1.054571817e-34;
/// Elementary charge in C.
inline constexpr double kElementaryCharge = 1.602176634e-19;

/// Physical constants of a linear Paul trap (SI units throughout).
struct TrapParameters {
  double charge = kElementaryCharge;  // C
  double mass = 0.0;                  // kg
  double half_gap = 0.0;              // m, half the electrode separation r
  double dc_voltage = 0.0;            // V, the DC amplitude U-bar
  double ac_voltage = 0.0;            // V, the RF amplitude V-bar
  double drive_omega = 0.0;           // rad/s
  double hbar = kHbarSI;              // J s; override only for unit-system experiments

  /// Throws InvalidArgument unless m, r, omega and hbar are positive and finite.
  void validate() const;
};

/// The two electrode axes. The z equation of motion carries the opposite sign.
enum class Axis { X, Z };

const char* to_string(Axis axis) noexcept;

/// Per-axis frequency coefficients U, V (1/s^2) of the harmonic potential
/// (1/2) m [U - V cos(omega t)] x^2.
struct FrequencyCoefficients {
  double U = 0.0;
  double V = 0.0;
  Axis axis = Axis::X;
};

/// Monitoring window [t_start, t_end] and Gaussian position resolution.
/// A resolution of +infinity switches the measurement off.
struct MeasurementConfig {
  double t_start = 0.0;
  double t_end = 0.0;
  double resolution = 0.0;  // m

  double duration() const noexcept { return t_end - t_start; }
  bool active() const noexcept;
  void validate() const;
};

/// Measurement-shifted oscillator frequency
///   w~^2(t) = U~ - V cos(omega t),   U~ = U - 4 i hbar / (m T da^2).
struct EffectiveFrequencySpec {
  cplx U_tilde{0.0, 0.0};
  double V = 0.0;
  double drive_omega = 0.0;

  cplx at(double t) const noexcept;
  double period() const noexcept;
};

/// Dimensionless Mathieu parameters p = 4 U~ / omega^2, q = 2 V / omega^2 and
/// alpha = (p - 1 - q) / q (beta on the z axis). alpha is NaN when q == 0.
struct DimensionlessParams {
  cplx p{0.0, 0.0};
  double q = 0.0;
  cplx alpha{0.0, 0.0};
};

FrequencyCoefficients derive_frequency_coefficients(const TrapParameters& params, Axis axis);

EffectiveFrequencySpec effective_frequency(const FrequencyCoefficients& coeffs,
                                           const MeasurementConfig& meas,
                                           const TrapParameters& params);

/// Throws ZeroQ when V == 0: alpha is undefined and the series path cannot be used.
DimensionlessParams dimensionless(const EffectiveFrequencySpec& spec);

/// Same as dimensionless() but tolerates q == 0 (alpha is left as NaN).
DimensionlessParams dimensionless_unchecked(const EffectiveFrequencySpec& spec) noexcept;

/// The measurement-induced imaginary shift of U~, i.e. -4 hbar / (m T da^2).
double measurement_shift(const MeasurementConfig& meas, const TrapParameters& params);

}  // namespace rpif
