#pragma once

#include <cmath>
#include <complex>

#include "rpif/propagator.hpp"
#include "rpif/records.hpp"
#include "rpif/trapmodel.hpp"

namespace rpif::testing {

/// Single barium ion, 30 s window, 2 um resolution.
inline TrapParameters barium_trap() {
  TrapParameters t;
  t.charge = kElementaryCharge;
  t.mass = 2.28e-25;
  t.half_gap = 8e-3;
  t.dc_voltage = 10.0;
  t.ac_voltage = 100.0;
  t.drive_omega = 2e6;
  return t;
}

inline MeasurementConfig barium_measurement(double t_end = 30.0) { return {0.0, t_end, 2e-6}; }

/// Unit system with e = m = r = 1, so U and V equal the voltages.
inline TrapParameters unit_trap(double U, double V, double omega, double hbar = 1.0) {
  TrapParameters t;
  t.charge = 1.0;
  t.mass = 1.0;
  t.half_gap = 1.0;
  t.dc_voltage = U;
  t.ac_voltage = V;
  t.drive_omega = omega;
  t.hbar = hbar;
  return t;
}

inline AxisProblem make_problem(const TrapParameters& trap, Axis axis, const MeasurementConfig& meas,
                                const RecordSpec& record, double x0, double x1, std::size_t n = 257) {
  return {trap, axis, meas, render(record, meas, n), {x0, x1, meas.t_start, meas.t_end}};
}

inline double rel(std::complex<double> a, std::complex<double> b) { return std::abs(a - b) / std::abs(b); }

}  // namespace rpif::testing
