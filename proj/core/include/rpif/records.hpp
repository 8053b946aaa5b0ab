#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <variant>
#include <vector>

#include "rpif/trapmodel.hpp"

namespace rpif {

/// A candidate measurement output a(t), uniformly sampled and interpolated
/// piecewise-linearly between samples.
class MeasurementRecord {
 public:
  /// Throws BadGrid for fewer than two samples, non-positive dt or non-finite values.
  MeasurementRecord(double t_start, double dt, std::vector<double> samples);

  double t_start() const noexcept { return t_start_; }
  double dt() const noexcept { return dt_; }
  double t_end() const noexcept { return t_start_ + dt_ * static_cast<double>(samples_.size() - 1); }
  std::size_t size() const noexcept { return samples_.size(); }
  const std::vector<double>& samples() const noexcept { return samples_; }
  double time(std::size_t i) const noexcept { return t_start_ + dt_ * static_cast<double>(i); }

  /// Linear interpolation; t is clamped to [t_start, t_end].
  double value_at(double t) const noexcept;

  /// Throws InvalidArgument unless the record spans exactly the measurement window.
  void check_window(const MeasurementConfig& meas) const;

  MeasurementRecord scaled(double factor) const;

 private:
  double t_start_;
  double dt_;
  std::vector<double> samples_;
};

/// Parametric record families used for scenarios and sweeps.
struct ConstantRecord {
  double amplitude = 0.0;  // m
};
struct SinusoidRecord {
  double amplitude = 0.0;  // m
  double omega = 0.0;      // rad/s
  double phase = 0.0;      // rad, a(t) = A cos(omega t + phase) in absolute time
};
struct SampledRecord {
  std::vector<double> values;  // m, uniformly spread over the window
};
using RecordSpec = std::variant<ConstantRecord, SinusoidRecord, SampledRecord>;

/// Renders a spec on a uniform grid of n_samples points over [t', t'']. Sampled
/// specs ignore n_samples and keep their own length. Throws BadGrid if fewer
/// than two points result.
MeasurementRecord render(const RecordSpec& spec, const MeasurementConfig& meas, std::size_t n_samples);

/// Exact integral of a(t)^2 for the piecewise-linear interpolant (m^2 s).
double record_norm_integral(const MeasurementRecord& rec) noexcept;

/// The Gaussian weight exponent -(2 / (T da^2)) * integral a^2 dt. Zero when the
/// measurement is switched off.
double record_term(const MeasurementRecord& rec, const MeasurementConfig& meas);

/// Complex forcing F(t) = -4 i hbar a(t) / (T da^2) on the record grid,
/// piecewise-linear in between.
class ForcingProfile {
 public:
  ForcingProfile() = default;
  ForcingProfile(double t_start, double dt, std::vector<cplx> nodes);

  bool empty() const noexcept { return nodes_.empty(); }
  bool identically_zero() const noexcept;
  double t_start() const noexcept { return t_start_; }
  double dt() const noexcept { return dt_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  const std::vector<cplx>& nodes() const noexcept { return nodes_; }
  double node_time(std::size_t i) const noexcept { return t_start_ + dt_ * static_cast<double>(i); }

  cplx at(double t) const noexcept;
  /// Slope dF/dt of the segment containing t (right-continuous).
  cplx slope_at(double t) const noexcept;
  /// Index i of the segment [node i, node i+1] containing t.
  std::size_t segment(double t) const noexcept;

 private:
  double t_start_ = 0.0;
  double dt_ = 1.0;
  std::vector<cplx> nodes_;
};

ForcingProfile forcing(const MeasurementRecord& rec, const MeasurementConfig& meas,
                       const TrapParameters& params);

/// CSV with header row and two columns: time_s, value_m. The time column must
/// be uniform to within 1e-9 relative.
MeasurementRecord read_record_csv(const std::filesystem::path& path);
MeasurementRecord read_record_csv(std::istream& in);
void write_record_csv(std::ostream& out, const MeasurementRecord& rec);

}  // namespace rpif
