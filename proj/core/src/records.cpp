#include "rpif/records.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "rpif/errors.hpp"

namespace rpif {

MeasurementRecord::MeasurementRecord(double t_start, double dt, std::vector<double> samples)
    : t_start_(t_start), dt_(dt), samples_(std::move(samples)) {
  if (samples_.size() < 2) fail(ErrorCode::BadGrid, "a record needs at least two samples");
  if (!(dt_ > 0.0) || !std::isfinite(dt_) || !std::isfinite(t_start_)) {
    fail(ErrorCode::BadGrid, "record spacing must be positive and finite");
  }
  for (double v : samples_) {
    if (!std::isfinite(v)) fail(ErrorCode::BadGrid, "record samples must be finite");
  }
}

double MeasurementRecord::value_at(double t) const noexcept {
  const double s = std::clamp((t - t_start_) / dt_, 0.0, static_cast<double>(samples_.size() - 1));
  const auto i = std::min(static_cast<std::size_t>(s), samples_.size() - 2);
  const double frac = s - static_cast<double>(i);
  return samples_[i] + frac * (samples_[i + 1] - samples_[i]);
}

void MeasurementRecord::check_window(const MeasurementConfig& meas) const {
  const double T = meas.duration();
  const double slack = 1e-9 * T;
  if (std::abs(t_start_ - meas.t_start) > slack || std::abs(t_end() - meas.t_end) > slack) {
    fail(ErrorCode::InvalidArgument, "record does not span the measurement window");
  }
}

MeasurementRecord MeasurementRecord::scaled(double factor) const {
  std::vector<double> s(samples_);
  for (double& v : s) v *= factor;
  return {t_start_, dt_, std::move(s)};
}

MeasurementRecord render(const RecordSpec& spec, const MeasurementConfig& meas, std::size_t n_samples) {
  meas.validate();
  if (const auto* sampled = std::get_if<SampledRecord>(&spec)) {
    const auto n = sampled->values.size();
    if (n < 2) fail(ErrorCode::BadGrid, "sampled record needs at least two values");
    return {meas.t_start, meas.duration() / static_cast<double>(n - 1), sampled->values};
  }
  if (n_samples < 2) fail(ErrorCode::BadGrid, "render: n_samples must be at least 2");
  const double dt = meas.duration() / static_cast<double>(n_samples - 1);
  std::vector<double> values(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    const double t = meas.t_start + dt * static_cast<double>(i);
    values[i] = std::visit(
        [t](const auto& s) -> double {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, ConstantRecord>) {
            return s.amplitude;
          } else if constexpr (std::is_same_v<S, SinusoidRecord>) {
            return s.amplitude * std::cos(s.omega * t + s.phase);
          } else {
            return 0.0;
          }
        },
        spec);
  }
  return {meas.t_start, dt, std::move(values)};
}

double record_norm_integral(const MeasurementRecord& rec) noexcept {
  // Per segment: dt * (a0^2 + a0 a1 + a1^2) / 3.
  const auto& a = rec.samples();
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < a.size(); ++i) sum += a[i] * a[i] + a[i] * a[i + 1] + a[i + 1] * a[i + 1];
  return rec.dt() * sum / 3.0;
}

double record_term(const MeasurementRecord& rec, const MeasurementConfig& meas) {
  meas.validate();
  if (!meas.active()) return 0.0;
  const double da = meas.resolution;
  return -2.0 / (meas.duration() * da * da) * record_norm_integral(rec);
}

ForcingProfile::ForcingProfile(double t_start, double dt, std::vector<cplx> nodes)
    : t_start_(t_start), dt_(dt), nodes_(std::move(nodes)) {
  if (nodes_.size() < 2 || !(dt_ > 0.0)) fail(ErrorCode::BadGrid, "forcing profile needs >= 2 nodes");
}

bool ForcingProfile::identically_zero() const noexcept {
  return std::all_of(nodes_.begin(), nodes_.end(), [](cplx v) { return v == cplx{}; });
}

std::size_t ForcingProfile::segment(double t) const noexcept {
  if (nodes_.size() < 2) return 0;
  const double s = std::clamp((t - t_start_) / dt_, 0.0, static_cast<double>(nodes_.size() - 1));
  return std::min(static_cast<std::size_t>(s), nodes_.size() - 2);
}

cplx ForcingProfile::at(double t) const noexcept {
  if (nodes_.empty()) return {};
  const std::size_t i = segment(t);
  const double frac = std::clamp((t - node_time(i)) / dt_, 0.0, 1.0);
  return nodes_[i] + frac * (nodes_[i + 1] - nodes_[i]);
}

cplx ForcingProfile::slope_at(double t) const noexcept {
  if (nodes_.empty()) return {};
  const std::size_t i = segment(t);
  return (nodes_[i + 1] - nodes_[i]) / dt_;
}

ForcingProfile forcing(const MeasurementRecord& rec, const MeasurementConfig& meas,
                       const TrapParameters& params) {
  meas.validate();
  std::vector<cplx> nodes(rec.size(), cplx{});
  if (meas.active()) {
    const double da = meas.resolution;
    // 4 hbar a / (i T da^2) = -4 i hbar a / (T da^2)
    const double k = -4.0 * params.hbar / (meas.duration() * da * da);
    for (std::size_t i = 0; i < rec.size(); ++i) nodes[i] = cplx(0.0, k * rec.samples()[i]);
  }
  return {rec.t_start(), rec.dt(), std::move(nodes)};
}

MeasurementRecord read_record_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::InvalidArgument, "record CSV: empty input");
  std::vector<double> times, values;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::istringstream row(line);
    std::string a, b;
    if (!std::getline(row, a, ',') || !std::getline(row, b, ',')) {
      fail(ErrorCode::InvalidArgument, "record CSV: line " + std::to_string(line_no) + " needs two columns");
    }
    try {
      times.push_back(std::stod(a));
      values.push_back(std::stod(b));
    } catch (const std::exception&) {
      fail(ErrorCode::InvalidArgument, "record CSV: line " + std::to_string(line_no) + " is not numeric");
    }
  }
  if (times.size() < 2) fail(ErrorCode::BadGrid, "record CSV: at least two rows required");
  const double span = times.back() - times.front();
  const double dt = span / static_cast<double>(times.size() - 1);
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double expected = times.front() + dt * static_cast<double>(i);
    if (std::abs(times[i] - expected) > 1e-9 * std::abs(span)) {
      fail(ErrorCode::BadGrid, "record CSV: time column is not uniformly spaced");
    }
  }
  return {times.front(), dt, std::move(values)};
}

MeasurementRecord read_record_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::InvalidArgument, "cannot open record file " + path.string());
  return read_record_csv(in);
}

void write_record_csv(std::ostream& out, const MeasurementRecord& rec) {
  out << "time_s,value_m\n";
  char buf[96];
  for (std::size_t i = 0; i < rec.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17e,%.17e\n", rec.time(i), rec.samples()[i]);
    out << buf;
  }
}

}  // namespace rpif
