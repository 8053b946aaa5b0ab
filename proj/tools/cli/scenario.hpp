#pragma once

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "rpif/propagator.hpp"
#include "rpif/records.hpp"
#include "rpif/trapmodel.hpp"

namespace YAML {
class Node;
}

namespace rpif::cli {

/// Invalid or unreadable configuration; the message names the offending field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Numerics {
  double tol = 1e-12;
  std::size_t n_samples = 1025;
  std::vector<std::size_t> oracle_N{2048, 4096};
  FSource f_source = FSource::Series;
  Stepping stepping = Stepping::Automatic;
};

struct Scenario {
  TrapParameters trap;
  MeasurementConfig measurement_x, measurement_z;
  BoundaryConditions boundary_x, boundary_z;
  RecordSpec record_x = ConstantRecord{}, record_z = ConstantRecord{};
  Numerics numerics;

  const MeasurementConfig& measurement(Axis axis) const noexcept {
    return axis == Axis::X ? measurement_x : measurement_z;
  }
  const BoundaryConditions& boundary(Axis axis) const noexcept { return axis == Axis::X ? boundary_x : boundary_z; }
  const RecordSpec& record(Axis axis) const noexcept { return axis == Axis::X ? record_x : record_z; }
};

/// Parses the YAML scenario text. Relative record files resolve against base_dir.
Scenario parse_scenario(const std::string& text, const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& path);

/// Effective configuration as YAML; parse_scenario(dump_scenario(s)) == s.
std::string dump_scenario(const Scenario& s);

bool operator==(const Scenario& a, const Scenario& b);

/// Parses one record mapping (kind constant | sinusoid | samples). Sample files
/// resolve against base_dir and must span `meas`.
RecordSpec parse_record_node(const YAML::Node& node, const std::string& name, const std::filesystem::path& base_dir,
                             const MeasurementConfig& meas);

PropagatorOptions propagator_options(const Scenario& s);
AxisProblem make_problem(const Scenario& s, Axis axis);
AxisProblem make_problem(const Scenario& s, Axis axis, const RecordSpec& record);

const char* to_string(FSource s) noexcept;
const char* to_string(Stepping s) noexcept;

}  // namespace rpif::cli
