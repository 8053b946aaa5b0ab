#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "scenario.hpp"

namespace rpif::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kNumericalError = 3, kValidationFailure = 4 };

struct RunContext {
  std::string scenario_path;
  unsigned threads = 1;
};

/// One candidate pair of records (x and z) for ranking.
struct RecordPair {
  std::string id;
  RecordSpec x, z;
};

/// Parses a records file: a `records` list of {id, x, z} entries, each axis
/// a record mapping as in the scenario; a missing axis takes the scenario record.
std::vector<RecordPair> load_record_set(const std::filesystem::path& path, const Scenario& s);

struct SweepSpec {
  /// Which axes the swept record family replaces: "x", "z" or "both".
  std::string axis = "both";
  std::string kind = "constant";
  std::optional<std::vector<double>> amplitude, omega, phase, resolution;

  bool empty() const noexcept { return !amplitude && !omega && !phase && !resolution; }
};

SweepSpec load_sweep_spec(const std::filesystem::path& path);
SweepSpec parse_sweep_spec(const std::string& text);

int cmd_propagate(const Scenario& s, const RunContext& ctx, std::ostream& out);
int cmd_prob(const Scenario& s, const std::vector<RecordPair>& records, const RunContext& ctx, std::ostream& out);
int cmd_validate(const Scenario& s, const RunContext& ctx, std::ostream& out);
int cmd_sweep(const Scenario& s, const SweepSpec& sweep, const RunContext& ctx, std::ostream& out);
int cmd_mathieu(const Scenario& s, Axis axis, std::size_t terms, std::size_t samples, const RunContext& ctx,
                std::ostream& out);

/// Full command-line entry point; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// scientific notation, 15 digits after the point.
std::string fmt(double v);

}  // namespace rpif::cli
