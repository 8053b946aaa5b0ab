#include "scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "rpif/errors.hpp"

namespace rpif::cli {
namespace {

std::string field(const std::string& section, const std::string& key) {
  return section.empty() ? key : section + "." + key;
}

double read_double(const YAML::Node& node, const std::string& name) {
  try {
    const auto s = node.as<std::string>();
    if (s == "inf" || s == "+inf" || s == "Infinity") return std::numeric_limits<double>::infinity();
    return node.as<double>();
  } catch (const YAML::Exception&) {
    throw ConfigError(name + ": expected a number");
  }
}

double get_double(const YAML::Node& sec, const std::string& section, const std::string& key,
                  std::optional<double> fallback = std::nullopt) {
  const auto node = sec[key];
  if (!node) {
    if (fallback) return *fallback;
    throw ConfigError(field(section, key) + ": missing");
  }
  return read_double(node, field(section, key));
}

YAML::Node section(const YAML::Node& root, const std::string& name, bool required = true) {
  const auto node = root[name];
  if (!node) {
    if (required) throw ConfigError(name + ": missing section");
    return {};
  }
  if (!node.IsMap()) throw ConfigError(name + ": expected a mapping");
  return node;
}

void check_keys(const YAML::Node& sec, const std::string& name, std::initializer_list<const char*> allowed) {
  for (const auto& kv : sec) {
    const auto key = kv.first.as<std::string>();
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError(field(name, key) + ": unknown key");
  }
}

MeasurementConfig parse_measurement(const YAML::Node& root, const std::string& name) {
  const auto sec = section(root, name);
  check_keys(sec, name, {"t_start", "t_end", "resolution"});
  MeasurementConfig m;
  m.t_start = get_double(sec, name, "t_start");
  m.t_end = get_double(sec, name, "t_end");
  m.resolution = get_double(sec, name, "resolution");
  if (!std::isfinite(m.t_start) || !std::isfinite(m.t_end) || !(m.t_end > m.t_start)) {
    throw ConfigError(field(name, "t_end") + ": must be finite and exceed t_start");
  }
  if (!(m.resolution > 0.0)) throw ConfigError(field(name, "resolution") + ": must be positive (or inf)");
  return m;
}

BoundaryConditions parse_boundary(const YAML::Node& root, const std::string& name, const MeasurementConfig& m) {
  const auto sec = section(root, name, false);
  BoundaryConditions bc{0.0, 0.0, m.t_start, m.t_end};
  if (!sec) return bc;
  check_keys(sec, name, {"x_start", "x_end"});
  bc.x_start = get_double(sec, name, "x_start", 0.0);
  bc.x_end = get_double(sec, name, "x_end", 0.0);
  if (!std::isfinite(bc.x_start)) throw ConfigError(field(name, "x_start") + ": must be finite");
  if (!std::isfinite(bc.x_end)) throw ConfigError(field(name, "x_end") + ": must be finite");
  return bc;
}

}  // namespace

RecordSpec parse_record_node(const YAML::Node& sec, const std::string& name, const std::filesystem::path& base_dir,
                             const MeasurementConfig& meas) {
  if (!sec || !sec.IsMap()) throw ConfigError(name + ": expected a mapping");
  if (!sec["kind"]) throw ConfigError(field(name, "kind") + ": missing");
  const auto kind = sec["kind"].as<std::string>();
  if (kind == "constant") {
    check_keys(sec, name, {"kind", "amplitude"});
    return ConstantRecord{get_double(sec, name, "amplitude", 0.0)};
  }
  if (kind == "sinusoid") {
    check_keys(sec, name, {"kind", "amplitude", "omega", "phase"});
    return SinusoidRecord{get_double(sec, name, "amplitude"), get_double(sec, name, "omega"),
                          get_double(sec, name, "phase", 0.0)};
  }
  if (kind == "samples") {
    check_keys(sec, name, {"kind", "values", "file"});
    SampledRecord s;
    if (sec["values"] && sec["file"]) throw ConfigError(name + ": give either values or file, not both");
    if (const auto v = sec["values"]) {
      if (!v.IsSequence()) throw ConfigError(field(name, "values") + ": expected a list");
      for (std::size_t i = 0; i < v.size(); ++i) {
        s.values.push_back(read_double(v[i], field(name, "values[" + std::to_string(i) + "]")));
      }
    } else if (const auto f = sec["file"]) {
      std::filesystem::path p = f.as<std::string>();
      if (p.is_relative()) p = base_dir / p;
      try {
        const auto rec = read_record_csv(p);
        rec.check_window(meas);
        s.values = rec.samples();
      } catch (const Error& e) {
        throw ConfigError(field(name, "file") + ": " + e.what());
      }
    } else {
      throw ConfigError(name + ": samples record needs values or file");
    }
    if (s.values.size() < 2) throw ConfigError(field(name, "values") + ": need at least two samples");
    for (double v : s.values) {
      if (!std::isfinite(v)) throw ConfigError(field(name, "values") + ": samples must be finite");
    }
    return s;
  }
  throw ConfigError(field(name, "kind") + ": expected constant, sinusoid or samples, got '" + kind + "'");
}

namespace {

FSource parse_fsource(const std::string& s) {
  if (s == "series") return FSource::Series;
  if (s == "ode") return FSource::Ode;
  throw ConfigError("numerics.f_source: expected series or ode");
}

Stepping parse_stepping(const std::string& s) {
  if (s == "auto") return Stepping::Automatic;
  if (s == "direct") return Stepping::Direct;
  if (s == "periodic") return Stepping::Periodic;
  throw ConfigError("numerics.stepping: expected auto, direct or periodic");
}

void emit_record(YAML::Emitter& out, const RecordSpec& spec) {
  out << YAML::BeginMap;
  if (const auto* c = std::get_if<ConstantRecord>(&spec)) {
    out << YAML::Key << "kind" << YAML::Value << "constant";
    out << YAML::Key << "amplitude" << YAML::Value << c->amplitude;
  } else if (const auto* s = std::get_if<SinusoidRecord>(&spec)) {
    out << YAML::Key << "kind" << YAML::Value << "sinusoid";
    out << YAML::Key << "amplitude" << YAML::Value << s->amplitude;
    out << YAML::Key << "omega" << YAML::Value << s->omega;
    out << YAML::Key << "phase" << YAML::Value << s->phase;
  } else {
    const auto& v = std::get<SampledRecord>(spec);
    out << YAML::Key << "kind" << YAML::Value << "samples";
    out << YAML::Key << "values" << YAML::Value << YAML::Flow << v.values;
  }
  out << YAML::EndMap;
}

void emit_measurement(YAML::Emitter& out, const char* name, const MeasurementConfig& m) {
  out << YAML::Key << name << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "t_start" << YAML::Value << m.t_start;
  out << YAML::Key << "t_end" << YAML::Value << m.t_end;
  out << YAML::Key << "resolution" << YAML::Value << m.resolution;
  out << YAML::EndMap;
}

void emit_boundary(YAML::Emitter& out, const char* name, const BoundaryConditions& b) {
  out << YAML::Key << name << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "x_start" << YAML::Value << b.x_start;
  out << YAML::Key << "x_end" << YAML::Value << b.x_end;
  out << YAML::EndMap;
}

bool same_record(const RecordSpec& a, const RecordSpec& b) {
  if (a.index() != b.index()) return false;
  if (const auto* c = std::get_if<ConstantRecord>(&a)) return c->amplitude == std::get<ConstantRecord>(b).amplitude;
  if (const auto* s = std::get_if<SinusoidRecord>(&a)) {
    const auto& t = std::get<SinusoidRecord>(b);
    return s->amplitude == t.amplitude && s->omega == t.omega && s->phase == t.phase;
  }
  return std::get<SampledRecord>(a).values == std::get<SampledRecord>(b).values;
}

bool same_meas(const MeasurementConfig& a, const MeasurementConfig& b) {
  return a.t_start == b.t_start && a.t_end == b.t_end && a.resolution == b.resolution;
}

bool same_bc(const BoundaryConditions& a, const BoundaryConditions& b) {
  return a.x_start == b.x_start && a.x_end == b.x_end && a.t_start == b.t_start && a.t_end == b.t_end;
}

}  // namespace

const char* to_string(FSource s) noexcept { return s == FSource::Series ? "series" : "ode"; }

const char* to_string(Stepping s) noexcept {
  switch (s) {
    case Stepping::Direct: return "direct";
    case Stepping::Periodic: return "periodic";
    case Stepping::Automatic: break;
  }
  return "auto";
}

Scenario parse_scenario(const std::string& text, const std::filesystem::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("syntax: ") + e.what());
  }
  if (!root.IsMap()) throw ConfigError("scenario: expected a mapping at top level");
  check_keys(root, "", {"trap", "measurement_x", "measurement_z", "boundary_x", "boundary_z", "record_x", "record_z",
                        "numerics"});
  Scenario s;
  const auto trap = section(root, "trap");
  check_keys(trap, "trap", {"charge", "mass", "half_gap", "dc_voltage", "ac_voltage", "drive_omega", "hbar"});
  s.trap.charge = get_double(trap, "trap", "charge", kElementaryCharge);
  s.trap.mass = get_double(trap, "trap", "mass");
  s.trap.half_gap = get_double(trap, "trap", "half_gap");
  s.trap.dc_voltage = get_double(trap, "trap", "dc_voltage");
  s.trap.ac_voltage = get_double(trap, "trap", "ac_voltage");
  s.trap.drive_omega = get_double(trap, "trap", "drive_omega");
  s.trap.hbar = get_double(trap, "trap", "hbar", kHbarSI);
  for (auto [key, v] : {std::pair{"mass", s.trap.mass}, std::pair{"half_gap", s.trap.half_gap},
                        std::pair{"drive_omega", s.trap.drive_omega}, std::pair{"hbar", s.trap.hbar}}) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(field("trap", key) + ": must be positive and finite");
  }
  for (auto [key, v] : {std::pair{"charge", s.trap.charge}, std::pair{"dc_voltage", s.trap.dc_voltage},
                        std::pair{"ac_voltage", s.trap.ac_voltage}}) {
    if (!std::isfinite(v)) throw ConfigError(field("trap", key) + ": must be finite");
  }

  s.measurement_x = parse_measurement(root, "measurement_x");
  s.measurement_z = root["measurement_z"] ? parse_measurement(root, "measurement_z") : s.measurement_x;
  s.boundary_x = parse_boundary(root, "boundary_x", s.measurement_x);
  s.boundary_z = parse_boundary(root, "boundary_z", s.measurement_z);
  s.record_x = root["record_x"] ? parse_record_node(root["record_x"], "record_x", base_dir, s.measurement_x)
                                : RecordSpec{ConstantRecord{}};
  s.record_z = root["record_z"] ? parse_record_node(root["record_z"], "record_z", base_dir, s.measurement_z)
                                : RecordSpec{ConstantRecord{}};

  if (const auto num = section(root, "numerics", false)) {
    check_keys(num, "numerics", {"tol", "n_samples", "oracle_N", "f_source", "stepping"});
    s.numerics.tol = get_double(num, "numerics", "tol", s.numerics.tol);
    if (!(s.numerics.tol > 0.0) || s.numerics.tol >= 1e-2) throw ConfigError("numerics.tol: must be in (0, 1e-2)");
    if (num["n_samples"]) {
      const double n = read_double(num["n_samples"], "numerics.n_samples");
      if (!(n >= 2.0) || n != std::floor(n)) throw ConfigError("numerics.n_samples: must be an integer >= 2");
      s.numerics.n_samples = static_cast<std::size_t>(n);
    }
    if (const auto on = num["oracle_N"]) {
      s.numerics.oracle_N.clear();
      const auto push = [&](const YAML::Node& v) {
        const double n = read_double(v, "numerics.oracle_N");
        if (!(n >= 2.0) || n != std::floor(n)) throw ConfigError("numerics.oracle_N: entries must be integers >= 2");
        s.numerics.oracle_N.push_back(static_cast<std::size_t>(n));
      };
      if (on.IsSequence()) {
        for (const auto& v : on) push(v);
      } else {
        push(on);
      }
    }
    if (num["f_source"]) s.numerics.f_source = parse_fsource(num["f_source"].as<std::string>());
    if (num["stepping"]) s.numerics.stepping = parse_stepping(num["stepping"].as<std::string>());
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("scenario: cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path.parent_path());
}

std::string dump_scenario(const Scenario& s) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "trap" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "charge" << YAML::Value << s.trap.charge;
  out << YAML::Key << "mass" << YAML::Value << s.trap.mass;
  out << YAML::Key << "half_gap" << YAML::Value << s.trap.half_gap;
  out << YAML::Key << "dc_voltage" << YAML::Value << s.trap.dc_voltage;
  out << YAML::Key << "ac_voltage" << YAML::Value << s.trap.ac_voltage;
  out << YAML::Key << "drive_omega" << YAML::Value << s.trap.drive_omega;
  out << YAML::Key << "hbar" << YAML::Value << s.trap.hbar;
  out << YAML::EndMap;
  emit_measurement(out, "measurement_x", s.measurement_x);
  emit_measurement(out, "measurement_z", s.measurement_z);
  emit_boundary(out, "boundary_x", s.boundary_x);
  emit_boundary(out, "boundary_z", s.boundary_z);
  out << YAML::Key << "record_x" << YAML::Value;
  emit_record(out, s.record_x);
  out << YAML::Key << "record_z" << YAML::Value;
  emit_record(out, s.record_z);
  out << YAML::Key << "numerics" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "tol" << YAML::Value << s.numerics.tol;
  out << YAML::Key << "n_samples" << YAML::Value << s.numerics.n_samples;
  out << YAML::Key << "oracle_N" << YAML::Value << YAML::Flow << s.numerics.oracle_N;
  out << YAML::Key << "f_source" << YAML::Value << to_string(s.numerics.f_source);
  out << YAML::Key << "stepping" << YAML::Value << to_string(s.numerics.stepping);
  out << YAML::EndMap;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

bool operator==(const Scenario& a, const Scenario& b) {
  const auto& p = a.trap;
  const auto& q = b.trap;
  return p.charge == q.charge && p.mass == q.mass && p.half_gap == q.half_gap && p.dc_voltage == q.dc_voltage &&
         p.ac_voltage == q.ac_voltage && p.drive_omega == q.drive_omega && p.hbar == q.hbar &&
         same_meas(a.measurement_x, b.measurement_x) && same_meas(a.measurement_z, b.measurement_z) &&
         same_bc(a.boundary_x, b.boundary_x) && same_bc(a.boundary_z, b.boundary_z) &&
         same_record(a.record_x, b.record_x) && same_record(a.record_z, b.record_z) &&
         a.numerics.tol == b.numerics.tol && a.numerics.n_samples == b.numerics.n_samples &&
         a.numerics.oracle_N == b.numerics.oracle_N && a.numerics.f_source == b.numerics.f_source &&
         a.numerics.stepping == b.numerics.stepping;
}

PropagatorOptions propagator_options(const Scenario& s) {
  PropagatorOptions o;
  o.flow.tol = s.numerics.tol;
  o.flow.stepping = s.numerics.stepping;
  return o;
}

AxisProblem make_problem(const Scenario& s, Axis axis) { return make_problem(s, axis, s.record(axis)); }

AxisProblem make_problem(const Scenario& s, Axis axis, const RecordSpec& record) {
  const auto& meas = s.measurement(axis);
  return AxisProblem{s.trap, axis, meas, render(record, meas, s.numerics.n_samples), s.boundary(axis)};
}

}  // namespace rpif::cli
