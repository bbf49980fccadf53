#include "polariton/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <json.hpp>
#include <set>
#include <sstream>

#include "polariton/errors.hpp"
#include "polariton/units.hpp"

namespace polariton {

namespace {

using json = nlohmann::json;

const std::map<std::string, double>& unit_table(Dimension dim) {
  static const std::map<std::string, double> frequency = {
      {"Hz", 1.0}, {"kHz", 1e3}, {"MHz", 1e6}, {"GHz", 1e9}};
  static const std::map<std::string, double> time = {
      {"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}, {"µs", 1e-6}, {"ns", 1e-9}, {"ps", 1e-12}};
  static const std::map<std::string, double> power = {{"dBm", 1.0}};
  static const std::map<std::string, double> ratio = {{"dB", 1.0}};
  static const std::map<std::string, double> rate = {
      {"/s", 1.0}, {"/ms", 1e3}, {"/us", 1e6}, {"/ns", 1e9}};
  static const std::map<std::string, double> amplitude = {{"sqrtHz", 1.0}};
  switch (dim) {
    case Dimension::frequency: return frequency;
    case Dimension::time: return time;
    case Dimension::power: return power;
    case Dimension::ratio: return ratio;
    case Dimension::rate: return rate;
    case Dimension::amplitude: return amplitude;
  }
  return frequency;
}

const char* example_unit(Dimension dim) {
  switch (dim) {
    case Dimension::frequency: return "GHz";
    case Dimension::time: return "ns";
    case Dimension::power: return "dBm";
    case Dimension::ratio: return "dB";
    case Dimension::rate: return "/s";
    case Dimension::amplitude: return "sqrtHz";
  }
  return "";
}

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

/// Rejects keys outside `allowed` so typos surface instead of silently using defaults.
void check_keys(const YAML::Node& node, const std::string& prefix,
                const std::set<std::string>& allowed) {
  if (!node.IsMap()) throw ConfigError(prefix.empty() ? "<root>" : prefix, "expected a mapping");
  for (const auto& kv : node) {
    const auto k = kv.first.as<std::string>();
    if (!allowed.count(k)) throw ConfigError(join(prefix, k), "unknown key");
  }
}

YAML::Node require(const YAML::Node& node, const std::string& prefix, const std::string& key) {
  const YAML::Node child = node[key];
  if (!child) throw ConfigError(join(prefix, key), "missing required key");
  return child;
}

std::string scalar(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) throw ConfigError(key, "expected a scalar value");
  return node.as<std::string>();
}

double quantity(const YAML::Node& node, const std::string& key, Dimension dim) {
  return parse_quantity(scalar(node, key), dim, key);
}

double number(const YAML::Node& node, const std::string& key) {
  const std::string text = scalar(node, key);
  double v = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size() || !std::isfinite(v))
    throw ConfigError(key, "expected a plain number, got '" + text + "'");
  return v;
}

std::uint64_t count(const YAML::Node& node, const std::string& key) {
  const std::string text = scalar(node, key);
  std::uint64_t v = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size())
    throw ConfigError(key, "expected a non-negative integer, got '" + text + "'");
  return v;
}

bool boolean(const YAML::Node& node, const std::string& key) {
  const std::string text = scalar(node, key);
  if (text == "true") return true;
  if (text == "false") return false;
  throw ConfigError(key, "expected true or false, got '" + text + "'");
}

/// Either a list of quantities or {start, stop, points} with linear spacing.
std::vector<double> grid(const YAML::Node& node, const std::string& key, Dimension dim) {
  std::vector<double> out;
  if (node.IsSequence()) {
    for (std::size_t i = 0; i < node.size(); ++i)
      out.push_back(quantity(node[i], key + "[" + std::to_string(i) + "]", dim));
  } else {
    check_keys(node, key, {"start", "stop", "points"});
    const double a = quantity(require(node, key, "start"), join(key, "start"), dim);
    const double b = quantity(require(node, key, "stop"), join(key, "stop"), dim);
    const auto n = count(require(node, key, "points"), join(key, "points"));
    if (n == 0) throw ConfigError(join(key, "points"), "grid must be non-empty");
    if (n == 1) return {a};
    for (std::uint64_t i = 0; i < n; ++i)
      out.push_back(i + 1 == n ? b
                               : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  if (out.empty()) throw ConfigError(key, "grid must be non-empty");
  return out;
}

void positive(double v, const std::string& key) {
  if (!(v > 0.0)) throw ConfigError(key, "must be positive");
}


}  // namespace

double parse_quantity(const std::string& text, Dimension dim, const std::string& key) {
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(*begin))) ++begin;
  double value = 0.0;
  // from_chars rejects a leading '+'
  const char* num = (begin < end && *begin == '+') ? begin + 1 : begin;
  const auto [stop, ec] = std::from_chars(num, end, value);
  if (ec != std::errc() || !std::isfinite(value))
    throw ConfigError(key, "expected '<number> <unit>', got '" + text + "'");
  std::string unit(stop, end);
  const auto first = unit.find_first_not_of(" \t");
  const auto last = unit.find_last_not_of(" \t");
  unit = first == std::string::npos ? "" : unit.substr(first, last - first + 1);
  if (unit.empty())
    throw ConfigError(key, "value '" + text + "' needs a unit suffix (e.g. " +
                               example_unit(dim) + ")");
  const auto& table = unit_table(dim);
  const auto it = table.find(unit);
  if (it == table.end())
    throw ConfigError(key, "unit '" + unit + "' not accepted here (e.g. " +
                               example_unit(dim) + ")");
  return value * it->second;
}

QubitState parse_qubit_state(const std::string& text, const std::string& key) {
  if (text == "g") return QubitState::g;
  if (text == "e") return QubitState::e;
  throw ConfigError(key, "qubit state must be g or e, got '" + text + "'");
}

RunConfig parse_config(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError("<root>", std::string("YAML syntax error: ") + e.what());
  }
  check_keys(root, "",
             {"system", "calibration", "sweep", "protocol", "readout", "noise", "run"});

  RunConfig c;
  {
    const std::string p = "system";
    const YAML::Node n = require(root, "", p);
    check_keys(n, p,
               {"omega_q", "omega_a", "omega_c", "U_a", "g_zz", "g_ac", "kappa_a", "kappa_c",
                "T1", "T2"});
    auto freq = [&](const char* k) {
      return units::angular(quantity(require(n, p, k), join(p, k), Dimension::frequency));
    };
    SystemParams& s = c.system;
    s.omega_a = freq("omega_a");
    s.omega_c = freq("omega_c");
    s.U_a = freq("U_a");
    s.g_zz = freq("g_zz");
    s.g_ac = freq("g_ac");
    s.kappa_a = freq("kappa_a");
    s.kappa_c = freq("kappa_c");
    s.T1 = quantity(require(n, p, "T1"), join(p, "T1"), Dimension::time);
    s.T2 = n["T2"] ? quantity(n["T2"], join(p, "T2"), Dimension::time) : s.T1;
    s.omega_q = n["omega_q"] ? freq("omega_q") : 0.0;
    try {
      s.validate();
    } catch (const ParameterError& e) {
      throw ConfigError(p, e.what());
    }
  }

  if (const YAML::Node n = root["calibration"]) {
    check_keys(n, "calibration", {"attenuation_correction"});
    if (n["attenuation_correction"])
      c.attenuation_correction_db = quantity(n["attenuation_correction"],
                                             "calibration.attenuation_correction", Dimension::ratio);
  }

  if (const YAML::Node n = root["sweep"]) {
    check_keys(n, "sweep", {"frequency", "power", "relative_threshold", "curve_points"});
    if (n["frequency"]) c.frequency_hz = grid(n["frequency"], "sweep.frequency", Dimension::frequency);
    if (n["power"]) c.power_dbm = grid(n["power"], "sweep.power", Dimension::power);
    if (n["relative_threshold"]) {
      c.relative_threshold = number(n["relative_threshold"], "sweep.relative_threshold");
      positive(c.relative_threshold, "sweep.relative_threshold");
    }
    if (n["curve_points"]) {
      c.curve_points = count(n["curve_points"], "sweep.curve_points");
      if (c.curve_points == 0) throw ConfigError("sweep.curve_points", "must be positive");
    }
    for (double f : c.frequency_hz) positive(f, "sweep.frequency");
  }

  if (const YAML::Node n = root["protocol"]) {
    check_keys(n, "protocol", {"ramp_time", "hold_time", "average_fraction", "sample_interval",
                                 "settle_time_constants", "max_hold_time"});
    auto& h = c.hysteresis;
    if (n["ramp_time"]) h.ramp_time = quantity(n["ramp_time"], "protocol.ramp_time", Dimension::time);
    if (n["hold_time"]) h.hold_time = quantity(n["hold_time"], "protocol.hold_time", Dimension::time);
    if (n["average_fraction"])
      h.average_fraction = number(n["average_fraction"], "protocol.average_fraction");
    if (n["settle_time_constants"])
      h.settle_time_constants = number(n["settle_time_constants"], "protocol.settle_time_constants");
    if (n["max_hold_time"])
      h.max_hold_time = quantity(n["max_hold_time"], "protocol.max_hold_time", Dimension::time);
    if (!(h.settle_time_constants >= 0.0))
      throw ConfigError("protocol.settle_time_constants", "must be non-negative");
    positive(h.max_hold_time, "protocol.max_hold_time");
    if (n["sample_interval"])
      h.integrator.sample_interval =
          quantity(n["sample_interval"], "protocol.sample_interval", Dimension::time);
    positive(h.ramp_time, "protocol.ramp_time");
    positive(h.hold_time, "protocol.hold_time");
    positive(h.integrator.sample_interval, "protocol.sample_interval");
    if (!(h.average_fraction > 0.0 && h.average_fraction <= 1.0))
      throw ConfigError("protocol.average_fraction", "must lie in (0, 1]");
  }

  if (const YAML::Node n = root["readout"]) {
    const std::string p = "readout";
    check_keys(n, p,
               {"frequency", "power", "rise_time", "duration", "window_start", "sample_interval",
                "shots_per_point"});
    auto& r = c.readout;
    r.frequency_hz = quantity(require(n, p, "frequency"), "readout.frequency", Dimension::frequency);
    r.power_dbm = quantity(require(n, p, "power"), "readout.power", Dimension::power);
    if (n["rise_time"]) r.rise_time = quantity(n["rise_time"], "readout.rise_time", Dimension::time);
    if (n["duration"]) r.duration = quantity(n["duration"], "readout.duration", Dimension::time);
    if (n["window_start"])
      r.window_start = quantity(n["window_start"], "readout.window_start", Dimension::time);
    if (n["sample_interval"])
      r.sample_interval = quantity(n["sample_interval"], "readout.sample_interval", Dimension::time);
    if (n["shots_per_point"]) c.shots_per_point = count(n["shots_per_point"], "readout.shots_per_point");
    positive(r.frequency_hz, "readout.frequency");
    positive(r.rise_time, "readout.rise_time");
    positive(r.duration, "readout.duration");
    positive(r.sample_interval, "readout.sample_interval");
    if (!(r.rise_time < r.duration)) throw ConfigError("readout.rise_time", "must be shorter than the pulse");
    if (!(r.window_start >= 0.0 && r.window_start < r.duration))
      throw ConfigError("readout.window_start", "must lie inside the pulse");
    if (c.shots_per_point < 100) throw ConfigError("readout.shots_per_point", "must be at least 100");
  }

  if (const YAML::Node n = root["noise"]) {
    check_keys(n, "noise", {"sigma_det", "overlap_error", "Gamma_up", "preparation_error", "heralding"});
    auto& z = c.noise;
    if (n["sigma_det"]) {
      const std::string text = scalar(n["sigma_det"], "noise.sigma_det");
      if (text != "auto") {
        z.sigma_det = parse_quantity(text, Dimension::amplitude, "noise.sigma_det");
        if (!(*z.sigma_det >= 0.0)) throw ConfigError("noise.sigma_det", "must be non-negative");
      }
    }
    if (n["overlap_error"]) z.overlap_error = number(n["overlap_error"], "noise.overlap_error");
    if (n["Gamma_up"]) z.Gamma_up = quantity(n["Gamma_up"], "noise.Gamma_up", Dimension::rate);
    if (n["preparation_error"])
      z.preparation_error = number(n["preparation_error"], "noise.preparation_error");
    if (n["heralding"]) z.heralding = boolean(n["heralding"], "noise.heralding");
    if (!(z.overlap_error > 0.0 && z.overlap_error < 0.5))
      throw ConfigError("noise.overlap_error", "must lie in (0, 0.5)");
    if (!(z.Gamma_up >= 0.0)) throw ConfigError("noise.Gamma_up", "must be non-negative");
    if (!(z.preparation_error >= 0.0 && z.preparation_error <= 1.0))
      throw ConfigError("noise.preparation_error", "must lie in [0, 1]");
  }

  if (const YAML::Node n = root["run"]) {
    check_keys(n, "run", {"seed", "threads", "output", "qubit_state"});
    if (n["seed"]) c.seed = count(n["seed"], "run.seed");
    if (n["threads"]) c.threads = static_cast<unsigned>(count(n["threads"], "run.threads"));
    if (n["output"]) c.output_dir = scalar(n["output"], "run.output");
    if (n["qubit_state"]) c.qubit_state = parse_qubit_state(scalar(n["qubit_state"], "run.qubit_state"), "run.qubit_state");
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string RunConfig::canonical() const {
  const SystemParams& s = system;
  json j;
  j["system"] = {{"omega_q", s.omega_q}, {"omega_a", s.omega_a}, {"omega_c", s.omega_c},
                 {"U_a", s.U_a},         {"g_zz", s.g_zz},       {"g_ac", s.g_ac},
                 {"kappa_a", s.kappa_a}, {"kappa_c", s.kappa_c}, {"T1", s.T1},
                 {"T2", s.T2}};
  j["attenuation_correction_db"] = attenuation_correction_db;
  j["frequency_hz"] = json(frequency_hz);
  j["power_dbm"] = json(power_dbm);
  j["hysteresis"] = {{"ramp_time", hysteresis.ramp_time},
                     {"hold_time", hysteresis.hold_time},
                     {"average_fraction", hysteresis.average_fraction},
                     {"settle_time_constants", hysteresis.settle_time_constants},
                     {"max_hold_time", hysteresis.max_hold_time},
                     {"sample_interval", hysteresis.integrator.sample_interval},
                     {"rel_tol", hysteresis.integrator.rel_tol},
                     {"abs_tol", hysteresis.integrator.abs_tol}};
  j["relative_threshold"] = relative_threshold;
  j["readout"] = {{"frequency_hz", readout.frequency_hz},   {"power_dbm", readout.power_dbm},
                  {"rise_time", readout.rise_time},         {"duration", readout.duration},
                  {"window_start", readout.window_start},   {"sample_interval", readout.sample_interval}};
  j["noise"] = {{"sigma_det", noise.sigma_det ? json(*noise.sigma_det) : json("auto")},
                {"overlap_error", noise.overlap_error},
                {"Gamma_up", noise.Gamma_up},
                {"preparation_error", noise.preparation_error},
                {"heralding", noise.heralding}};
  j["shots_per_point"] = shots_per_point;
  j["curve_points"] = curve_points;
  j["qubit_state"] = qubit_state ? json(to_string(*qubit_state)) : json(nullptr);
  j["seed"] = seed;
  return j.dump();
}

std::string RunConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace polariton
