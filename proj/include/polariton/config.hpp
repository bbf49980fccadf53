#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "polariton/dynamics.hpp"
#include "polariton/model.hpp"

namespace polariton {

enum class Dimension { frequency, time, power, ratio, rate, amplitude };

/// Parses "<number> <unit>" into SI (Hz, s, dBm, dB, 1/s, √Hz). Frequencies stay
/// ordinary (Hz); angular conversion happens when a SystemParams is built.
/// Throws ConfigError naming `key` on a missing or unknown unit.
double parse_quantity(const std::string& text, Dimension dim, const std::string& key);

struct ReadoutConfig {
  double frequency_hz = 0.0;
  double power_dbm = 0.0;
  double rise_time = 10e-9;
  double duration = 500e-9;
  double window_start = 0.0;
  double sample_interval = 1e-9;
};

struct NoiseConfig {
  std::optional<double> sigma_det;  ///< nullopt: calibrate at the readout point
  double overlap_error = 1e-3;
  double Gamma_up = 0.0;
  double preparation_error = 0.003;
  bool heralding = false;
};

struct RunConfig {
  SystemParams system;
  double attenuation_correction_db = 0.0;
  std::vector<double> frequency_hz;
  std::vector<double> power_dbm;
  HysteresisSettings hysteresis;
  double relative_threshold = 1e-3;
  ReadoutConfig readout;
  NoiseConfig noise;
  std::size_t shots_per_point = 1000;
  std::size_t curve_points = 200;
  std::optional<QubitState> qubit_state;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::filesystem::path output_dir = "out";

  /// Canonical JSON (sorted keys) of every field that can change a result;
  /// threads and output paths are excluded.
  std::string canonical() const;
  /// FNV-1a 64-bit hash of canonical(), as 16 hex digits.
  std::string hash() const;
};

RunConfig parse_config(const std::string& yaml_text);
RunConfig load_config(const std::filesystem::path& path);

QubitState parse_qubit_state(const std::string& text, const std::string& key);

}  // namespace polariton
