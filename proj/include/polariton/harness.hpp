#pragma once

#include <filesystem>
#include <json.hpp>
#include <string>
#include <vector>

#include "polariton/config.hpp"
#include "polariton/readout.hpp"

namespace polariton {

/// Ω_c = √(κ_c P / ħω_d) with P = 10^((P_in + correction − 30)/10) W.
double power_to_amplitude(double P_in_dbm, double omega_d, double kappa_c,
                          double attenuation_correction_db = 0.0);

/// Inverse of power_to_amplitude.
double amplitude_to_power(double Omega_c, double omega_d, double kappa_c,
                          double attenuation_correction_db = 0.0);

/// One value per (frequency, power) cell, frequency-major.
struct MapArtifact {
  std::string quantity;
  std::string unit;
  std::vector<double> freq_ghz;
  std::vector<double> power_dbm;
  std::vector<double> values;
  nlohmann::json metadata = nlohmann::json::object();

  std::size_t index(std::size_t i_freq, std::size_t i_power) const {
    return i_freq * power_dbm.size() + i_power;
  }
  double at(std::size_t i_freq, std::size_t i_power) const {
    return values[index(i_freq, i_power)];
  }

  /// Header `freq_GHz,power_dBm,value,unit`, one row per cell, 17 significant digits.
  std::string to_csv() const;
  /// Metadata plus axes, quantity and unit.
  std::string to_json() const;
  void write(const std::filesystem::path& dir, const std::string& stem) const;

  /// Rebuilds axes and values from CSV text; the row order must be frequency-major.
  static MapArtifact from_csv(const std::string& text);
  static MapArtifact read(const std::filesystem::path& dir, const std::string& stem);
};

/// Common metadata: config hash, code version and timestamp (SOURCE_DATE_EPOCH
/// when set, so repeated runs can be byte-identical).
nlohmann::json artifact_metadata(const RunConfig& config);

/// Drive amplitudes for the config's power grid at the first grid frequency and
/// the per-frequency scale √(ω_0/ω).
struct AmplitudeGrid {
  std::vector<double> omega;
  std::vector<double> amplitude;
  std::vector<double> column_scale;
};
AmplitudeGrid amplitude_grid(const RunConfig& config);

/// Readout pulse at the config's operating point.
ReadoutPulse readout_pulse(const RunConfig& config);

/// Detection noise with σ from the config or calibrated at the operating point.
NoiseModel readout_noise(const RunConfig& config);

MapArtifact sweep_deg_map(const RunConfig& config);
MapArtifact sweep_bistability(const RunConfig& config, QubitState eta);
MapArtifact sweep_fidelity(const RunConfig& config);

}  // namespace polariton
