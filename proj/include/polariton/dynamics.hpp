#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "polariton/model.hpp"
#include "polariton/steady.hpp"

namespace polariton {

/// Drive frequency plus a piecewise-linear amplitude envelope.
struct DriveProtocol {
  double omega_d = 0.0;
  /// (time s, amplitude rad/s) breakpoints; times strictly increasing from 0.
  std::vector<std::pair<double, double>> envelope;

  double amplitude(double t) const;
  double duration() const;
  void validate() const;

  static DriveProtocol constant(double omega_d, double amplitude, double duration);
  /// Linear rise from zero over `rise`, then flat until `duration`.
  static DriveProtocol square_pulse(double omega_d, double amplitude, double rise,
                                    double duration);
};

struct FieldState {
  cplx alpha{};
  cplx gamma{};
};

struct Trajectory {
  std::vector<double> times;
  std::vector<cplx> alpha;
  std::vector<cplx> gamma;
  /// ∫₀ᵗ γ dt' at each sample, integrated alongside the fields.
  std::vector<cplx> gamma_integral;

  std::size_t size() const { return times.size(); }
  FieldState state(std::size_t i) const { return {alpha[i], gamma[i]}; }
  std::vector<double> output_magnitude(double kappa_c) const;
  /// Index of the sample closest to t.
  std::size_t index_at(double t) const;
  /// Time average of γ between the samples nearest t0 and t1.
  cplx mean_gamma(double t0, double t1) const;
};

struct IntegratorSettings {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  double sample_interval = 1e-9;
  /// Additional sample times (clipped to the protocol duration).
  std::vector<double> extra_samples;
};

/// Integrates the classical cavity-ancilla field equations under `protocol`.
/// Throws IntegrationError on step failure or a non-finite state.
Trajectory integrate(const SystemParams& sys, std::optional<QubitState> eta,
                     const DriveProtocol& protocol, const FieldState& initial,
                     const IntegratorSettings& settings = {});

/// As integrate(), with the qubit toggling between g and e at each jump time.
Trajectory integrate_with_jumps(const SystemParams& sys, QubitState initial_state,
                                std::span<const double> jump_times,
                                const DriveProtocol& protocol, const FieldState& initial,
                                const IntegratorSettings& settings = {});

/// First index i with `debounce` consecutive samples above `level` starting at i.
std::optional<std::size_t> debounced_crossing(std::span<const double> magnitude, double level,
                                              std::size_t debounce = 3,
                                              std::size_t first = 0);

struct HysteresisSettings {
  double ramp_time = 500e-9;
  double hold_time = 500e-9;
  double average_fraction = 0.2;  ///< trailing fraction of each hold that is averaged
  /// When positive, each measurement hold lasts at least this many relaxation
  /// times of the slowest stable steady state at Ω_meas (critical slowing near
  /// folds and cusps), capped at max_hold_time.
  double settle_time_constants = 0.0;
  double max_hold_time = 20e-6;
  IntegratorSettings integrator{};
};

struct HysteresisResult {
  cplx c_out_up{};
  cplx c_out_down{};
  double D_ud = 0.0;
  bool bifurcated_up = false;
  bool bifurcated_down = false;
};

/// Ramp 0 → Ω_meas, hold and average (up); continue to Ω_peak, hold, ramp back
/// to Ω_meas, hold and average (down). The peak hold always lasts hold_time.
HysteresisResult ramp_hysteresis(const SystemParams& sys, QubitState eta, double omega_d,
                                 double Omega_meas, double Omega_peak,
                                 const HysteresisSettings& settings = {});

struct BistabilityMapSettings {
  HysteresisSettings hysteresis{};
  /// Peak amplitude of the excursion; 0 selects twice the largest grid amplitude.
  double peak_amplitude = 0.0;
  /// A cell is bistable when D_ud exceeds this fraction of max(|c_up|, |c_down|).
  double relative_threshold = 1e-3;
  /// Optional per-frequency factor on the amplitude grid (e.g. the 1/√ω_d of a
  /// fixed input power). Empty means 1 for every column.
  std::vector<double> column_scale;
  unsigned threads = 1;
};

struct BistabilityColumn {
  std::optional<std::size_t> lowest;   ///< lowest bistable amplitude index
  std::optional<std::size_t> highest;  ///< highest bistable amplitude index
  std::optional<double> B_down;
  std::optional<double> B_up;
};

/// Grid values are stored frequency-major: index = i_omega * n_amplitude + i_amplitude.
struct BistabilityMap {
  std::vector<double> omega_grid;
  std::vector<double> amplitude_grid;
  std::vector<double> column_scale;
  std::vector<double> D_ud;
  std::vector<double> c_out_scale;  ///< max(|c_up|, |c_down|) per cell
  std::vector<unsigned char> bistable;
  std::vector<BistabilityColumn> columns;
  int components = 0;
  int holes = 0;

  std::size_t index(std::size_t i_omega, std::size_t i_amp) const {
    return i_omega * amplitude_grid.size() + i_amp;
  }
  double amplitude(std::size_t i_omega, std::size_t i_amp) const {
    return amplitude_grid[i_amp] * column_scale[i_omega];
  }
  bool simply_connected() const { return components <= 1 && holes == 0; }
};

BistabilityMap bistability_map(const SystemParams& sys, QubitState eta,
                               std::span<const double> omega_grid,
                               std::span<const double> amplitude_grid,
                               const BistabilityMapSettings& settings = {});

/// Steady-state route to the same mask: B_down < Ω < B_up from the fold amplitudes.
std::vector<unsigned char> steady_bistable_mask(const SystemParams& sys, QubitState eta,
                                                std::span<const double> omega_grid,
                                                std::span<const double> amplitude_grid,
                                                std::span<const double> column_scale = {});

/// Counts 8-connected components of the set cells and 4-connected holes
/// (background regions not touching the border).
std::pair<int, int> mask_topology(std::span<const unsigned char> mask, std::size_t rows,
                                  std::size_t cols);

}  // namespace polariton
