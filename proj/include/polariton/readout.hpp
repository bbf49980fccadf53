#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "polariton/dynamics.hpp"
#include "polariton/model.hpp"

namespace polariton {

struct NoiseModel {
  /// Std. dev. of the complex Gaussian added to the integrated output, per
  /// quadrature, in the units of c_out (√(photons/s)).
  double sigma_det = 0.0;
  double Gamma_down = 0.0;  ///< e → g rate (1/s)
  double Gamma_up = 0.0;    ///< g → e rate (1/s)
  std::uint64_t rng_seed = 0;
  /// Probability that a shot starts in the wrong qubit state.
  double preparation_error = 0.003;
  /// Discard wrongly prepared shots instead of keeping them.
  bool heralding = false;

  void validate() const;
  static NoiseModel from_system(const SystemParams& sys, double sigma_det,
                                std::uint64_t seed);
};

/// Square readout pulse with a linear rise; the output is averaged over
/// [window_start, duration].
struct ReadoutPulse {
  double omega_d = 0.0;
  double amplitude = 0.0;
  double rise_time = 10e-9;
  double duration = 500e-9;
  double window_start = 0.0;
  double sample_interval = 1e-9;

  void validate() const;
  DriveProtocol protocol() const;
};

struct ShotRecord {
  std::uint64_t index = 0;
  QubitState prepared = QubitState::g;
  QubitState initial = QubitState::g;  ///< actual state at t = 0
  std::vector<double> jump_times;
  cplx noiseless_iq{};
  cplx integrated_iq{};
  bool latched = false;
  std::optional<double> bifurcation_time;
  double final_photons = 0.0;  ///< upper-polariton occupation at pulse end
  bool discarded = false;
  std::optional<QubitState> assigned;
};

/// Simulates shots of one readout pulse. No-jump trajectories are computed once
/// per qubit state and shared by all shots.
class ReadoutSimulator {
 public:
  ReadoutSimulator(const SystemParams& sys, const ReadoutPulse& pulse,
                   const IntegratorSettings& integrator = {});

  /// Shot `index` with its own random stream seeded from (noise.rng_seed, index).
  ShotRecord simulate(const NoiseModel& noise, QubitState prepared, std::uint64_t index) const;

  /// Shot with the given jump times instead of sampled ones; no preparation error.
  ShotRecord simulate_forced(const NoiseModel& noise, QubitState prepared,
                             std::span<const double> jump_times, std::uint64_t index) const;

  /// Shots 0..n-1 alternate g, e, g, e, ...
  std::vector<ShotRecord> run(const NoiseModel& noise, std::size_t shots,
                              unsigned threads = 1) const;

  /// Latch level: midpoint between the smallest and largest stable |c_out|
  /// over both qubit states at the plateau amplitude.
  double latch_level() const { return latch_level_; }
  const Trajectory& reference(QubitState s) const {
    return s == QubitState::g ? reference_g_ : reference_e_;
  }
  /// Noiseless integrated output of the no-jump trajectory.
  cplx reference_iq(QubitState s) const;
  const ReadoutPulse& pulse() const { return pulse_; }

 private:
  ShotRecord finish(const Trajectory& traj, ShotRecord rec, const NoiseModel& noise,
                    std::uint64_t index) const;

  SystemParams sys_;
  ReadoutPulse pulse_;
  IntegratorSettings integrator_;
  DriveProtocol protocol_;
  double latch_level_ = 0.0;
  Trajectory reference_g_;
  Trajectory reference_e_;
};

ShotRecord simulate_shot(const SystemParams& sys, const NoiseModel& noise,
                         const ReadoutPulse& pulse, QubitState prepared,
                         std::uint64_t index = 0);

/// Rotation of the IQ plane placing the g and e cluster centres on the real
/// axis, g at 0 and e at +|c_e − c_g|.
struct IqProjection {
  cplx origin{};
  cplx direction{1.0, 0.0};
  double separation = 0.0;

  double operator()(cplx iq) const;
  static IqProjection from_centers(cplx center_g, cplx center_e);
};

/// Cluster centres from the noiseless outputs of correctly prepared shots
/// without jumps (falling back to all kept shots of each preparation).
IqProjection cluster_projection(std::span<const ShotRecord> shots);

struct FidelityReport {
  double P_e_given_g = 0.0;
  double P_g_given_e = 0.0;
  double F_RO = 0.0;     ///< 1 − (P(e|g) + P(g|e))/2
  double contrast = 0.0; ///< 1 − P(e|g) − P(g|e)
  double threshold = 0.0;
  IqProjection projection;
  /// counts[prepared][assigned], index 0 = g, 1 = e.
  std::array<std::array<std::size_t, 2>, 2> counts{};
  std::size_t discarded = 0;
  double overlap_error = 0.0;
  double preparation_error = 0.0;
  double pre_bifurcation_error = 0.0;
  double sigma_det = 0.0;
};

/// Threshold maximizing F_RO over the sorted midpoints of the projected samples.
double threshold_optimize(std::span<const ShotRecord> shots, const IqProjection& projection);
double threshold_optimize(std::span<const ShotRecord> shots);

/// Confusion statistics with the given threshold on the projected quadrature,
/// or the optimized one when none is given. Throws ParameterError unless both
/// preparations are present among the kept shots.
FidelityReport fidelity_report(std::span<const ShotRecord> shots,
                               std::optional<double> threshold = std::nullopt,
                               double sigma_det = 0.0);

/// Sets `assigned` on every kept shot according to the report.
void assign_shots(std::span<ShotRecord> shots, const FidelityReport& report);

/// (1 − e^(−t_int/2T1), 1 − e^(−t_b/2T1)). Requires 0 ≤ t_b ≤ t_int.
std::pair<double, double> error_budget(const SystemParams& sys, double t_int, double t_b);

/// σ giving the requested Gaussian overlap error for a cluster separation d
/// with the threshold at the midpoint.
double calibrate_sigma_det(double separation, double overlap_error = 1e-3);

struct FidelityMap {
  std::vector<double> omega_grid;
  std::vector<double> amplitude_grid;
  std::vector<double> column_scale;
  std::vector<FidelityReport> reports;  ///< frequency-major

  std::size_t index(std::size_t i_omega, std::size_t i_amp) const {
    return i_omega * amplitude_grid.size() + i_amp;
  }
  double amplitude(std::size_t i_omega, std::size_t i_amp) const {
    return amplitude_grid[i_amp] * column_scale[i_omega];
  }
  /// Index of the cell with the largest F_RO (first on ties).
  std::size_t argmax() const;
};

struct FidelityMapSettings {
  ReadoutPulse pulse{};  ///< frequency and amplitude are overwritten per cell
  IntegratorSettings integrator{};
  std::vector<double> column_scale;
  unsigned threads = 1;
};

/// Monte-Carlo fidelity at every grid cell; the same noise seed is used for
/// every cell.
FidelityMap fidelity_map(const SystemParams& sys, const NoiseModel& noise,
                         std::span<const double> omega_grid,
                         std::span<const double> amplitude_grid, std::size_t shots_per_point,
                         const FidelityMapSettings& settings = {});

}  // namespace polariton
