#pragma once

#include <optional>
#include <span>
#include <vector>

namespace polariton {

/// Bare circuit constants. Frequencies and rates are angular (rad/s), times in s.
struct SystemParams {
  double omega_q = 0.0;
  double omega_a = 0.0;
  double omega_c = 0.0;
  double U_a = 0.0;      ///< ancilla self-Kerr
  double g_zz = 0.0;     ///< qubit-ancilla cross-Kerr
  double g_ac = 0.0;     ///< ancilla-cavity transverse coupling
  double kappa_a = 0.0;
  double kappa_c = 0.0;
  double T1 = 0.0;
  double T2 = 0.0;

  /// Throws ParameterError if any invariant is violated.
  void validate() const;
};

enum class QubitState { g, e };

/// ⟨σ_z⟩ for the given qubit state: −1 for g, +1 for e.
constexpr double sigma_z(QubitState s) { return s == QubitState::e ? 1.0 : -1.0; }

constexpr QubitState flipped(QubitState s) {
  return s == QubitState::e ? QubitState::g : QubitState::e;
}

const char* to_string(QubitState s);

enum class Polariton { upper, lower };

/// Qubit-conditioned normal-mode parameters of the cavity-ancilla pair.
struct PolaritonParams {
  double theta = 0.0;
  double omega_u = 0.0;
  double omega_l = 0.0;
  double chi_u = 0.0;
  double chi_l = 0.0;
  double U_uu = 0.0;
  double U_ll = 0.0;
  double U_ul = 0.0;
  double kappa_u = 0.0;
  double kappa_l = 0.0;
  double drive_weight_u = 0.0;  ///< sin θ
  double drive_weight_l = 0.0;  ///< cos θ

  double omega(Polariton j) const { return j == Polariton::upper ? omega_u : omega_l; }
  double chi(Polariton j) const { return j == Polariton::upper ? chi_u : chi_l; }
  double self_kerr(Polariton j) const { return j == Polariton::upper ? U_uu : U_ll; }
  double kappa(Polariton j) const { return j == Polariton::upper ? kappa_u : kappa_l; }
  double drive_weight(Polariton j) const {
    return j == Polariton::upper ? drive_weight_u : drive_weight_l;
  }
};

/// Mixing angle with tan 2θ = 2 g_ac / Δ_ac, taken on the branch θ ∈ (0, π/2)
/// so it is continuous through resonance. Requires g_ac > 0.
double hybridization_angle(double delta_ac, double g_ac);

/// Ancilla frequency after the static qubit shift ω_a − g_zz⟨σ_z⟩.
/// With no qubit state the bare ω_a is returned.
double shifted_ancilla_frequency(const SystemParams& sys, std::optional<QubitState> eta);

/// Polariton parameters at a given mixing angle. Frequencies use the bare ω_a.
PolaritonParams polariton_params_at(const SystemParams& sys, double theta);

/// Polariton parameters with θ taken from the (optionally qubit-shifted) detuning.
PolaritonParams polariton_params(const SystemParams& sys,
                                 std::optional<QubitState> eta = std::nullopt);

/// ω̄_j = ω_j − χ_j⟨σ_z⟩.
double shifted_polariton_frequency(const PolaritonParams& pp, Polariton j, QubitState eta);

/// κ / (3√3 U). Throws ParameterError when U ≤ 0.
double critical_photon_number(double kappa, double U);

struct ParameterCurveRow {
  double theta;
  double chi_u, chi_l;
  double U_uu, U_ll, U_ul;
  double kappa_u, kappa_l;
};

/// Row-wise polariton parameters over a grid of mixing angles in (0, π/2).
std::vector<ParameterCurveRow> parameter_curves(const SystemParams& sys,
                                                std::span<const double> theta_grid);

}  // namespace polariton
