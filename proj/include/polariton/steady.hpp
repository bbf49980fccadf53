#pragma once

#include <array>
#include <complex>
#include <optional>
#include <utility>
#include <vector>

#include "polariton/cubic.hpp"
#include "polariton/model.hpp"

namespace polariton {

using cplx = std::complex<double>;

/// Coherent cavity drive in the frame rotating at omega_d.
struct DriveSpec {
  double omega_d = 0.0;
  double Omega_c = 0.0;  ///< drive amplitude (rad/s), ≥ 0
};

/// One quasi-steady solution of the classical field equations.
struct SteadyStateBranch {
  cplx alpha{};  ///< ancilla amplitude (or polariton amplitude in the polariton model)
  cplx gamma{};  ///< cavity amplitude (unused in the polariton model)
  double n_a = 0.0;
  double n_c = 0.0;
  bool stable = false;        ///< Jacobian verdict
  bool marginal = false;      ///< fold or near-zero leading eigenvalue
  bool cubic_stable = false;  ///< root-ordering verdict, kept for cross-checks
  cplx c_out{};               ///< √κ_c γ, units √(photons/s)
};

/// Reduced Duffing coefficients of the coupled system (ancilla after eliminating
/// the cavity), together with z = g_ac / [κ_c/2 − i(ω_d − ω_c)].
struct CoupledReduction {
  CubicCoefficients coef;
  cplx z{};
};

CoupledReduction coupled_reduction(const SystemParams& sys, std::optional<QubitState> eta,
                                   const DriveSpec& drive);

/// Steady states of the coupled cavity-ancilla equations, sorted by ancilla
/// photon number. Each branch is checked against both field equations and
/// classified by the Jacobian of the time-domain equations.
std::vector<SteadyStateBranch> coupled_steady_states(const SystemParams& sys,
                                                     std::optional<QubitState> eta,
                                                     const DriveSpec& drive);

/// Residuals of the two coupled steady-state equations at (alpha, gamma).
std::array<cplx, 2> coupled_residual(const SystemParams& sys, std::optional<QubitState> eta,
                                     const DriveSpec& drive, cplx alpha, cplx gamma);

struct StabilityVerdict {
  bool stable = false;
  bool marginal = false;
  double max_real_part = 0.0;
};

/// Real 4×4 Jacobian of the coupled field equations in (Re α, Im α, Re γ, Im γ).
std::array<std::array<double, 4>, 4> coupled_jacobian(const SystemParams& sys,
                                                      std::optional<QubitState> eta,
                                                      const DriveSpec& drive, cplx alpha,
                                                      cplx gamma);

/// Linear stability of a fixed point. Marginal when the leading eigenvalue real
/// part lies within 1e-6·κ_c of zero.
StabilityVerdict jacobian_stability(const SystemParams& sys, std::optional<QubitState> eta,
                                    const DriveSpec& drive, cplx alpha, cplx gamma);

/// Independent single-mode Duffing solution for polariton j. The polariton
/// amplitude is returned in `alpha`; `c_out` is left at zero.
std::vector<SteadyStateBranch> polariton_steady_state(const PolaritonParams& pp, Polariton j,
                                                      QubitState eta, const DriveSpec& drive);

cplx output_field(const SystemParams& sys, const SteadyStateBranch& branch);

/// √κ_c (sin θ c_u + cos θ c_l).
cplx output_field_polariton(double kappa_c, double theta, cplx c_u, cplx c_l);

/// Branch reached by ramping the drive amplitude up from zero at fixed frequency:
/// the lowest stable root.
const SteadyStateBranch& ramp_up_branch(const std::vector<SteadyStateBranch>& branches);

/// Branch reached when coming down from high drive: the highest stable root.
const SteadyStateBranch& ramp_down_branch(const std::vector<SteadyStateBranch>& branches);

/// |c_out(e) − c_out(g)| on the ramp-up branches.
double pointer_distance(const SystemParams& sys, const DriveSpec& drive);

/// (p_a, p_c) population fractions. Throws ParameterError on zero population.
std::pair<double, double> proportions(const SteadyStateBranch& branch);

/// Drive amplitudes bounding the bistable interval at a fixed drive frequency.
struct FoldAmplitudes {
  double B_down = 0.0;
  double B_up = 0.0;
};

/// Closed-form fold amplitudes from the critical points of the photon-number
/// cubic; nullopt when the frequency admits no bistability.
std::optional<FoldAmplitudes> fold_amplitudes(const SystemParams& sys,
                                              std::optional<QubitState> eta, double omega_d);

/// Upper-polariton amplitude cos θ α + sin θ γ using the qubit-conditioned angle.
cplx upper_polariton_amplitude(const SystemParams& sys, std::optional<QubitState> eta,
                               const SteadyStateBranch& branch);

}  // namespace polariton
