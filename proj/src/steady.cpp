#include "polariton/steady.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <string>

#include "polariton/errors.hpp"

namespace polariton {

namespace {

constexpr cplx I{0.0, 1.0};

// Real 2×2 block of the map w ↦ p w + q w*.
std::array<std::array<double, 2>, 2> real_block(cplx p, cplx q) {
  const cplx s = p + q;
  const cplx d = p - q;
  return {{{s.real(), -d.imag()}, {s.imag(), d.real()}}};
}

void require_drive(const DriveSpec& drive) {
  if (!std::isfinite(drive.omega_d) || !std::isfinite(drive.Omega_c) || drive.Omega_c < 0.0)
    throw ParameterError("drive amplitude must be finite and non-negative");
}

}  // namespace

CoupledReduction coupled_reduction(const SystemParams& sys, std::optional<QubitState> eta,
                                   const DriveSpec& drive) {
  const cplx cavity = cplx(0.5 * sys.kappa_c, -(drive.omega_d - sys.omega_c));
  const cplx z = sys.g_ac / cavity;
  CoupledReduction red;
  red.z = z;
  red.coef.A = 0.5 * sys.kappa_a + sys.g_ac * z.real();
  red.coef.B = drive.omega_d - shifted_ancilla_frequency(sys, eta) - sys.g_ac * z.imag();
  red.coef.C = sys.U_a;
  red.coef.D = -z * drive.Omega_c;
  return red;
}

std::array<cplx, 2> coupled_residual(const SystemParams& sys, std::optional<QubitState> eta,
                                     const DriveSpec& drive, cplx alpha, cplx gamma) {
  const double delta_c = drive.omega_d - sys.omega_c;
  const double delta_a = drive.omega_d - shifted_ancilla_frequency(sys, eta);
  const cplx r1 = cplx(0.5 * sys.kappa_c, -delta_c) * gamma + I * sys.g_ac * alpha +
                  I * drive.Omega_c;
  const cplx r2 = cplx(0.5 * sys.kappa_a, -(delta_a + sys.U_a * std::norm(alpha))) * alpha +
                  I * sys.g_ac * gamma;
  return {r1, r2};
}

std::array<std::array<double, 4>, 4> coupled_jacobian(const SystemParams& sys,
                                                      std::optional<QubitState> eta,
                                                      const DriveSpec& drive, cplx alpha,
                                                      cplx gamma) {
  (void)gamma;  // the equations are linear in γ
  const double delta_c = drive.omega_d - sys.omega_c;
  const double delta_a = drive.omega_d - shifted_ancilla_frequency(sys, eta);

  const auto aa = real_block(
      cplx(-0.5 * sys.kappa_a, delta_a + 2.0 * sys.U_a * std::norm(alpha)),
      I * sys.U_a * alpha * alpha);
  const auto ag = real_block(-I * sys.g_ac, 0.0);
  const auto ga = real_block(-I * sys.g_ac, 0.0);
  const auto gg = real_block(cplx(-0.5 * sys.kappa_c, delta_c), 0.0);

  std::array<std::array<double, 4>, 4> J{};
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      J[r][c] = aa[r][c];
      J[r][c + 2] = ag[r][c];
      J[r + 2][c] = ga[r][c];
      J[r + 2][c + 2] = gg[r][c];
    }
  }
  return J;
}

StabilityVerdict jacobian_stability(const SystemParams& sys, std::optional<QubitState> eta,
                                    const DriveSpec& drive, cplx alpha, cplx gamma) {
  const auto J = coupled_jacobian(sys, eta, drive, alpha, gamma);
  Eigen::Matrix4d m;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) m(r, c) = J[r][c];
  Eigen::EigenSolver<Eigen::Matrix4d> solver(m, /*computeEigenvectors=*/false);
  const double max_re = solver.eigenvalues().real().maxCoeff();

  const double scale = sys.kappa_c > 0.0 ? sys.kappa_c : std::max(sys.kappa_a, 1.0);
  StabilityVerdict v;
  v.max_real_part = max_re;
  v.marginal = std::abs(max_re) <= 1e-6 * scale;
  v.stable = max_re < 0.0 && !v.marginal;
  return v;
}

std::vector<SteadyStateBranch> coupled_steady_states(const SystemParams& sys,
                                                     std::optional<QubitState> eta,
                                                     const DriveSpec& drive) {
  require_drive(drive);
  const CoupledReduction red = coupled_reduction(sys, eta, drive);
  const CubicCoefficients& k = red.coef;
  if (!(k.A > 0.0)) throw ParameterError("unphysical damping");

  const cplx cavity = cplx(0.5 * sys.kappa_c, -(drive.omega_d - sys.omega_c));
  const double tolerance = 1e-9 * std::max(sys.kappa_c, drive.Omega_c);

  std::vector<SteadyStateBranch> out;
  for (const PhotonNumberRoot& root : duffing_cubic_photon_numbers(k)) {
    SteadyStateBranch b;
    b.alpha = k.D / cplx(k.A, -(k.B + k.C * root.x));
    b.gamma = -I * (drive.Omega_c + sys.g_ac * b.alpha) / cavity;
    b.n_a = std::norm(b.alpha);
    b.n_c = std::norm(b.gamma);
    b.c_out = std::sqrt(sys.kappa_c) * b.gamma;
    b.cubic_stable = root.stable;

    const auto res = coupled_residual(sys, eta, drive, b.alpha, b.gamma);
    const double worst = std::max(std::abs(res[0]), std::abs(res[1]));
    if (!(worst <= tolerance) && !root.marginal) {
      throw SolverError("steady-state residual " + std::to_string(worst) +
                        " exceeds tolerance " + std::to_string(tolerance));
    }

    const StabilityVerdict v = jacobian_stability(sys, eta, drive, b.alpha, b.gamma);
    b.stable = v.stable && !root.marginal;
    b.marginal = v.marginal || root.marginal;
    out.push_back(b);
  }
  return out;
}

std::vector<SteadyStateBranch> polariton_steady_state(const PolaritonParams& pp, Polariton j,
                                                      QubitState eta, const DriveSpec& drive) {
  require_drive(drive);
  const double kappa = pp.kappa(j);
  const double U = pp.self_kerr(j);
  const double delta = drive.omega_d - shifted_polariton_frequency(pp, j, eta);
  CubicCoefficients k{0.5 * kappa, delta, U, -I * pp.drive_weight(j) * drive.Omega_c};

  std::vector<SteadyStateBranch> out;
  for (const PhotonNumberRoot& root : duffing_cubic_photon_numbers(k)) {
    SteadyStateBranch b;
    b.alpha = k.D / cplx(k.A, -(k.B + k.C * root.x));
    b.n_a = std::norm(b.alpha);
    b.cubic_stable = root.stable;

    const auto blk = real_block(cplx(-0.5 * kappa, delta + 2.0 * U * b.n_a),
                                I * U * b.alpha * b.alpha);
    // Eigenvalues of a real 2×2: tr/2 ± sqrt((tr/2)² − det).
    const double tr = blk[0][0] + blk[1][1];
    const double det = blk[0][0] * blk[1][1] - blk[0][1] * blk[1][0];
    const double disc = 0.25 * tr * tr - det;
    const double max_re = disc > 0.0 ? 0.5 * tr + std::sqrt(disc) : 0.5 * tr;
    b.marginal = root.marginal || std::abs(max_re) <= 1e-6 * kappa;
    b.stable = max_re < 0.0 && !b.marginal;
    out.push_back(b);
  }
  return out;
}

cplx output_field(const SystemParams& sys, const SteadyStateBranch& branch) {
  return std::sqrt(sys.kappa_c) * branch.gamma;
}

cplx output_field_polariton(double kappa_c, double theta, cplx c_u, cplx c_l) {
  return std::sqrt(kappa_c) * (std::sin(theta) * c_u + std::cos(theta) * c_l);
}

const SteadyStateBranch& ramp_up_branch(const std::vector<SteadyStateBranch>& branches) {
  if (branches.empty()) throw SolverError("no steady-state branch available");
  for (const auto& b : branches)
    if (b.stable) return b;
  return branches.front();
}

const SteadyStateBranch& ramp_down_branch(const std::vector<SteadyStateBranch>& branches) {
  if (branches.empty()) throw SolverError("no steady-state branch available");
  for (auto it = branches.rbegin(); it != branches.rend(); ++it)
    if (it->stable) return *it;
  return branches.back();
}

double pointer_distance(const SystemParams& sys, const DriveSpec& drive) {
  const auto e = coupled_steady_states(sys, QubitState::e, drive);
  const auto g = coupled_steady_states(sys, QubitState::g, drive);
  return std::abs(ramp_up_branch(e).c_out - ramp_up_branch(g).c_out);
}

std::pair<double, double> proportions(const SteadyStateBranch& branch) {
  const double n_a = std::norm(branch.alpha);
  const double n_c = std::norm(branch.gamma);
  const double total = n_a + n_c;
  if (!(total > 0.0)) throw ParameterError("undefined proportion: zero total population");
  return {n_a / total, n_c / total};
}

std::optional<FoldAmplitudes> fold_amplitudes(const SystemParams& sys,
                                              std::optional<QubitState> eta, double omega_d) {
  const CoupledReduction red = coupled_reduction(sys, eta, {omega_d, 1.0});
  const CubicCoefficients& k = red.coef;
  const double zz = std::norm(red.z);
  if (k.C <= 0.0 || zz == 0.0 || !(k.A > 0.0)) return std::nullopt;
  const double disc = k.B * k.B - 3.0 * k.A * k.A;
  if (k.B >= 0.0 || disc <= 0.0) return std::nullopt;
  const double x_up = (-2.0 * k.B - std::sqrt(disc)) / (3.0 * k.C);
  const double x_down = (-2.0 * k.B + std::sqrt(disc)) / (3.0 * k.C);
  return FoldAmplitudes{std::sqrt(duffing_response(k, x_down) / zz),
                        std::sqrt(duffing_response(k, x_up) / zz)};
}

cplx upper_polariton_amplitude(const SystemParams& sys, std::optional<QubitState> eta,
                               const SteadyStateBranch& branch) {
  const double theta = polariton_params(sys, eta).theta;
  return std::cos(theta) * branch.alpha + std::sin(theta) * branch.gamma;
}

}  // namespace polariton
