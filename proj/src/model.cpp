#include "polariton/model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "polariton/errors.hpp"

namespace polariton {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw ParameterError(msg);
}

bool finite_nonneg(double x) { return std::isfinite(x) && x >= 0.0; }

}  // namespace

void SystemParams::validate() const {
  require(std::isfinite(omega_q) && omega_q > 0.0, "omega_q must be positive");
  require(std::isfinite(omega_a) && omega_a > 0.0, "omega_a must be positive");
  require(std::isfinite(omega_c) && omega_c > 0.0, "omega_c must be positive");
  require(finite_nonneg(U_a), "U_a must be non-negative");
  require(finite_nonneg(g_zz), "g_zz must be non-negative");
  require(finite_nonneg(g_ac), "g_ac must be non-negative");
  require(finite_nonneg(kappa_a), "kappa_a must be non-negative");
  require(finite_nonneg(kappa_c), "kappa_c must be non-negative");
  require(finite_nonneg(T1), "T1 must be non-negative");
  require(finite_nonneg(T2), "T2 must be non-negative");
  require(U_a < omega_a, "U_a must be smaller than omega_a");
}

const char* to_string(QubitState s) { return s == QubitState::e ? "e" : "g"; }

double hybridization_angle(double delta_ac, double g_ac) {
  if (!(g_ac > 0.0)) throw ParameterError("hybridization_angle requires g_ac > 0");
  // atan2 lies in (0, π) for a positive first argument.
  return 0.5 * std::atan2(2.0 * g_ac, delta_ac);
}

double shifted_ancilla_frequency(const SystemParams& sys, std::optional<QubitState> eta) {
  return eta ? sys.omega_a - sys.g_zz * sigma_z(*eta) : sys.omega_a;
}

PolaritonParams polariton_params_at(const SystemParams& sys, double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double c2 = c * c;
  const double s2 = s * s;
  const double sin2t = std::sin(2.0 * theta);

  PolaritonParams pp;
  pp.theta = theta;
  pp.omega_u = s2 * sys.omega_c + c2 * sys.omega_a + sin2t * sys.g_ac;
  pp.omega_l = c2 * sys.omega_c + s2 * sys.omega_a - sin2t * sys.g_ac;
  pp.chi_u = sys.g_zz * c2;
  pp.chi_l = sys.g_zz * s2;
  pp.U_uu = sys.U_a * c2 * c2;
  pp.U_ll = sys.U_a * s2 * s2;
  pp.U_ul = 0.5 * sys.U_a * sin2t * sin2t;
  pp.kappa_u = sys.kappa_c * s2 + sys.kappa_a * c2;
  pp.kappa_l = sys.kappa_c * c2 + sys.kappa_a * s2;
  pp.drive_weight_u = s;
  pp.drive_weight_l = c;
  return pp;
}

PolaritonParams polariton_params(const SystemParams& sys, std::optional<QubitState> eta) {
  const double delta = shifted_ancilla_frequency(sys, eta) - sys.omega_c;
  return polariton_params_at(sys, hybridization_angle(delta, sys.g_ac));
}

double shifted_polariton_frequency(const PolaritonParams& pp, Polariton j, QubitState eta) {
  return pp.omega(j) - pp.chi(j) * sigma_z(eta);
}

double critical_photon_number(double kappa, double U) {
  if (!(U > 0.0)) throw ParameterError("linear mode has no bistability threshold");
  return kappa / (3.0 * std::sqrt(3.0) * U);
}

std::vector<ParameterCurveRow> parameter_curves(const SystemParams& sys,
                                                std::span<const double> theta_grid) {
  if (theta_grid.empty()) throw ParameterError("parameter_curves: empty theta grid");
  std::vector<ParameterCurveRow> rows;
  rows.reserve(theta_grid.size());
  for (double theta : theta_grid) {
    if (!(theta > 0.0 && theta < std::numbers::pi / 2))
      throw ParameterError("parameter_curves: theta outside (0, pi/2)");
    const PolaritonParams pp = polariton_params_at(sys, theta);
    rows.push_back({theta, pp.chi_u, pp.chi_l, pp.U_uu, pp.U_ll, pp.U_ul, pp.kappa_u,
                    pp.kappa_l});
  }
  return rows;
}

}  // namespace polariton
