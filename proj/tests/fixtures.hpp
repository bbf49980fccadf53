#pragma once

#include <cmath>
#include <random>

#include "polariton/model.hpp"
#include "polariton/units.hpp"

namespace polariton::testing {

using namespace polariton::units;

/// Flux-5 working point: bare constants from the two-flux-point fit, with
/// (ω_a, ω_c, g_ac, g_zz) fitted to the four linear-regime pointer-distance peaks.
inline SystemParams flux5() {
  SystemParams s;
  s.omega_q = angular(6.283 * GHz);
  s.omega_a = angular(7.37029847 * GHz);
  s.omega_c = angular(7.15768046 * GHz);
  s.U_a = angular(13.5 * MHz);
  s.g_zz = angular(35.53310336 * MHz);
  s.g_ac = angular(292.37669824 * MHz);
  s.kappa_a = angular(5.6 * MHz);
  s.kappa_c = angular(12.7 * MHz);
  s.T1 = 3.3 * us;
  s.T2 = 3.3 * us;
  return s;
}

/// Published bare constants with ω_a placed so the bare mixing angle is `theta`.
inline SystemParams published_bare(double theta) {
  SystemParams s;
  s.omega_q = angular(6.283 * GHz);
  s.omega_c = angular(7.169 * GHz);
  s.g_ac = angular(295 * MHz);
  s.omega_a = s.omega_c + 2.0 * s.g_ac / std::tan(2.0 * theta);
  s.U_a = angular(13.5 * MHz);
  s.g_zz = angular(34.5 * MHz);
  s.kappa_a = angular(5.6 * MHz);
  s.kappa_c = angular(12.7 * MHz);
  s.T1 = 3.3 * us;
  s.T2 = 3.3 * us;
  return s;
}

/// Relative attenuation (dB) placing -89 dBm inside region II at 7.508 GHz.
inline constexpr double kFlux5AttenuationDb = -15.0;

/// Random system in normalized units (κ_c ≈ 1) spanning linear to strongly Kerr regimes.
inline SystemParams random_normalized(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  SystemParams s;
  s.omega_c = 100.0;
  s.omega_a = 100.0 + (u01(rng) - 0.5) * 8.0;
  s.omega_q = 80.0;
  s.g_ac = 0.2 + 2.8 * u01(rng);
  s.g_zz = 0.5 * u01(rng);
  s.U_a = 0.02 + 1.5 * u01(rng);
  s.kappa_a = 0.2 + 1.3 * u01(rng);
  s.kappa_c = 0.5 + 1.0 * u01(rng);
  s.T1 = 1e3;
  s.T2 = 1e3;
  return s;
}

}  // namespace polariton::testing
