#pragma once

#include <complex>
#include <vector>

namespace polariton {

/// Coefficients of the reduced single-mode Duffing equation
/// [A − i(B + C|α|²)] α = D.
struct CubicCoefficients {
  double A = 0.0;  ///< effective damping (rad/s)
  double B = 0.0;  ///< effective detuning (rad/s)
  double C = 0.0;  ///< Kerr rate per photon (rad/s)
  std::complex<double> D{};
};

struct PhotonNumberRoot {
  double x = 0.0;  ///< |α|²
  bool stable = false;
  bool marginal = false;
};

/// Discriminant magnitude (normalized) below which two roots are treated as merged.
inline constexpr double kMarginalDiscriminant = 1e-8;

/// Real roots x ≥ 0 of C²x³ + 2BCx² + (A²+B²)x − |D|² = 0, sorted ascending.
/// Three distinct roots: outer two stable, middle unstable. One root: stable.
/// At a fold (normalized discriminant within kMarginalDiscriminant of zero) the
/// simple root and the merged double root are returned, the latter flagged marginal.
/// Throws ParameterError unless A > 0.
std::vector<PhotonNumberRoot> duffing_cubic_photon_numbers(const CubicCoefficients& coef);

/// x·(A² + (B + Cx)²), the left side of the photon-number equation.
double duffing_response(const CubicCoefficients& coef, double x);

/// Normalized discriminant of the photon-number cubic: positive with three
/// real roots, negative with one.
double duffing_discriminant(const CubicCoefficients& coef);

}  // namespace polariton
