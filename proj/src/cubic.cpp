#include "polariton/cubic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "polariton/errors.hpp"

namespace polariton {

namespace {

// In y = Cx/A the cubic becomes y(1 + (b + y)²) − d = 0 with b = B/A, d = |D|²C/A³,
// i.e. y³ + 2b y² + (1 + b²) y − d.
struct Reduced {
  double b;
  double d;

  double value(double y) const { return y * (1.0 + (b + y) * (b + y)) - d; }
  double slope(double y) const { return 3.0 * y * y + 4.0 * b * y + 1.0 + b * b; }

  double discriminant() const {
    const double a2 = 2.0 * b;
    const double a1 = 1.0 + b * b;
    const double a0 = -d;
    const double raw = 18.0 * a2 * a1 * a0 - 4.0 * a2 * a2 * a2 * a0 + a2 * a2 * a1 * a1 -
                       4.0 * a1 * a1 * a1 - 27.0 * a0 * a0;
    return raw / (a1 * a1 * a1);
  }

  double polish(double y) const {
    for (int i = 0; i < 3; ++i) {
      const double s = slope(y);
      if (s == 0.0) break;
      const double step = value(y) / s;
      if (!std::isfinite(step)) break;
      y -= step;
      if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(y))) break;
    }
    return y;
  }
};

Reduced reduce(const CubicCoefficients& c) {
  const double n2 = std::norm(c.D);
  return {c.B / c.A, n2 * c.C / (c.A * c.A * c.A)};
}

}  // namespace

double duffing_response(const CubicCoefficients& coef, double x) {
  const double shift = coef.B + coef.C * x;
  return x * (coef.A * coef.A + shift * shift);
}

double duffing_discriminant(const CubicCoefficients& coef) {
  if (coef.C == 0.0) return -1.0;
  return reduce(coef).discriminant();
}

std::vector<PhotonNumberRoot> duffing_cubic_photon_numbers(const CubicCoefficients& coef) {
  if (!(coef.A > 0.0)) throw ParameterError("unphysical damping: A must be positive");
  if (!(coef.C >= 0.0)) throw ParameterError("Kerr coefficient C must be non-negative");

  const double n2 = std::norm(coef.D);
  if (coef.C == 0.0) {
    return {{n2 / (coef.A * coef.A + coef.B * coef.B), true, false}};
  }
  if (n2 == 0.0) return {{0.0, true, false}};

  const Reduced r = reduce(coef);
  const double scale = coef.A / coef.C;
  const double disc = r.discriminant();

  // Depressed form t³ + p t + q with y = t − a2/3.
  const double a2 = 2.0 * r.b;
  const double a1 = 1.0 + r.b * r.b;
  const double a0 = -r.d;
  const double shift = a2 / 3.0;
  const double p = a1 - a2 * a2 / 3.0;
  const double q = 2.0 * a2 * a2 * a2 / 27.0 - a2 * a1 / 3.0 + a0;

  std::vector<PhotonNumberRoot> roots;
  if (std::abs(disc) <= kMarginalDiscriminant) {
    // Fold: the double root sits on a critical point of the cubic.
    const double root_term = std::sqrt(std::max(0.0, 4.0 * r.b * r.b - 3.0 * a1));
    const std::array<double, 2> crit = {(-2.0 * r.b - root_term) / 3.0,
                                        (-2.0 * r.b + root_term) / 3.0};
    const double dbl =
        std::abs(r.value(crit[0])) < std::abs(r.value(crit[1])) ? crit[0] : crit[1];
    const double simple = r.polish(-a2 - 2.0 * dbl);
    roots.push_back({std::max(0.0, simple) * scale, true, false});
    roots.push_back({std::max(0.0, dbl) * scale, false, true});
  } else if (disc > 0.0) {
    const double m = 2.0 * std::sqrt(-p / 3.0);
    const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
    const double phi = std::acos(arg) / 3.0;
    std::array<double, 3> ys;
    for (int k = 0; k < 3; ++k) {
      ys[k] = r.polish(m * std::cos(phi - 2.0 * std::numbers::pi * k / 3.0) - shift);
    }
    std::sort(ys.begin(), ys.end());
    for (int k = 0; k < 3; ++k) {
      roots.push_back({std::max(0.0, ys[k]) * scale, k != 1, false});
    }
  } else {
    const double s = std::sqrt(q * q / 4.0 + p * p * p / 27.0);
    // Pick the Cardano term without cancellation.
    const double u = std::cbrt(-q / 2.0 - std::copysign(s, q));
    const double t = (u == 0.0) ? 0.0 : u - p / (3.0 * u);
    roots.push_back({std::max(0.0, r.polish(t - shift)) * scale, true, false});
  }
  std::sort(roots.begin(), roots.end(),
            [](const PhotonNumberRoot& l, const PhotonNumberRoot& rr) { return l.x < rr.x; });
  return roots;
}

}  // namespace polariton
