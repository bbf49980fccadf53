#pragma once

#include <numbers>

namespace polariton::units {

inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr double hbar = 1.054571817e-34;  // J s

inline constexpr double GHz = 1e9;
inline constexpr double MHz = 1e6;
inline constexpr double kHz = 1e3;

inline constexpr double ns = 1e-9;
inline constexpr double us = 1e-6;

/// Ordinary frequency f (Hz) to angular frequency 2πf (rad/s).
constexpr double angular(double hz) { return two_pi * hz; }

/// Angular frequency (rad/s) to ordinary frequency (Hz).
constexpr double ordinary(double rad_per_s) { return rad_per_s / two_pi; }

}  // namespace polariton::units
