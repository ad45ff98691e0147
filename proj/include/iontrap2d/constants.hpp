#pragma once

#include <numbers>

namespace iontrap2d {

// CODATA 2018 values, SI units.
inline constexpr double kElementaryCharge = 1.602176634e-19;
inline constexpr double kVacuumPermittivity = 8.8541878128e-12;
inline constexpr double kReducedPlanck = 1.054571817e-34;
inline constexpr double kAtomicMassUnit = 1.66053906660e-27;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// 171Yb+ (neutral atomic mass minus one electron is below our precision).
inline constexpr double kYb171Mass = 170.9363258 * kAtomicMassUnit;

/// Coulomb prefactor Q^2 / (4 pi eps0) for a charge Q.
inline constexpr double coulomb_constant(double charge) {
  return charge * charge / (4.0 * kPi * kVacuumPermittivity);
}

}  // namespace iontrap2d
