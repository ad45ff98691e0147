#pragma once

#include <cstddef>

namespace iontrap2d {

/// Linear blade-trap parameters in SI units. The dc electrode voltage only ever
/// enters multiplied by the geometric factor kappa, so the product is stored.
struct TrapParams {
  double rf_voltage = 0.0;      // V0 [V]
  double dc_kappa_u0 = 0.0;     // kappa * U0 [V]
  double rf_frequency = 0.0;    // Omega_t [rad/s]
  double radial_size = 0.0;     // d0 [m]
  double axial_size = 0.0;      // z0 [m]
  double ion_mass = 0.0;        // [kg]
  double ion_charge = 0.0;      // [C]
  double xy_asymmetry = 0.002;  // split of the squared radial frequencies
};

/// Secular (pseudopotential) frequencies [rad/s]. x is the stiffer radial axis.
struct PseudoFrequencies {
  double omega_x = 0.0;
  double omega_y = 0.0;
  double omega_z = 0.0;

  /// Radial frequency without asymmetry, sqrt((wx^2 + wy^2) / 2).
  double omega_r() const;
};

/// Single-ion lowest-zone Mathieu stability limit on q.
inline constexpr double kMathieuStabilityLimit = 0.908;

/// Default micromotion correction applied on top of the planarity threshold.
inline constexpr double kMicromotionThresholdFactor = 1.45;

/// 4-blade trap with d0 = z0 = 200 um, Omega_t = 2pi x 50 MHz, V0 = 440 V,
/// kappa U0 = 13 V, loaded with 171Yb+.
TrapParams reference_blade_trap();

/// Throws Error(InvalidParams) unless every physical field is positive,
/// 0 <= asymmetry < 0.1 and q < 0.908; throws Error(NegativeRadialStiffness)
/// when the dc defocusing overwhelms the rf pseudopotential.
void validate(const TrapParams& p);

/// q = 2 Q V0 / (m d0^2 Omega_t^2).
double mathieu_q(const TrapParams& p);

/// Lowest-order pseudopotential frequencies with the asymmetry applied to the
/// squared radial frequencies, w_{x,y}^2 = w_r^2 (1 +- eps).
PseudoFrequencies pseudo_frequencies(const TrapParams& p);

/// Squared radial frequency w_r^2 before the asymmetry split. May be negative.
double radial_stiffness(const TrapParams& p);

/// Minimum w_z / w_r for a planar crystal of n ions, (2.264 n)^(1/4).
double planarity_threshold(std::size_t n);

/// planarity_threshold scaled by the rough micromotion correction.
double micromotion_corrected_threshold(
    std::size_t n, double factor = kMicromotionThresholdFactor);

/// Largest ion count whose edge micromotion stays below half a lattice
/// spacing, floor(4 / q^2). Requires 0 < q < 0.908.
std::size_t max_resolvable_ions(double q);

}  // namespace iontrap2d
