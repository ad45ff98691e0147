#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "iontrap2d/crystal_solver.hpp"

namespace iontrap2d {

/// Mass-normalised axial (transverse) Hessian of a planar crystal [rad^2/s^2].
struct AxialHessian {
  Eigen::MatrixXd matrix;
  bool micromotion_included = false;
  double omega_z = 0.0;
  std::string source_crystal;
  /// False when Omega_t < 10 w_z, where period averaging is questionable.
  bool averaging_justified = true;
};

/// Axial normal modes sorted by descending w^2. Column m of `eigenvectors`
/// is mode m with its first non-negligible component made positive.
struct ModeSpectrum {
  Eigen::VectorXd eigenvalues;  // w_m^2 [rad^2/s^2]
  Eigen::MatrixXd eigenvectors;
  bool micromotion_included = false;
  std::string source_crystal;

  std::size_t count() const { return static_cast<std::size_t>(eigenvalues.size()); }
  /// |w_m| = sqrt(|w_m^2|).
  double frequency(Eigen::Index m) const;
  bool is_imaginary(Eigen::Index m) const { return eigenvalues[m] < 0.0; }
  /// sqrt(w^2) for stable modes, -sqrt(-w^2) for unstable ones.
  Eigen::VectorXd signed_frequencies() const;
  /// Index of the uniform (centre-of-mass) mode, if present.
  std::optional<Eigen::Index> com_index() const;
};

/// Identity tag of a crystal: FNV-1a over its position and micromotion data.
std::string crystal_identity(const IonCrystal& c);

/// Second-order expansion of the axial potential around a planar crystal:
///   H_ij = k / r_ij^3 (i != j),  H_ii = w_z^2 - sum_j k / r_ij^3,
/// with k = Q^2 / (4 pi eps0 m). With micromotion the 1 / r_ij^3 factors are
/// averaged over one rf period of the reconstructed trajectories using a
/// `quadrature_points` trapezoid rule.
AxialHessian axial_hessian(const IonCrystal& c, bool include_micromotion,
                           int quadrature_points = 32);

ModeSpectrum mode_spectrum(const AxialHessian& h);

/// Per-mode frequency change w_m(with) - w_m(without) matched by sorted order.
std::vector<double> mode_shift_report(const ModeSpectrum& without,
                                      const ModeSpectrum& with_mm);

}  // namespace iontrap2d
