#pragma once

// Dimensionless N-ion energy used by the equilibrium solvers:
//   U = sum_i sum_a k_a x_ia^2 / 2 + sum_{i<j} 1 / |x_i - x_j|
// Lengths are in units of (Q^2 / (4 pi eps0 m w_ref^2))^(1/3) and energies in
// units of m w_ref^2 L^2. Coordinates are stored ion-major, dim per ion.

#include <Eigen/Dense>
#include <array>

namespace iontrap2d::detail {

class HarmonicCoulomb {
 public:
  HarmonicCoulomb(int dim, std::array<double, 3> stiffness)
      : dim_(dim), stiffness_(stiffness) {}

  int dim() const { return dim_; }
  const std::array<double, 3>& stiffness() const { return stiffness_; }

  double energy(const Eigen::VectorXd& x) const;
  /// Returns dU/dx (the negative force).
  void gradient(const Eigen::VectorXd& x, Eigen::VectorXd& g) const;
  Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const;

 private:
  int dim_;
  std::array<double, 3> stiffness_;
};

/// Mean nearest-neighbour distance for a flat coordinate vector.
double mean_nn_distance(const Eigen::VectorXd& x, int dim);

}  // namespace iontrap2d::detail
