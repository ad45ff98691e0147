#include "harmonic_coulomb.hpp"

#include <cmath>
#include <limits>

namespace iontrap2d::detail {

double HarmonicCoulomb::energy(const Eigen::VectorXd& x) const {
  const int n = static_cast<int>(x.size()) / dim_;
  double e = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int a = 0; a < dim_; ++a) {
      const double v = x[i * dim_ + a];
      e += 0.5 * stiffness_[a] * v * v;
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double r2 = 0.0;
      for (int a = 0; a < dim_; ++a) {
        const double d = x[i * dim_ + a] - x[j * dim_ + a];
        r2 += d * d;
      }
      e += 1.0 / std::sqrt(r2);
    }
  }
  return e;
}

void HarmonicCoulomb::gradient(const Eigen::VectorXd& x,
                               Eigen::VectorXd& g) const {
  const int n = static_cast<int>(x.size()) / dim_;
  g.resize(x.size());
  for (int i = 0; i < n; ++i) {
    for (int a = 0; a < dim_; ++a) {
      g[i * dim_ + a] = stiffness_[a] * x[i * dim_ + a];
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double d[3] = {0.0, 0.0, 0.0};
      double r2 = 0.0;
      for (int a = 0; a < dim_; ++a) {
        d[a] = x[i * dim_ + a] - x[j * dim_ + a];
        r2 += d[a] * d[a];
      }
      const double inv_r3 = 1.0 / (r2 * std::sqrt(r2));
      for (int a = 0; a < dim_; ++a) {
        // Coulomb pushes i away from j, so dU/dx_i = -d / r^3.
        g[i * dim_ + a] -= d[a] * inv_r3;
        g[j * dim_ + a] += d[a] * inv_r3;
      }
    }
  }
}

Eigen::MatrixXd HarmonicCoulomb::hessian(const Eigen::VectorXd& x) const {
  const int n = static_cast<int>(x.size()) / dim_;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(x.size(), x.size());
  for (int i = 0; i < n; ++i) {
    for (int a = 0; a < dim_; ++a) {
      h(i * dim_ + a, i * dim_ + a) += stiffness_[a];
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double d[3] = {0.0, 0.0, 0.0};
      double r2 = 0.0;
      for (int a = 0; a < dim_; ++a) {
        d[a] = x[i * dim_ + a] - x[j * dim_ + a];
        r2 += d[a] * d[a];
      }
      const double r = std::sqrt(r2);
      const double inv_r3 = 1.0 / (r2 * r);
      const double inv_r5 = inv_r3 / r2;
      for (int a = 0; a < dim_; ++a) {
        for (int b = 0; b < dim_; ++b) {
          // d^2(1/r)/dx_ia dx_ib = 3 d_a d_b / r^5 - delta_ab / r^3
          const double t =
              3.0 * d[a] * d[b] * inv_r5 - (a == b ? inv_r3 : 0.0);
          h(i * dim_ + a, i * dim_ + b) += t;
          h(j * dim_ + a, j * dim_ + b) += t;
          h(i * dim_ + a, j * dim_ + b) -= t;
          h(j * dim_ + a, i * dim_ + b) -= t;
        }
      }
    }
  }
  return h;
}

double mean_nn_distance(const Eigen::VectorXd& x, int dim) {
  const int n = static_cast<int>(x.size()) / dim;
  if (n < 2) return 0.0;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      double r2 = 0.0;
      for (int a = 0; a < dim; ++a) {
        const double d = x[i * dim + a] - x[j * dim + a];
        r2 += d * d;
      }
      best = std::min(best, r2);
    }
    sum += std::sqrt(best);
  }
  return sum / n;
}

}  // namespace iontrap2d::detail
