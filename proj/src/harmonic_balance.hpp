#pragma once

// Galerkin harmonic balance for ions driven by the quadrupole rf field.
// Trajectories are a(t) = a0 + a1 cos(tau) + a2 cos(2 tau), tau = Omega_t t,
// per in-plane axis. Units follow harmonic_coulomb.hpp with w_ref = w_r.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "iontrap2d/constants.hpp"

namespace iontrap2d::detail {

// Harmonic-balance unknowns per ion: x0 y0 x1 y1 x2 y2 (dimensionless).
constexpr int kPerIon = 6;
inline int hb_index(int ion, int harmonic, int axis) {
  return kPerIon * ion + 2 * harmonic + axis;
}

struct HarmonicBalance {
  int n = 0;
  int points = 32;
  double rf = 0.0;          // W = Omega_t / w_ref
  double drive = 0.0;       // k = q W^2 / 2
  double static_k[2] = {};  // dc + asymmetry restoring stiffness per axis
  std::vector<double> cos1, cos2;

  void setup() {
    cos1.resize(points);
    cos2.resize(points);
    for (int k = 0; k < points; ++k) {
      const double tau = kTwoPi * k / points;
      cos1[k] = std::cos(tau);
      cos2[k] = std::cos(2.0 * tau);
    }
  }

  // Coulomb Fourier projections F0, F1, F2 (layout as the unknowns).
  Eigen::VectorXd coulomb_projections(const Eigen::VectorXd& u) const {
    Eigen::VectorXd f = Eigen::VectorXd::Zero(u.size());
    std::vector<double> rx(n), ry(n);
    for (int k = 0; k < points; ++k) {
      for (int i = 0; i < n; ++i) {
        rx[i] = u[hb_index(i, 0, 0)] + u[hb_index(i, 1, 0)] * cos1[k] +
                u[hb_index(i, 2, 0)] * cos2[k];
        ry[i] = u[hb_index(i, 0, 1)] + u[hb_index(i, 1, 1)] * cos1[k] +
                u[hb_index(i, 2, 1)] * cos2[k];
      }
      const double w[3] = {1.0 / points, 2.0 * cos1[k] / points,
                           2.0 * cos2[k] / points};
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
          const double dx = rx[i] - rx[j];
          const double dy = ry[i] - ry[j];
          const double r2 = dx * dx + dy * dy;
          const double inv_r3 = 1.0 / (r2 * std::sqrt(r2));
          for (int h = 0; h < 3; ++h) {
            const double fx = w[h] * dx * inv_r3;
            const double fy = w[h] * dy * inv_r3;
            f[hb_index(i, h, 0)] += fx;
            f[hb_index(i, h, 1)] += fy;
            f[hb_index(j, h, 0)] -= fx;
            f[hb_index(j, h, 1)] -= fy;
          }
        }
      }
    }
    return f;
  }

  // Tangent of a rigid rotation of the crystal about the trap axis. Under a
  // rotation by theta, a0 and a2 turn by +theta while a1, which carries the
  // x / -y reflection of the quadrupole drive, turns by -theta.
  Eigen::VectorXd rotation_generator(const Eigen::VectorXd& u) const {
    Eigen::VectorXd g(u.size());
    for (int i = 0; i < n; ++i) {
      for (int h = 0; h < 3; ++h) {
        const double sense = h == 1 ? -1.0 : 1.0;
        g[hb_index(i, h, 0)] = -sense * u[hb_index(i, h, 1)];
        g[hb_index(i, h, 1)] = sense * u[hb_index(i, h, 0)];
      }
    }
    return g;
  }

  Eigen::VectorXd rotated(const Eigen::VectorXd& u, double theta) const {
    Eigen::VectorXd out(u.size());
    for (int h = 0; h < 3; ++h) {
      const double t = h == 1 ? -theta : theta;
      const double c = std::cos(t), s = std::sin(t);
      for (int i = 0; i < n; ++i) {
        const double x = u[hb_index(i, h, 0)], y = u[hb_index(i, h, 1)];
        out[hb_index(i, h, 0)] = c * x - s * y;
        out[hb_index(i, h, 1)] = s * x + c * y;
      }
    }
    return out;
  }

  // One fixed-point update of a1, a2 from the first- and second-harmonic
  // balance at fixed a0; returns the period-averaged force on each a0.
  void slave_amplitudes(Eigen::VectorXd& u, Eigen::VectorXd& force) const {
    const Eigen::VectorXd f = coulomb_projections(u);
    force.resize(2 * n);
    for (int i = 0; i < n; ++i) {
      for (int a = 0; a < 2; ++a) {
        const double kd = (a == 0 ? 1.0 : -1.0) * drive;
        const double c = static_k[a];
        const double a0 = u[hb_index(i, 0, a)];
        double& a1 = u[hb_index(i, 1, a)];
        double& a2 = u[hb_index(i, 2, a)];
        a1 = (kd * (a0 + 0.5 * a2) - f[hb_index(i, 1, a)]) / (rf * rf - c);
        a2 = (0.5 * kd * a1 - f[hb_index(i, 2, a)]) / (4.0 * rf * rf - c);
        force[2 * i + a] = f[hb_index(i, 0, a)] - c * a0 - 0.5 * kd * a1;
      }
    }
  }

  // Galerkin residual of (acceleration - force) projected on 1, cos, cos 2.
  Eigen::VectorXd residual(const Eigen::VectorXd& u) const {
    const Eigen::VectorXd f = coulomb_projections(u);
    Eigen::VectorXd e(u.size());
    for (int i = 0; i < n; ++i) {
      for (int a = 0; a < 2; ++a) {
        const double sign = a == 0 ? 1.0 : -1.0;
        const double kd = sign * drive;
        const double c = static_k[a];
        const double a0 = u[hb_index(i, 0, a)];
        const double a1 = u[hb_index(i, 1, a)];
        const double a2 = u[hb_index(i, 2, a)];
        e[hb_index(i, 0, a)] = 0.5 * kd * a1 + c * a0 - f[hb_index(i, 0, a)];
        e[hb_index(i, 1, a)] = -rf * rf * a1 + kd * (a0 + 0.5 * a2) + c * a1 -
                               f[hb_index(i, 1, a)];
        e[hb_index(i, 2, a)] = -4.0 * rf * rf * a2 + 0.5 * kd * a1 + c * a2 -
                               f[hb_index(i, 2, a)];
      }
    }
    return e;
  }

  Eigen::MatrixXd jacobian(const Eigen::VectorXd& u) const {
    const int m = kPerIon * n;
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < n; ++i) {
      for (int a = 0; a < 2; ++a) {
        const double kd = (a == 0 ? 1.0 : -1.0) * drive;
        const double c = static_k[a];
        const int r0 = hb_index(i, 0, a), r1 = hb_index(i, 1, a),
                  r2 = hb_index(i, 2, a);
        jac(r0, r0) += c;
        jac(r0, r1) += 0.5 * kd;
        jac(r1, r0) += kd;
        jac(r1, r1) += -rf * rf + c;
        jac(r1, r2) += 0.5 * kd;
        jac(r2, r1) += 0.5 * kd;
        jac(r2, r2) += -4.0 * rf * rf + c;
      }
    }
    // dF_h / du_h' = sum_k w_h(k) c_h'(k) T(d_ij(k)); the residual carries -F.
    std::vector<double> rx(n * points), ry(n * points);
    for (int k = 0; k < points; ++k) {
      for (int i = 0; i < n; ++i) {
        rx[k * n + i] = u[hb_index(i, 0, 0)] + u[hb_index(i, 1, 0)] * cos1[k] +
                        u[hb_index(i, 2, 0)] * cos2[k];
        ry[k * n + i] = u[hb_index(i, 0, 1)] + u[hb_index(i, 1, 1)] * cos1[k] +
                        u[hb_index(i, 2, 1)] * cos2[k];
      }
    }
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        // acc[h][h'][xx, xy, yy]
        double acc[3][3][3] = {};
        for (int k = 0; k < points; ++k) {
          const double dx = rx[k * n + i] - rx[k * n + j];
          const double dy = ry[k * n + i] - ry[k * n + j];
          const double r2 = dx * dx + dy * dy;
          const double inv_r3 = 1.0 / (r2 * std::sqrt(r2));
          const double inv_r5 = inv_r3 / r2;
          const double txx = inv_r3 - 3.0 * dx * dx * inv_r5;
          const double txy = -3.0 * dx * dy * inv_r5;
          const double tyy = inv_r3 - 3.0 * dy * dy * inv_r5;
          const double w[3] = {1.0 / points, 2.0 * cos1[k] / points,
                               2.0 * cos2[k] / points};
          const double c[3] = {1.0, cos1[k], cos2[k]};
          for (int h = 0; h < 3; ++h) {
            for (int hp = 0; hp < 3; ++hp) {
              const double wc = w[h] * c[hp];
              acc[h][hp][0] += wc * txx;
              acc[h][hp][1] += wc * txy;
              acc[h][hp][2] += wc * tyy;
            }
          }
        }
        for (int h = 0; h < 3; ++h) {
          for (int hp = 0; hp < 3; ++hp) {
            const double t[2][2] = {{acc[h][hp][0], acc[h][hp][1]},
                                    {acc[h][hp][1], acc[h][hp][2]}};
            for (int a = 0; a < 2; ++a) {
              for (int b = 0; b < 2; ++b) {
                jac(hb_index(i, h, a), hb_index(i, hp, b)) -= t[a][b];
                jac(hb_index(j, h, a), hb_index(j, hp, b)) -= t[a][b];
                jac(hb_index(i, h, a), hb_index(j, hp, b)) += t[a][b];
                jac(hb_index(j, h, a), hb_index(i, hp, b)) += t[a][b];
              }
            }
          }
        }
      }
    }
    return jac;
  }

  // max(|E0| / F_c, max(|E1|, |E2|) / (k d)) with F_c = 1 / d^2.
  double scaled_norm(const Eigen::VectorXd& e, double d) const {
    double r_static = 0.0, r_dynamic = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int a = 0; a < 2; ++a) {
        r_static = std::max(r_static, std::abs(e[hb_index(i, 0, a)]));
        r_dynamic = std::max({r_dynamic, std::abs(e[hb_index(i, 1, a)]),
                              std::abs(e[hb_index(i, 2, a)])});
      }
    }
    const double dyn_scale = drive > 0.0 ? drive * d : rf * rf * d;
    return std::max(r_static * d * d, r_dynamic / dyn_scale);
  }
};


}  // namespace iontrap2d::detail
