#pragma once
// Reference computations written independently of the library, for
// cross-checking. Only Eigen and the standard library are used here.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

inline constexpr double kE = 1.602176634e-19;
inline constexpr double kEps0 = 8.8541878128e-12;
inline constexpr double kHbar = 1.054571817e-34;
inline constexpr double kAmu = 1.66053906660e-27;
inline constexpr double kPi = std::numbers::pi;

// Q^2 / (4 pi eps0 m)
inline double coulomb_over_mass(double charge, double mass) {
  return charge * charge / (4.0 * kPi * kEps0 * mass);
}

// Two ions on the soft axis of frequency w: m w^2 d/2 = k m / d^2.
inline double two_ion_separation(double k, double w) {
  return std::cbrt(2.0 * k / (w * w));
}

// Pseudopotential energy per unit mass.
inline double energy(const Eigen::MatrixX3d& r, const Eigen::Vector3d& w2,
                     double k) {
  double e = 0.0;
  for (Eigen::Index i = 0; i < r.rows(); ++i) {
    e += 0.5 * (w2.array() * r.row(i).transpose().array().square()).sum();
    for (Eigen::Index j = i + 1; j < r.rows(); ++j) {
      e += k / (r.row(i) - r.row(j)).norm();
    }
  }
  return e;
}

inline Eigen::MatrixX3d gradient(const Eigen::MatrixX3d& r,
                                 const Eigen::Vector3d& w2, double k) {
  Eigen::MatrixX3d g(r.rows(), 3);
  for (Eigen::Index i = 0; i < r.rows(); ++i) {
    g.row(i) = (w2.array() * r.row(i).transpose().array()).matrix().transpose();
    for (Eigen::Index j = 0; j < r.rows(); ++j) {
      if (j == i) continue;
      const Eigen::RowVector3d d = r.row(i) - r.row(j);
      g.row(i) -= k * d / std::pow(d.norm(), 3);
    }
  }
  return g;
}

inline Eigen::VectorXd flatten(const Eigen::MatrixX3d& m) {
  Eigen::VectorXd v(3 * m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i) v.segment<3>(3 * i) = m.row(i).transpose();
  return v;
}

inline Eigen::MatrixX3d unflatten(const Eigen::VectorXd& v) {
  Eigen::MatrixX3d m(v.size() / 3, 3);
  for (Eigen::Index i = 0; i < m.rows(); ++i) m.row(i) = v.segment<3>(3 * i).transpose();
  return m;
}

inline Eigen::MatrixXd hessian(const Eigen::MatrixX3d& r, const Eigen::Vector3d& w2,
                               double k) {
  const Eigen::Index n = r.rows();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(3 * n, 3 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    h.block<3, 3>(3 * i, 3 * i) += w2.asDiagonal();
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const Eigen::Vector3d d = (r.row(i) - r.row(j)).transpose();
      const double rr = d.norm();
      const Eigen::Matrix3d b =
          k * (3.0 * d * d.transpose() / std::pow(rr, 5) -
               Eigen::Matrix3d::Identity() / std::pow(rr, 3));
      h.block<3, 3>(3 * i, 3 * i) += b;
      h.block<3, 3>(3 * j, 3 * j) += b;
      h.block<3, 3>(3 * i, 3 * j) -= b;
      h.block<3, 3>(3 * j, 3 * i) -= b;
    }
  }
  return h;
}

// Steepest descent with Armijo backtracking then Newton, several random
// starts, best energy kept. Works in units of L = (k / w_z^2)^(1/3).
struct Minimum {
  Eigen::MatrixX3d positions;
  double energy = 0.0;  // per unit mass, SI
};

inline Minimum minimize(int n, double wx, double wy, double wz, double k,
                        int starts = 12, std::uint32_t seed = 7) {
  const double length = std::cbrt(k / (wz * wz));
  const Eigen::Vector3d w2(wx * wx / (wz * wz), wy * wy / (wz * wz), 1.0);
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Minimum best;
  best.energy = INFINITY;
  for (int s = 0; s < starts; ++s) {
    Eigen::MatrixX3d r(n, 3);
    for (int i = 0; i < n; ++i) r.row(i) << 3 * u(gen), 3 * u(gen), 0.01 * u(gen);
    double e = energy(r, w2, 1.0);
    auto descend = [&] {
    double step = 0.1;
    for (int it = 0; it < 200000; ++it) {
      const Eigen::MatrixX3d g = gradient(r, w2, 1.0);
      const double gg = g.squaredNorm();
      if (gg < 1e-26) break;
      while (step > 1e-16) {
        const Eigen::MatrixX3d trial = r - step * g;
        const double et = energy(trial, w2, 1.0);
        if (et <= e - 1e-4 * step * gg) {
          r = trial;
          e = et;
          step *= 1.5;
          break;
        }
        step *= 0.5;
      }
      if (step <= 1e-16) break;
    }
    };
    descend();
    // The in-plane orientation is fixed only at the 1e-10 energy level,
    // beyond what descent resolves. Relax the shape by Newton with the
    // softest mode projected out, then minimise over rigid rotations.
    auto relax = [&](Eigen::MatrixX3d x) {
      for (int it = 0; it < 30; ++it) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hessian(x, w2, 1.0));
        const Eigen::VectorXd g = flatten(gradient(x, w2, 1.0));
        Eigen::VectorXd c = es.eigenvectors().transpose() * g;
        c[0] = 0.0;
        if (c.norm() < 1e-15) break;
        x -= unflatten(es.eigenvectors() *
                       (c.array() / es.eigenvalues().array().abs()).matrix());
      }
      return x;
    };
    auto turned = [&](double th) {
      Eigen::Matrix3d rot = Eigen::Matrix3d::Identity();
      rot(0, 0) = rot(1, 1) = std::cos(th);
      rot(0, 1) = -std::sin(th);
      rot(1, 0) = std::sin(th);
      return relax(Eigen::MatrixX3d(r * rot.transpose()));
    };
    auto e_at = [&](double th) { return energy(turned(th), w2, 1.0); };
    double best_th = 0.0, best_e = e_at(0.0);
    for (int g = 1; g < 120; ++g) {
      const double th = kPi * g / 120;
      const double eg = e_at(th);
      if (eg < best_e) best_e = eg, best_th = th;
    }
    double lo = best_th - kPi / 120, hi = best_th + kPi / 120;
    const double phi = (std::sqrt(5.0) - 1) / 2;
    double m1 = hi - phi * (hi - lo), m2 = lo + phi * (hi - lo);
    double e1 = e_at(m1), e2 = e_at(m2);
    for (int it = 0; it < 60; ++it) {
      if (e1 < e2) {
        hi = m2, m2 = m1, e2 = e1;
        m1 = hi - phi * (hi - lo), e1 = e_at(m1);
      } else {
        lo = m1, m1 = m2, e1 = e2;
        m2 = lo + phi * (hi - lo), e2 = e_at(m2);
      }
    }
    r = turned(0.5 * (lo + hi));
    e = energy(r, w2, 1.0);
    if (e < best.energy) {
      best.energy = e;
      best.positions = r;
    }
  }
  best.positions *= length;
  best.energy *= wz * wz * length * length;
  return best;
}

inline std::vector<double> sorted_pair_distances(const Eigen::MatrixX3d& r) {
  std::vector<double> d;
  for (Eigen::Index i = 0; i < r.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < r.rows(); ++j) {
      d.push_back((r.row(i) - r.row(j)).norm());
    }
  }
  std::sort(d.begin(), d.end());
  return d;
}

// Axial Hessian from an arbitrary weight w_ij = <1/r_ij^3>.
inline Eigen::MatrixXd hessian_from_weights(const Eigen::MatrixXd& inv_r3,
                                            double wz, double k) {
  const Eigen::Index n = inv_r3.rows();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    h(i, i) = wz * wz;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      h(i, j) = k * inv_r3(i, j);
      h(i, i) -= k * inv_r3(i, j);
    }
  }
  return h;
}

// <1/r_ij^3> over `phases` equally spaced rf phases of
// r(t) = r0 + r1 cos(phi) + r2 cos(2 phi), r1/r2 in-plane.
inline Eigen::MatrixXd phase_averaged_inverse_cubes(const Eigen::MatrixX3d& r0,
                                                    const Eigen::MatrixX2d& r1,
                                                    const Eigen::MatrixX2d& r2,
                                                    int phases) {
  const Eigen::Index n = r0.rows();
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (int p = 0; p < phases; ++p) {
    const double phi = 2.0 * kPi * p / phases;
    Eigen::MatrixX3d r = r0;
    r.leftCols<2>() += r1 * std::cos(phi) + r2 * std::cos(2.0 * phi);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        if (i != j) w(i, j) += std::pow((r.row(i) - r.row(j)).norm(), -3.0) / phases;
      }
    }
  }
  return w;
}

// Ascending angular frequencies of a symmetric matrix (sqrt of eigenvalues).
inline Eigen::VectorXd frequencies(const Eigen::MatrixXd& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  return es.eigenvalues().array().sqrt();
}

// Eq. for J_ij from the eigen-decomposition of h, computed here directly.
inline Eigen::MatrixXd couplings(const Eigen::MatrixXd& h, double rabi,
                                 double dk, double mass, double mu) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  const double recoil = kHbar * dk * dk / (2.0 * mass);
  const Eigen::Index n = h.rows();
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      if (a == b) continue;
      for (Eigen::Index m = 0; m < n; ++m) {
        const auto& v = es.eigenvectors().col(m);
        j(a, b) += rabi * rabi * recoil * v[a] * v[b] /
                   (mu * mu - es.eigenvalues()[m]);
      }
    }
  }
  return j;
}

// Transverse-field Ising Hamiltonian from explicit Kronecker products,
// spin 0 as the leftmost factor.
inline Eigen::MatrixXcd ising_kron(const Eigen::MatrixXd& j, double b) {
  using C = std::complex<double>;
  Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
  Eigen::Matrix2cd sx, sy;
  sx << 0, 1, 1, 0;
  sy << 0, C(0, -1), C(0, 1), 0;
  const int n = static_cast<int>(j.rows());
  auto kron = [](const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& c) {
    Eigen::MatrixXcd out(a.rows() * c.rows(), a.cols() * c.cols());
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
      for (Eigen::Index s = 0; s < a.cols(); ++s) {
        out.block(r * c.rows(), s * c.cols(), c.rows(), c.cols()) = a(r, s) * c;
      }
    }
    return out;
  };
  auto embed = [&](const std::vector<std::pair<int, Eigen::Matrix2cd>>& ops) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
    for (int s = 0; s < n; ++s) {
      Eigen::MatrixXcd f = id;
      for (const auto& [site, op] : ops) {
        if (site == s) f = op;
      }
      out = kron(out, f);
    }
    return out;
  };
  const Eigen::Index dim = Eigen::Index{1} << n;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  for (int a = 0; a < n; ++a) {
    for (int c = a + 1; c < n; ++c) h += j(a, c) * embed({{a, sx}, {c, sx}});
    h += b * embed({{a, sy}});
  }
  return h;
}

}  // namespace oracle
