#include "iontrap2d/normal_modes.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string_view>

#include "iontrap2d/constants.hpp"
#include "iontrap2d/error.hpp"
#include "iontrap2d/hash.hpp"

namespace iontrap2d {

double ModeSpectrum::frequency(Eigen::Index m) const {
  return std::sqrt(std::abs(eigenvalues[m]));
}

Eigen::VectorXd ModeSpectrum::signed_frequencies() const {
  Eigen::VectorXd f(eigenvalues.size());
  for (Eigen::Index m = 0; m < f.size(); ++m) {
    f[m] = is_imaginary(m) ? -frequency(m) : frequency(m);
  }
  return f;
}

std::optional<Eigen::Index> ModeSpectrum::com_index() const {
  const Eigen::Index n = eigenvectors.rows();
  if (n == 0) return std::nullopt;
  const double u = 1.0 / std::sqrt(static_cast<double>(n));
  for (Eigen::Index m = 0; m < eigenvectors.cols(); ++m) {
    if ((eigenvectors.col(m).array() - u).abs().maxCoeff() < 1e-6) return m;
  }
  return std::nullopt;
}

std::string crystal_identity(const IonCrystal& c) {
  auto bytes = [](const auto& m) {
    return std::string_view(reinterpret_cast<const char*>(m.data()),
                            sizeof(double) * static_cast<std::size_t>(m.size()));
  };
  std::uint64_t h = fnv1a64(bytes(c.avg_positions));
  h = fnv1a64(bytes(c.mm_first), h);
  h = fnv1a64(bytes(c.mm_second), h);
  return hex64(h);
}

AxialHessian axial_hessian(const IonCrystal& c, bool include_micromotion,
                           int quadrature_points) {
  const Eigen::Index n = static_cast<Eigen::Index>(c.count());
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "empty crystal");
  if (!is_planar(c.avg_positions)) {
    throw Error(ErrorCode::PlanarityLost, "axial Hessian needs a planar crystal");
  }
  const PseudoFrequencies f = pseudo_frequencies(c.params);
  const double k = coulomb_constant(c.params.ion_charge) / c.params.ion_mass;
  const double floor = n > 1 ? 1e-3 * mean_nearest_neighbor_distance(c.avg_positions)
                             : 0.0;
  const int points = include_micromotion ? std::max(1, quadrature_points) : 1;

  std::vector<double> c1(points), c2(points);
  for (int p = 0; p < points; ++p) {
    const double tau = kTwoPi * p / points;
    c1[p] = include_micromotion ? std::cos(tau) : 0.0;
    c2[p] = include_micromotion ? std::cos(2.0 * tau) : 0.0;
  }

  AxialHessian h;
  h.matrix = Eigen::MatrixXd::Zero(n, n);
  h.micromotion_included = include_micromotion;
  h.omega_z = f.omega_z;
  h.source_crystal = crystal_identity(c);
  h.averaging_justified = c.params.rf_frequency >= 10.0 * f.omega_z;

  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double avg = 0.0;
      for (int p = 0; p < points; ++p) {
        double r2 = 0.0;
        for (int a = 0; a < 2; ++a) {
          const double d = (c.avg_positions(i, a) - c.avg_positions(j, a)) +
                           (c.mm_first(i, a) - c.mm_first(j, a)) * c1[p] +
                           (c.mm_second(i, a) - c.mm_second(j, a)) * c2[p];
          r2 += d * d;
        }
        const double r = std::sqrt(r2);
        if (!(r > floor)) {
          throw Error(ErrorCode::DegenerateGeometry,
                      "ions " + std::to_string(i) + " and " + std::to_string(j) +
                          " closer than the minimum-distance floor");
        }
        avg += 1.0 / (r2 * r);
      }
      const double coupling = k * avg / points;
      h.matrix(i, j) = coupling;
      h.matrix(j, i) = coupling;
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    double row = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i) row += h.matrix(i, j);
    }
    h.matrix(i, i) = f.omega_z * f.omega_z - row;
  }
  return h;
}

ModeSpectrum mode_spectrum(const AxialHessian& h) {
  const Eigen::Index n = h.matrix.rows();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.matrix);
  Eigen::VectorXd lam = es.eigenvalues();
  Eigen::MatrixXd vec = es.eigenvectors();

  for (Eigen::Index m = 0; m < n; ++m) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(vec(i, m)) > 1e-9) {
        if (vec(i, m) < 0.0) vec.col(m) *= -1.0;
        break;
      }
    }
  }

  const double scale = n > 0 ? std::max(1.0, lam.cwiseAbs().maxCoeff()) : 1.0;
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (std::abs(lam[a] - lam[b]) > 1e-12 * scale) return lam[a] > lam[b];
    for (Eigen::Index i = 0; i < n; ++i) {
      if (vec(i, a) != vec(i, b)) return vec(i, a) < vec(i, b);
    }
    return false;
  });

  ModeSpectrum s;
  s.eigenvalues.resize(n);
  s.eigenvectors.resize(n, n);
  for (Eigen::Index m = 0; m < n; ++m) {
    s.eigenvalues[m] = lam[order[static_cast<std::size_t>(m)]];
    s.eigenvectors.col(m) = vec.col(order[static_cast<std::size_t>(m)]);
  }
  s.micromotion_included = h.micromotion_included;
  s.source_crystal = h.source_crystal;
  return s;
}

std::vector<double> mode_shift_report(const ModeSpectrum& without,
                                      const ModeSpectrum& with_mm) {
  if (without.count() != with_mm.count()) {
    throw Error(ErrorCode::MismatchedN, "spectra have different mode counts");
  }
  std::vector<double> shift(without.count());
  const Eigen::VectorXd a = without.signed_frequencies();
  const Eigen::VectorXd b = with_mm.signed_frequencies();
  for (std::size_t m = 0; m < shift.size(); ++m) {
    shift[m] = b[static_cast<Eigen::Index>(m)] - a[static_cast<Eigen::Index>(m)];
  }
  return shift;
}

}  // namespace iontrap2d
