#include "iontrap2d/spin_couplings.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <deque>
#include <map>
#include <sstream>

#include "iontrap2d/error.hpp"

namespace iontrap2d {

double recoil_frequency(double wavevector_diff, double ion_mass) {
  return kReducedPlanck * wavevector_diff * wavevector_diff / (2.0 * ion_mass);
}

CouplingMatrix coupling_matrix(const ModeSpectrum& s, const DriveParams& d) {
  if (!(d.carrier_rabi > 0.0 && d.wavevector_diff > 0.0 && d.detuning > 0.0 &&
        d.ion_mass > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "drive parameters must be positive");
  }
  const Eigen::Index n = s.eigenvectors.rows();
  const Eigen::Index modes = s.eigenvalues.size();
  std::vector<double> weight(static_cast<std::size_t>(modes));
  const double mu2 = d.detuning * d.detuning;
  const Eigen::VectorXd freq = s.signed_frequencies();
  for (Eigen::Index m = 0; m < modes; ++m) {
    const double w = freq[m];
    if (std::abs(d.detuning - w) < d.resonance_guard) {
      std::ostringstream os;
      os << "detuning lies within " << d.resonance_guard / kTwoPi
         << " Hz of mode " << m;
      throw Error(ErrorCode::ResonantDetuning, os.str());
    }
    weight[static_cast<std::size_t>(m)] = 1.0 / (mu2 - s.eigenvalues[m]);
  }
  const double scale = d.carrier_rabi * d.carrier_rabi *
                       recoil_frequency(d.wavevector_diff, d.ion_mass);

  CouplingMatrix c;
  c.drive = d;
  c.J = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    c.ions.push_back(static_cast<std::size_t>(i));
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double sum = 0.0;
      for (Eigen::Index m = 0; m < modes; ++m) {
        sum += s.eigenvectors(i, m) * s.eigenvectors(j, m) *
               weight[static_cast<std::size_t>(m)];
      }
      c.J(i, j) = c.J(j, i) = scale * sum;
    }
  }
  return c;
}

double recommended_detuning(double omega_com, double carrier_rabi,
                            double wavevector_diff, double ion_mass,
                            double omega_z) {
  if (!(omega_com > 0.0 && carrier_rabi >= 0.0 && wavevector_diff > 0.0 &&
        ion_mass > 0.0 && omega_z > 0.0)) {
    throw Error(ErrorCode::InvalidArgument,
                "recommended_detuning needs positive inputs");
  }
  return omega_com +
         3.0 * carrier_rabi *
             std::sqrt(recoil_frequency(wavevector_diff, ion_mass) / omega_z);
}

RangeFit fit_interaction_range(const CouplingMatrix& c,
                               const Positions& positions,
                               RangeReference reference, int bins_per_octave) {
  const std::size_t n = c.count();
  if (c.ions.size() != n) {
    throw Error(ErrorCode::InvalidArgument, "coupling matrix without ion map");
  }
  for (std::size_t ion : c.ions) {
    if (ion >= static_cast<std::size_t>(positions.rows())) {
      throw Error(ErrorCode::IndexOutOfRange,
                  "coupling refers to an ion outside the crystal");
    }
  }
  auto radius = [&](std::size_t k) {
    return positions.row(static_cast<Eigen::Index>(c.ions[k])).head<2>().norm();
  };
  auto distance = [&](std::size_t a, std::size_t b) {
    return (positions.row(static_cast<Eigen::Index>(c.ions[a])) -
            positions.row(static_cast<Eigen::Index>(c.ions[b])))
        .norm();
  };

  std::vector<std::pair<double, double>> samples;  // (log r, log |J|)
  auto add = [&](std::size_t a, std::size_t b) {
    const double j = std::abs(c.J(static_cast<Eigen::Index>(a),
                                  static_cast<Eigen::Index>(b)));
    const double r = distance(a, b);
    if (j > 0.0 && r > 0.0) samples.emplace_back(std::log(r), std::log(j));
  };
  if (reference == RangeReference::EdgeSpin) {
    if (n == 0) throw Error(ErrorCode::InsufficientPairs, "no spins");
    std::size_t edge = 0;
    for (std::size_t k = 1; k < n; ++k) {
      if (radius(k) > radius(edge)) edge = k;
    }
    for (std::size_t k = 0; k < n; ++k) {
      if (k != edge) add(edge, k);
    }
  } else {
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) add(a, b);
    }
  }
  if (samples.empty()) {
    throw Error(ErrorCode::InsufficientPairs, "no nonzero couplings to fit");
  }

  double log_rmin = samples.front().first;
  for (const auto& s : samples) log_rmin = std::min(log_rmin, s.first);
  const double width = std::log(2.0) / std::max(1, bins_per_octave);
  std::map<long, std::array<double, 3>> bins;  // sum log r, sum log J, count
  for (const auto& [lr, lj] : samples) {
    // Bins are centred so the nearest pair sits mid-bin.
    const long b = static_cast<long>(std::floor((lr - log_rmin) / width + 0.5));
    auto& acc = bins[b];
    acc[0] += lr;
    acc[1] += lj;
    acc[2] += 1.0;
  }
  if (bins.size() < 3) {
    throw Error(ErrorCode::InsufficientPairs,
                "interaction-range fit needs at least three distance bins");
  }
  std::vector<double> x, y;
  for (const auto& [key, acc] : bins) {
    x.push_back(acc[0] / acc[2]);
    y.push_back(acc[1] / acc[2]);
  }
  const double m = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
  }
  const double slope = sxy / sxx;
  double ssr = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double r = y[k] - my - slope * (x[k] - mx);
    ssr += r * r;
  }
  RangeFit fit;
  fit.exponent = -slope;
  fit.standard_error = std::sqrt(ssr / (m - 2.0) / sxx);
  fit.pairs = samples.size();
  fit.bins = x.size();
  return fit;
}

std::string_view to_string(LatticeGeometry g) {
  switch (g) {
    case LatticeGeometry::Kagome: return "kagome";
    case LatticeGeometry::Honeycomb: return "honeycomb";
    case LatticeGeometry::Rectangular: return "rectangular";
    case LatticeGeometry::Ladder: return "ladder";
    case LatticeGeometry::Custom: return "custom";
  }
  return "custom";
}

std::optional<LatticeGeometry> parse_geometry(std::string_view s) {
  for (auto g : {LatticeGeometry::Kagome, LatticeGeometry::Honeycomb,
                 LatticeGeometry::Rectangular, LatticeGeometry::Ladder,
                 LatticeGeometry::Custom}) {
    if (s == to_string(g)) return g;
  }
  return std::nullopt;
}

std::vector<std::optional<std::pair<int, int>>> triangular_lattice_indices(
    const Positions& positions, double tolerance) {
  const Eigen::Index n = positions.rows();
  std::vector<std::optional<std::pair<int, int>>> index(
      static_cast<std::size_t>(n));
  if (n == 0) return index;
  if (n == 1) {
    index[0] = std::pair{0, 0};
    return index;
  }

  auto planar = [&](Eigen::Index i) -> Eigen::Vector2d {
    return positions.row(i).head<2>().transpose();
  };
  Eigen::Index origin = 0;
  for (Eigen::Index i = 1; i < n; ++i) {
    if (planar(i).norm() < planar(origin).norm()) origin = i;
  }
  auto nearest_distance = [&](Eigen::Index i) {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i) best = std::min(best, (planar(j) - planar(i)).norm());
    }
    return best;
  };

  // First lattice vector: the origin's nearest neighbour with the smallest
  // polar angle in [0, pi); the second is it turned by 60 degrees.
  const double d0 = nearest_distance(origin);
  Eigen::Vector2d a1 = Eigen::Vector2d::Zero();
  double best_angle = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < n; ++j) {
    if (j == origin) continue;
    Eigen::Vector2d v = planar(j) - planar(origin);
    if (v.norm() > (1.0 + tolerance) * d0) continue;
    if (v.y() < 0.0 || (v.y() == 0.0 && v.x() < 0.0)) v = -v;
    const double angle = std::atan2(v.y(), v.x());
    if (angle < best_angle) {
      best_angle = angle;
      a1 = v;
    }
  }
  const double theta = std::atan2(a1.y(), a1.x());
  // Bond directions at k * 60 degrees and their lattice steps.
  const std::array<std::pair<int, int>, 6> steps{
      {{1, 0}, {0, 1}, {-1, 1}, {-1, 0}, {0, -1}, {1, -1}}};

  std::vector<double> spacing(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    spacing[static_cast<std::size_t>(i)] = nearest_distance(i);
  }
  std::map<std::pair<int, int>, Eigen::Index> occupied;
  std::deque<Eigen::Index> queue{origin};
  index[static_cast<std::size_t>(origin)] = std::pair{0, 0};
  occupied[{0, 0}] = origin;
  while (!queue.empty()) {
    const Eigen::Index i = queue.front();
    queue.pop_front();
    const auto [n1, n2] = *index[static_cast<std::size_t>(i)];
    std::vector<std::pair<double, Eigen::Index>> order;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i) order.emplace_back((planar(j) - planar(i)).norm(), j);
    }
    std::sort(order.begin(), order.end());
    for (const auto& [dist, j] : order) {
      const double local = 0.5 * (spacing[static_cast<std::size_t>(i)] +
                                  spacing[static_cast<std::size_t>(j)]);
      if (dist > (1.0 + 2.0 * tolerance) * local) break;
      if (index[static_cast<std::size_t>(j)]) continue;
      const Eigen::Vector2d v = planar(j) - planar(i);
      for (int k = 0; k < 6; ++k) {
        const double phi = theta + k * kPi / 3.0;
        const Eigen::Vector2d bond = local * Eigen::Vector2d(std::cos(phi), std::sin(phi));
        if ((v - bond).norm() < tolerance * local) {
          const std::pair<int, int> site{n1 + steps[k].first,
                                         n2 + steps[k].second};
          if (occupied.count(site) == 0) {
            occupied[site] = j;
            index[static_cast<std::size_t>(j)] = site;
            queue.push_back(j);
          }
          break;
        }
      }
    }
  }
  return index;
}

namespace {

int floor_mod(int a, int b) { return ((a % b) + b) % b; }

bool hidden_site(LatticeGeometry g, int n1, int n2) {
  switch (g) {
    case LatticeGeometry::Kagome:
      return floor_mod(n1, 2) == 0 && floor_mod(n2, 2) == 0;
    case LatticeGeometry::Honeycomb:
      return floor_mod(n1 - n2, 3) == 0;
    case LatticeGeometry::Rectangular:
      return floor_mod(n2, 2) != 0;
    case LatticeGeometry::Ladder:
      return floor_mod(n2, 3) == 2;
    case LatticeGeometry::Custom:
      return false;
  }
  return false;
}

}  // namespace

LatticeMask make_lattice_mask(const Positions& positions, LatticeGeometry g,
                              double tolerance) {
  if (g == LatticeGeometry::Custom) {
    throw Error(ErrorCode::InvalidArgument,
                "custom masks are built from an explicit index list");
  }
  const auto index = triangular_lattice_indices(positions, tolerance);
  LatticeMask m;
  m.geometry = g;
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (index[i] && !hidden_site(g, index[i]->first, index[i]->second)) {
      m.participating.push_back(i);
    } else {
      m.hidden.push_back(i);
    }
  }
  return m;
}

LatticeMask custom_mask(std::size_t n, std::vector<std::size_t> participating) {
  std::sort(participating.begin(), participating.end());
  participating.erase(std::unique(participating.begin(), participating.end()),
                      participating.end());
  if (!participating.empty() && participating.back() >= n) {
    throw Error(ErrorCode::IndexOutOfRange, "mask index beyond ion count");
  }
  LatticeMask m;
  m.geometry = LatticeGeometry::Custom;
  m.participating = participating;
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (k < participating.size() && participating[k] == i) {
      ++k;
    } else {
      m.hidden.push_back(i);
    }
  }
  return m;
}

CouplingMatrix apply_mask(const CouplingMatrix& c, const LatticeMask& m) {
  const std::size_t n = c.count();
  for (std::size_t i : m.participating) {
    if (i >= n) {
      throw Error(ErrorCode::IndexOutOfRange, "mask index beyond ion count");
    }
  }
  for (std::size_t i : m.hidden) {
    if (i >= n) {
      throw Error(ErrorCode::IndexOutOfRange, "mask index beyond ion count");
    }
  }
  if (m.participating.size() + m.hidden.size() != n) {
    throw Error(ErrorCode::InvalidArgument,
                "mask does not partition the coupled ions");
  }
  CouplingMatrix out;
  out.drive = c.drive;
  out.geometry = std::string(to_string(m.geometry));
  const auto k = static_cast<Eigen::Index>(m.participating.size());
  out.J.resize(k, k);
  for (Eigen::Index a = 0; a < k; ++a) {
    const auto ia = static_cast<Eigen::Index>(m.participating[a]);
    out.ions.push_back(c.ions.empty() ? m.participating[a]
                                      : c.ions[m.participating[a]]);
    for (Eigen::Index b = 0; b < k; ++b) {
      out.J(a, b) = c.J(ia, static_cast<Eigen::Index>(m.participating[b]));
    }
  }
  return out;
}

Eigen::MatrixXcd build_ising_hamiltonian(const CouplingMatrix& c,
                                         double transverse_field) {
  const std::size_t n = c.count();
  if (n > kMaxHamiltonianSpins) {
    std::ostringstream os;
    os << n << " spins exceed the dense Hamiltonian limit of "
       << kMaxHamiltonianSpins;
    throw Error(ErrorCode::TooLarge, os.str());
  }
  const Eigen::Index dim = Eigen::Index{1} << n;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  auto bit = [n](std::size_t spin) {
    return Eigen::Index{1} << (n - 1 - spin);
  };
  for (Eigen::Index b = 0; b < dim; ++b) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        h(b ^ bit(i) ^ bit(j), b) +=
            c.J(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }
      // Y|0> = i|1>, Y|1> = -i|0>
      const bool up = (b & bit(i)) == 0;
      h(b ^ bit(i), b) +=
          std::complex<double>(0.0, up ? transverse_field : -transverse_field);
    }
  }
  return h;
}

}  // namespace iontrap2d
