#include "iontrap2d/stability_scanner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "iontrap2d/error.hpp"
#include "iontrap2d/normal_modes.hpp"

namespace iontrap2d {
namespace {

double lowest_axial_eigenvalue(const IonCrystal& c, bool include_micromotion,
                               int points) {
  const ModeSpectrum s =
      mode_spectrum(axial_hessian(c, include_micromotion, points));
  return s.eigenvalues[s.eigenvalues.size() - 1];
}

bool planar_crystal_stable(const TrapParams& p, const Positions& planar,
                           bool include_micromotion,
                           const ScanOptions& options) {
  const double wz = pseudo_frequencies(p).omega_z;
  const double floor = options.soft_mode_floor * wz;
  IonCrystal c;
  if (include_micromotion) {
    try {
      c = solve_micromotion(p, planar, options.solver);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::PlanarityLost) return false;
      throw;
    }
  } else {
    c = static_crystal(p, planar);
  }
  return lowest_axial_eigenvalue(c, include_micromotion,
                                 options.solver.quadrature_points) >
         floor * floor;
}

}  // namespace

TrapParams trap_for_ratio(const TrapParams& base, double omega_r,
                          double ratio) {
  if (!(omega_r > 0.0) || !(ratio > 0.0)) {
    throw Error(ErrorCode::InvalidArgument,
                "trap_for_ratio needs positive omega_r and ratio");
  }
  TrapParams p = base;
  const double m = p.ion_mass, qe = p.ion_charge;
  const double wz = ratio * omega_r;
  p.dc_kappa_u0 = wz * wz * m * p.axial_size * p.axial_size / (2.0 * qe);
  const double dc = qe * p.dc_kappa_u0 / (m * p.axial_size * p.axial_size);
  // w_r^2 + dc = Q^2 V0^2 / (2 m^2 d0^4 Omega^2)
  p.rf_voltage = std::sqrt((omega_r * omega_r + dc) * 2.0) * m *
                 p.radial_size * p.radial_size * p.rf_frequency / qe;
  return p;
}

bool is_planar_stable(const TrapParams& p, std::size_t n,
                      bool include_micromotion, const ScanOptions& options) {
  validate(p);
  if (n <= 1) return true;
  const Equilibrium eq = solve_pseudo_equilibrium(
      pseudo_frequencies(p), species_of(p), n, options.seed, options.solver);
  if (!is_planar(eq.positions)) return false;
  return planar_crystal_stable(p, eq.positions, include_micromotion, options);
}

double critical_anisotropy(std::size_t n, double omega_r,
                           bool include_micromotion, const TrapParams& base,
                           const ScanOptions& options) {
  if (n < 2) {
    throw Error(ErrorCode::InvalidArgument,
                "critical_anisotropy needs at least two ions");
  }
  // At fixed w_r the in-plane pseudopotential, and with it the planar
  // crystal, does not depend on the ratio being probed.
  const double threshold = planarity_threshold(n);
  double lo = options.lower_factor * threshold;
  double hi = options.upper_factor * threshold;
  const TrapParams p_hi = trap_for_ratio(base, omega_r, hi);
  validate(p_hi);
  const Equilibrium eq = solve_planar_equilibrium(
      pseudo_frequencies(p_hi), species_of(p_hi), n, options.seed,
      options.solver);

  auto stable = [&](double ratio) {
    const TrapParams p = trap_for_ratio(base, omega_r, ratio);
    validate(p);
    return planar_crystal_stable(p, eq.positions, include_micromotion,
                                 options);
  };
  if (stable(lo) || !stable(hi)) {
    std::ostringstream os;
    os << "ratio bracket [" << lo << ", " << hi
       << "] does not straddle the planar transition for N = " << n;
    throw Error(ErrorCode::BracketFailure, os.str());
  }
  while ((hi - lo) > options.relative_tolerance * lo) {
    const double mid = 0.5 * (lo + hi);
    (stable(mid) ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

StabilityBoundary scan_boundary(const std::vector<std::size_t>& ns,
                                double omega_r, MicromotionMode mode,
                                const TrapParams& base,
                                const ScanOptions& options) {
  std::vector<bool> flags;
  if (mode != MicromotionMode::On) flags.push_back(false);
  if (mode != MicromotionMode::Off) flags.push_back(true);

  StabilityBoundary b;
  for (bool f : flags) {
    for (std::size_t n : ns) b.points.push_back({n, 0.0, f});
  }
  std::vector<std::exception_ptr> failures(b.points.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < b.points.size(); k = next++) {
      BoundaryPoint& pt = b.points[k];
      try {
        pt.critical_ratio = critical_anisotropy(
            pt.n, omega_r, pt.micromotion_included, base, options);
      } catch (...) {
        failures[k] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::max(1, options.jobs)), 1, b.points.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  return b;
}

PowerLawFit fit_boundary_powerlaw(const std::vector<BoundaryPoint>& points) {
  if (points.size() < 4) {
    throw Error(ErrorCode::InsufficientPoints,
                "power-law fit needs at least four boundary points");
  }
  for (const auto& pt : points) {
    if (pt.micromotion_included != points.front().micromotion_included) {
      throw Error(ErrorCode::InvalidArgument,
                  "power-law fit mixes micromotion settings");
    }
    if (!(pt.n > 0 && pt.critical_ratio > 0.0)) {
      throw Error(ErrorCode::InvalidArgument,
                  "power-law fit needs positive N and ratios");
    }
  }
  const double m = static_cast<double>(points.size());
  double mx = 0.0, my = 0.0;
  for (const auto& pt : points) {
    mx += std::log(static_cast<double>(pt.n));
    my += std::log(pt.critical_ratio);
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& pt : points) {
    const double dx = std::log(static_cast<double>(pt.n)) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(pt.critical_ratio) - my);
  }
  if (!(sxx > 0.0)) {
    throw Error(ErrorCode::InsufficientPoints,
                "power-law fit needs at least two distinct N");
  }
  PowerLawFit fit;
  fit.exponent = sxy / sxx;
  const double intercept = my - fit.exponent * mx;
  fit.prefactor = std::exp(intercept);
  double ssr = 0.0;
  for (const auto& pt : points) {
    const double r = std::log(pt.critical_ratio) -
                     (intercept + fit.exponent *
                                      std::log(static_cast<double>(pt.n)));
    ssr += r * r;
  }
  fit.standard_error = std::sqrt(ssr / (m - 2.0) / sxx);
  return fit;
}

std::vector<BoundaryPoint> select_points(const StabilityBoundary& b,
                                         bool micromotion_included) {
  std::vector<BoundaryPoint> out;
  for (const auto& pt : b.points) {
    if (pt.micromotion_included == micromotion_included) out.push_back(pt);
  }
  return out;
}

}  // namespace iontrap2d
