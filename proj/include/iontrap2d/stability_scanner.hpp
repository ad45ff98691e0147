#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "iontrap2d/crystal_solver.hpp"
#include "iontrap2d/trap_model.hpp"

namespace iontrap2d {

enum class MicromotionMode { Off, On, Both };

struct BoundaryPoint {
  std::size_t n = 0;
  double critical_ratio = 0.0;  // w_z / w_r at the planar-to-3D transition
  bool micromotion_included = false;
};

struct StabilityBoundary {
  std::vector<BoundaryPoint> points;
};

/// ratio = prefactor * N^exponent, least squares in log-log space.
struct PowerLawFit {
  double prefactor = 0.0;
  double exponent = 0.0;
  double standard_error = 0.0;  // of the exponent
};

struct ScanOptions {
  double relative_tolerance = 1e-3;
  /// Initial bracket as multiples of (2.264 N)^(1/4).
  double lower_factor = 0.6;
  double upper_factor = 2.5;
  /// A mode counts as soft once w^2 < (floor * w_z)^2.
  double soft_mode_floor = 1e-3;
  std::uint64_t seed = 1;
  int jobs = 1;
  SolverOptions solver;
};

/// Copy of `base` with kappa U0 and V0 chosen so that the lowest-order
/// pseudopotential gives w_r = omega_r and w_z = ratio * omega_r.
TrapParams trap_for_ratio(const TrapParams& base, double omega_r, double ratio);

/// True when the equilibrium of n ions is planar and its lowest axial mode,
/// with or without micromotion averaging, has w^2 above the soft-mode floor.
bool is_planar_stable(const TrapParams& p, std::size_t n,
                      bool include_micromotion, const ScanOptions& options = {});

/// Bisects w_z / w_r at fixed w_r for the point where the zig-zag mode of the
/// planar crystal goes soft. Throws BracketFailure when the initial bracket
/// does not straddle the transition.
double critical_anisotropy(std::size_t n, double omega_r,
                           bool include_micromotion, const TrapParams& base,
                           const ScanOptions& options = {});

/// Runs critical_anisotropy over every (n, flag) pair on `options.jobs`
/// worker threads. Points come back ordered by flag (off first) and then by
/// the order of `ns`, independent of scheduling.
StabilityBoundary scan_boundary(const std::vector<std::size_t>& ns,
                                double omega_r, MicromotionMode mode,
                                const TrapParams& base,
                                const ScanOptions& options = {});

/// Needs at least four points sharing one micromotion flag.
PowerLawFit fit_boundary_powerlaw(const std::vector<BoundaryPoint>& points);

/// Subset of a boundary with the given flag.
std::vector<BoundaryPoint> select_points(const StabilityBoundary& b,
                                         bool micromotion_included);

}  // namespace iontrap2d
