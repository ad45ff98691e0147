#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "iontrap2d/trap_model.hpp"

namespace iontrap2d {

/// Row i holds the (x, y, z) coordinates of ion i in meters.
using Positions = Eigen::MatrixX3d;
/// Row i holds an in-plane (x, y) vector of ion i in meters.
using PlanarVectors = Eigen::MatrixX2d;

struct IonSpecies {
  double mass = 0.0;    // [kg]
  double charge = 0.0;  // [C]
};

inline IonSpecies species_of(const TrapParams& p) {
  return {p.ion_mass, p.ion_charge};
}

struct SolverOptions {
  int restarts = 8;
  /// Max force component relative to the Coulomb force Q^2 / (4 pi eps0 d^2)
  /// at the mean nearest-neighbour distance d.
  double force_tolerance = 1e-6;
  /// Scaled harmonic-balance residual required by solve_micromotion.
  double harmonic_balance_tolerance = 1e-8;
  /// Time step in units of 1 / max(w_x, w_y, w_z).
  double time_step = 0.02;
  /// Annealing duration in units of 1 / w_r.
  double anneal_time = 60.0;
  int max_newton_iterations = 200;
  /// Trapezoid points per rf period for Coulomb Fourier projections.
  int quadrature_points = 32;
};

struct Equilibrium {
  Positions positions;
  double energy = 0.0;    // pseudopotential + Coulomb energy [J]
  double residual = 0.0;  // max force / characteristic Coulomb force
  int restart = 0;        // index of the restart that produced the minimum
};

/// Ion positions r(t) = r0 + r1 cos(Omega_t t) + r2 cos(2 Omega_t t).
struct IonCrystal {
  TrapParams params;
  double q = 0.0;
  Positions avg_positions;
  PlanarVectors mm_first;
  PlanarVectors mm_second;
  double residual = 0.0;
  double energy = 0.0;  // pseudopotential energy of avg_positions [J]

  std::size_t count() const {
    return static_cast<std::size_t>(avg_positions.rows());
  }
  bool has_micromotion() const {
    return mm_first.squaredNorm() + mm_second.squaredNorm() > 0.0;
  }
};

/// Lowest-energy configuration of n ions in the static pseudopotential, found
/// by annealed velocity-damped molecular dynamics from seeded random starts
/// and polished with Newton iterations. Planar configurations come back with
/// z exactly zero; if the plane is axially unstable the solver relaxes in 3D
/// and returns the buckled minimum.
Equilibrium solve_pseudo_equilibrium(const PseudoFrequencies& freqs,
                                     const IonSpecies& species, std::size_t n,
                                     std::uint64_t seed,
                                     const SolverOptions& options = {});

/// Same search restricted to the z = 0 plane; no axial stability check.
Equilibrium solve_planar_equilibrium(const PseudoFrequencies& freqs,
                                     const IonSpecies& species, std::size_t n,
                                     std::uint64_t seed,
                                     const SolverOptions& options = {});

/// Self-consistent harmonic balance for the full rf + dc + Coulomb equations
/// of motion, truncated at the second rf harmonic. `initial` must be a planar
/// pseudopotential equilibrium; throws PlanarityLost otherwise.
IonCrystal solve_micromotion(const TrapParams& p, const Positions& initial,
                             const SolverOptions& options = {});

/// Crystal with the given average positions and no micromotion.
IonCrystal static_crystal(const TrapParams& p, const Positions& positions);

double pseudo_energy(const PseudoFrequencies& freqs, const IonSpecies& species,
                     const Positions& positions);

/// Largest radial distance |(x, y)| of any ion from the trap axis.
double crystal_extent(const IonCrystal& c);
double crystal_extent(const Positions& positions);

double mean_nearest_neighbor_distance(const Positions& positions);

/// Number of neighbours within (1 + rel_tol) times each ion's own nearest
/// neighbour distance.
std::vector<int> neighbor_counts(const Positions& positions,
                                 double rel_tol = 0.15);

/// True when every |z| is below 1e-4 of the mean nearest-neighbour distance.
bool is_planar(const Positions& positions);

double max_micromotion_amplitude(const IonCrystal& c);

/// Mean of |a_i - b_i| over ions.
double mean_displacement(const Positions& a, const Positions& b);

/// Worst relative deviation of |r1| from (q/2) rho and of |r2| from
/// (q^2/32) rho, taken over ions whose radial distance rho exceeds 1e-3 of
/// the mean spacing. Ions closer to the axis are checked with an absolute
/// bound instead and count as deviation 0 when they satisfy it.
struct AmplitudeLawCheck {
  double first = 0.0;
  double second = 0.0;
};
AmplitudeLawCheck amplitude_law_deviation(const IonCrystal& c);

}  // namespace iontrap2d
