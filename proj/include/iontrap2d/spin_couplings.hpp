#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "iontrap2d/constants.hpp"
#include "iontrap2d/crystal_solver.hpp"
#include "iontrap2d/normal_modes.hpp"

namespace iontrap2d {

/// Raman wavevector difference of two 355 nm beams crossing at 90 degrees.
inline constexpr double kDefaultWavevectorDifference =
    std::numbers::sqrt2 * kTwoPi / 355e-9;

/// Spin-dependent force drive.
struct DriveParams {
  double carrier_rabi = 0.0;     // Omega [rad/s]
  double wavevector_diff = 0.0;  // Delta k [1/m]
  double detuning = 0.0;         // mu [rad/s]
  double ion_mass = 0.0;         // [kg]
  /// Minimum |mu - w_m| accepted by coupling_matrix [rad/s].
  double resonance_guard = kTwoPi * 5e3;
};

/// Recoil frequency hbar dk^2 / 2m [rad/s].
double recoil_frequency(double wavevector_diff, double ion_mass);

/// Ising couplings J_ij [rad/s] between the spins listed in `ions`.
struct CouplingMatrix {
  Eigen::MatrixXd J;
  DriveParams drive;
  std::vector<std::size_t> ions;  // crystal index of each row
  std::string geometry = "full";

  std::size_t count() const { return static_cast<std::size_t>(J.rows()); }
};

/// J_ij = Omega^2 R sum_m b_im b_jm / (mu^2 - w_m^2), summed over modes in
/// ascending index order. Throws ResonantDetuning when mu sits within the
/// guard of any mode, InvalidArgument for non-positive drive fields.
CouplingMatrix coupling_matrix(const ModeSpectrum& s, const DriveParams& d);

/// mu = w_com + 3 Omega sqrt(R / w_z).
double recommended_detuning(double omega_com, double carrier_rabi,
                            double wavevector_diff, double ion_mass,
                            double omega_z);

enum class RangeReference { EdgeSpin, AllPairs };

struct RangeFit {
  double exponent = 0.0;
  double standard_error = 0.0;
  std::size_t pairs = 0;
  std::size_t bins = 0;
};

/// Fits |J| ~ r^-alpha. Pairs are grouped into geometric distance bins
/// (`bins_per_octave` per factor of two) and the bin means of log|J| are
/// regressed on the bin means of log r. The edge spin is the participating
/// ion farthest from the trap axis. Throws InsufficientPairs when fewer than
/// three bins are populated.
RangeFit fit_interaction_range(const CouplingMatrix& c,
                               const Positions& positions,
                               RangeReference reference = RangeReference::EdgeSpin,
                               int bins_per_octave = 4);

enum class LatticeGeometry { Kagome, Honeycomb, Rectangular, Ladder, Custom };

std::string_view to_string(LatticeGeometry g);
std::optional<LatticeGeometry> parse_geometry(std::string_view s);

struct LatticeMask {
  LatticeGeometry geometry = LatticeGeometry::Custom;
  std::vector<std::size_t> participating;  // ascending
  std::vector<std::size_t> hidden;         // ascending
};

/// Integer coordinates (n1, n2) of each ion on the triangular lattice spanned
/// by the bonds of the ion closest to the axis. Coordinates propagate bond by
/// bond; a bond matches a lattice vector when it is within `tolerance` times
/// the local spacing. Unmatched ions have no coordinates.
std::vector<std::optional<std::pair<int, int>>> triangular_lattice_indices(
    const Positions& positions, double tolerance = 0.3);

/// Sublattice pattern on the crystal: kagome hides one site in four,
/// honeycomb one in three, rectangular every other row, ladder every third
/// row. Ions without lattice coordinates are hidden.
LatticeMask make_lattice_mask(const Positions& positions, LatticeGeometry g,
                              double tolerance = 0.3);

/// Custom mask over n ions. Throws IndexOutOfRange for indices >= n.
LatticeMask custom_mask(std::size_t n, std::vector<std::size_t> participating);

/// Restricts the couplings to the participating ions of the mask, whose
/// indices refer to rows of `c`.
CouplingMatrix apply_mask(const CouplingMatrix& c, const LatticeMask& m);

inline constexpr std::size_t kMaxHamiltonianSpins = 12;

/// H = sum_{i<j} J_ij X_i X_j + B sum_i Y_i in the 2^N computational basis.
/// Spin 0 is the most significant bit of the basis index. Throws TooLarge
/// beyond kMaxHamiltonianSpins.
Eigen::MatrixXcd build_ising_hamiltonian(const CouplingMatrix& c,
                                         double transverse_field);

}  // namespace iontrap2d
