#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <vector>

#include "iontrap2d/crystal_solver.hpp"
#include "iontrap2d/normal_modes.hpp"
#include "iontrap2d/spin_couplings.hpp"
#include "iontrap2d/stability_scanner.hpp"

namespace iontrap2d {

/// Tags stamped into every output file.
struct Provenance {
  std::string toolkit_version;
  std::string config_hash;
};

const char* toolkit_version() noexcept;

// Text encoders. Numbers use the shortest round-trip decimal form so equal
// inputs always produce equal bytes. CSV files start with `#` comment lines
// holding the provenance tags.

std::string crystal_json(const IonCrystal& c, const Provenance& p);
IonCrystal parse_crystal_json(const std::string& text);

/// mode_index,freq_MHz,is_com,micromotion_included; imaginary modes get a
/// negative frequency.
std::string spectrum_csv(const ModeSpectrum& s, const Provenance& p);
/// Sidecar with the exact eigenvalues and the eigenvector matrix (rows are
/// ions, columns are modes).
std::string spectrum_json(const ModeSpectrum& s, const Provenance& p);
ModeSpectrum parse_spectrum_json(const std::string& text);

std::string mode_shift_csv(const ModeSpectrum& without,
                           const ModeSpectrum& with_mm, const Provenance& p);

std::string boundary_csv(const StabilityBoundary& b, const Provenance& p);
std::string boundary_fit_json(const PowerLawFit& f, const Provenance& p);

/// Upper-triangle triples i,j,J_over_2pi_Hz with crystal ion indices.
std::string coupling_csv(const CouplingMatrix& c, const Provenance& p);
std::string range_fit_json(const RangeFit& f, RangeReference reference,
                           double detuning, double omega_com,
                           const Provenance& p);
std::string mask_json(const LatticeMask& m, const Provenance& p);

/// Dense complex matrix as text: `#` header lines, then one line per row of
/// space-separated `re im` pairs in rad/s.
std::string hamiltonian_text(const Eigen::MatrixXcd& h, std::size_t spins,
                             const Provenance& p);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace iontrap2d
