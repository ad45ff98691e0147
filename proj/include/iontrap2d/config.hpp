#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "iontrap2d/crystal_solver.hpp"
#include "iontrap2d/spin_couplings.hpp"
#include "iontrap2d/stability_scanner.hpp"
#include "iontrap2d/trap_model.hpp"

namespace iontrap2d {

enum class HamiltonianExport { Auto, On, Off };

/// Everything a pipeline run needs. Values are SI; the text form uses the
/// unit-suffixed keys listed in config.cpp.
struct RunConfig {
  TrapParams trap = reference_blade_trap();
  std::size_t ions = 100;
  std::uint64_t seed = 1;
  MicromotionMode micromotion = MicromotionMode::Both;
  SolverOptions solver;

  std::vector<std::size_t> scan_ions{5, 10, 20, 40, 80};
  double scan_omega_r = 0.0;  // [rad/s]
  double scan_tolerance = 1e-3;
  int jobs = 1;

  double carrier_rabi = 0.0;  // [rad/s]
  double wavevector_diff = kDefaultWavevectorDifference;
  std::optional<double> detuning_offset;  // from the COM mode [rad/s]
  double resonance_guard = 0.0;           // [rad/s]
  double transverse_field = 0.0;          // [rad/s]
  std::optional<LatticeGeometry> mask;
  std::vector<std::size_t> mask_ions;
  RangeReference range_reference = RangeReference::EdgeSpin;
  HamiltonianExport hamiltonian = HamiltonianExport::Auto;

  RunConfig();

  /// Sorted `key = value` listing of every setting that affects results.
  std::string canonical() const;
  /// FNV-1a of canonical(), 16 hex digits.
  std::string hash() const;
  ScanOptions scan_options() const;
};

/// Applies one `key = value` setting. Throws Error(ConfigError) for unknown
/// keys and malformed or out-of-range values.
void set_config_value(RunConfig& c, std::string_view key,
                      std::string_view value);

/// Parses `key = value` lines; `#` starts a comment. Diagnostics carry the
/// 1-based line number.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Keys accepted by set_config_value, in canonical order.
std::vector<std::string> config_keys();

}  // namespace iontrap2d
