#include "iontrap2d/iontrap2d.h"

#include <exception>
#include <new>
#include <string>

#include "iontrap2d/config.hpp"
#include "iontrap2d/error.hpp"
#include "iontrap2d/io.hpp"

using namespace iontrap2d;

struct it2d_config {
  RunConfig cfg;
  std::string hash;
};
struct it2d_crystal {
  IonCrystal crystal;
};
struct it2d_spectrum {
  ModeSpectrum spectrum;
};
struct it2d_boundary {
  StabilityBoundary boundary;
};
struct it2d_couplings {
  CouplingMatrix couplings;
  double omega_com = 0.0;
};
struct it2d_mask {
  LatticeMask mask;
  std::string geometry;
};

namespace {

thread_local std::string g_last_error;

it2d_status status_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return IT2D_INVALID_ARGUMENT;
    case ErrorCode::InvalidParams: return IT2D_INVALID_PARAMS;
    case ErrorCode::NegativeRadialStiffness: return IT2D_NEGATIVE_RADIAL_STIFFNESS;
    case ErrorCode::NoConvergence: return IT2D_NO_CONVERGENCE;
    case ErrorCode::PlanarityLost: return IT2D_PLANARITY_LOST;
    case ErrorCode::DegenerateGeometry: return IT2D_DEGENERATE_GEOMETRY;
    case ErrorCode::MismatchedN: return IT2D_MISMATCHED_N;
    case ErrorCode::BracketFailure: return IT2D_BRACKET_FAILURE;
    case ErrorCode::InsufficientPoints: return IT2D_INSUFFICIENT_POINTS;
    case ErrorCode::ResonantDetuning: return IT2D_RESONANT_DETUNING;
    case ErrorCode::InsufficientPairs: return IT2D_INSUFFICIENT_PAIRS;
    case ErrorCode::IndexOutOfRange: return IT2D_INDEX_OUT_OF_RANGE;
    case ErrorCode::TooLarge: return IT2D_TOO_LARGE;
    case ErrorCode::ConfigError: return IT2D_CONFIG_ERROR;
    case ErrorCode::IoError: return IT2D_IO_ERROR;
  }
  return IT2D_INTERNAL_ERROR;
}

template <typename F>
it2d_status guarded(F&& body) noexcept {
  try {
    body();
    g_last_error.clear();
    return IT2D_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return IT2D_INTERNAL_ERROR;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return IT2D_INTERNAL_ERROR;
  } catch (...) {
    g_last_error = "unknown failure";
    return IT2D_INTERNAL_ERROR;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::InvalidArgument, what);
}

Provenance provenance(const it2d_config* c) {
  return {toolkit_version(), c->hash};
}

template <typename Handle, typename Value>
void emit(Handle** out, Value&& value) {
  *out = new Handle{std::forward<Value>(value)};
}

}  // namespace

extern "C" {

const char* it2d_version(void) { return toolkit_version(); }

const char* it2d_last_error(void) { return g_last_error.c_str(); }

const char* it2d_status_name(it2d_status status) {
  switch (status) {
    case IT2D_OK: return "ok";
    case IT2D_INVALID_ARGUMENT: return "invalid argument";
    case IT2D_INVALID_PARAMS: return "invalid trap parameters";
    case IT2D_NEGATIVE_RADIAL_STIFFNESS: return "negative radial stiffness";
    case IT2D_NO_CONVERGENCE: return "no convergence";
    case IT2D_PLANARITY_LOST: return "planarity lost";
    case IT2D_DEGENERATE_GEOMETRY: return "degenerate geometry";
    case IT2D_MISMATCHED_N: return "mismatched ion count";
    case IT2D_BRACKET_FAILURE: return "bracket failure";
    case IT2D_INSUFFICIENT_POINTS: return "insufficient points";
    case IT2D_RESONANT_DETUNING: return "resonant detuning";
    case IT2D_INSUFFICIENT_PAIRS: return "insufficient pairs";
    case IT2D_INDEX_OUT_OF_RANGE: return "index out of range";
    case IT2D_TOO_LARGE: return "too large";
    case IT2D_CONFIG_ERROR: return "config error";
    case IT2D_IO_ERROR: return "i/o error";
    case IT2D_INTERNAL_ERROR: return "internal error";
  }
  return "unknown status";
}

it2d_status it2d_config_load(const char* path, it2d_config** out) {
  return guarded([&] {
    require(path && out, "null argument");
    RunConfig cfg = load_config(path);
    std::string hash = cfg.hash();
    *out = new it2d_config{std::move(cfg), std::move(hash)};
  });
}

it2d_status it2d_config_parse(const char* text, it2d_config** out) {
  return guarded([&] {
    require(text && out, "null argument");
    RunConfig cfg = parse_config(text);
    std::string hash = cfg.hash();
    *out = new it2d_config{std::move(cfg), std::move(hash)};
  });
}

it2d_status it2d_config_set(it2d_config* config, const char* key,
                            const char* value) {
  return guarded([&] {
    require(config && key && value, "null argument");
    set_config_value(config->cfg, key, value);
    config->hash = config->cfg.hash();
  });
}

it2d_status it2d_config_validate(const it2d_config* config) {
  return guarded([&] {
    require(config, "null argument");
    try {
      validate(config->cfg.trap);
    } catch (const Error& e) {
      throw Error(ErrorCode::ConfigError, e.what());
    }
  });
}

const char* it2d_config_hash(const it2d_config* config) {
  return config ? config->hash.c_str() : "";
}

it2d_micromotion it2d_config_micromotion(const it2d_config* config) {
  if (!config) return IT2D_MICROMOTION_BOTH;
  switch (config->cfg.micromotion) {
    case MicromotionMode::Off: return IT2D_MICROMOTION_OFF;
    case MicromotionMode::On: return IT2D_MICROMOTION_ON;
    case MicromotionMode::Both: break;
  }
  return IT2D_MICROMOTION_BOTH;
}

size_t it2d_config_ions(const it2d_config* config) {
  return config ? config->cfg.ions : 0;
}

int it2d_config_has_mask(const it2d_config* config) {
  return config && config->cfg.mask ? 1 : 0;
}

int it2d_config_wants_hamiltonian(const it2d_config* config, size_t spins) {
  if (!config) return 0;
  switch (config->cfg.hamiltonian) {
    case HamiltonianExport::On: return 1;
    case HamiltonianExport::Off: return 0;
    case HamiltonianExport::Auto: break;
  }
  return spins <= kMaxHamiltonianSpins ? 1 : 0;
}

void it2d_config_free(it2d_config* config) { delete config; }

it2d_status it2d_trap_summarize(const it2d_config* config,
                                it2d_trap_summary* out) {
  return guarded([&] {
    require(config && out, "null argument");
    const TrapParams& p = config->cfg.trap;
    validate(p);
    const PseudoFrequencies f = pseudo_frequencies(p);
    out->q = mathieu_q(p);
    out->omega_x = f.omega_x;
    out->omega_y = f.omega_y;
    out->omega_z = f.omega_z;
    out->omega_r = f.omega_r();
    out->max_resolvable_ions = max_resolvable_ions(out->q);
  });
}

it2d_status it2d_crystal_solve_pseudo(const it2d_config* config,
                                      it2d_crystal** out) {
  return guarded([&] {
    require(config && out, "null argument");
    const RunConfig& c = config->cfg;
    validate(c.trap);
    const Equilibrium eq =
        solve_pseudo_equilibrium(pseudo_frequencies(c.trap), species_of(c.trap),
                                 c.ions, c.seed, c.solver);
    IonCrystal crystal = static_crystal(c.trap, eq.positions);
    crystal.residual = eq.residual;
    crystal.energy = eq.energy;
    emit(out, std::move(crystal));
  });
}

it2d_status it2d_crystal_solve_micromotion(const it2d_config* config,
                                           const it2d_crystal* pseudo,
                                           it2d_crystal** out) {
  return guarded([&] {
    require(config && pseudo && out, "null argument");
    validate(config->cfg.trap);
    emit(out, solve_micromotion(config->cfg.trap, pseudo->crystal.avg_positions,
                                config->cfg.solver));
  });
}

it2d_status it2d_crystal_read(const char* path, it2d_crystal** out) {
  return guarded([&] {
    require(path && out, "null argument");
    emit(out, parse_crystal_json(read_text(path)));
  });
}

it2d_status it2d_crystal_write(const it2d_crystal* crystal,
                               const it2d_config* config, const char* path) {
  return guarded([&] {
    require(crystal && config && path, "null argument");
    write_text(path, crystal_json(crystal->crystal, provenance(config)));
  });
}

size_t it2d_crystal_count(const it2d_crystal* crystal) {
  return crystal ? crystal->crystal.count() : 0;
}

it2d_status it2d_crystal_positions(const it2d_crystal* crystal, double* xyz,
                                   size_t len) {
  return guarded([&] {
    require(crystal && xyz, "null argument");
    const Positions& p = crystal->crystal.avg_positions;
    require(len >= 3 * static_cast<size_t>(p.rows()), "buffer too small");
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
      for (Eigen::Index k = 0; k < 3; ++k) xyz[3 * i + k] = p(i, k);
    }
  });
}

it2d_status it2d_crystal_summarize(const it2d_crystal* crystal,
                                   const it2d_crystal* reference,
                                   it2d_crystal_summary* out) {
  return guarded([&] {
    require(crystal && out, "null argument");
    const IonCrystal& c = crystal->crystal;
    *out = it2d_crystal_summary{};
    out->ions = c.count();
    out->mean_spacing =
        c.count() > 1 ? mean_nearest_neighbor_distance(c.avg_positions) : 0.0;
    out->extent = crystal_extent(c);
    out->max_micromotion = max_micromotion_amplitude(c);
    out->residual = c.residual;
    out->planar = is_planar(c.avg_positions) ? 1 : 0;
    if (reference) {
      if (reference->crystal.count() != c.count()) {
        throw Error(ErrorCode::MismatchedN,
                    "reference crystal has a different ion count");
      }
      out->mean_shift =
          mean_displacement(c.avg_positions, reference->crystal.avg_positions);
      out->has_mean_shift = 1;
    }
  });
}

void it2d_crystal_free(it2d_crystal* crystal) { delete crystal; }

it2d_status it2d_spectrum_compute(const it2d_config* config,
                                  const it2d_crystal* crystal,
                                  int include_micromotion, it2d_spectrum** out) {
  return guarded([&] {
    require(config && crystal && out, "null argument");
    emit(out, mode_spectrum(axial_hessian(crystal->crystal,
                                          include_micromotion != 0,
                                          config->cfg.solver.quadrature_points)));
  });
}

it2d_status it2d_spectrum_read(const char* sidecar_path, it2d_spectrum** out) {
  return guarded([&] {
    require(sidecar_path && out, "null argument");
    emit(out, parse_spectrum_json(read_text(sidecar_path)));
  });
}

it2d_status it2d_spectrum_write(const it2d_spectrum* spectrum,
                                const it2d_config* config, const char* csv_path,
                                const char* sidecar_path) {
  return guarded([&] {
    require(spectrum && config && csv_path && sidecar_path, "null argument");
    const Provenance p = provenance(config);
    write_text(csv_path, spectrum_csv(spectrum->spectrum, p));
    write_text(sidecar_path, spectrum_json(spectrum->spectrum, p));
  });
}

it2d_status it2d_mode_shifts_write(const it2d_spectrum* without,
                                   const it2d_spectrum* with_mm,
                                   const it2d_config* config,
                                   const char* csv_path) {
  return guarded([&] {
    require(without && with_mm && config && csv_path, "null argument");
    write_text(csv_path, mode_shift_csv(without->spectrum, with_mm->spectrum,
                                        provenance(config)));
  });
}

size_t it2d_spectrum_count(const it2d_spectrum* spectrum) {
  return spectrum ? spectrum->spectrum.count() : 0;
}

it2d_status it2d_spectrum_frequencies(const it2d_spectrum* spectrum,
                                      double* omega, size_t len) {
  return guarded([&] {
    require(spectrum && omega, "null argument");
    const Eigen::VectorXd f = spectrum->spectrum.signed_frequencies();
    require(len >= static_cast<size_t>(f.size()), "buffer too small");
    for (Eigen::Index m = 0; m < f.size(); ++m) omega[m] = f[m];
  });
}

size_t it2d_spectrum_unstable_modes(const it2d_spectrum* spectrum) {
  if (!spectrum) return 0;
  size_t count = 0;
  for (Eigen::Index m = 0; m < spectrum->spectrum.eigenvalues.size(); ++m) {
    if (spectrum->spectrum.is_imaginary(m)) ++count;
  }
  return count;
}

int it2d_spectrum_micromotion(const it2d_spectrum* spectrum) {
  return spectrum && spectrum->spectrum.micromotion_included ? 1 : 0;
}

void it2d_spectrum_free(it2d_spectrum* spectrum) { delete spectrum; }

it2d_status it2d_planar_stable(const it2d_config* config,
                               int include_micromotion, int* stable) {
  return guarded([&] {
    require(config && stable, "null argument");
    *stable = is_planar_stable(config->cfg.trap, config->cfg.ions,
                               include_micromotion != 0,
                               config->cfg.scan_options())
                  ? 1
                  : 0;
  });
}

it2d_status it2d_boundary_scan(const it2d_config* config, it2d_boundary** out) {
  return guarded([&] {
    require(config && out, "null argument");
    const RunConfig& c = config->cfg;
    emit(out, scan_boundary(c.scan_ions, c.scan_omega_r, c.micromotion, c.trap,
                            c.scan_options()));
  });
}

size_t it2d_boundary_count(const it2d_boundary* boundary) {
  return boundary ? boundary->boundary.points.size() : 0;
}

it2d_status it2d_boundary_point(const it2d_boundary* boundary, size_t index,
                                size_t* ions, double* critical_ratio,
                                int* micromotion) {
  return guarded([&] {
    require(boundary, "null argument");
    if (index >= boundary->boundary.points.size()) {
      throw Error(ErrorCode::IndexOutOfRange, "boundary point index");
    }
    const BoundaryPoint& pt = boundary->boundary.points[index];
    if (ions) *ions = pt.n;
    if (critical_ratio) *critical_ratio = pt.critical_ratio;
    if (micromotion) *micromotion = pt.micromotion_included ? 1 : 0;
  });
}

it2d_status it2d_boundary_write(const it2d_boundary* boundary,
                                const it2d_config* config,
                                const char* csv_path) {
  return guarded([&] {
    require(boundary && config && csv_path, "null argument");
    write_text(csv_path, boundary_csv(boundary->boundary, provenance(config)));
  });
}

it2d_status it2d_boundary_fit(const it2d_boundary* boundary, int micromotion,
                              double* prefactor, double* exponent,
                              double* stderr_exp) {
  return guarded([&] {
    require(boundary, "null argument");
    const PowerLawFit f =
        fit_boundary_powerlaw(select_points(boundary->boundary, micromotion != 0));
    if (prefactor) *prefactor = f.prefactor;
    if (exponent) *exponent = f.exponent;
    if (stderr_exp) *stderr_exp = f.standard_error;
  });
}

it2d_status it2d_boundary_write_fit(const it2d_boundary* boundary,
                                    int micromotion, const it2d_config* config,
                                    const char* json_path) {
  return guarded([&] {
    require(boundary && config && json_path, "null argument");
    const PowerLawFit f =
        fit_boundary_powerlaw(select_points(boundary->boundary, micromotion != 0));
    write_text(json_path, boundary_fit_json(f, provenance(config)));
  });
}

void it2d_boundary_free(it2d_boundary* boundary) { delete boundary; }

it2d_status it2d_couplings_compute(const it2d_config* config,
                                   const it2d_spectrum* spectrum,
                                   it2d_couplings** out) {
  return guarded([&] {
    require(config && spectrum && out, "null argument");
    const RunConfig& c = config->cfg;
    const ModeSpectrum& s = spectrum->spectrum;
    if (s.count() == 0) throw Error(ErrorCode::InvalidArgument, "empty spectrum");
    const Eigen::Index com = s.com_index().value_or(0);
    const double omega_com = s.frequency(com);
    DriveParams d;
    d.carrier_rabi = c.carrier_rabi;
    d.wavevector_diff = c.wavevector_diff;
    d.ion_mass = c.trap.ion_mass;
    d.resonance_guard = c.resonance_guard;
    d.detuning = c.detuning_offset
                     ? omega_com + *c.detuning_offset
                     : recommended_detuning(omega_com, c.carrier_rabi,
                                            c.wavevector_diff, c.trap.ion_mass,
                                            pseudo_frequencies(c.trap).omega_z);
    *out = new it2d_couplings{coupling_matrix(s, d), omega_com};
  });
}

size_t it2d_couplings_count(const it2d_couplings* couplings) {
  return couplings ? couplings->couplings.count() : 0;
}

it2d_status it2d_couplings_matrix(const it2d_couplings* couplings, double* j,
                                  size_t len) {
  return guarded([&] {
    require(couplings && j, "null argument");
    const Eigen::MatrixXd& m = couplings->couplings.J;
    require(len >= static_cast<size_t>(m.size()), "buffer too small");
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) j[r * m.cols() + c] = m(r, c);
    }
  });
}

double it2d_couplings_detuning(const it2d_couplings* couplings) {
  return couplings ? couplings->couplings.drive.detuning : 0.0;
}

it2d_status it2d_couplings_write(const it2d_couplings* couplings,
                                 const it2d_config* config,
                                 const char* csv_path) {
  return guarded([&] {
    require(couplings && config && csv_path, "null argument");
    write_text(csv_path, coupling_csv(couplings->couplings, provenance(config)));
  });
}

it2d_status it2d_couplings_fit_range(const it2d_couplings* couplings,
                                     const it2d_crystal* crystal,
                                     const it2d_config* config, double* alpha,
                                     double* stderr_alpha) {
  return guarded([&] {
    require(couplings && crystal && config, "null argument");
    const RangeFit f =
        fit_interaction_range(couplings->couplings, crystal->crystal.avg_positions,
                              config->cfg.range_reference);
    if (alpha) *alpha = f.exponent;
    if (stderr_alpha) *stderr_alpha = f.standard_error;
  });
}

it2d_status it2d_couplings_write_range_fit(const it2d_couplings* couplings,
                                           const it2d_crystal* crystal,
                                           const it2d_config* config,
                                           const char* json_path) {
  return guarded([&] {
    require(couplings && crystal && config && json_path, "null argument");
    const RangeFit f =
        fit_interaction_range(couplings->couplings, crystal->crystal.avg_positions,
                              config->cfg.range_reference);
    write_text(json_path,
               range_fit_json(f, config->cfg.range_reference,
                              couplings->couplings.drive.detuning,
                              couplings->omega_com, provenance(config)));
  });
}

it2d_status it2d_couplings_write_hamiltonian(const it2d_couplings* couplings,
                                             const it2d_config* config,
                                             const char* path) {
  return guarded([&] {
    require(couplings && config && path, "null argument");
    const Eigen::MatrixXcd h =
        build_ising_hamiltonian(couplings->couplings, config->cfg.transverse_field);
    write_text(path, hamiltonian_text(h, couplings->couplings.count(),
                                      provenance(config)));
  });
}

void it2d_couplings_free(it2d_couplings* couplings) { delete couplings; }

it2d_status it2d_mask_create(const it2d_config* config,
                             const it2d_crystal* crystal, it2d_mask** out) {
  return guarded([&] {
    require(config && crystal && out, "null argument");
    const RunConfig& c = config->cfg;
    if (!c.mask) throw Error(ErrorCode::ConfigError, "no mask configured");
    LatticeMask m = *c.mask == LatticeGeometry::Custom
                        ? custom_mask(crystal->crystal.count(), c.mask_ions)
                        : make_lattice_mask(crystal->crystal.avg_positions, *c.mask);
    std::string label(to_string(m.geometry));
    *out = new it2d_mask{std::move(m), std::move(label)};
  });
}

size_t it2d_mask_participating(const it2d_mask* mask) {
  return mask ? mask->mask.participating.size() : 0;
}

const char* it2d_mask_geometry(const it2d_mask* mask) {
  return mask ? mask->geometry.c_str() : "";
}

it2d_status it2d_mask_write(const it2d_mask* mask, const it2d_config* config,
                            const char* json_path) {
  return guarded([&] {
    require(mask && config && json_path, "null argument");
    write_text(json_path, mask_json(mask->mask, provenance(config)));
  });
}

it2d_status it2d_couplings_apply_mask(const it2d_couplings* couplings,
                                      const it2d_mask* mask,
                                      it2d_couplings** out) {
  return guarded([&] {
    require(couplings && mask && out, "null argument");
    *out = new it2d_couplings{apply_mask(couplings->couplings, mask->mask),
                              couplings->omega_com};
  });
}

void it2d_mask_free(it2d_mask* mask) { delete mask; }

}  // extern "C"
