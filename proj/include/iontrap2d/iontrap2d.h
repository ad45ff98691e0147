#ifndef IONTRAP2D_IONTRAP2D_H_
#define IONTRAP2D_IONTRAP2D_H_

#include <stddef.h>

#if defined(_WIN32)
#define IT2D_API __declspec(dllexport)
#else
#define IT2D_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. Every fallible call returns one; the message of the most
   recent failure on the calling thread is available from it2d_last_error. */
typedef enum it2d_status {
  IT2D_OK = 0,
  IT2D_INVALID_ARGUMENT = 1,
  IT2D_INVALID_PARAMS = 2,
  IT2D_NEGATIVE_RADIAL_STIFFNESS = 3,
  IT2D_NO_CONVERGENCE = 4,
  IT2D_PLANARITY_LOST = 5,
  IT2D_DEGENERATE_GEOMETRY = 6,
  IT2D_MISMATCHED_N = 7,
  IT2D_BRACKET_FAILURE = 8,
  IT2D_INSUFFICIENT_POINTS = 9,
  IT2D_RESONANT_DETUNING = 10,
  IT2D_INSUFFICIENT_PAIRS = 11,
  IT2D_INDEX_OUT_OF_RANGE = 12,
  IT2D_TOO_LARGE = 13,
  IT2D_CONFIG_ERROR = 14,
  IT2D_IO_ERROR = 15,
  IT2D_INTERNAL_ERROR = 16
} it2d_status;

typedef enum it2d_micromotion {
  IT2D_MICROMOTION_OFF = 0,
  IT2D_MICROMOTION_ON = 1,
  IT2D_MICROMOTION_BOTH = 2
} it2d_micromotion;

/* Opaque handles, released with the matching *_free function. */
typedef struct it2d_config it2d_config;
typedef struct it2d_crystal it2d_crystal;
typedef struct it2d_spectrum it2d_spectrum;
typedef struct it2d_boundary it2d_boundary;
typedef struct it2d_couplings it2d_couplings;
typedef struct it2d_mask it2d_mask;

/* Frequencies are angular [rad/s]; lengths are meters. */
typedef struct it2d_trap_summary {
  double q;
  double omega_x;
  double omega_y;
  double omega_z;
  double omega_r;
  size_t max_resolvable_ions;
} it2d_trap_summary;

typedef struct it2d_crystal_summary {
  size_t ions;
  double mean_spacing;
  double extent;
  double max_micromotion;
  double mean_shift; /* valid when has_mean_shift is nonzero */
  int has_mean_shift;
  double residual;
  int planar;
} it2d_crystal_summary;

IT2D_API const char* it2d_version(void);
IT2D_API const char* it2d_last_error(void);
IT2D_API const char* it2d_status_name(it2d_status status);

/* Configuration */
IT2D_API it2d_status it2d_config_load(const char* path, it2d_config** out);
IT2D_API it2d_status it2d_config_parse(const char* text, it2d_config** out);
IT2D_API it2d_status it2d_config_set(it2d_config* config, const char* key,
                                     const char* value);
/* Re-checks the trap parameters after overrides. */
IT2D_API it2d_status it2d_config_validate(const it2d_config* config);
IT2D_API const char* it2d_config_hash(const it2d_config* config);
IT2D_API it2d_micromotion it2d_config_micromotion(const it2d_config* config);
IT2D_API size_t it2d_config_ions(const it2d_config* config);
/* Nonzero when a lattice mask is configured. */
IT2D_API int it2d_config_has_mask(const it2d_config* config);
/* Nonzero when a Hamiltonian export is wanted for the given spin count. */
IT2D_API int it2d_config_wants_hamiltonian(const it2d_config* config,
                                          size_t spins);
IT2D_API void it2d_config_free(it2d_config* config);

IT2D_API it2d_status it2d_trap_summarize(const it2d_config* config,
                                        it2d_trap_summary* out);

/* Crystals */
IT2D_API it2d_status it2d_crystal_solve_pseudo(const it2d_config* config,
                                              it2d_crystal** out);
/* Harmonic-balance micromotion solution started from a pseudopotential
   crystal. */
IT2D_API it2d_status it2d_crystal_solve_micromotion(const it2d_config* config,
                                                   const it2d_crystal* pseudo,
                                                   it2d_crystal** out);
IT2D_API it2d_status it2d_crystal_read(const char* path, it2d_crystal** out);
IT2D_API it2d_status it2d_crystal_write(const it2d_crystal* crystal,
                                       const it2d_config* config,
                                       const char* path);
IT2D_API size_t it2d_crystal_count(const it2d_crystal* crystal);
/* Row-major (x, y, z) average positions; len must be at least 3 * count. */
IT2D_API it2d_status it2d_crystal_positions(const it2d_crystal* crystal,
                                           double* xyz, size_t len);
/* reference may be NULL; when given, mean_shift compares against it. */
IT2D_API it2d_status it2d_crystal_summarize(const it2d_crystal* crystal,
                                           const it2d_crystal* reference,
                                           it2d_crystal_summary* out);
IT2D_API void it2d_crystal_free(it2d_crystal* crystal);

/* Axial mode spectra */
IT2D_API it2d_status it2d_spectrum_compute(const it2d_config* config,
                                          const it2d_crystal* crystal,
                                          int include_micromotion,
                                          it2d_spectrum** out);
IT2D_API it2d_status it2d_spectrum_read(const char* sidecar_path,
                                       it2d_spectrum** out);
IT2D_API it2d_status it2d_spectrum_write(const it2d_spectrum* spectrum,
                                        const it2d_config* config,
                                        const char* csv_path,
                                        const char* sidecar_path);
IT2D_API it2d_status it2d_mode_shifts_write(const it2d_spectrum* without,
                                           const it2d_spectrum* with_mm,
                                           const it2d_config* config,
                                           const char* csv_path);
IT2D_API size_t it2d_spectrum_count(const it2d_spectrum* spectrum);
/* Descending; imaginary modes are reported as negative values. */
IT2D_API it2d_status it2d_spectrum_frequencies(const it2d_spectrum* spectrum,
                                              double* omega, size_t len);
IT2D_API size_t it2d_spectrum_unstable_modes(const it2d_spectrum* spectrum);
IT2D_API int it2d_spectrum_micromotion(const it2d_spectrum* spectrum);
IT2D_API void it2d_spectrum_free(it2d_spectrum* spectrum);

/* Stability boundary */
IT2D_API it2d_status it2d_planar_stable(const it2d_config* config,
                                       int include_micromotion, int* stable);
IT2D_API it2d_status it2d_boundary_scan(const it2d_config* config,
                                       it2d_boundary** out);
IT2D_API size_t it2d_boundary_count(const it2d_boundary* boundary);
IT2D_API it2d_status it2d_boundary_point(const it2d_boundary* boundary,
                                        size_t index, size_t* ions,
                                        double* critical_ratio,
                                        int* micromotion);
IT2D_API it2d_status it2d_boundary_write(const it2d_boundary* boundary,
                                        const it2d_config* config,
                                        const char* csv_path);
IT2D_API it2d_status it2d_boundary_fit(const it2d_boundary* boundary,
                                      int micromotion, double* prefactor,
                                      double* exponent, double* stderr_exp);
IT2D_API it2d_status it2d_boundary_write_fit(const it2d_boundary* boundary,
                                            int micromotion,
                                            const it2d_config* config,
                                            const char* json_path);
IT2D_API void it2d_boundary_free(it2d_boundary* boundary);

/* Spin-spin couplings */
IT2D_API it2d_status it2d_couplings_compute(const it2d_config* config,
                                           const it2d_spectrum* spectrum,
                                           it2d_couplings** out);
IT2D_API size_t it2d_couplings_count(const it2d_couplings* couplings);
/* Row-major J [rad/s]; len must be at least count * count. */
IT2D_API it2d_status it2d_couplings_matrix(const it2d_couplings* couplings,
                                          double* j, size_t len);
IT2D_API double it2d_couplings_detuning(const it2d_couplings* couplings);
IT2D_API it2d_status it2d_couplings_write(const it2d_couplings* couplings,
                                         const it2d_config* config,
                                         const char* csv_path);
IT2D_API it2d_status it2d_couplings_fit_range(const it2d_couplings* couplings,
                                             const it2d_crystal* crystal,
                                             const it2d_config* config,
                                             double* alpha, double* stderr_alpha);
IT2D_API it2d_status it2d_couplings_write_range_fit(
    const it2d_couplings* couplings, const it2d_crystal* crystal,
    const it2d_config* config, const char* json_path);
IT2D_API it2d_status it2d_couplings_write_hamiltonian(
    const it2d_couplings* couplings, const it2d_config* config,
    const char* path);
IT2D_API void it2d_couplings_free(it2d_couplings* couplings);

/* Lattice masks. it2d_mask_create uses the config's mask geometry; it fails
   with IT2D_CONFIG_ERROR when the config has mask = none. */
IT2D_API it2d_status it2d_mask_create(const it2d_config* config,
                                     const it2d_crystal* crystal,
                                     it2d_mask** out);
IT2D_API size_t it2d_mask_participating(const it2d_mask* mask);
IT2D_API const char* it2d_mask_geometry(const it2d_mask* mask);
IT2D_API it2d_status it2d_mask_write(const it2d_mask* mask,
                                    const it2d_config* config,
                                    const char* json_path);
IT2D_API it2d_status it2d_couplings_apply_mask(const it2d_couplings* couplings,
                                              const it2d_mask* mask,
                                              it2d_couplings** out);
IT2D_API void it2d_mask_free(it2d_mask* mask);

#ifdef __cplusplus
}
#endif

#endif /* IONTRAP2D_IONTRAP2D_H_ */
