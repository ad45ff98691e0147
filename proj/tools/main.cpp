// Command-line front end. Talks to the toolkit only through the C API.
#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "iontrap2d/iontrap2d.h"

namespace fs = std::filesystem;

namespace {

constexpr double kTwoPi = 6.283185307179586;
constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitUnstable = 4;

int exit_code_for(it2d_status s) {
  switch (s) {
    case IT2D_OK: return kExitOk;
    case IT2D_INVALID_ARGUMENT:
    case IT2D_INVALID_PARAMS:
    case IT2D_NEGATIVE_RADIAL_STIFFNESS:
    case IT2D_CONFIG_ERROR:
    case IT2D_IO_ERROR:
    case IT2D_INDEX_OUT_OF_RANGE:
    case IT2D_INSUFFICIENT_POINTS:
    case IT2D_TOO_LARGE:
      return kExitConfig;
    case IT2D_PLANARITY_LOST: return kExitUnstable;
    default: return kExitNumerical;
  }
}

struct Failure : std::runtime_error {
  int code;
  Failure(int c, const std::string& m) : std::runtime_error(m), code(c) {}
};

void check(it2d_status s, const std::string& what) {
  if (s == IT2D_OK) return;
  throw Failure(exit_code_for(s), what + ": " + it2d_status_name(s) + ": " +
                                      it2d_last_error());
}

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using Config = std::unique_ptr<it2d_config, Deleter<it2d_config, it2d_config_free>>;
using Crystal =
    std::unique_ptr<it2d_crystal, Deleter<it2d_crystal, it2d_crystal_free>>;
using Spectrum =
    std::unique_ptr<it2d_spectrum, Deleter<it2d_spectrum, it2d_spectrum_free>>;
using Boundary =
    std::unique_ptr<it2d_boundary, Deleter<it2d_boundary, it2d_boundary_free>>;
using Couplings = std::unique_ptr<it2d_couplings,
                                  Deleter<it2d_couplings, it2d_couplings_free>>;
using Mask = std::unique_ptr<it2d_mask, Deleter<it2d_mask, it2d_mask_free>>;

struct Common {
  std::string config;
  std::string out = ".";
  std::optional<long long> seed;
  std::optional<int> jobs;
  std::optional<std::string> micromotion;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "run configuration file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", c.out, "output directory")->capture_default_str();
  cmd->add_option("--seed", c.seed, "random seed override")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--jobs", c.jobs, "worker threads")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--micromotion", c.micromotion, "micromotion treatment")
      ->check(CLI::IsMember({"on", "off", "both"}));
}

Config load(const Common& c) {
  it2d_config* raw = nullptr;
  check(it2d_config_load(c.config.c_str(), &raw), "config");
  Config cfg(raw);
  if (c.seed) {
    check(it2d_config_set(raw, "seed", std::to_string(*c.seed).c_str()), "--seed");
  }
  if (c.jobs) {
    check(it2d_config_set(raw, "jobs", std::to_string(*c.jobs).c_str()), "--jobs");
  }
  if (c.micromotion) {
    check(it2d_config_set(raw, "micromotion", c.micromotion->c_str()),
          "--micromotion");
  }
  check(it2d_config_validate(raw), "config");
  std::error_code ec;
  fs::create_directories(c.out, ec);
  if (ec) throw Failure(kExitConfig, "cannot create " + c.out + ": " + ec.message());
  return cfg;
}

std::string path_in(const Common& c, const std::string& name) {
  return (fs::path(c.out) / name).string();
}

std::vector<int> flags_of(const it2d_config* cfg) {
  switch (it2d_config_micromotion(cfg)) {
    case IT2D_MICROMOTION_OFF: return {0};
    case IT2D_MICROMOTION_ON: return {1};
    case IT2D_MICROMOTION_BOTH: break;
  }
  return {0, 1};
}

const char* tag(int mm) { return mm ? "on" : "off"; }

Crystal read_crystal(const std::string& path) {
  it2d_crystal* raw = nullptr;
  check(it2d_crystal_read(path.c_str(), &raw), "reading " + path);
  return Crystal(raw);
}

Spectrum read_spectrum(const std::string& path) {
  it2d_spectrum* raw = nullptr;
  check(it2d_spectrum_read(path.c_str(), &raw), "reading " + path);
  return Spectrum(raw);
}

int run_crystal(const Common& opt) {
  Config cfg = load(opt);
  it2d_trap_summary trap{};
  check(it2d_trap_summarize(cfg.get(), &trap), "trap");
  std::printf("trap: q %.5f  w_x/2pi %.4f MHz  w_y/2pi %.4f MHz  w_z/2pi %.4f MHz\n",
              trap.q, trap.omega_x / kTwoPi / 1e6,
              trap.omega_y / kTwoPi / 1e6,
              trap.omega_z / kTwoPi / 1e6);

  it2d_crystal* raw = nullptr;
  check(it2d_crystal_solve_pseudo(cfg.get(), &raw), "pseudopotential solve");
  Crystal pseudo(raw);
  check(it2d_crystal_write(pseudo.get(), cfg.get(),
                           path_in(opt, "crystal_pseudo.json").c_str()),
        "write");

  const bool want_mm = it2d_config_micromotion(cfg.get()) != IT2D_MICROMOTION_OFF;
  Crystal mm;
  if (want_mm) {
    raw = nullptr;
    check(it2d_crystal_solve_micromotion(cfg.get(), pseudo.get(), &raw),
          "micromotion solve");
    mm.reset(raw);
  }
  const it2d_crystal* final_crystal = want_mm ? mm.get() : pseudo.get();
  check(it2d_crystal_write(final_crystal, cfg.get(),
                           path_in(opt, "crystal.json").c_str()),
        "write");

  it2d_crystal_summary s{};
  check(it2d_crystal_summarize(final_crystal, want_mm ? pseudo.get() : nullptr, &s),
        "summary");
  std::printf("ions %zu\n", s.ions);
  std::printf("mean spacing %.4f um\n", s.mean_spacing * 1e6);
  std::printf("extent %.4f um\n", s.extent * 1e6);
  std::printf("max micromotion amplitude %.4f um\n", s.max_micromotion * 1e6);
  if (s.has_mean_shift) {
    std::printf("mean shift %.4f um\n", s.mean_shift * 1e6);
  } else {
    std::printf("mean shift n/a (micromotion off)\n");
  }
  std::printf("residual %.3e\n", s.residual);
  if (!s.planar) {
    std::fprintf(stderr, "crystal is not planar\n");
    return kExitUnstable;
  }
  return kExitOk;
}

int run_modes(const Common& opt, const std::string& crystal_path) {
  Config cfg = load(opt);
  const std::string in = crystal_path.empty() ? path_in(opt, "crystal.json") : crystal_path;
  Crystal crystal = read_crystal(in);

  std::vector<Spectrum> spectra;
  size_t unstable = 0;
  for (int mm : flags_of(cfg.get())) {
    it2d_spectrum* raw = nullptr;
    check(it2d_spectrum_compute(cfg.get(), crystal.get(), mm, &raw), "modes");
    spectra.emplace_back(raw);
    const std::string t = tag(mm);
    check(it2d_spectrum_write(raw, cfg.get(),
                              path_in(opt, "spectrum_" + t + ".csv").c_str(),
                              path_in(opt, "eigvec_" + t + ".json").c_str()),
          "write");
    std::vector<double> w(it2d_spectrum_count(raw));
    check(it2d_spectrum_frequencies(raw, w.data(), w.size()), "modes");
    std::printf("micromotion %s: %zu modes, highest %.6f MHz, lowest %.6f MHz\n",
                t.c_str(), w.size(), w.front() / kTwoPi / 1e6,
                w.back() / kTwoPi / 1e6);
    unstable += it2d_spectrum_unstable_modes(raw);
  }
  if (spectra.size() == 2) {
    check(it2d_mode_shifts_write(spectra[0].get(), spectra[1].get(), cfg.get(),
                                 path_in(opt, "mode_shifts.csv").c_str()),
          "write");
  }
  if (unstable > 0) {
    std::fprintf(stderr, "%zu imaginary-frequency modes\n", unstable);
    return kExitUnstable;
  }
  return kExitOk;
}

int run_stability(const Common& opt) {
  Config cfg = load(opt);
  it2d_boundary* raw = nullptr;
  check(it2d_boundary_scan(cfg.get(), &raw), "stability scan");
  Boundary b(raw);
  check(it2d_boundary_write(raw, cfg.get(), path_in(opt, "boundary.csv").c_str()),
        "write");
  for (size_t k = 0; k < it2d_boundary_count(raw); ++k) {
    size_t n = 0;
    double ratio = 0.0;
    int mm = 0;
    check(it2d_boundary_point(raw, k, &n, &ratio, &mm), "boundary");
    std::printf("N %zu  micromotion %s  critical w_z/w_r %.5f\n", n, tag(mm), ratio);
  }
  for (int mm : flags_of(cfg.get())) {
    double a = 0.0, p = 0.0, e = 0.0;
    const it2d_status s = it2d_boundary_fit(raw, mm, &a, &p, &e);
    if (s == IT2D_INSUFFICIENT_POINTS) {
      std::fprintf(stderr, "micromotion %s: too few points for a fit\n", tag(mm));
      continue;
    }
    check(s, "fit");
    check(it2d_boundary_write_fit(
              raw, mm, cfg.get(),
              path_in(opt, std::string("boundary_fit_") + tag(mm) + ".json").c_str()),
          "write");
    std::printf("micromotion %s fit: %.5f * N^%.4f (stderr %.4f)\n", tag(mm), a, p, e);
  }
  return kExitOk;
}

int run_couplings(const Common& opt, const std::string& crystal_path,
                  const std::string& spectrum_path) {
  Config cfg = load(opt);
  const std::string in = crystal_path.empty() ? path_in(opt, "crystal.json") : crystal_path;
  Crystal crystal = read_crystal(in);

  std::vector<Spectrum> spectra;
  if (!spectrum_path.empty()) {
    spectra.push_back(read_spectrum(spectrum_path));
  } else {
    for (int mm : flags_of(cfg.get())) {
      spectra.push_back(
          read_spectrum(path_in(opt, std::string("eigvec_") + tag(mm) + ".json")));
    }
  }

  Mask mask;
  if (it2d_config_has_mask(cfg.get())) {
    it2d_mask* raw = nullptr;
    check(it2d_mask_create(cfg.get(), crystal.get(), &raw), "mask");
    mask.reset(raw);
    const std::string g = it2d_mask_geometry(raw);
    check(it2d_mask_write(raw, cfg.get(), path_in(opt, "mask_" + g + ".json").c_str()),
          "write");
    std::printf("mask %s: %zu participating of %zu\n", g.c_str(),
                it2d_mask_participating(raw), it2d_crystal_count(crystal.get()));
  }

  for (const Spectrum& s : spectra) {
    const std::string t = tag(it2d_spectrum_micromotion(s.get()));
    it2d_couplings* raw = nullptr;
    check(it2d_couplings_compute(cfg.get(), s.get(), &raw), "couplings");
    Couplings c(raw);
    check(it2d_couplings_write(raw, cfg.get(),
                               path_in(opt, "couplings_" + t + ".csv").c_str()),
          "write");
    std::vector<double> w(it2d_spectrum_count(s.get()));
    check(it2d_spectrum_frequencies(s.get(), w.data(), w.size()), "modes");
    const double mu = it2d_couplings_detuning(raw);
    std::printf("micromotion %s: mu/2pi %.6f MHz (%.3f kHz above the top mode)\n",
                t.c_str(), mu / kTwoPi / 1e6, (mu - w.front()) / kTwoPi / 1e3);

    double alpha = 0.0, err = 0.0;
    const it2d_status fit = it2d_couplings_fit_range(raw, crystal.get(), cfg.get(),
                                                     &alpha, &err);
    if (fit == IT2D_INSUFFICIENT_PAIRS) {
      std::fprintf(stderr, "micromotion %s: too few pairs for a range fit\n",
                   t.c_str());
    } else {
      check(fit, "range fit");
      check(it2d_couplings_write_range_fit(
                raw, crystal.get(), cfg.get(),
                path_in(opt, "range_fit_" + t + ".json").c_str()),
            "write");
      std::printf("micromotion %s: alpha %.4f (stderr %.4f)\n", t.c_str(), alpha, err);
    }

    const it2d_couplings* target = raw;
    Couplings masked;
    if (mask) {
      it2d_couplings* m = nullptr;
      check(it2d_couplings_apply_mask(raw, mask.get(), &m), "mask");
      masked.reset(m);
      target = m;
      check(it2d_couplings_write(m, cfg.get(),
                                 path_in(opt, "couplings_" + t + "_masked.csv").c_str()),
            "write");
    }
    if (it2d_config_wants_hamiltonian(cfg.get(), it2d_couplings_count(target))) {
      check(it2d_couplings_write_hamiltonian(
                target, cfg.get(), path_in(opt, "hamiltonian_" + t + ".txt").c_str()),
            "hamiltonian");
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Planar ion crystals in an rf trap: structure, modes, stability, couplings"};
  app.set_version_flag("--version", std::string(it2d_version()));
  app.require_subcommand(1);

  Common common;
  std::string crystal_path, spectrum_path;

  auto* crystal = app.add_subcommand("crystal", "solve the equilibrium crystal");
  add_common(crystal, common);
  auto* modes = app.add_subcommand("modes", "axial mode spectra");
  add_common(modes, common);
  modes->add_option("--crystal", crystal_path, "crystal snapshot (default OUT/crystal.json)");
  auto* stability = app.add_subcommand("stability", "planar stability boundary scan");
  add_common(stability, common);
  auto* couplings = app.add_subcommand("couplings", "spin-spin couplings");
  add_common(couplings, common);
  couplings->add_option("--crystal", crystal_path,
                        "crystal snapshot (default OUT/crystal.json)");
  couplings->add_option("--spectrum", spectrum_path,
                        "eigenvector sidecar (default OUT/eigvec_{off,on}.json)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*crystal) return run_crystal(common);
    if (*modes) return run_modes(common, crystal_path);
    if (*stability) return run_stability(common);
    return run_couplings(common, crystal_path, spectrum_path);
  } catch (const Failure& f) {
    std::fprintf(stderr, "error: %s\n", f.what());
    return f.code;
  }
}
