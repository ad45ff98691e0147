// Acceptance checks 1-10. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "iontrap2d/config.hpp"
#include "iontrap2d/constants.hpp"
#include "iontrap2d/crystal_solver.hpp"
#include "iontrap2d/error.hpp"
#include "iontrap2d/io.hpp"
#include "iontrap2d/normal_modes.hpp"
#include "iontrap2d/spin_couplings.hpp"
#include "iontrap2d/stability_scanner.hpp"
#include "iontrap2d/trap_model.hpp"
#include "support/oracles.hpp"

using namespace iontrap2d;

namespace {

constexpr double kUm = 1e-6;
constexpr double kMHz = kTwoPi * 1e6;
constexpr double kKHz = kTwoPi * 1e3;

// Neighbour window for coordination and nearest-neighbour couplings.
constexpr double kNeighborWindow = 0.15;
// Ions at least this many mean spacings inside the crystal edge count as bulk.
constexpr double kBulkMargin = 2.0;

bool within(double value, double target, double rel) {
  return std::abs(value - target) <= rel * std::abs(target);
}

struct Report {
  bool all_pass = true;

  void add(int id, const std::string& title, bool pass, const std::string& detail) {
    char head[96];
    std::snprintf(head, sizeof head, "criterion %2d %-4s %s", id,
                  pass ? "PASS" : "FAIL", title.c_str());
    std::printf("%s | %s\n", head, detail.c_str());
    std::fflush(stdout);
    all_pass = all_pass && pass;
  }
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

DriveParams reference_drive(const TrapParams& trap, double omega_com) {
  DriveParams d;
  d.carrier_rabi = 1.5 * kMHz;
  d.wavevector_diff = kDefaultWavevectorDifference;
  d.ion_mass = trap.ion_mass;
  d.detuning = recommended_detuning(omega_com, d.carrier_rabi, d.wavevector_diff,
                                    d.ion_mass, pseudo_frequencies(trap).omega_z);
  return d;
}

// One full reference pipeline run: crystals, spectra and couplings.
struct Pipeline {
  TrapParams trap = reference_blade_trap();
  Equilibrium pseudo;
  IonCrystal static_c;
  IonCrystal mm;
  ModeSpectrum off;
  ModeSpectrum on;
  CouplingMatrix couplings;
  double omega_com = 0.0;

  std::string serialized;

  explicit Pipeline(std::size_t n, std::uint64_t seed) {
    const RunConfig cfg = parse_config("ions = " + std::to_string(n) +
                                       "\nseed = " + std::to_string(seed) + "\n");
    const Provenance prov{toolkit_version(), cfg.hash()};
    pseudo = solve_pseudo_equilibrium(pseudo_frequencies(trap), species_of(trap), n,
                                      seed, cfg.solver);
    static_c = static_crystal(trap, pseudo.positions);
    mm = solve_micromotion(trap, pseudo.positions, cfg.solver);
    off = mode_spectrum(axial_hessian(mm, false));
    on = mode_spectrum(axial_hessian(mm, true));
    omega_com = on.frequency(on.com_index().value());
    couplings = coupling_matrix(on, reference_drive(trap, omega_com));
    serialized = crystal_json(mm, prov) + crystal_json(static_c, prov) +
                 spectrum_csv(off, prov) + spectrum_json(off, prov) +
                 spectrum_csv(on, prov) + spectrum_json(on, prov) +
                 mode_shift_csv(off, on, prov) + coupling_csv(couplings, prov);
  }

};

void criterion1(Report& r) {
  const TrapParams p = reference_blade_trap();
  const double q = mathieu_q(p);
  const PseudoFrequencies f = pseudo_frequencies(p);
  const std::size_t nmax = max_resolvable_ions(q);
  const bool pass = within(q, 0.125, 0.01) && within(f.omega_z, 3.04 * kMHz, 0.01) &&
                    within(f.omega_r(), 0.510 * kMHz, 0.10) &&
                    within(static_cast<double>(nmax), 256.0, 0.02);
  r.add(1, "derived trap scalars", pass,
        fmt("q %.5f, w_z/2pi %.4f MHz, w_r/2pi %.1f kHz, N_max %zu", q,
            f.omega_z / kMHz, f.omega_r() / kKHz, nmax));
}

void criterion2(Report& r, const Pipeline& p) {
  const Positions& x = p.mm.avg_positions;
  const double d = mean_nearest_neighbor_distance(x);
  const double ext = crystal_extent(x);
  int bulk = 0, six = 0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    if (std::hypot(x(i, 0), x(i, 1)) > ext - kBulkMargin * d) continue;
    ++bulk;
    int nn = 0;
    for (Eigen::Index j = 0; j < x.rows(); ++j) {
      if (j != i && std::abs((x.row(i) - x.row(j)).norm() - d) <= kNeighborWindow * d) ++nn;
    }
    six += nn == 6 ? 1 : 0;
  }
  const double amp = max_micromotion_amplitude(p.mm);
  const bool spacing_ok = within(d, 4.3 * kUm, 0.10);
  const bool coord_ok = bulk > 0 && six == bulk;
  const bool amp_ok = within(amp, 1.4 * kUm, 0.15);
  r.add(2, "crystal structure N=100", spacing_ok && coord_ok && amp_ok,
        fmt("spacing %.3f um [%s], six-coordinated bulk ions %d/%d [%s], max |r1| %.3f um [%s]",
            d / kUm, spacing_ok ? "ok" : "out", six, bulk, coord_ok ? "ok" : "out",
            amp / kUm, amp_ok ? "ok" : "out"));
}

void criterion3(Report& r, const Pipeline& p) {
  const AmplitudeLawCheck dev = amplitude_law_deviation(p.mm);
  r.add(3, "micromotion amplitude laws", dev.first <= 0.05 && dev.second <= 0.25,
        fmt("worst |r1| deviation %.4f (limit 0.05), worst |r2| deviation %.4f (limit 0.25)",
            dev.first, dev.second));
}

void criterion4(Report& r, const Pipeline& p) {
  const double shift = mean_displacement(p.mm.avg_positions, p.pseudo.positions);
  const double lo = 0.04 * kUm, hi = 0.16 * kUm;
  r.add(4, "equilibrium shift", shift >= lo && shift <= hi,
        fmt("mean |dr0| %.4f um, window [0.04, 0.16] um", shift / kUm));
}

void criterion5(Report& r, const Pipeline& p) {
  const double wz = pseudo_frequencies(p.trap).omega_z;
  const double com_off = p.off.frequency(p.off.com_index().value());
  const double com_on = p.on.frequency(p.on.com_index().value());
  const bool com_ok = within(com_off, wz, 1e-8) && within(com_on, wz, 1e-8);
  const Eigen::Index last = static_cast<Eigen::Index>(p.on.count()) - 1;
  const double zz_off = p.off.frequency(last);
  const double zz_on = p.on.frequency(last);
  const double drop = zz_off - zz_on;
  const double frac = drop / zz_off;
  const bool zz_ok = drop > 0.5 * kMHz && std::abs(frac - 0.30) <= 0.10;
  const double pseudo_zz =
      mode_spectrum(axial_hessian(p.static_c, false)).frequency(last);
  r.add(5, "mode spectrum N=100", com_ok && zz_ok,
        fmt("COM rel. error %.1e/%.1e [%s]; zig-zag %.5f -> %.5f MHz, drop %.2f kHz (%.3f%%) "
            "[%s]; pseudopotential crystal zig-zag %.5f MHz",
            std::abs(com_off / wz - 1), std::abs(com_on / wz - 1), com_ok ? "ok" : "out",
            zz_off / kMHz, zz_on / kMHz, drop / kKHz, 100 * frac, zz_ok ? "ok" : "out",
            pseudo_zz / kMHz));
}

double worst_rel(double a, double b, double worst) {
  return std::max(worst, std::abs(a - b) / std::abs(b));
}

void criterion6(Report& r) {
  const TrapParams t = reference_blade_trap();
  const PseudoFrequencies f = pseudo_frequencies(t);
  const double k = oracle::coulomb_over_mass(t.ion_charge, t.ion_mass);
  double eq_err = 0, mode_err = 0, shift_err = 0, j_err = 0;
  for (int n : {2, 3}) {
    const Equilibrium eq = solve_pseudo_equilibrium(f, species_of(t), n, 1);
    std::vector<double> ref;
    if (n == 2) {
      ref.push_back(oracle::two_ion_separation(k, f.omega_y));
    } else {
      ref = oracle::sorted_pair_distances(
          oracle::minimize(n, f.omega_x, f.omega_y, f.omega_z, k).positions);
    }
    const auto got = oracle::sorted_pair_distances(eq.positions);
    for (std::size_t i = 0; i < ref.size(); ++i) eq_err = worst_rel(got[i], ref[i], eq_err);

    const IonCrystal c = solve_micromotion(t, eq.positions);
    Eigen::MatrixX2d zero = Eigen::MatrixX2d::Zero(n, 2);
    const Eigen::VectorXd w_off = oracle::frequencies(oracle::hessian_from_weights(
        oracle::phase_averaged_inverse_cubes(c.avg_positions, zero, zero, 1), f.omega_z, k));
    const Eigen::MatrixXd h_on = oracle::hessian_from_weights(
        oracle::phase_averaged_inverse_cubes(c.avg_positions, c.mm_first, c.mm_second, 1024),
        f.omega_z, k);
    const Eigen::VectorXd w_on = oracle::frequencies(h_on);
    const ModeSpectrum off = mode_spectrum(axial_hessian(c, false));
    const ModeSpectrum on = mode_spectrum(axial_hessian(c, true));
    const std::vector<double> shift = mode_shift_report(off, on);
    if (n == 2) {
      const double d = (c.avg_positions.row(0) - c.avg_positions.row(1)).norm();
      mode_err = worst_rel(off.frequency(1),
                           std::sqrt(f.omega_z * f.omega_z - 2 * k / (d * d * d)), mode_err);
    }
    for (Eigen::Index m = 0; m < n; ++m) {
      const Eigen::Index asc = n - 1 - m;
      mode_err = worst_rel(off.frequency(m), w_off[asc], mode_err);
      mode_err = worst_rel(on.frequency(m), w_on[asc], mode_err);
      if (m > 0) {
        shift_err = worst_rel(shift[static_cast<std::size_t>(m)], w_on[asc] - w_off[asc],
                              shift_err);
      }
    }

    const DriveParams drive = reference_drive(t, on.frequency(0));
    const CouplingMatrix cm = coupling_matrix(on, drive);
    Eigen::MatrixXd jo = oracle::couplings(h_on, drive.carrier_rabi, drive.wavevector_diff,
                                           t.ion_mass, drive.detuning);
    if (n == 2) {
      const double mu = drive.detuning;
      const double recoil = oracle::kHbar * drive.wavevector_diff * drive.wavevector_diff /
                            (2 * t.ion_mass);
      const double ws2 = on.eigenvalues[1];
      jo(0, 1) = drive.carrier_rabi * drive.carrier_rabi * recoil * 0.5 *
                 (1 / (mu * mu - f.omega_z * f.omega_z) - 1 / (mu * mu - ws2));
    }
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) j_err = worst_rel(cm.J(i, j), jo(i, j), j_err);
    }
  }
  const double tol = 1e-4;
  r.add(6, "oracle equivalence N=2,3",
        eq_err <= tol && mode_err <= tol && shift_err <= tol && j_err <= tol,
        fmt("worst relative error: positions %.1e, modes %.1e, shifts %.1e, J %.1e (limit 1e-4)",
            eq_err, mode_err, shift_err, j_err));
}

void criterion7(Report& r) {
  const RunConfig cfg = parse_config("");
  ScanOptions o = cfg.scan_options();
  const StabilityBoundary b =
      scan_boundary(cfg.scan_ions, cfg.scan_omega_r, MicromotionMode::Both, cfg.trap, o);
  const auto off = select_points(b, false);
  const auto on = select_points(b, true);
  bool eq4_ok = true, dominates = true, gap_ok = true;
  std::ostringstream pts;
  for (std::size_t i = 0; i < off.size(); ++i) {
    const double eq4 = planarity_threshold(off[i].n);
    const double gap = on[i].critical_ratio / off[i].critical_ratio - 1.0;
    eq4_ok = eq4_ok && within(off[i].critical_ratio, eq4, 0.03);
    dominates = dominates && on[i].critical_ratio > off[i].critical_ratio;
    gap_ok = gap_ok && std::abs(gap - 0.45) <= 0.15;
    pts << fmt(" N=%zu off %.4f (%+.1f%% vs law) on %.4f (gap %+.2f%%);", off[i].n,
               off[i].critical_ratio, 100 * (off[i].critical_ratio / eq4 - 1),
               on[i].critical_ratio, 100 * gap);
  }
  const PowerLawFit fit_on = fit_boundary_powerlaw(on);
  const PowerLawFit fit_off = fit_boundary_powerlaw(off);
  const bool exp_ok = std::abs(fit_on.exponent - 0.27) <= 0.03;
  r.add(7, "stability boundary", eq4_ok && exp_ok && dominates && gap_ok,
        fmt("law within 3%% [%s], mm exponent %.4f +- %.4f [%s] (no-mm %.4f), "
            "mm above no-mm [%s], gap 45+-15%% [%s];",
            eq4_ok ? "ok" : "out", fit_on.exponent, fit_on.standard_error,
            exp_ok ? "ok" : "out", fit_off.exponent, dominates ? "ok" : "out",
            gap_ok ? "ok" : "out") +
            pts.str());
}

void criterion8(Report& r, const Pipeline& p) {
  const CouplingMatrix& c = p.couplings;
  const Positions& x = p.mm.avg_positions;
  const double d = mean_nearest_neighbor_distance(x);
  double sum = 0;
  int pairs = 0;
  bool afm = true;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < x.rows(); ++j) {
      if (std::abs((x.row(i) - x.row(j)).norm() - d) <= kNeighborWindow * d) {
        sum += std::abs(c.J(i, j));
        afm = afm && c.J(i, j) > 0.0;
        ++pairs;
      }
    }
  }
  const double nn = sum / pairs;
  const double alpha = fit_interaction_range(c, x).exponent;

  auto alpha_at = [&](double offset) {
    DriveParams dr = c.drive;
    dr.detuning = p.omega_com + offset;
    dr.resonance_guard = 0.25 * offset;
    return fit_interaction_range(coupling_matrix(p.on, dr), x).exponent;
  };
  const double a_near = alpha_at(1.0 * kKHz);
  const double a_far = alpha_at(200.0 * kMHz);

  const bool nn_ok = within(nn, 1.0 * kKHz, 0.30);
  const bool alpha_ok = std::abs(alpha - 2.0) <= 0.3;
  const bool sweep_ok = a_near < 0.3 && a_far > 2.7;
  r.add(8, "spin-spin couplings", nn_ok && alpha_ok && afm && sweep_ok,
        fmt("mean NN |J|/2pi %.3f kHz over %d pairs [%s], alpha %.3f [%s], antiferromagnetic "
            "[%s], alpha at mu-w_com = 2pi*1 kHz %.3f and 2pi*200 MHz %.3f [%s]",
            nn / kKHz, pairs, nn_ok ? "ok" : "out", alpha, alpha_ok ? "ok" : "out",
            afm ? "ok" : "out", a_near, a_far, sweep_ok ? "ok" : "out"));
}

void criterion9(Report& r) {
  double worst = 0.0;
  bool analytic = true;
  for (int n = 1; n <= 3; ++n) {
    CouplingMatrix c;
    c.J = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) c.J(i, j) = c.J(j, i) = 0.37 * (i + 1) - 0.91 * j;
    }
    for (double b : {0.0, 0.8}) {
      const Eigen::MatrixXcd h = build_ising_hamiltonian(c, b);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> a(h), o(oracle::ising_kron(c.J, b));
      worst = std::max(worst, (a.eigenvalues() - o.eigenvalues()).cwiseAbs().maxCoeff());
      if (n == 1) {
        analytic = analytic && std::abs(a.eigenvalues()[0] + b) < 1e-15 &&
                   std::abs(a.eigenvalues()[1] - b) < 1e-15;
      }
      if (n == 2 && b == 0.0) {
        const double j = std::abs(c.J(0, 1));
        analytic = analytic && std::abs(a.eigenvalues()[0] + j) < 1e-15 &&
                   std::abs(a.eigenvalues()[1] + j) < 1e-15 &&
                   std::abs(a.eigenvalues()[2] - j) < 1e-15 &&
                   std::abs(a.eigenvalues()[3] - j) < 1e-15;
      }
    }
  }
  r.add(9, "Hamiltonian assembly", worst < 1e-14 && analytic,
        fmt("worst eigenvalue difference vs Pauli tensor oracle %.1e, analytic N=1,2 [%s]",
            worst, analytic ? "ok" : "out"));
}

void criterion10(Report& r, const Pipeline& first) {
  const Pipeline again(100, 1);
  const bool same_pipeline = again.serialized == first.serialized;

  RunConfig cfg = parse_config("scan_ions = 5,10,20,30\n");
  const Provenance prov{toolkit_version(), cfg.hash()};
  ScanOptions one = cfg.scan_options(), many = cfg.scan_options();
  many.jobs = 4;
  const std::string a = boundary_csv(
      scan_boundary(cfg.scan_ions, cfg.scan_omega_r, MicromotionMode::Both, cfg.trap, one), prov);
  const std::string b = boundary_csv(
      scan_boundary(cfg.scan_ions, cfg.scan_omega_r, MicromotionMode::Both, cfg.trap, many), prov);
  r.add(10, "determinism", same_pipeline && a == b,
        fmt("N=100 pipeline outputs (%zu bytes) identical [%s], boundary with 1 vs 4 workers "
            "identical [%s]",
            first.serialized.size(), same_pipeline ? "ok" : "out", a == b ? "ok" : "out"));
}

}  // namespace

int main() {
  Report report;
  try {
    criterion1(report);
    const Pipeline reference(100, 1);
    criterion2(report, reference);
    criterion3(report, reference);
    criterion4(report, reference);
    criterion5(report, reference);
    criterion6(report);
    criterion7(report);
    criterion8(report, reference);
    criterion9(report);
    criterion10(report, reference);
  } catch (const Error& e) {
    std::printf("acceptance aborted: %s: %s\n", to_string(e.code()), e.what());
    return 2;
  }
  std::printf("%s\n", report.all_pass ? "acceptance: all criteria passed"
                                      : "acceptance: some criteria failed");
  return report.all_pass ? 0 : 1;
}
