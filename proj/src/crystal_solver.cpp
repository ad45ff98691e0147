#include "iontrap2d/crystal_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <sstream>

#include <boost/math/tools/toms748_solve.hpp>

#include "fire.hpp"
#include "harmonic_balance.hpp"
#include "harmonic_coulomb.hpp"
#include "iontrap2d/constants.hpp"
#include "iontrap2d/error.hpp"

namespace iontrap2d {
namespace {

using detail::HarmonicBalance;
using detail::HarmonicCoulomb;
using detail::hb_index;
using detail::kPerIon;

struct Scales {
  double omega_ref = 0.0;  // [rad/s]
  double length = 0.0;     // [m]
  double energy = 0.0;     // [J]
};

Scales scales_for(double omega_ref, const IonSpecies& s) {
  Scales sc;
  sc.omega_ref = omega_ref;
  sc.length = std::cbrt(coulomb_constant(s.charge) /
                        (s.mass * omega_ref * omega_ref));
  sc.energy = s.mass * omega_ref * omega_ref * sc.length * sc.length;
  return sc;
}

void check_inputs(const PseudoFrequencies& f, const IonSpecies& s,
                  std::size_t n) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "ion count must be >= 1");
  if (!(f.omega_x > 0.0 && f.omega_y > 0.0 && f.omega_z >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument,
                "radial frequencies must be positive");
  }
  if (!(s.mass > 0.0 && s.charge > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "ion mass and charge must be > 0");
  }
}

double scaled_residual(const HarmonicCoulomb& sys, const Eigen::VectorXd& x) {
  Eigen::VectorXd g;
  sys.gradient(x, g);
  double d = detail::mean_nn_distance(x, sys.dim());
  if (!(d > 0.0)) d = 1.0;
  return g.cwiseAbs().maxCoeff() * d * d;
}

// Velocity-damped dynamics with the friction rate annealed exponentially from
// w_ref down to 0.02 w_ref. Per-step displacements are capped so that random
// starts with nearly overlapping ions cannot blow up.
void damped_md(const HarmonicCoulomb& sys, Eigen::VectorXd& x, double dt,
               double total_time) {
  const int dim = sys.dim();
  const int n = static_cast<int>(x.size()) / dim;
  const long steps = std::max(1L, std::lround(total_time / dt));
  const double gamma_max = 1.0;
  const double gamma_min = 0.02;
  const double max_move = 0.05;
  Eigen::VectorXd v = Eigen::VectorXd::Zero(x.size());
  Eigen::VectorXd g;
  sys.gradient(x, g);
  for (long s = 0; s < steps; ++s) {
    const double frac = static_cast<double>(s) / static_cast<double>(steps);
    const double gamma = gamma_max * std::pow(gamma_min / gamma_max, frac);
    v = v * (1.0 - gamma * dt) - g * dt;
    for (int i = 0; i < n; ++i) {
      const double speed = v.segment(i * dim, dim).norm();
      if (speed * dt > max_move) v.segment(i * dim, dim) *= max_move / (speed * dt);
    }
    x += v * dt;
    sys.gradient(x, g);
  }
}

// FIRE descent on the static energy; brings the slow rotational mode close
// enough for Newton to converge quadratically.
void fire_minimize(const HarmonicCoulomb& sys, Eigen::VectorXd& x,
                   double target) {
  detail::FireSettings fs;
  const double fastest = std::sqrt(*std::max_element(
      sys.stiffness().begin(), sys.stiffness().begin() + sys.dim()));
  fs.dt = 0.05 / std::max(1.0, fastest);
  fs.dt_max = 10.0 * fs.dt;
  fs.max_steps = 50000;
  detail::fire_relax(
      x, [&](const Eigen::VectorXd& y, Eigen::VectorXd& f) {
        sys.gradient(y, f);
        f = -f;
      },
      [&](const Eigen::VectorXd& y, const Eigen::VectorXd& f) {
        double d = detail::mean_nn_distance(y, sys.dim());
        if (!(d > 0.0)) d = 1.0;
        return f.cwiseAbs().maxCoeff() * d * d < target;
      },
      fs);
}

// Saddle-free Newton: steps along every Hessian eigenvector scaled by 1/|lambda|
// with Armijo backtracking on the energy. Returns the final scaled residual.
double newton_polish(const HarmonicCoulomb& sys, Eigen::VectorXd& x,
                     double target, int max_iterations) {
  Eigen::VectorXd g;
  double residual = scaled_residual(sys, x);
  for (int it = 0; it < max_iterations && residual > target; ++it) {
    sys.gradient(x, g);
    const Eigen::MatrixXd h = sys.hessian(x);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    const Eigen::VectorXd& lam = es.eigenvalues();
    const double scale = lam.cwiseAbs().maxCoeff();
    Eigen::VectorXd step = Eigen::VectorXd::Zero(x.size());
    for (int k = 0; k < lam.size(); ++k) {
      if (std::abs(lam[k]) <= 1e-12 * scale) continue;
      const Eigen::VectorXd vk = es.eigenvectors().col(k);
      step -= vk * (vk.dot(g) / std::abs(lam[k]));
    }
    const double e0 = sys.energy(x);
    const double slope = g.dot(step);
    double alpha = 1.0;
    bool accepted = false;
    while (alpha > 1e-10) {
      const Eigen::VectorXd trial = x + alpha * step;
      if (sys.energy(trial) <= e0 + 1e-4 * alpha * slope + 1e-14 * std::abs(e0)) {
        x = trial;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;
    residual = scaled_residual(sys, x);
  }
  return residual;
}

// Axial Hessian of a planar configuration in dimensionless units.
Eigen::MatrixXd planar_axial_hessian(const Eigen::VectorXd& x2, double kz) {
  const int n = static_cast<int>(x2.size()) / 2;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    h(i, i) = kz;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double dx = x2[2 * i] - x2[2 * j];
      const double dy = x2[2 * i + 1] - x2[2 * j + 1];
      const double r2 = dx * dx + dy * dy;
      const double inv_r3 = 1.0 / (r2 * std::sqrt(r2));
      h(i, j) = inv_r3;
      h(i, i) -= inv_r3;
    }
  }
  return h;
}

struct Search {
  Eigen::VectorXd x;  // dimensionless, dim per ion
  double energy = std::numeric_limits<double>::infinity();
  double residual = std::numeric_limits<double>::infinity();
  int restart = -1;
};

Search planar_search(const PseudoFrequencies& f, const Scales& sc,
                     std::size_t n, std::uint64_t seed,
                     const SolverOptions& opt) {
  const double kx = (f.omega_x / sc.omega_ref) * (f.omega_x / sc.omega_ref);
  const double ky = (f.omega_y / sc.omega_ref) * (f.omega_y / sc.omega_ref);
  const double kz = (f.omega_z / sc.omega_ref) * (f.omega_z / sc.omega_ref);
  const HarmonicCoulomb sys(2, {kx, ky, 0.0});
  const double fastest = std::sqrt(std::max({kx, ky, kz}));
  const double dt = opt.time_step / fastest;
  const double radius = 0.5 * std::sqrt(static_cast<double>(n));

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  Search best;
  Search best_unconverged;
  const int restarts = std::max(1, opt.restarts);
  for (int r = 0; r < restarts; ++r) {
    Eigen::VectorXd x(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
      const double rho = radius * std::sqrt(uni(rng));
      const double phi = kTwoPi * uni(rng);
      x[2 * i] = rho * std::cos(phi);
      x[2 * i + 1] = rho * std::sin(phi);
    }
    damped_md(sys, x, dt, opt.anneal_time);
    fire_minimize(sys, x, 1e-2 * opt.force_tolerance);
    const double res = newton_polish(sys, x, 1e-3 * opt.force_tolerance,
                                     opt.max_newton_iterations);
    const double e = sys.energy(x);
    Search cand{x, e, res, r};
    Search& slot = res < opt.force_tolerance ? best : best_unconverged;
    if (e < slot.energy - 1e-12 * std::abs(slot.energy) || slot.restart < 0) {
      slot = cand;
    }
  }
  if (best.restart < 0) {
    std::ostringstream os;
    os << "no restart reached the force tolerance; best residual "
       << best_unconverged.residual;
    throw Error(ErrorCode::NoConvergence, os.str(), best_unconverged.residual);
  }
  return best;
}

Positions to_positions(const Eigen::VectorXd& x, int dim, double length) {
  const Eigen::Index n = x.size() / dim;
  Positions p = Positions::Zero(n, 3);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int a = 0; a < dim; ++a) p(i, a) = x[i * dim + a] * length;
  }
  return p;
}

Equilibrium single_ion(const PseudoFrequencies&, const IonSpecies&) {
  Equilibrium eq;
  eq.positions = Positions::Zero(1, 3);
  return eq;
}


// Harmonic balance with the crystal orientation pinned. A holding torque mu
// along t enters the mean-force rows and the orientation functional t.u is
// fixed to s, which removes the soft rotational direction from the Jacobian.
struct Pinned {
  const detail::HarmonicBalance& hb;
  Eigen::VectorXd t;
  double d;

  Eigen::VectorXd residual(const Eigen::VectorXd& z, double s) const {
    const Eigen::Index m = z.size() - 1;
    Eigen::VectorXd r(z.size());
    r.head(m) = hb.residual(z.head(m)) + z[m] * t;
    r[m] = (t.dot(z.head(m)) - s) / t.squaredNorm();
    return r;
  }

  double norm(const Eigen::VectorXd& r) const {
    const Eigen::Index m = r.size() - 1;
    return std::max(hb.scaled_norm(r.head(m), d), std::abs(r[m]));
  }

  bool solve(Eigen::VectorXd& z, double s, double tol) const {
    const Eigen::Index m = z.size() - 1;
    Eigen::VectorXd r = residual(z, s);
    double res = norm(r);
    for (int it = 0; it < 50 && res > tol; ++it) {
      Eigen::MatrixXd jac(z.size(), z.size());
      jac.topLeftCorner(m, m) = hb.jacobian(z.head(m));
      jac.col(m).head(m) = t;
      jac.row(m).head(m) = t.transpose() / t.squaredNorm();
      jac(m, m) = 0.0;
      const Eigen::VectorXd step = jac.partialPivLu().solve(-r);
      if (!step.allFinite()) return false;
      double alpha = 1.0;
      bool accepted = false;
      while (alpha > 1e-4) {
        const Eigen::VectorXd trial = z + alpha * step;
        const Eigen::VectorXd rt = residual(trial, s);
        const double nt = norm(rt);
        if (std::isfinite(nt) && nt < res) {
          z = trial;
          r = rt;
          res = nt;
          accepted = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!accepted) return false;
    }
    return res <= tol;
  }
};

double polish_harmonic_balance(const detail::HarmonicBalance& hb,
                               Eigen::VectorXd& u, double d,
                               const SolverOptions& options) {
  const int n = hb.n;
  const Eigen::Index m = u.size();
  const double target = 1e-2 * options.harmonic_balance_tolerance;
  double res = hb.scaled_norm(hb.residual(u), d);
  if (res <= target || n < 2) {
    if (res > target) {
      // A single ion has no orientation, plain Newton suffices.
      for (int it = 0; it < options.max_newton_iterations && res > target;
           ++it) {
        const Eigen::VectorXd e = hb.residual(u);
        u += hb.jacobian(u).partialPivLu().solve(-e);
        res = hb.scaled_norm(hb.residual(u), d);
      }
    }
    return res;
  }

  Pinned pin{hb, Eigen::VectorXd::Zero(m), d};
  for (int i = 0; i < n; ++i) {
    pin.t[detail::hb_index(i, 0, 0)] = -u[detail::hb_index(i, 0, 1)];
    pin.t[detail::hb_index(i, 0, 1)] = u[detail::hb_index(i, 0, 0)];
  }
  const double mu_scale = pin.t.cwiseAbs().maxCoeff() * d * d;

  Eigen::VectorXd z(m + 1);
  z.head(m) = u;
  z[m] = 0.0;
  double last_theta = 0.0;
  Eigen::VectorXd best = z;
  best[m] = std::numeric_limits<double>::infinity();
  // Holding torque at orientation theta relative to the starting crystal.
  // Large turns are taken in sub-steps so each pinned solve starts close.
  auto pinned_at = [&](double theta) {
    Eigen::VectorXd zt = z;
    zt.head(m) = hb.rotated(z.head(m), theta - last_theta);
    return pin.solve(zt, std::sin(theta) * pin.t.squaredNorm(), target)
               ? std::optional<Eigen::VectorXd>(zt)
               : std::nullopt;
  };
  auto torque = [&](double theta) {
    double reached = last_theta;
    double stride = theta - last_theta;
    bool solved = false;
    while (!solved || reached != theta) {
      const double next =
          std::abs(theta - reached) <= std::abs(stride) ? theta : reached + stride;
      if (auto zt = pinned_at(next)) {
        z = *zt;
        last_theta = reached = next;
        solved = true;
      } else if (std::abs(stride) > 1e-6) {
        stride *= 0.5;
      } else {
        throw Error(ErrorCode::NoConvergence,
                    "harmonic balance failed at pinned orientation");
      }
    }
    if (std::abs(z[m]) < std::abs(best[m])) best = z;
    return z[m] * mu_scale;
  };

  const double tol_mu = target;
  double a = 0.0, fa = torque(a);
  if (std::abs(fa) > tol_mu) {
    // March along the soft direction with secant steps until the torque
    // changes sign, then bracket.
    double b = 1e-3;
    double fb = torque(b);
    int evals = 2;
    while (fa * fb > 0 && std::abs(fb) > tol_mu) {
      if (++evals > 60) {
        throw Error(ErrorCode::NoConvergence,
                    "could not bracket the crystal orientation");
      }
      double next = b - fb * (b - a) / (fb - fa);
      if (!std::isfinite(next)) next = b + 2 * (b - a);
      next = std::clamp(next, b - 0.1, b + 0.1);
      a = b;
      fa = fb;
      b = next;
      fb = torque(b);
    }
    if (std::abs(fb) > tol_mu) {
      std::uintmax_t iters = 100;
      boost::math::tools::toms748_solve(
          torque, std::min(a, b), std::max(a, b), a < b ? fa : fb,
          a < b ? fb : fa,
          [&](double lo, double hi) {
            return std::abs(hi - lo) < 1e-13 ||
                   std::abs(best[m] * mu_scale) < tol_mu;
          },
          iters);
    }
  }
  u = best.head(m);
  res = hb.scaled_norm(hb.residual(u), d);
  return res;
}

}  // namespace

Equilibrium solve_planar_equilibrium(const PseudoFrequencies& freqs,
                                     const IonSpecies& species, std::size_t n,
                                     std::uint64_t seed,
                                     const SolverOptions& options) {
  check_inputs(freqs, species, n);
  if (n == 1) return single_ion(freqs, species);
  const Scales sc = scales_for(freqs.omega_r(), species);
  const Search s = planar_search(freqs, sc, n, seed, options);
  Equilibrium eq;
  eq.positions = to_positions(s.x, 2, sc.length);
  eq.energy = s.energy * sc.energy;
  eq.residual = s.residual;
  eq.restart = s.restart;
  return eq;
}

Equilibrium solve_pseudo_equilibrium(const PseudoFrequencies& freqs,
                                     const IonSpecies& species, std::size_t n,
                                     std::uint64_t seed,
                                     const SolverOptions& options) {
  check_inputs(freqs, species, n);
  if (n == 1) return single_ion(freqs, species);
  const Scales sc = scales_for(freqs.omega_r(), species);
  const Search planar = planar_search(freqs, sc, n, seed, options);

  const double kz = (freqs.omega_z / sc.omega_ref) * (freqs.omega_z / sc.omega_ref);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      planar_axial_hessian(planar.x, kz));
  Equilibrium eq;
  eq.restart = planar.restart;
  if (es.eigenvalues()[0] > 0.0) {
    eq.positions = to_positions(planar.x, 2, sc.length);
    eq.energy = planar.energy * sc.energy;
    eq.residual = planar.residual;
    return eq;
  }

  // The plane is a saddle: push along the softest axial mode and relax in 3D.
  const double d = detail::mean_nn_distance(planar.x, 2);
  Eigen::VectorXd mode = es.eigenvectors().col(0);
  mode *= 0.05 * d / mode.cwiseAbs().maxCoeff();
  Eigen::VectorXd x3(3 * n);
  for (std::size_t i = 0; i < n; ++i) {
    x3[3 * i] = planar.x[2 * i];
    x3[3 * i + 1] = planar.x[2 * i + 1];
    x3[3 * i + 2] = mode[static_cast<Eigen::Index>(i)];
  }
  const double kx = (freqs.omega_x / sc.omega_ref) * (freqs.omega_x / sc.omega_ref);
  const double ky = (freqs.omega_y / sc.omega_ref) * (freqs.omega_y / sc.omega_ref);
  const HarmonicCoulomb sys(3, {kx, ky, kz});
  const double dt = options.time_step / std::sqrt(std::max({kx, ky, kz}));
  damped_md(sys, x3, dt, options.anneal_time);
  fire_minimize(sys, x3, 1e-2 * options.force_tolerance);
  const double res = newton_polish(sys, x3, 1e-3 * options.force_tolerance,
                                   options.max_newton_iterations);
  if (!(res < options.force_tolerance)) {
    throw Error(ErrorCode::NoConvergence,
                "buckled configuration did not converge", res);
  }
  eq.positions = to_positions(x3, 3, sc.length);
  eq.energy = sys.energy(x3) * sc.energy;
  eq.residual = res;
  return eq;
}

IonCrystal solve_micromotion(const TrapParams& p, const Positions& initial,
                             const SolverOptions& options) {
  const int n = static_cast<int>(initial.rows());
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "empty configuration");
  if (!is_planar(initial)) {
    throw Error(ErrorCode::PlanarityLost,
                "initial configuration is not planar; the crystal has buckled");
  }
  const PseudoFrequencies freqs = pseudo_frequencies(p);
  const IonSpecies species = species_of(p);
  const double wr2 = radial_stiffness(p);
  const Scales sc = scales_for(std::sqrt(wr2), species);
  const double q = mathieu_q(p);

  HarmonicBalance hb;
  hb.n = n;
  hb.points = std::max(4, options.quadrature_points);
  hb.rf = p.rf_frequency / sc.omega_ref;
  hb.drive = 0.5 * q * hb.rf * hb.rf;
  const double dc = p.ion_charge * p.dc_kappa_u0 /
                    (p.ion_mass * p.axial_size * p.axial_size) / wr2;
  hb.static_k[0] = -dc + p.xy_asymmetry;
  hb.static_k[1] = -dc - p.xy_asymmetry;
  hb.setup();

  Eigen::VectorXd u(kPerIon * n);
  for (int i = 0; i < n; ++i) {
    for (int a = 0; a < 2; ++a) {
      const double kd = (a == 0 ? 1.0 : -1.0) * hb.drive;
      const double c = hb.static_k[a];
      const double a0 = initial(i, a) / sc.length;
      const double a1 = kd * a0 / (hb.rf * hb.rf - c);
      const double a2 = 0.5 * kd * a1 / (4.0 * hb.rf * hb.rf - c);
      u[hb_index(i, 0, a)] = a0;
      u[hb_index(i, 1, a)] = a1;
      u[hb_index(i, 2, a)] = a2;
    }
  }

  double d = 1.0;
  if (n > 1) {
    Eigen::VectorXd x2(2 * n);
    for (int i = 0; i < n; ++i) {
      x2[2 * i] = u[hb_index(i, 0, 0)];
      x2[2 * i + 1] = u[hb_index(i, 0, 1)];
    }
    d = detail::mean_nn_distance(x2, 2);
  }

  // Relax the average positions under the period-averaged force with the
  // micromotion amplitudes slaved to them, then finish with full Newton.
  {
    Eigen::VectorXd x0(2 * n);
    for (int i = 0; i < n; ++i) {
      x0[2 * i] = u[hb_index(i, 0, 0)];
      x0[2 * i + 1] = u[hb_index(i, 0, 1)];
    }
    detail::FireSettings fs;
    fs.dt = 0.05;
    fs.dt_max = 0.5;
    fs.max_steps = 20000;
    detail::fire_relax(
        x0,
        [&](const Eigen::VectorXd& y, Eigen::VectorXd& f) {
          for (int i = 0; i < n; ++i) {
            u[hb_index(i, 0, 0)] = y[2 * i];
            u[hb_index(i, 0, 1)] = y[2 * i + 1];
          }
          hb.slave_amplitudes(u, f);
        },
        [&](const Eigen::VectorXd&, const Eigen::VectorXd& f) {
          return f.cwiseAbs().maxCoeff() * d * d < 1e-7;
        },
        fs);
    for (int i = 0; i < n; ++i) {
      u[hb_index(i, 0, 0)] = x0[2 * i];
      u[hb_index(i, 0, 1)] = x0[2 * i + 1];
    }
  }

  const double res = polish_harmonic_balance(hb, u, d, options);
  if (!(res < options.harmonic_balance_tolerance)) {
    std::ostringstream os;
    os << "harmonic balance stalled at residual " << res;
    throw Error(ErrorCode::NoConvergence, os.str(), res);
  }

  IonCrystal c;
  c.params = p;
  c.q = q;
  c.avg_positions = Positions::Zero(n, 3);
  c.mm_first = PlanarVectors::Zero(n, 2);
  c.mm_second = PlanarVectors::Zero(n, 2);
  for (int i = 0; i < n; ++i) {
    for (int a = 0; a < 2; ++a) {
      c.avg_positions(i, a) = u[hb_index(i, 0, a)] * sc.length;
      c.mm_first(i, a) = u[hb_index(i, 1, a)] * sc.length;
      c.mm_second(i, a) = u[hb_index(i, 2, a)] * sc.length;
    }
  }
  c.residual = res;
  c.energy = pseudo_energy(freqs, species, c.avg_positions);
  return c;
}

IonCrystal static_crystal(const TrapParams& p, const Positions& positions) {
  IonCrystal c;
  c.params = p;
  c.q = mathieu_q(p);
  c.avg_positions = positions;
  c.mm_first = PlanarVectors::Zero(positions.rows(), 2);
  c.mm_second = PlanarVectors::Zero(positions.rows(), 2);
  c.residual = 0.0;
  c.energy = pseudo_energy(pseudo_frequencies(p), species_of(p), positions);
  return c;
}

double pseudo_energy(const PseudoFrequencies& f, const IonSpecies& s,
                     const Positions& r) {
  const double w2[3] = {f.omega_x * f.omega_x, f.omega_y * f.omega_y,
                        f.omega_z * f.omega_z};
  double e = 0.0;
  for (Eigen::Index i = 0; i < r.rows(); ++i) {
    for (int a = 0; a < 3; ++a) e += 0.5 * s.mass * w2[a] * r(i, a) * r(i, a);
  }
  const double ke = coulomb_constant(s.charge);
  for (Eigen::Index i = 0; i < r.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < r.rows(); ++j) {
      e += ke / (r.row(i) - r.row(j)).norm();
    }
  }
  return e;
}

double crystal_extent(const Positions& positions) {
  double best = 0.0;
  for (Eigen::Index i = 0; i < positions.rows(); ++i) {
    best = std::max(best, std::hypot(positions(i, 0), positions(i, 1)));
  }
  return best;
}

double crystal_extent(const IonCrystal& c) {
  return crystal_extent(c.avg_positions);
}

double mean_nearest_neighbor_distance(const Positions& positions) {
  const Eigen::Index n = positions.rows();
  if (n < 2) return 0.0;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i) best = std::min(best, (positions.row(i) - positions.row(j)).norm());
    }
    sum += best;
  }
  return sum / static_cast<double>(n);
}

std::vector<int> neighbor_counts(const Positions& positions, double rel_tol) {
  const Eigen::Index n = positions.rows();
  std::vector<int> counts(static_cast<std::size_t>(n), 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    std::vector<double> dist;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i) dist.push_back((positions.row(i) - positions.row(j)).norm());
    }
    if (dist.empty()) continue;
    const double nearest = *std::min_element(dist.begin(), dist.end());
    counts[static_cast<std::size_t>(i)] = static_cast<int>(std::count_if(
        dist.begin(), dist.end(),
        [&](double r) { return r <= (1.0 + rel_tol) * nearest; }));
  }
  return counts;
}

bool is_planar(const Positions& positions) {
  if (positions.rows() == 0) return true;
  if (positions.rows() == 1) return std::abs(positions(0, 2)) < 1e-12;
  const double bound = 1e-4 * mean_nearest_neighbor_distance(positions);
  return positions.col(2).cwiseAbs().maxCoeff() < bound;
}

double max_micromotion_amplitude(const IonCrystal& c) {
  double best = 0.0;
  for (Eigen::Index i = 0; i < c.mm_first.rows(); ++i) {
    best = std::max(best, c.mm_first.row(i).norm());
  }
  return best;
}

double mean_displacement(const Positions& a, const Positions& b) {
  if (a.rows() != b.rows()) {
    throw Error(ErrorCode::MismatchedN, "position sets differ in size");
  }
  if (a.rows() == 0) return 0.0;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) sum += (a.row(i) - b.row(i)).norm();
  return sum / static_cast<double>(a.rows());
}

AmplitudeLawCheck amplitude_law_deviation(const IonCrystal& c) {
  AmplitudeLawCheck out;
  const double d = c.count() > 1 ? mean_nearest_neighbor_distance(c.avg_positions)
                                 : 1e-6;
  const double near_axis = 1e-3 * d;
  const double k1 = 0.5 * c.q;
  const double k2 = c.q * c.q / 32.0;
  for (Eigen::Index i = 0; i < c.avg_positions.rows(); ++i) {
    const double rho = std::hypot(c.avg_positions(i, 0), c.avg_positions(i, 1));
    const double a1 = c.mm_first.row(i).norm();
    const double a2 = c.mm_second.row(i).norm();
    if (rho > near_axis) {
      out.first = std::max(out.first, std::abs(a1 - k1 * rho) / (k1 * rho));
      out.second = std::max(out.second, std::abs(a2 - k2 * rho) / (k2 * rho));
    } else {
      if (a1 > 1.05 * k1 * near_axis) out.first = std::max(out.first, 1.0);
      if (a2 > 1.25 * k2 * near_axis) out.second = std::max(out.second, 1.0);
    }
  }
  return out;
}

}  // namespace iontrap2d
