#pragma once

// FIRE relaxation (Bitzek et al., PRL 97, 170201) for a generic force field.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace iontrap2d::detail {

struct FireSettings {
  double dt = 0.05;
  double dt_max = 0.5;
  long max_steps = 20000;
  double max_move = 0.1;  // per-coordinate displacement cap per step
};

/// `force(x, f)` fills f with the force at x; `done(x, f)` ends the run.
/// Returns the number of steps taken.
template <class Force, class Done>
long fire_relax(Eigen::VectorXd& x, Force&& force, Done&& done,
                const FireSettings& s) {
  constexpr double kAlphaStart = 0.1;
  constexpr double kFInc = 1.1;
  constexpr double kFDec = 0.5;
  constexpr double kFAlpha = 0.99;
  constexpr int kNMin = 5;

  Eigen::VectorXd v = Eigen::VectorXd::Zero(x.size());
  Eigen::VectorXd f(x.size());
  force(x, f);
  double dt = s.dt;
  double alpha = kAlphaStart;
  int positive_steps = 0;
  long step = 0;
  for (; step < s.max_steps; ++step) {
    if (done(x, f)) break;
    const double power = f.dot(v);
    if (power > 0.0) {
      const double fn = f.norm();
      if (fn > 0.0) v = (1.0 - alpha) * v + alpha * v.norm() * f / fn;
      if (++positive_steps > kNMin) {
        dt = std::min(dt * kFInc, s.dt_max);
        alpha *= kFAlpha;
      }
    } else {
      v.setZero();
      dt *= kFDec;
      alpha = kAlphaStart;
      positive_steps = 0;
    }
    v += dt * f;
    Eigen::VectorXd dx = dt * v;
    const double biggest = dx.cwiseAbs().maxCoeff();
    if (biggest > s.max_move) dx *= s.max_move / biggest;
    x += dx;
    force(x, f);
  }
  return step;
}

}  // namespace iontrap2d::detail
