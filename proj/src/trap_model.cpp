#include "iontrap2d/trap_model.hpp"

#include <cmath>
#include <sstream>

#include "iontrap2d/constants.hpp"
#include "iontrap2d/error.hpp"

namespace iontrap2d {

double PseudoFrequencies::omega_r() const {
  return std::sqrt(0.5 * (omega_x * omega_x + omega_y * omega_y));
}

TrapParams reference_blade_trap() {
  TrapParams p;
  p.rf_voltage = 440.0;
  p.dc_kappa_u0 = 13.0;
  p.rf_frequency = kTwoPi * 50e6;
  p.radial_size = 200e-6;
  p.axial_size = 200e-6;
  p.ion_mass = kYb171Mass;
  p.ion_charge = kElementaryCharge;
  p.xy_asymmetry = 0.002;
  return p;
}

void validate(const TrapParams& p) {
  auto require_positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      std::ostringstream os;
      os << name << " must be positive and finite (got " << v << ")";
      throw Error(ErrorCode::InvalidParams, os.str());
    }
  };
  require_positive(p.rf_voltage, "rf_voltage");
  require_positive(p.dc_kappa_u0, "dc_kappa_u0");
  require_positive(p.rf_frequency, "rf_frequency");
  require_positive(p.radial_size, "radial_size");
  require_positive(p.axial_size, "axial_size");
  require_positive(p.ion_mass, "ion_mass");
  require_positive(p.ion_charge, "ion_charge");
  if (!(p.xy_asymmetry >= 0.0 && p.xy_asymmetry < 0.1)) {
    throw Error(ErrorCode::InvalidParams, "xy_asymmetry must lie in [0, 0.1)");
  }
  const double q = mathieu_q(p);
  if (!(q < kMathieuStabilityLimit)) {
    std::ostringstream os;
    os << "Mathieu q = " << q << " exceeds the single-ion stability limit "
       << kMathieuStabilityLimit;
    throw Error(ErrorCode::InvalidParams, os.str());
  }
  if (!(radial_stiffness(p) > 0.0)) {
    throw Error(ErrorCode::NegativeRadialStiffness,
                "dc defocusing exceeds the rf pseudopotential confinement");
  }
}

double mathieu_q(const TrapParams& p) {
  return 2.0 * p.ion_charge * p.rf_voltage /
         (p.ion_mass * p.radial_size * p.radial_size * p.rf_frequency *
          p.rf_frequency);
}

double radial_stiffness(const TrapParams& p) {
  const double q = mathieu_q(p);
  return p.ion_charge / p.ion_mass *
         (q * p.rf_voltage / (4.0 * p.radial_size * p.radial_size) -
          p.dc_kappa_u0 / (p.axial_size * p.axial_size));
}

PseudoFrequencies pseudo_frequencies(const TrapParams& p) {
  const double wr2 = radial_stiffness(p);
  if (!(wr2 > 0.0)) {
    throw Error(ErrorCode::NegativeRadialStiffness,
                "q V0 / 4 d0^2 must exceed kappa U0 / z0^2");
  }
  PseudoFrequencies f;
  f.omega_x = std::sqrt(wr2 * (1.0 + p.xy_asymmetry));
  f.omega_y = std::sqrt(wr2 * (1.0 - p.xy_asymmetry));
  f.omega_z = std::sqrt(2.0 * p.ion_charge * p.dc_kappa_u0 /
                        (p.ion_mass * p.axial_size * p.axial_size));
  return f;
}

double planarity_threshold(std::size_t n) {
  return std::pow(2.264 * static_cast<double>(n), 0.25);
}

double micromotion_corrected_threshold(std::size_t n, double factor) {
  return factor * planarity_threshold(n);
}

std::size_t max_resolvable_ions(double q) {
  if (!(q > 0.0 && q < kMathieuStabilityLimit)) {
    throw Error(ErrorCode::InvalidArgument,
                "max_resolvable_ions requires 0 < q < 0.908");
  }
  // The relative nudge keeps exact quotients such as 4 / 0.2^2 from rounding
  // down to the integer below.
  return static_cast<std::size_t>(std::floor(4.0 / (q * q) * (1.0 + 1e-12)));
}

}  // namespace iontrap2d
