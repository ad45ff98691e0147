#include <doctest.h>

#include <cmath>

#include "iontrap2d/constants.hpp"
#include "iontrap2d/error.hpp"
#include "iontrap2d/trap_model.hpp"

using namespace iontrap2d;

TEST_SUITE("trap_model") {

TEST_CASE("reference trap scalars") {
  const TrapParams p = reference_blade_trap();
  const double q = mathieu_q(p);
  // q = 2 Q V0 / (m d0^2 W^2), evaluated by hand
  const double by_hand = 2 * 1.602176634e-19 * 440 /
                         (170.9363258 * 1.66053906660e-27 * 4e-8 *
                          std::pow(2 * M_PI * 50e6, 2));
  CHECK(q == doctest::Approx(by_hand).epsilon(1e-12));
  CHECK(q == doctest::Approx(0.125).epsilon(0.01));

  const PseudoFrequencies f = pseudo_frequencies(p);
  CHECK(f.omega_z / kTwoPi == doctest::Approx(3.04e6).epsilon(0.01));
  CHECK(f.omega_r() / kTwoPi == doctest::Approx(510e3).epsilon(0.10));
  CHECK(f.omega_x > f.omega_y);
  CHECK(f.omega_x * f.omega_x / (f.omega_y * f.omega_y) ==
        doctest::Approx(1.002 / 0.998).epsilon(1e-12));
  CHECK(max_resolvable_ions(q) == static_cast<std::size_t>(4.0 / (q * q)));
  CHECK(max_resolvable_ions(q) == doctest::Approx(256).epsilon(0.02));
}

TEST_CASE("pseudopotential radial frequency matches q/sqrt(8) minus dc") {
  TrapParams p = reference_blade_trap();
  p.xy_asymmetry = 0.0;
  const double q = mathieu_q(p);
  const double wrf = q * p.rf_frequency / std::sqrt(8.0);
  const double wz = pseudo_frequencies(p).omega_z;
  // Laplace: the dc term removes half of w_z^2 from each radial direction.
  const double expected = std::sqrt(wrf * wrf - 0.5 * wz * wz);
  CHECK(pseudo_frequencies(p).omega_r() == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("planarity thresholds") {
  CHECK(planarity_threshold(1) == doctest::Approx(std::pow(2.264, 0.25)));
  CHECK(planarity_threshold(100) == doctest::Approx(3.8790).epsilon(1e-4));
  CHECK(micromotion_corrected_threshold(100) ==
        doctest::Approx(1.45 * planarity_threshold(100)));
  for (std::size_t n = 1; n < 300; ++n) {
    CHECK(planarity_threshold(n + 1) > planarity_threshold(n));
  }
}

TEST_CASE("max resolvable ions handles exact quotients") {
  CHECK(max_resolvable_ions(0.2) == 100);
  CHECK(max_resolvable_ions(0.5) == 16);
  CHECK_THROWS_AS(max_resolvable_ions(0.0), Error);
  CHECK_THROWS_AS(max_resolvable_ions(0.95), Error);
}

TEST_CASE("validation errors") {
  auto code_of = [](const TrapParams& p) {
    try {
      validate(p);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  TrapParams p = reference_blade_trap();
  CHECK_NOTHROW(validate(p));

  p.rf_voltage = -1;
  CHECK(code_of(p) == ErrorCode::InvalidParams);

  p = reference_blade_trap();
  p.rf_voltage = 4000;  // q above the Mathieu limit
  CHECK(code_of(p) == ErrorCode::InvalidParams);

  p = reference_blade_trap();
  p.dc_kappa_u0 = 200;  // dc overwhelms the radial pseudopotential
  CHECK(code_of(p) == ErrorCode::NegativeRadialStiffness);
  CHECK_THROWS_AS(pseudo_frequencies(p), Error);

  p = reference_blade_trap();
  p.xy_asymmetry = 0.5;
  CHECK(code_of(p) == ErrorCode::InvalidParams);
}

}
