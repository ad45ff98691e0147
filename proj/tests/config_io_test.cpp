#include <doctest.h>

#include <filesystem>
#include <random>

#include "iontrap2d/config.hpp"
#include "iontrap2d/constants.hpp"
#include "iontrap2d/error.hpp"
#include "iontrap2d/io.hpp"
#include "iontrap2d/normal_modes.hpp"

using namespace iontrap2d;

namespace {

std::string message_of(std::string_view text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConfigError);
    return e.what();
  }
  FAIL("config accepted");
  return {};
}

const Provenance kProv{"0.1.0", "00000000deadbeef"};

}  // namespace

TEST_SUITE("config_io") {

TEST_CASE("defaults reproduce the reference trap") {
  const RunConfig c = parse_config("");
  const TrapParams p = reference_blade_trap();
  CHECK(c.trap.rf_voltage == p.rf_voltage);
  CHECK(c.trap.rf_frequency == doctest::Approx(p.rf_frequency).epsilon(1e-15));
  CHECK(c.ions == 100);
  CHECK(c.micromotion == MicromotionMode::Both);
  CHECK(c.carrier_rabi == doctest::Approx(kTwoPi * 1.5e6));
  CHECK(c.resonance_guard == doctest::Approx(kTwoPi * 5e3));
}

TEST_CASE("parsing with comments and units") {
  const RunConfig c = parse_config(
      "# comment\n"
      "ions = 12   # trailing\n"
      "\n"
      "rf_voltage_v = 450\n"
      "scan_ions = 4, 8,16,32\n"
      "micromotion = off\n"
      "detuning_offset_khz = 200\n"
      "mask = kagome\n");
  CHECK(c.ions == 12);
  CHECK(c.trap.rf_voltage == 450.0);
  CHECK(c.scan_ions == std::vector<std::size_t>{4, 8, 16, 32});
  CHECK(c.micromotion == MicromotionMode::Off);
  CHECK(*c.detuning_offset == doctest::Approx(kTwoPi * 200e3));
  CHECK(*c.mask == LatticeGeometry::Kagome);
}

TEST_CASE("diagnostics name the line and key") {
  CHECK(message_of("ions = 5\nbogus_key = 1\n").find("line 2") != std::string::npos);
  CHECK(message_of("ions = 5\nbogus_key = 1\n").find("bogus_key") != std::string::npos);
  CHECK(message_of("ions = five\n").find("line 1") != std::string::npos);
  CHECK(message_of("ions = 3\nions = 4\n").find("line 2") != std::string::npos);
  CHECK(message_of("no equals sign\n").find("line 1") != std::string::npos);
  CHECK(message_of("micromotion = sometimes\n").find("micromotion") != std::string::npos);
  CHECK(message_of("dc_kappa_u0_v = 500\n").size() > 0);  // trap invalid
  CHECK(message_of("rf_voltage_v = -3\n").size() > 0);
}

TEST_CASE("hash is stable and sensitive") {
  const RunConfig a = parse_config("ions = 10\nseed = 4\n");
  const RunConfig b = parse_config("seed = 4\n\nions = 10 # same\n");
  CHECK(a.hash() == b.hash());
  CHECK(a.hash().size() == 16);
  CHECK(parse_config("ions = 10\nseed = 4\njobs = 8\n").hash() == a.hash());
  CHECK(parse_config("ions = 11\nseed = 4\n").hash() != a.hash());
}

TEST_CASE("canonical form parses back to the same config") {
  std::mt19937 gen(11);
  std::uniform_int_distribution<int> ions(1, 400);
  std::uniform_real_distribution<double> volts(440.0, 600.0);
  for (int trial = 0; trial < 25; ++trial) {
    RunConfig c;
    set_config_value(c, "ions", std::to_string(ions(gen)));
    set_config_value(c, "rf_voltage_v", std::to_string(volts(gen)));
    set_config_value(c, "seed", std::to_string(trial));
    const RunConfig back = parse_config(c.canonical());
    CHECK(back.canonical() == c.canonical());
    CHECK(back.hash() == c.hash());
  }
  CHECK(config_keys().size() >= 20);
}

TEST_CASE("crystal snapshot round trip") {
  IonCrystal c = static_crystal(reference_blade_trap(), Positions::Random(5, 3) * 1e-5);
  c.avg_positions.col(2).setZero();
  c.mm_first = PlanarVectors::Random(5, 2) * 1e-6;
  c.mm_second = PlanarVectors::Random(5, 2) * 1e-9;
  c.residual = 3.5e-11;
  const std::string text = crystal_json(c, kProv);
  CHECK(text.find("\"config_hash\": \"00000000deadbeef\"") != std::string::npos);
  CHECK(text.find("\"toolkit_version\": \"0.1.0\"") != std::string::npos);
  const IonCrystal back = parse_crystal_json(text);
  CHECK(back.count() == 5);
  CHECK((back.avg_positions - c.avg_positions).norm() < 1e-15 * c.avg_positions.norm());
  CHECK((back.mm_first - c.mm_first).norm() < 1e-15 * c.mm_first.norm());
  CHECK(back.residual == c.residual);
  CHECK(back.params.rf_voltage == c.params.rf_voltage);
  CHECK_THROWS_AS(parse_crystal_json("{\"n\": 3}"), Error);
}

TEST_CASE("spectrum files") {
  Positions r(3, 3);
  r << -5e-6, 0, 0, 0, 1e-6, 0, 5e-6, 0, 0;
  const ModeSpectrum s = mode_spectrum(axial_hessian(static_crystal(reference_blade_trap(), r), false));
  const std::string csv = spectrum_csv(s, kProv);
  CHECK(csv.rfind("# toolkit_version 0.1.0\n# config_hash 00000000deadbeef\n", 0) == 0);
  CHECK(csv.find("mode_index,freq_MHz,is_com,micromotion_included\n") != std::string::npos);
  CHECK(csv.find("\n0,") != std::string::npos);
  const ModeSpectrum back = parse_spectrum_json(spectrum_json(s, kProv));
  CHECK(back.eigenvalues == s.eigenvalues);
  CHECK(back.eigenvectors == s.eigenvectors);
  CHECK(back.micromotion_included == s.micromotion_included);
}

TEST_CASE("file helpers") {
  const auto dir = std::filesystem::temp_directory_path() / "it2d_io_test";
  std::filesystem::create_directories(dir);
  write_text(dir / "a.txt", "hello\n");
  CHECK(read_text(dir / "a.txt") == "hello\n");
  try {
    read_text(dir / "missing.txt");
    FAIL("expected IoError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IoError);
  }
  std::filesystem::remove_all(dir);
}

}
