#include "iontrap2d/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "iontrap2d/error.hpp"
#include "iontrap2d/hash.hpp"
#include "text.hpp"

namespace iontrap2d {
namespace {

using detail::format_double;

[[noreturn]] void bad_value(std::string_view key, std::string_view value,
                            std::string_view expected) {
  std::ostringstream os;
  os << "invalid value '" << value << "' for " << key << " (expected "
     << expected << ")";
  throw Error(ErrorCode::ConfigError, os.str());
}

double number(std::string_view key, std::string_view value) {
  const auto v = detail::parse_double(value);
  if (!v || !std::isfinite(*v)) bad_value(key, value, "a number");
  return *v;
}

double positive(std::string_view key, std::string_view value) {
  const double v = number(key, value);
  if (!(v > 0.0)) bad_value(key, value, "a positive number");
  return v;
}

std::size_t count(std::string_view key, std::string_view value,
                  std::size_t min = 1) {
  const auto v = detail::parse_integer<std::size_t>(value);
  if (!v || *v < min) bad_value(key, value, "a positive integer");
  return *v;
}

std::vector<std::size_t> index_list(std::string_view key,
                                    std::string_view value, std::size_t min) {
  std::vector<std::size_t> out;
  value = detail::trim(value);
  if (value.empty()) return out;
  std::size_t start = 0;
  while (start <= value.size()) {
    const auto comma = value.find(',', start);
    const auto item = value.substr(start, comma == std::string_view::npos
                                              ? std::string_view::npos
                                              : comma - start);
    out.push_back(count(key, item, min));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string join(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(v[i]);
  }
  return s;
}

constexpr double kMHz = kTwoPi * 1e6;
constexpr double kKHz = kTwoPi * 1e3;

struct Entry {
  std::string_view key;
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
  bool affects_results = true;
};

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = [] {
    std::vector<Entry> t;
    auto scaled = [&t](std::string_view key, double RunConfig::*field,
                       double unit) {
      t.push_back({key,
                   [=](RunConfig& c, std::string_view v) {
                     c.*field = positive(key, v) * unit;
                   },
                   [=](const RunConfig& c) {
                     return format_double(c.*field / unit);
                   }});
    };
    auto trap = [&t](std::string_view key, double TrapParams::*field,
                     double unit) {
      t.push_back({key,
                   [=](RunConfig& c, std::string_view v) {
                     c.trap.*field = positive(key, v) * unit;
                   },
                   [=](const RunConfig& c) {
                     return format_double(c.trap.*field / unit);
                   }});
    };

    trap("rf_voltage_v", &TrapParams::rf_voltage, 1.0);
    trap("dc_kappa_u0_v", &TrapParams::dc_kappa_u0, 1.0);
    trap("rf_frequency_mhz", &TrapParams::rf_frequency, kMHz);
    trap("radial_size_um", &TrapParams::radial_size, 1e-6);
    trap("axial_size_um", &TrapParams::axial_size, 1e-6);
    trap("ion_mass_amu", &TrapParams::ion_mass, kAtomicMassUnit);
    trap("ion_charge_e", &TrapParams::ion_charge, kElementaryCharge);
    t.push_back({"xy_asymmetry",
                 [](RunConfig& c, std::string_view v) {
                   const double a = number("xy_asymmetry", v);
                   if (!(a >= 0.0 && a < 0.1)) {
                     bad_value("xy_asymmetry", v, "a value in [0, 0.1)");
                   }
                   c.trap.xy_asymmetry = a;
                 },
                 [](const RunConfig& c) {
                   return format_double(c.trap.xy_asymmetry);
                 }});

    t.push_back({"ions",
                 [](RunConfig& c, std::string_view v) {
                   c.ions = count("ions", v);
                 },
                 [](const RunConfig& c) { return std::to_string(c.ions); }});
    t.push_back({"seed",
                 [](RunConfig& c, std::string_view v) {
                   const auto s = detail::parse_integer<std::uint64_t>(v);
                   if (!s) bad_value("seed", v, "a non-negative integer");
                   c.seed = *s;
                 },
                 [](const RunConfig& c) { return std::to_string(c.seed); }});
    t.push_back({"micromotion",
                 [](RunConfig& c, std::string_view v) {
                   v = detail::trim(v);
                   if (v == "on") c.micromotion = MicromotionMode::On;
                   else if (v == "off") c.micromotion = MicromotionMode::Off;
                   else if (v == "both") c.micromotion = MicromotionMode::Both;
                   else bad_value("micromotion", v, "on, off or both");
                 },
                 [](const RunConfig& c) -> std::string {
                   switch (c.micromotion) {
                     case MicromotionMode::On: return "on";
                     case MicromotionMode::Off: return "off";
                     case MicromotionMode::Both: break;
                   }
                   return "both";
                 }});
    t.push_back({"restarts",
                 [](RunConfig& c, std::string_view v) {
                   c.solver.restarts = static_cast<int>(count("restarts", v));
                 },
                 [](const RunConfig& c) {
                   return std::to_string(c.solver.restarts);
                 }});
    t.push_back({"force_tolerance",
                 [](RunConfig& c, std::string_view v) {
                   c.solver.force_tolerance = positive("force_tolerance", v);
                 },
                 [](const RunConfig& c) {
                   return format_double(c.solver.force_tolerance);
                 }});
    t.push_back({"hb_tolerance",
                 [](RunConfig& c, std::string_view v) {
                   c.solver.harmonic_balance_tolerance =
                       positive("hb_tolerance", v);
                 },
                 [](const RunConfig& c) {
                   return format_double(c.solver.harmonic_balance_tolerance);
                 }});
    t.push_back({"quadrature_points",
                 [](RunConfig& c, std::string_view v) {
                   c.solver.quadrature_points =
                       static_cast<int>(count("quadrature_points", v, 4));
                 },
                 [](const RunConfig& c) {
                   return std::to_string(c.solver.quadrature_points);
                 }});

    t.push_back({"scan_ions",
                 [](RunConfig& c, std::string_view v) {
                   c.scan_ions = index_list("scan_ions", v, 2);
                   if (c.scan_ions.empty()) {
                     bad_value("scan_ions", v, "a comma-separated list");
                   }
                 },
                 [](const RunConfig& c) { return join(c.scan_ions); }});
    scaled("scan_omega_r_mhz", &RunConfig::scan_omega_r, kMHz);
    scaled("scan_tolerance", &RunConfig::scan_tolerance, 1.0);
    t.push_back({"jobs",
                 [](RunConfig& c, std::string_view v) {
                   c.jobs = static_cast<int>(count("jobs", v));
                 },
                 [](const RunConfig& c) { return std::to_string(c.jobs); },
                 false});

    scaled("rabi_mhz", &RunConfig::carrier_rabi, kMHz);
    scaled("wavevector_diff_per_um", &RunConfig::wavevector_diff, 1e6);
    t.push_back({"detuning_offset_khz",
                 [](RunConfig& c, std::string_view v) {
                   if (detail::trim(v) == "auto") {
                     c.detuning_offset.reset();
                   } else {
                     c.detuning_offset =
                         positive("detuning_offset_khz", v) * kKHz;
                   }
                 },
                 [](const RunConfig& c) {
                   return c.detuning_offset
                              ? format_double(*c.detuning_offset / kKHz)
                              : std::string("auto");
                 }});
    scaled("resonance_guard_khz", &RunConfig::resonance_guard, kKHz);
    t.push_back({"transverse_field_khz",
                 [](RunConfig& c, std::string_view v) {
                   c.transverse_field = number("transverse_field_khz", v) * kKHz;
                 },
                 [](const RunConfig& c) {
                   return format_double(c.transverse_field / kKHz);
                 }});
    t.push_back({"mask",
                 [](RunConfig& c, std::string_view v) {
                   v = detail::trim(v);
                   if (v == "none") {
                     c.mask.reset();
                     return;
                   }
                   const auto g = parse_geometry(v);
                   if (!g) {
                     bad_value("mask", v,
                               "none, kagome, honeycomb, rectangular, ladder "
                               "or custom");
                   }
                   c.mask = *g;
                 },
                 [](const RunConfig& c) {
                   return c.mask ? std::string(to_string(*c.mask))
                                 : std::string("none");
                 }});
    t.push_back({"mask_ions",
                 [](RunConfig& c, std::string_view v) {
                   c.mask_ions = index_list("mask_ions", v, 0);
                 },
                 [](const RunConfig& c) { return join(c.mask_ions); }});
    t.push_back({"range_reference",
                 [](RunConfig& c, std::string_view v) {
                   v = detail::trim(v);
                   if (v == "edge") c.range_reference = RangeReference::EdgeSpin;
                   else if (v == "all") c.range_reference = RangeReference::AllPairs;
                   else bad_value("range_reference", v, "edge or all");
                 },
                 [](const RunConfig& c) {
                   return std::string(c.range_reference == RangeReference::EdgeSpin
                                          ? "edge"
                                          : "all");
                 }});
    t.push_back({"hamiltonian",
                 [](RunConfig& c, std::string_view v) {
                   v = detail::trim(v);
                   if (v == "auto") c.hamiltonian = HamiltonianExport::Auto;
                   else if (v == "on") c.hamiltonian = HamiltonianExport::On;
                   else if (v == "off") c.hamiltonian = HamiltonianExport::Off;
                   else bad_value("hamiltonian", v, "auto, on or off");
                 },
                 [](const RunConfig& c) -> std::string {
                   switch (c.hamiltonian) {
                     case HamiltonianExport::On: return "on";
                     case HamiltonianExport::Off: return "off";
                     case HamiltonianExport::Auto: break;
                   }
                   return "auto";
                 }});
    return t;
  }();
  return table;
}

}  // namespace

RunConfig::RunConfig()
    : scan_omega_r(kTwoPi * 0.5e6),
      carrier_rabi(kTwoPi * 1.5e6),
      resonance_guard(kTwoPi * 5e3) {}

std::string RunConfig::canonical() const {
  std::vector<std::pair<std::string_view, std::string>> lines;
  for (const auto& e : entries()) {
    if (e.affects_results) lines.emplace_back(e.key, e.get(*this));
  }
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const auto& [k, v] : lines) {
    out.append(k).append(" = ").append(v).append("\n");
  }
  return out;
}

std::string RunConfig::hash() const { return hex64(fnv1a64(canonical())); }

ScanOptions RunConfig::scan_options() const {
  ScanOptions o;
  o.relative_tolerance = scan_tolerance;
  o.seed = seed;
  o.jobs = jobs;
  o.solver = solver;
  return o;
}

void set_config_value(RunConfig& c, std::string_view key,
                      std::string_view value) {
  key = detail::trim(key);
  for (const auto& e : entries()) {
    if (e.key == key) {
      e.set(c, detail::trim(value));
      return;
    }
  }
  throw Error(ErrorCode::ConfigError,
              "unknown key '" + std::string(key) + "'");
}

RunConfig parse_config(std::string_view text) {
  RunConfig c;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  std::vector<std::string> seen;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    auto fail = [&](const std::string& what) {
      throw Error(ErrorCode::ConfigError,
                  "line " + std::to_string(line_no) + ": " + what);
    };
    if (eq == std::string_view::npos) fail("expected 'key = value'");
    const std::string key(detail::trim(line.substr(0, eq)));
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) {
      fail("duplicate key '" + key + "'");
    }
    seen.push_back(key);
    try {
      set_config_value(c, key, line.substr(eq + 1));
    } catch (const Error& e) {
      fail(e.what());
    }
  }
  try {
    validate(c.trap);
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigError, e.what());
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::ConfigError,
                "cannot read config file " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigError, path.string() + ": " + e.what());
  }
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& e : entries()) keys.emplace_back(e.key);
  return keys;
}

}  // namespace iontrap2d
