#include "iontrap2d/io.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "iontrap2d/constants.hpp"
#include "iontrap2d/error.hpp"
#include "text.hpp"

#ifndef IONTRAP2D_VERSION
#define IONTRAP2D_VERSION "0.0.0"
#endif

namespace iontrap2d {
namespace {

using json = nlohmann::ordered_json;
using detail::format_double;

void stamp(json& j, const Provenance& p) {
  j["toolkit_version"] = p.toolkit_version;
  j["config_hash"] = p.config_hash;
}

std::string csv_header(const Provenance& p) {
  return "# toolkit_version " + p.toolkit_version + "\n# config_hash " +
         p.config_hash + "\n";
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json rows_um(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k) * 1e6);
    out.push_back(std::move(row));
  }
  return out;
}

template <typename Matrix>
Matrix rows_from_um(const json& j, Eigen::Index rows, Eigen::Index cols,
                    const char* field) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows) {
    throw Error(ErrorCode::IoError,
                std::string("crystal field ") + field + " has the wrong length");
  }
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw Error(ErrorCode::IoError,
                  std::string("crystal field ") + field + " has a bad row");
    }
    for (Eigen::Index k = 0; k < cols; ++k) {
      m(i, k) = row[static_cast<std::size_t>(k)].get<double>() * 1e-6;
    }
  }
  return m;
}

json parse(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::IoError,
                std::string("malformed ") + what + ": " + e.what());
  }
}

}  // namespace

const char* toolkit_version() noexcept { return IONTRAP2D_VERSION; }

std::string crystal_json(const IonCrystal& c, const Provenance& p) {
  json j;
  j["n"] = c.count();
  j["q"] = c.q;
  j["params"] = {
      {"rf_voltage_v", c.params.rf_voltage},
      {"dc_kappa_u0_v", c.params.dc_kappa_u0},
      {"rf_frequency_hz", c.params.rf_frequency / kTwoPi},
      {"radial_size_m", c.params.radial_size},
      {"axial_size_m", c.params.axial_size},
      {"ion_mass_kg", c.params.ion_mass},
      {"ion_charge_c", c.params.ion_charge},
      {"xy_asymmetry", c.params.xy_asymmetry},
  };
  j["positions_um"] = rows_um(c.avg_positions);
  j["mm1_um"] = rows_um(c.mm_first);
  j["mm2_um"] = rows_um(c.mm_second);
  j["residual"] = c.residual;
  j["energy_J"] = c.energy;
  stamp(j, p);
  return dump(j);
}

IonCrystal parse_crystal_json(const std::string& text) {
  const json j = parse(text, "crystal snapshot");
  try {
    IonCrystal c;
    const auto n = static_cast<Eigen::Index>(j.at("n").get<std::size_t>());
    const json& pr = j.at("params");
    c.params.rf_voltage = pr.at("rf_voltage_v").get<double>();
    c.params.dc_kappa_u0 = pr.at("dc_kappa_u0_v").get<double>();
    c.params.rf_frequency = pr.at("rf_frequency_hz").get<double>() * kTwoPi;
    c.params.radial_size = pr.at("radial_size_m").get<double>();
    c.params.axial_size = pr.at("axial_size_m").get<double>();
    c.params.ion_mass = pr.at("ion_mass_kg").get<double>();
    c.params.ion_charge = pr.at("ion_charge_c").get<double>();
    c.params.xy_asymmetry = pr.at("xy_asymmetry").get<double>();
    c.q = j.at("q").get<double>();
    c.avg_positions =
        rows_from_um<Positions>(j.at("positions_um"), n, 3, "positions_um");
    c.mm_first = rows_from_um<PlanarVectors>(j.at("mm1_um"), n, 2, "mm1_um");
    c.mm_second = rows_from_um<PlanarVectors>(j.at("mm2_um"), n, 2, "mm2_um");
    c.residual = j.at("residual").get<double>();
    c.energy = j.at("energy_J").get<double>();
    return c;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::IoError,
                std::string("incomplete crystal snapshot: ") + e.what());
  }
}

std::string spectrum_csv(const ModeSpectrum& s, const Provenance& p) {
  std::string out = csv_header(p);
  out += "mode_index,freq_MHz,is_com,micromotion_included\n";
  const Eigen::VectorXd f = s.signed_frequencies();
  const auto com = s.com_index();
  for (Eigen::Index m = 0; m < f.size(); ++m) {
    out += std::to_string(m) + "," + format_double(f[m] / kTwoPi / 1e6) + "," +
           (com && *com == m ? "1" : "0") + "," +
           (s.micromotion_included ? "1" : "0") + "\n";
  }
  return out;
}

std::string spectrum_json(const ModeSpectrum& s, const Provenance& p) {
  json j;
  j["n"] = s.count();
  j["micromotion_included"] = s.micromotion_included;
  j["source_crystal"] = s.source_crystal;
  j["eigenvalues_rad2_per_s2"] =
      std::vector<double>(s.eigenvalues.data(),
                          s.eigenvalues.data() + s.eigenvalues.size());
  json rows = json::array();
  for (Eigen::Index i = 0; i < s.eigenvectors.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(s.eigenvectors.cols()));
    for (Eigen::Index m = 0; m < s.eigenvectors.cols(); ++m) {
      row[static_cast<std::size_t>(m)] = s.eigenvectors(i, m);
    }
    rows.push_back(row);
  }
  j["eigenvectors"] = std::move(rows);
  stamp(j, p);
  return dump(j);
}

ModeSpectrum parse_spectrum_json(const std::string& text) {
  const json j = parse(text, "spectrum sidecar");
  try {
    ModeSpectrum s;
    const auto n = static_cast<Eigen::Index>(j.at("n").get<std::size_t>());
    s.micromotion_included = j.at("micromotion_included").get<bool>();
    s.source_crystal = j.at("source_crystal").get<std::string>();
    const auto ev = j.at("eigenvalues_rad2_per_s2").get<std::vector<double>>();
    const json& rows = j.at("eigenvectors");
    if (static_cast<Eigen::Index>(ev.size()) != n ||
        static_cast<Eigen::Index>(rows.size()) != n) {
      throw Error(ErrorCode::IoError, "spectrum sidecar size mismatch");
    }
    s.eigenvalues = Eigen::Map<const Eigen::VectorXd>(ev.data(), n);
    s.eigenvectors.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto row = rows[static_cast<std::size_t>(i)].get<std::vector<double>>();
      if (static_cast<Eigen::Index>(row.size()) != n) {
        throw Error(ErrorCode::IoError, "spectrum sidecar has a ragged row");
      }
      for (Eigen::Index m = 0; m < n; ++m) {
        s.eigenvectors(i, m) = row[static_cast<std::size_t>(m)];
      }
    }
    return s;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::IoError,
                std::string("incomplete spectrum sidecar: ") + e.what());
  }
}

std::string mode_shift_csv(const ModeSpectrum& without,
                           const ModeSpectrum& with_mm, const Provenance& p) {
  const std::vector<double> shift = mode_shift_report(without, with_mm);
  const Eigen::VectorXd f0 = without.signed_frequencies();
  const Eigen::VectorXd f1 = with_mm.signed_frequencies();
  std::string out = csv_header(p);
  out += "mode_index,freq_without_MHz,freq_with_MHz,shift_kHz\n";
  for (std::size_t m = 0; m < shift.size(); ++m) {
    const auto k = static_cast<Eigen::Index>(m);
    out += std::to_string(m) + "," + format_double(f0[k] / kTwoPi / 1e6) + "," +
           format_double(f1[k] / kTwoPi / 1e6) + "," +
           format_double(shift[m] / kTwoPi / 1e3) + "\n";
  }
  return out;
}

std::string boundary_csv(const StabilityBoundary& b, const Provenance& p) {
  std::string out = csv_header(p);
  out += "N,critical_ratio,micromotion\n";
  for (const auto& pt : b.points) {
    out += std::to_string(pt.n) + "," + format_double(pt.critical_ratio) + "," +
           (pt.micromotion_included ? "1" : "0") + "\n";
  }
  return out;
}

std::string boundary_fit_json(const PowerLawFit& f, const Provenance& p) {
  json j;
  j["prefactor"] = f.prefactor;
  j["exponent"] = f.exponent;
  j["stderr"] = f.standard_error;
  stamp(j, p);
  return dump(j);
}

std::string coupling_csv(const CouplingMatrix& c, const Provenance& p) {
  std::string out = csv_header(p);
  out += "# geometry " + c.geometry + "\n";
  out += "i,j,J_over_2pi_Hz\n";
  for (Eigen::Index a = 0; a < c.J.rows(); ++a) {
    for (Eigen::Index b = a + 1; b < c.J.cols(); ++b) {
      out += std::to_string(c.ions[static_cast<std::size_t>(a)]) + "," +
             std::to_string(c.ions[static_cast<std::size_t>(b)]) + "," +
             format_double(c.J(a, b) / kTwoPi) + "\n";
    }
  }
  return out;
}

std::string range_fit_json(const RangeFit& f, RangeReference reference,
                           double detuning, double omega_com,
                           const Provenance& p) {
  json j;
  j["alpha"] = f.exponent;
  j["stderr"] = f.standard_error;
  j["reference"] = reference == RangeReference::EdgeSpin ? "edge" : "all";
  j["pairs"] = f.pairs;
  j["bins"] = f.bins;
  j["detuning_offset_hz"] = (detuning - omega_com) / kTwoPi;
  stamp(j, p);
  return dump(j);
}

std::string mask_json(const LatticeMask& m, const Provenance& p) {
  json j;
  j["geometry"] = std::string(to_string(m.geometry));
  j["participating"] = m.participating;
  stamp(j, p);
  return dump(j);
}

std::string hamiltonian_text(const Eigen::MatrixXcd& h, std::size_t spins,
                             const Provenance& p) {
  std::string out = csv_header(p);
  out += "# ising hamiltonian, rad/s, row-major, each entry 're im'\n";
  out += "# spins " + std::to_string(spins) + "\n";
  out += "# dimension " + std::to_string(h.rows()) + "\n";
  for (Eigen::Index r = 0; r < h.rows(); ++r) {
    for (Eigen::Index c = 0; c < h.cols(); ++c) {
      if (c) out += ' ';
      out += format_double(h(r, c).real()) + ' ' + format_double(h(r, c).imag());
    }
    out += '\n';
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "short write to " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace iontrap2d
