#pragma once

// File formats: density-matrix JSON, materials JSON, tomography CSV.

#include "json.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "sagnac/errors.hpp"
#include "sagnac/quantum_state.hpp"
#include "sagnac/thermal_optics.hpp"
#include "sagnac/tomography.hpp"

namespace sagnac::io {

using json = nlohmann::json;

// Shortest decimal representation that parses back to the same double.
inline std::string format_number(double x) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

// ---- density matrix: { "re": 4x4, "im": 4x4 }, row-major ----

inline json density_to_json(const state::DensityMatrix4& rho) {
  json re = json::array();
  json im = json::array();
  for (int r = 0; r < 4; ++r) {
    json rr = json::array();
    json ii = json::array();
    for (int c = 0; c < 4; ++c) {
      rr.push_back(rho(r, c).real());
      ii.push_back(rho(r, c).imag());
    }
    re.push_back(rr);
    im.push_back(ii);
  }
  return json{{"re", re}, {"im", im}};
}

inline state::Matrix4c matrix_from_json(const json& j) {
  if (!j.is_object() || !j.contains("re") || !j.contains("im")) {
    throw ParseError("density matrix: expected object with 're' and 'im'");
  }
  state::Matrix4c m;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      try {
        m(r, c) = state::Complex(j.at("re").at(r).at(c).get<double>(), j.at("im").at(r).at(c).get<double>());
      } catch (const json::exception& e) {
        throw ParseError("density matrix: entry (" + std::to_string(r) + "," + std::to_string(c) + "): " + e.what());
      }
    }
  return m;
}

inline state::DensityMatrix4 density_from_json(const json& j) { return state::DensityMatrix4(matrix_from_json(j)); }

// ---- materials: [ { "name", "alpha_per_K", "samples": [ { "wavelength_nm", "n", "dn_dT_per_K" } ] } ] ----

inline json material_to_json(const thermal::MaterialThermalData& m) {
  json samples = json::array();
  for (const auto& s : m.samples()) {
    samples.push_back({{"wavelength_nm", s.wavelength_nm}, {"n", s.n}, {"dn_dT_per_K", s.dn_dT_per_K}});
  }
  return json{{"name", m.name()}, {"alpha_per_K", m.alpha_per_K()}, {"samples", samples}};
}

inline std::vector<thermal::MaterialThermalData> parse_materials(const json& j, const std::string& origin = "materials") {
  if (!j.is_array()) throw ParseError(origin + ": expected a JSON array of materials");
  std::vector<thermal::MaterialThermalData> out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const std::string where = origin + "[" + std::to_string(k) + "]";
    try {
      const auto& e = j.at(k);
      std::vector<thermal::ThermalSample> samples;
      const auto& js = e.at("samples");
      for (std::size_t q = 0; q < js.size(); ++q) {
        samples.push_back({js.at(q).at("wavelength_nm").get<double>(), js.at(q).at("n").get<double>(),
                           js.at(q).at("dn_dT_per_K").get<double>()});
      }
      out.emplace_back(e.at("name").get<std::string>(), std::move(samples), e.at("alpha_per_K").get<double>());
    } catch (const json::exception& e) {
      throw ParseError(where + ": " + e.what());
    } catch (const DomainError& e) {
      throw ParseError(where + ": " + e.what());
    }
  }
  return out;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

inline std::vector<thermal::MaterialThermalData> load_materials(const std::string& path) {
  return parse_materials(read_json_file(path), path);
}

inline const thermal::MaterialThermalData& find_material(const std::vector<thermal::MaterialThermalData>& all,
                                                          const std::string& name) {
  for (const auto& m : all)
    if (m.name() == name) return m;
  throw ParseError("material '" + name + "' not found");
}

// ---- tomography CSV: label,signal_basis,idler_basis,count,accidental ----

inline constexpr const char* kTomographyHeader = "label,signal_basis,idler_basis,count,accidental";

namespace detail {

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline double parse_number(const std::string& s, int row, const char* column) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ParseError("row " + std::to_string(row) + ", column '" + column + "': '" + s + "' is not a number");
  }
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw ParseError("row " + std::to_string(row) + ", column '" + column + "': value must be non-negative");
  }
  return v;
}

inline state::Polarization parse_basis(const std::string& s, int row, const char* column) {
  if (s.size() != 1) {
    throw ParseError("row " + std::to_string(row) + ", column '" + column + "': expected one of H,V,D,A,R,L");
  }
  try {
    return state::polarization_from_char(s[0]);
  } catch (const DomainError&) {
    throw ParseError("row " + std::to_string(row) + ", column '" + column + "': expected one of H,V,D,A,R,L");
  }
}

}  // namespace detail

// Rows are numbered from 1 for the first data row after the header.
inline tomo::TomographyData read_tomography_csv(std::istream& in, double acquisition_time_s = 1.0) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("tomography CSV: empty input");
  if (detail::trim(line) != kTomographyHeader) {
    throw ParseError(std::string("tomography CSV: header must be '") + kTomographyHeader + "'");
  }
  tomo::TomographyData d;
  d.acquisition_time_per_setting_s = acquisition_time_s;
  int row = 0;
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    ++row;
    const auto cells = detail::split(line);
    if (cells.size() != 5) {
      throw ParseError("row " + std::to_string(row) + ": expected 5 columns, found " + std::to_string(cells.size()));
    }
    const auto s = detail::parse_basis(cells[1], row, "signal_basis");
    const auto i = detail::parse_basis(cells[2], row, "idler_basis");
    std::string label = cells[0].empty() ? std::string(1, state::to_char(s)) + state::to_char(i) : cells[0];
    d.settings.emplace_back(state::SingleQubitProjector(s), state::SingleQubitProjector(i), std::move(label));
    d.counts.push_back(detail::parse_number(cells[3], row, "count"));
    d.accidentals.push_back(detail::parse_number(cells[4], row, "accidental"));
  }
  if (row != tomo::kSettingCount) {
    throw ParseError("tomography CSV: expected 16 data rows, found " + std::to_string(row));
  }
  try {
    tomo::validate(d);
  } catch (const DomainError& e) {
    throw ParseError(std::string("tomography CSV: ") + e.what());
  }
  return d;
}

inline tomo::TomographyData load_tomography_csv(const std::string& path, double acquisition_time_s = 1.0) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  try {
    return read_tomography_csv(in, acquisition_time_s);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

// Settings written here must be one of the six named analyzer states.
inline void write_tomography_csv(std::ostream& out, const tomo::TomographyData& d) {
  out << kTomographyHeader << '\n';
  for (std::size_t v = 0; v < d.settings.size(); ++v) {
    const auto& s = d.settings[v];
    out << s.label << ',' << s.signal.label() << ',' << s.idler.label() << ',' << format_number(d.counts[v]) << ','
        << format_number(d.accidentals[v]) << '\n';
  }
}

// Bar-chart table of a density matrix: row,col,basis_row,basis_col,re,im.
inline void write_density_table(std::ostream& out, const state::DensityMatrix4& rho) {
  static constexpr std::array<const char*, 4> names{"HH", "HV", "VH", "VV"};
  out << "row,col,basis_row,basis_col,re,im\n";
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      out << r << ',' << c << ',' << names[r] << ',' << names[c] << ',' << format_number(rho(r, c).real()) << ','
          << format_number(rho(r, c).imag()) << '\n';
    }
}

}  // namespace sagnac::io
