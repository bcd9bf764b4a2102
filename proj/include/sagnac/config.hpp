#pragma once

// Experiment configuration: one JSON file with nested blocks per module.
//
// {
//   "seed": 2024,
//   "output_dir": "out",
//   "materials_file": "materials.json",          // optional, default built-in BK7
//   "drift":  { "material", "element_length_mm", "delta_T_K",
//               "wavelengths_nm": { "pump", "signal", "idler" },
//               "reference_wavelength_nm", "delta_T_sweep_K": [...], "length_sweep_mm": [...] },
//   "source": { "crystal_length_mm", "reference_length_mm", "reference_bandwidth_nm",
//               "split_angle_rad", "phi0_rad", "signal_center_nm", "quoted_delta_nu_GHz",
//               "rates": { "singles_signal", "dark_signal", "coincidences", "accidentals",
//                          "pump_power_mW", "eta_signal", "eta_idler" } },
//   "link":   { "dispersion_ps_nm_km", "length_km", "loss_dB_km", "idler_bandwidth_nm",
//               "detectors": { "signal": {...}, "idler": {...} }, "coincidence_window_ns" },
//   "tomography": { "settings": ["HH", ...], "acquisition_time_s", "pairs_per_setting",
//                   "accidentals": "from_rates" | number, "include_thermal_drift" }
// }
//
// Relative file paths resolve against the directory of the config file.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sagnac/errors.hpp"
#include "sagnac/io.hpp"
#include "sagnac/link_detection.hpp"
#include "sagnac/source_model.hpp"
#include "sagnac/thermal_optics.hpp"
#include "sagnac/tomography.hpp"

namespace sagnac::config {

using io::json;

class ConfigError : public ParseError {
 public:
  using ParseError::ParseError;
};

struct DriftBlock {
  std::string material = "BK7";
  double element_length_mm = 8.0;
  double delta_T_K = 1.0;
  thermal::WavelengthTriple wavelengths = thermal::nominal_triple();
  double reference_wavelength_nm = 532.0;
  std::vector<double> delta_T_sweep_K;
  std::vector<double> length_sweep_mm;
};

struct SourceBlock {
  double crystal_length_mm = 30.0;
  double reference_length_mm = 30.0;
  double reference_bandwidth_nm = 0.4;
  double split_angle_rad = 0.7853981633974483;
  double phi0_rad = 0.0;
  double signal_center_nm = 810.0;
  std::optional<double> quoted_delta_nu_GHz;
  source::SourceRates rates{600000.0, 1000.0, 9300.0, 400.0, 1.0, 0.30, 0.15};
};

struct LinkBlock {
  link::FiberConfig fiber{18.0, 0.0, 0.0};
  double idler_bandwidth_nm = 1.5;
  link::DetectorConfig signal_detector{0.30, 1000.0, 0.0, false};
  link::DetectorConfig idler_detector{0.15, 0.0, 2.5, true};
  double coincidence_window_ns = 2.5;
};

struct TomographyBlock {
  std::vector<std::string> settings;  // empty: standard 16
  double acquisition_time_s = 10.0;
  std::optional<double> pairs_per_setting;
  std::optional<double> accidental_per_setting;  // unset: derive from rates
  bool include_thermal_drift = true;
};

struct ExperimentConfig {
  std::string path;
  std::optional<std::uint64_t> seed;
  std::string output_dir;
  std::vector<thermal::MaterialThermalData> materials{thermal::bk7()};
  std::optional<DriftBlock> drift;
  SourceBlock source;
  LinkBlock link;
  TomographyBlock tomography;
};

namespace detail {

class Reader {
 public:
  Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + ": expected an object");
  }

  bool has(const char* key) const { return j_.contains(key); }

  std::string path(const char* key) const { return where_ + "." + key; }

  double number(const char* key, double fallback) const {
    if (!has(key)) return fallback;
    return number(key);
  }

  double number(const char* key) const {
    if (!has(key)) throw ConfigError(path(key) + ": missing required field");
    const auto& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(path(key) + ": expected a number");
    return v.get<double>();
  }

  std::optional<double> optional_number(const char* key) const {
    if (!has(key) || j_.at(key).is_null()) return std::nullopt;
    return number(key);
  }

  std::string string(const char* key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(path(key) + ": expected a string");
    return v.get<std::string>();
  }

  bool boolean(const char* key, bool fallback) const {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_boolean()) throw ConfigError(path(key) + ": expected true or false");
    return v.get<bool>();
  }

  std::vector<double> numbers(const char* key) const {
    std::vector<double> out;
    if (!has(key)) return out;
    const auto& v = j_.at(key);
    if (!v.is_array()) throw ConfigError(path(key) + ": expected an array of numbers");
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (!v[k].is_number()) throw ConfigError(path(key) + "[" + std::to_string(k) + "]: expected a number");
      out.push_back(v[k].get<double>());
    }
    return out;
  }

  Reader child(const char* key) const {
    if (!has(key)) throw ConfigError(path(key) + ": missing block");
    return Reader(j_.at(key), path(key));
  }

  const json& raw(const char* key) const { return j_.at(key); }

 private:
  const json& j_;
  std::string where_;
};

inline link::DetectorConfig parse_detector(const Reader& r, link::DetectorConfig d) {
  d.efficiency = r.number("efficiency", d.efficiency);
  d.dark_rate = r.number("dark_rate", d.dark_rate);
  d.gate_width_ns = r.number("gate_width_ns", d.gate_width_ns);
  d.gated = r.boolean("gated", d.gated);
  return d;
}

template <class F>
void checked(const std::string& where, F&& f) {
  try {
    f();
  } catch (const DomainError& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

}  // namespace detail

inline ExperimentConfig parse_config(const json& j, const std::string& path = "config",
                                     const std::filesystem::path& base_dir = {}) {
  ExperimentConfig cfg;
  cfg.path = path;
  const detail::Reader root(j, path);

  if (root.has("seed")) {
    const auto& s = root.raw("seed");
    if (!s.is_number_unsigned()) throw ConfigError(root.path("seed") + ": expected a non-negative integer");
    cfg.seed = s.get<std::uint64_t>();
  }
  cfg.output_dir = root.string("output_dir", "");
  if (!cfg.output_dir.empty() && std::filesystem::path(cfg.output_dir).is_relative()) {
    cfg.output_dir = (base_dir / cfg.output_dir).string();
  }

  if (root.has("materials_file")) {
    std::filesystem::path mp = root.string("materials_file", "");
    if (mp.is_relative()) mp = base_dir / mp;
    try {
      auto loaded = io::load_materials(mp.string());
      cfg.materials.insert(cfg.materials.begin(), loaded.begin(), loaded.end());
    } catch (const ParseError& e) {
      throw ConfigError(root.path("materials_file") + ": " + e.what());
    }
  }

  if (root.has("drift")) {
    const auto r = root.child("drift");
    DriftBlock d;
    d.material = r.string("material", d.material);
    d.element_length_mm = r.number("element_length_mm", d.element_length_mm);
    d.delta_T_K = r.number("delta_T_K", d.delta_T_K);
    if (r.has("wavelengths_nm")) {
      const auto w = r.child("wavelengths_nm");
      d.wavelengths = {w.number("pump"), w.number("signal"), w.number("idler")};
    }
    d.reference_wavelength_nm = r.number("reference_wavelength_nm", d.reference_wavelength_nm);
    d.delta_T_sweep_K = r.numbers("delta_T_sweep_K");
    d.length_sweep_mm = r.numbers("length_sweep_mm");
    detail::checked(r.path("element_length_mm"), [&] {
      if (!(d.element_length_mm > 0.0)) throw DomainError("must be positive");
    });
    for (double l : d.length_sweep_mm) {
      detail::checked(r.path("length_sweep_mm"), [&] {
        if (!(l > 0.0)) throw DomainError("lengths must be positive");
      });
    }
    detail::checked(r.path("wavelengths_nm"), [&] { thermal::validate(d.wavelengths); });
    try {
      (void)io::find_material(cfg.materials, d.material);
    } catch (const ParseError& e) {
      throw ConfigError(r.path("material") + ": " + e.what());
    }
    cfg.drift = d;
  }

  if (root.has("source")) {
    const auto r = root.child("source");
    auto& s = cfg.source;
    s.crystal_length_mm = r.number("crystal_length_mm", s.crystal_length_mm);
    s.reference_length_mm = r.number("reference_length_mm", s.reference_length_mm);
    s.reference_bandwidth_nm = r.number("reference_bandwidth_nm", s.reference_bandwidth_nm);
    s.split_angle_rad = r.number("split_angle_rad", s.split_angle_rad);
    s.phi0_rad = r.number("phi0_rad", s.phi0_rad);
    s.signal_center_nm = r.number("signal_center_nm", s.signal_center_nm);
    if (auto q = r.optional_number("quoted_delta_nu_GHz")) s.quoted_delta_nu_GHz = q;
    if (r.has("rates")) {
      const auto rr = r.child("rates");
      auto& x = s.rates;
      x.singles_signal = rr.number("singles_signal", x.singles_signal);
      x.dark_signal = rr.number("dark_signal", x.dark_signal);
      x.coincidences = rr.number("coincidences", x.coincidences);
      x.accidentals = rr.number("accidentals", x.accidentals);
      x.pump_power_mW = rr.number("pump_power_mW", x.pump_power_mW);
      x.eta_signal = rr.number("eta_signal", x.eta_signal);
      x.eta_idler = rr.number("eta_idler", x.eta_idler);
      detail::checked(r.path("rates"), [&] { source::validate(x); });
    }
    detail::checked(r.path("crystal_length_mm"), [&] {
      source::validate(source::CrystalConfig{s.crystal_length_mm, s.reference_length_mm, s.reference_bandwidth_nm,
                                             std::max(s.rates.coincidences, 1.0)});
    });
  }

  if (root.has("link")) {
    const auto r = root.child("link");
    auto& l = cfg.link;
    l.fiber.dispersion_ps_nm_km = r.number("dispersion_ps_nm_km", l.fiber.dispersion_ps_nm_km);
    l.fiber.length_km = r.number("length_km", l.fiber.length_km);
    l.fiber.loss_dB_km = r.number("loss_dB_km", l.fiber.loss_dB_km);
    l.idler_bandwidth_nm = r.number("idler_bandwidth_nm", l.idler_bandwidth_nm);
    l.coincidence_window_ns = r.number("coincidence_window_ns", l.coincidence_window_ns);
    if (r.has("detectors")) {
      const auto d = r.child("detectors");
      if (d.has("signal")) l.signal_detector = detail::parse_detector(d.child("signal"), l.signal_detector);
      if (d.has("idler")) l.idler_detector = detail::parse_detector(d.child("idler"), l.idler_detector);
      detail::checked(d.path("signal"), [&] { link::validate(l.signal_detector); });
      detail::checked(d.path("idler"), [&] { link::validate(l.idler_detector); });
    }
    detail::checked(r.path("length_km"), [&] { link::validate(l.fiber); });
    detail::checked(r.path("coincidence_window_ns"), [&] {
      if (!(l.coincidence_window_ns > 0.0)) throw DomainError("must be positive");
    });
  }

  if (root.has("tomography")) {
    const auto r = root.child("tomography");
    auto& t = cfg.tomography;
    if (r.has("settings")) {
      const auto& arr = r.raw("settings");
      if (!arr.is_array()) throw ConfigError(r.path("settings") + ": expected an array of two-letter labels");
      for (std::size_t k = 0; k < arr.size(); ++k) {
        if (!arr[k].is_string() || arr[k].get<std::string>().size() != 2) {
          throw ConfigError(r.path("settings") + "[" + std::to_string(k) + "]: expected a two-letter label like \"HV\"");
        }
        const auto label = arr[k].get<std::string>();
        detail::checked(r.path("settings") + "[" + std::to_string(k) + "]", [&] {
          (void)state::polarization_from_char(label[0]);
          (void)state::polarization_from_char(label[1]);
        });
        t.settings.push_back(label);
      }
      if (t.settings.size() != static_cast<std::size_t>(tomo::kSettingCount)) {
        throw ConfigError(r.path("settings") + ": exactly 16 settings required");
      }
    }
    t.acquisition_time_s = r.number("acquisition_time_s", t.acquisition_time_s);
    t.pairs_per_setting = r.optional_number("pairs_per_setting");
    if (r.has("accidentals")) {
      const auto& a = r.raw("accidentals");
      if (a.is_string()) {
        if (a.get<std::string>() != "from_rates") {
          throw ConfigError(r.path("accidentals") + ": expected \"from_rates\" or a number");
        }
      } else {
        t.accidental_per_setting = r.number("accidentals");
      }
    }
    t.include_thermal_drift = r.boolean("include_thermal_drift", t.include_thermal_drift);
    detail::checked(r.path("acquisition_time_s"), [&] {
      if (!(t.acquisition_time_s > 0.0)) throw DomainError("must be positive");
    });
    if (t.pairs_per_setting) {
      detail::checked(r.path("pairs_per_setting"), [&] {
        if (!(*t.pairs_per_setting > 0.0)) throw DomainError("must be positive");
      });
    }
    if (t.accidental_per_setting) {
      detail::checked(r.path("accidentals"), [&] {
        if (!(*t.accidental_per_setting >= 0.0)) throw DomainError("must be non-negative");
      });
    }
  }
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  const json j = io::read_json_file(path);
  return parse_config(j, path, std::filesystem::path(path).parent_path());
}

inline std::vector<tomo::MeasurementSetting> resolve_settings(const TomographyBlock& t) {
  if (t.settings.empty()) return tomo::standard_16_settings();
  std::vector<tomo::MeasurementSetting> out;
  for (const auto& s : t.settings) {
    out.emplace_back(state::polarization_from_char(s[0]), state::polarization_from_char(s[1]));
  }
  return out;
}

}  // namespace sagnac::config
