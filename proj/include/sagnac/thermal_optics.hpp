#pragma once

// Thermally induced phase drift of light passing an intraloop optical element,
// and the Sagnac compensation sum over pump, signal and idler.
//
//   dphi_x = (2 pi L / lambda_x) (dn_x/dT + n_x alpha) dT
//   dPhi   = dphi_s + dphi_i - dphi_p
//
// The pump term enters with a minus sign because it counter-propagates with
// respect to signal and idler inside the loop.

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "sagnac/errors.hpp"

namespace sagnac::thermal {

struct ThermalSample {
  double wavelength_nm;
  double n;
  double dn_dT_per_K;
};

struct ThermalConstants {
  double n;
  double dn_dT_per_K;
};

class MaterialThermalData {
 public:
  MaterialThermalData(std::string name, std::vector<ThermalSample> samples, double alpha_per_K)
      : name_(std::move(name)), samples_(std::move(samples)), alpha_(alpha_per_K) {
    if (samples_.empty()) throw DomainError("material '" + name_ + "': no samples");
    for (std::size_t k = 0; k < samples_.size(); ++k) {
      const auto& s = samples_[k];
      if (!(s.wavelength_nm > 0.0) || !std::isfinite(s.n) || !std::isfinite(s.dn_dT_per_K)) {
        throw DomainError("material '" + name_ + "': invalid sample " + std::to_string(k));
      }
      if (!(s.n > 1.0)) throw DomainError("material '" + name_ + "': refractive index must exceed 1");
      if (k > 0 && !(s.wavelength_nm > samples_[k - 1].wavelength_nm)) {
        throw DomainError("material '" + name_ + "': wavelengths must be strictly increasing");
      }
    }
    if (!std::isfinite(alpha_)) throw DomainError("material '" + name_ + "': alpha must be finite");
  }

  const std::string& name() const { return name_; }
  const std::vector<ThermalSample>& samples() const { return samples_; }
  double alpha_per_K() const { return alpha_; }

 private:
  std::string name_;
  std::vector<ThermalSample> samples_;
  double alpha_;
};

// BK7 refractive index and thermo-optic coefficient at 532, 810 and 1550 nm.
inline MaterialThermalData bk7() {
  return MaterialThermalData("BK7",
                             {{532.0, 1.5195, 1.55e-6}, {810.0, 1.5106, 1.095e-6}, {1550.0, 1.5007, 8.633e-7}},
                             7.1e-6);
}

struct WavelengthTriple {
  double pump_nm;
  double signal_nm;
  double idler_nm;

  // |1/pump - 1/signal - 1/idler| in nm^-1; reported, never enforced.
  double energy_residual_per_nm() const { return std::abs(1.0 / pump_nm - 1.0 / signal_nm - 1.0 / idler_nm); }
};

inline WavelengthTriple nominal_triple() { return {532.0, 810.0, 1550.0}; }

struct DriftScenario {
  MaterialThermalData material;
  double element_length_mm;
  double delta_T_K;
  WavelengthTriple wavelengths;
};

inline void validate(const WavelengthTriple& w) {
  if (!(w.pump_nm > 0.0 && w.signal_nm > 0.0 && w.idler_nm > 0.0)) {
    throw DomainError("wavelengths must be positive");
  }
}

inline void validate(const DriftScenario& s) {
  if (!(s.element_length_mm > 0.0)) throw DomainError("element_length must be positive");
  if (!std::isfinite(s.delta_T_K)) throw DomainError("delta_T must be finite");
  validate(s.wavelengths);
}

// Exact sample within 0.01 nm of a tabulated wavelength, otherwise linear
// interpolation. No extrapolation.
inline ThermalConstants lookup_thermal(const MaterialThermalData& material, double wavelength_nm) {
  constexpr double kMatchTol = 0.01;
  const auto& s = material.samples();
  for (const auto& e : s) {
    if (std::abs(e.wavelength_nm - wavelength_nm) <= kMatchTol) return {e.n, e.dn_dT_per_K};
  }
  if (!(wavelength_nm >= s.front().wavelength_nm && wavelength_nm <= s.back().wavelength_nm)) {
    throw RangeError("wavelength " + std::to_string(wavelength_nm) + " nm outside tabulated range of '" +
                     material.name() + "'");
  }
  std::size_t hi = 1;
  while (s[hi].wavelength_nm < wavelength_nm) ++hi;
  const auto& a = s[hi - 1];
  const auto& b = s[hi];
  const double t = (wavelength_nm - a.wavelength_nm) / (b.wavelength_nm - a.wavelength_nm);
  return {a.n + t * (b.n - a.n), a.dn_dT_per_K + t * (b.dn_dT_per_K - a.dn_dT_per_K)};
}

// Phase drift in radians for one wavelength through `length_mm` of material.
inline double phase_drift_single(const MaterialThermalData& material, double wavelength_nm, double length_mm,
                                 double delta_T_K) {
  if (!(length_mm > 0.0)) throw DomainError("phase_drift_single: length must be positive");
  const auto c = lookup_thermal(material, wavelength_nm);
  const double length_m = length_mm * 1e-3;
  const double wavelength_m = wavelength_nm * 1e-9;
  return 2.0 * std::numbers::pi * length_m / wavelength_m * (c.dn_dT_per_K + c.n * material.alpha_per_K()) *
         delta_T_K;
}

struct DriftTerms {
  double pump_rad;
  double signal_rad;
  double idler_rad;

  double sagnac_rad() const { return signal_rad + idler_rad - pump_rad; }
};

inline DriftTerms drift_terms(const DriftScenario& s) {
  validate(s);
  const auto& w = s.wavelengths;
  return {phase_drift_single(s.material, w.pump_nm, s.element_length_mm, s.delta_T_K),
          phase_drift_single(s.material, w.signal_nm, s.element_length_mm, s.delta_T_K),
          phase_drift_single(s.material, w.idler_nm, s.element_length_mm, s.delta_T_K)};
}

inline double sagnac_drift(const DriftScenario& s) { return drift_terms(s).sagnac_rad(); }

// Uncompensated interferometer: the single-wavelength term alone.
inline double mach_zehnder_drift(const DriftScenario& s, double reference_wavelength_nm) {
  validate(s);
  return phase_drift_single(s.material, reference_wavelength_nm, s.element_length_mm, s.delta_T_K);
}

inline double idler_from_energy_conservation(double pump_nm, double signal_nm) {
  if (!(pump_nm > 0.0) || !(signal_nm > pump_nm)) {
    throw DomainError("idler_from_energy_conservation: requires signal > pump > 0");
  }
  return 1.0 / (1.0 / pump_nm - 1.0 / signal_nm);
}

}  // namespace sagnac::thermal
