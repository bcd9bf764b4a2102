#pragma once

// SPDC source figures of merit.
//
// Length scaling is relative to a reference crystal: bandwidth ~ 1/L,
// pair rate ~ sqrt(L), spectral brightness ~ L^{3/2}.
//
// Brightness convention: pump_power_mW is the power in one polarization mode
// and coincidences is the per-mode coincidence rate.

#include <cmath>

#include "sagnac/errors.hpp"
#include "sagnac/quantum_state.hpp"

namespace sagnac::source {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

struct CrystalConfig {
  double length_mm;
  double reference_length_mm;
  double reference_bandwidth_nm;
  double reference_pair_rate;  // s^-1
};

inline void validate(const CrystalConfig& c) {
  if (!(c.length_mm > 0.0 && c.reference_length_mm > 0.0 && c.reference_bandwidth_nm > 0.0 &&
        c.reference_pair_rate > 0.0)) {
    throw DomainError("CrystalConfig: all fields must be positive");
  }
}

struct SourceRates {
  double singles_signal = 0.0;  // s^-1
  double dark_signal = 0.0;     // s^-1
  double coincidences = 0.0;    // s^-1
  double accidentals = 0.0;     // s^-1
  double pump_power_mW = 0.0;
  double eta_signal = 1.0;
  double eta_idler = 1.0;
};

inline void validate(const SourceRates& r) {
  if (!(r.singles_signal >= 0.0 && r.dark_signal >= 0.0 && r.coincidences >= 0.0 && r.accidentals >= 0.0 &&
        r.pump_power_mW >= 0.0)) {
    throw DomainError("SourceRates: rates and power must be non-negative");
  }
  if (!(r.eta_signal > 0.0 && r.eta_signal <= 1.0 && r.eta_idler > 0.0 && r.eta_idler <= 1.0)) {
    throw DomainError("SourceRates: efficiencies must lie in (0, 1]");
  }
  if (r.accidentals > r.coincidences) throw DomainError("SourceRates: accidentals exceed coincidences");
}

// c * dlambda / lambda^2, in GHz.
inline double delta_nu_from_delta_lambda(double delta_lambda_nm, double center_nm) {
  if (!(center_nm > 0.0) || !(delta_lambda_nm >= 0.0)) {
    throw DomainError("delta_nu_from_delta_lambda: center must be positive, bandwidth non-negative");
  }
  const double center_m = center_nm * 1e-9;
  return kSpeedOfLight * (delta_lambda_nm * 1e-9) / (center_m * center_m) * 1e-9;
}

struct SpectralWindow {
  double center_nm;
  double delta_lambda_nm;
  double delta_nu_GHz;

  static SpectralWindow from_wavelength(double center_nm, double delta_lambda_nm) {
    return {center_nm, delta_lambda_nm, delta_nu_from_delta_lambda(delta_lambda_nm, center_nm)};
  }
};

inline double bandwidth_at_length(const CrystalConfig& c) {
  validate(c);
  return c.reference_bandwidth_nm * (c.reference_length_mm / c.length_mm);
}

inline double pair_rate_at_length(const CrystalConfig& c) {
  validate(c);
  return c.reference_pair_rate * std::sqrt(c.length_mm / c.reference_length_mm);
}

// Pairs per second per mW per THz.
inline double spectral_brightness(const SourceRates& r, double delta_nu_THz) {
  if (!(r.eta_signal > 0.0) || !(r.eta_idler > 0.0)) throw DomainError("spectral_brightness: zero efficiency");
  if (!(r.pump_power_mW > 0.0)) throw DomainError("spectral_brightness: pump power must be positive");
  if (!(delta_nu_THz > 0.0)) throw DomainError("spectral_brightness: bandwidth must be positive");
  if (!(r.coincidences >= 0.0)) throw DomainError("spectral_brightness: negative coincidence rate");
  return r.coincidences / (r.eta_signal * r.eta_idler * r.pump_power_mW * delta_nu_THz);
}

inline double brightness_scaling_ratio(double length_ratio) {
  if (!(length_ratio > 0.0)) throw DomainError("brightness_scaling_ratio: ratio must be positive");
  return length_ratio * std::sqrt(length_ratio);
}

// Source state with static phase phi0 plus a drift (e.g. from thermal::sagnac_drift).
inline state::PureState2Q emitted_state(double split_angle, double phi0, double drift) {
  return state::general_source_state(split_angle, phi0 + drift);
}

inline double coincidence_to_singles_ratio(const SourceRates& r) {
  if (!(r.singles_signal > 0.0)) throw DomainError("coincidence_to_singles_ratio: zero singles rate");
  return r.coincidences / r.singles_signal;
}

}  // namespace sagnac::source
