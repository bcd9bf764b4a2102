#pragma once

// Fiber link and detector model: dispersion broadening of the coincidence
// peak, loss, gate capture, accidentals, and Poissonian count sampling.

#include <cmath>
#include <cstdint>
#include <numbers>

#include "sagnac/errors.hpp"
#include "sagnac/random.hpp"

namespace sagnac::link {

struct FiberConfig {
  double dispersion_ps_nm_km = 18.0;
  double length_km = 0.0;
  double loss_dB_km = 0.0;
};

inline void validate(const FiberConfig& f) {
  if (!(f.length_km >= 0.0)) throw DomainError("FiberConfig: length must be non-negative");
  if (!(f.loss_dB_km >= 0.0)) throw DomainError("FiberConfig: loss must be non-negative");
  if (!std::isfinite(f.dispersion_ps_nm_km)) throw DomainError("FiberConfig: dispersion must be finite");
}

struct DetectorConfig {
  double efficiency = 1.0;
  double dark_rate = 0.0;     // s^-1
  double gate_width_ns = 0.0;
  bool gated = false;
};

inline void validate(const DetectorConfig& d) {
  if (!(d.efficiency > 0.0 && d.efficiency <= 1.0)) throw DomainError("DetectorConfig: efficiency must lie in (0, 1]");
  if (!(d.dark_rate >= 0.0)) throw DomainError("DetectorConfig: dark rate must be non-negative");
  if (d.gated && !(d.gate_width_ns > 0.0)) throw DomainError("DetectorConfig: gated detector needs gate_width > 0");
}

struct CountRecord {
  double duration_s;
  std::int64_t counts;
  double expected_rate;
  std::uint64_t rng_seed;
};

// D * dlambda * L, in ns.
inline double dispersion_broadening(const FiberConfig& fiber, double delta_lambda_nm) {
  validate(fiber);
  if (!(delta_lambda_nm >= 0.0)) throw DomainError("dispersion_broadening: bandwidth must be non-negative");
  return fiber.dispersion_ps_nm_km * delta_lambda_nm * fiber.length_km * 1e-3;
}

inline double fiber_transmission(const FiberConfig& fiber) {
  validate(fiber);
  return std::pow(10.0, -fiber.loss_dB_km * fiber.length_km / 10.0);
}

// Fraction of a Gaussian peak of the given FWHM inside a centered window.
inline double gate_capture_fraction(double peak_width_ns, double gate_width_ns) {
  if (!(gate_width_ns > 0.0)) throw DomainError("gate_capture_fraction: gate width must be positive");
  if (!(peak_width_ns >= 0.0)) throw DomainError("gate_capture_fraction: peak width must be non-negative");
  if (peak_width_ns == 0.0) return 1.0;
  return std::erf(std::sqrt(std::numbers::ln2) * gate_width_ns / peak_width_ns);
}

// Uncorrelated coincidences: singles_a * singles_b * window.
inline double accidental_rate(double singles_a, double singles_b, double window_ns) {
  if (!(singles_a >= 0.0 && singles_b >= 0.0 && window_ns >= 0.0)) {
    throw DomainError("accidental_rate: inputs must be non-negative");
  }
  return singles_a * singles_b * window_ns * 1e-9;
}

inline CountRecord sample_counts(double rate, double duration_s, std::uint64_t seed) {
  if (!(rate >= 0.0) || !std::isfinite(rate)) throw DomainError("sample_counts: rate must be non-negative");
  if (!(duration_s > 0.0)) throw DomainError("sample_counts: duration must be positive");
  rng::Generator gen(seed);
  return {duration_s, gen.poisson(rate * duration_s), rate, seed};
}

}  // namespace sagnac::link
