#pragma once

// Command implementations behind the sagnac_cli subcommands. Each command is a
// pure function of its options (plus explicit seeds) returning a report; the
// executable only wires flags and streams.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "sagnac/config.hpp"
#include "sagnac/errors.hpp"
#include "sagnac/io.hpp"
#include "sagnac/link_detection.hpp"
#include "sagnac/quantum_state.hpp"
#include "sagnac/reports.hpp"
#include "sagnac/source_model.hpp"
#include "sagnac/thermal_optics.hpp"
#include "sagnac/tomography.hpp"

namespace sagnac::cli {

enum ExitCode : int { kSuccess = 0, kInternalError = 1, kInputError = 2 };

// Bad flag combination (e.g. randomness requested without --seed).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---- drift ----

inline report::DriftReport compute_drift(const config::DriftBlock& block,
                                         const std::vector<thermal::MaterialThermalData>& materials) {
  const auto& material = io::find_material(materials, block.material);
  const std::vector<double> lengths =
      block.length_sweep_mm.empty() ? std::vector<double>{block.element_length_mm} : block.length_sweep_mm;
  const std::vector<double> temps =
      block.delta_T_sweep_K.empty() ? std::vector<double>{block.delta_T_K} : block.delta_T_sweep_K;

  report::DriftReport rep{material.name(),
                          block.wavelengths.pump_nm,
                          block.wavelengths.signal_nm,
                          block.wavelengths.idler_nm,
                          block.wavelengths.energy_residual_per_nm(),
                          block.reference_wavelength_nm,
                          {}};
  for (double length : lengths) {
    for (double dT : temps) {
      const thermal::DriftScenario scenario{material, length, dT, block.wavelengths};
      const auto terms = thermal::drift_terms(scenario);
      const double mz = thermal::mach_zehnder_drift(scenario, block.reference_wavelength_nm);
      rep.rows.push_back({length, dT, terms.pump_rad, terms.signal_rad, terms.idler_rad, terms.sagnac_rad(),
                          terms.sagnac_rad() / std::numbers::pi, mz, mz / std::numbers::pi});
    }
  }
  return rep;
}

inline void write_drift_csv(std::ostream& out, const report::DriftReport& rep) {
  out << "element_length_mm,delta_T_K,dphi_pump_rad,dphi_signal_rad,dphi_idler_rad,sagnac_rad,sagnac_over_pi,"
         "mach_zehnder_rad,mach_zehnder_over_pi\n";
  for (const auto& r : rep.rows) {
    out << io::format_number(r.element_length_mm) << ',' << io::format_number(r.delta_T_K) << ','
        << io::format_number(r.dphi_pump_rad) << ',' << io::format_number(r.dphi_signal_rad) << ','
        << io::format_number(r.dphi_idler_rad) << ',' << io::format_number(r.sagnac_rad) << ','
        << io::format_number(r.sagnac_over_pi) << ',' << io::format_number(r.mach_zehnder_rad) << ','
        << io::format_number(r.mach_zehnder_over_pi) << '\n';
  }
}

// ---- brightness ----

inline report::BrightnessReport compute_brightness(const config::SourceBlock& s) {
  const source::CrystalConfig crystal{s.crystal_length_mm, s.reference_length_mm, s.reference_bandwidth_nm,
                                      s.rates.coincidences > 0.0 ? s.rates.coincidences : 1.0};
  const double bandwidth = source::bandwidth_at_length(crystal);
  const double rate = s.rates.coincidences > 0.0 ? source::pair_rate_at_length(crystal) : 0.0;
  const double dnu = source::delta_nu_from_delta_lambda(bandwidth, s.signal_center_nm);
  source::SourceRates scaled = s.rates;
  scaled.coincidences = rate;

  report::BrightnessReport rep{};
  rep.center_nm = s.signal_center_nm;
  rep.delta_lambda_nm = bandwidth;
  rep.delta_nu_GHz = dnu;
  rep.brightness = source::spectral_brightness(scaled, dnu * 1e-3);
  if (s.quoted_delta_nu_GHz) {
    // The quoted bandwidth belongs to the reference crystal; it scales like delta_lambda.
    const double quoted = *s.quoted_delta_nu_GHz * bandwidth / s.reference_bandwidth_nm;
    rep.quoted_delta_nu_GHz = s.quoted_delta_nu_GHz;
    rep.brightness_at_quoted_delta_nu = source::spectral_brightness(scaled, quoted * 1e-3);
  }
  rep.coincidence_to_singles_ratio = source::coincidence_to_singles_ratio(scaled);
  rep.crystal_length_mm = s.crystal_length_mm;
  rep.reference_length_mm = s.reference_length_mm;
  rep.bandwidth_at_length_nm = bandwidth;
  rep.pair_rate_at_length = rate;
  rep.brightness_scaling_ratio = source::brightness_scaling_ratio(s.crystal_length_mm / s.reference_length_mm);
  return rep;
}

// ---- dispersion ----

inline report::DispersionReport compute_dispersion(const link::FiberConfig& fiber, double delta_lambda_nm,
                                                   double gate_width_ns, const std::vector<double>& lengths_km) {
  report::DispersionReport rep{fiber.dispersion_ps_nm_km, delta_lambda_nm, fiber.loss_dB_km, gate_width_ns, {}};
  const std::vector<double> lengths = lengths_km.empty() ? std::vector<double>{fiber.length_km} : lengths_km;
  for (double l : lengths) {
    link::FiberConfig f = fiber;
    f.length_km = l;
    const double width = link::dispersion_broadening(f, delta_lambda_nm);
    rep.rows.push_back({l, width, link::fiber_transmission(f), link::gate_capture_fraction(width, gate_width_ns)});
  }
  return rep;
}

// ---- simulate ----

struct SimulationOutput {
  tomo::TomographyData data;
  report::SimulationSummary summary;
};

// Rate model:
//  - detected coincidences R_c(L) follow pair_rate_at_length, then fiber loss
//    and gate capture of the dispersion-broadened peak;
//  - pairs per setting N = 2 R_c t (R_c is per pump polarization mode);
//  - accidentals per setting (R_a / 4) t T_fiber: polarizers halve each arm's
//    singles;
//  - predicted accidentals use signal singles + dark against idler singles
//    inferred as (R_s / eta_s) eta_i T_fiber + idler dark.
inline SimulationOutput simulate(const config::ExperimentConfig& cfg, std::uint64_t seed) {
  const auto& s = cfg.source;
  const auto& l = cfg.link;
  const auto& t = cfg.tomography;

  const auto bright = compute_brightness(s);
  const double transmission = link::fiber_transmission(l.fiber);
  const double broadening = link::dispersion_broadening(l.fiber, l.idler_bandwidth_nm);
  const double capture = link::gate_capture_fraction(broadening, l.coincidence_window_ns);
  const double coincidences = bright.pair_rate_at_length;
  const double after_link = coincidences * transmission * capture;

  double drift = 0.0;
  if (t.include_thermal_drift && cfg.drift) {
    const auto& d = *cfg.drift;
    drift = thermal::sagnac_drift(
        {io::find_material(cfg.materials, d.material), d.element_length_mm, d.delta_T_K, d.wavelengths});
  }
  const auto psi = source::emitted_state(s.split_angle_rad, s.phi0_rad, drift);
  const auto rho = state::to_density(psi);

  const double pairs = t.pairs_per_setting.value_or(2.0 * after_link * t.acquisition_time_s);
  if (!(pairs > 0.0)) throw DomainError("simulate: no pairs reach the detectors (check rates and link loss)");
  const double accidental =
      t.accidental_per_setting.value_or(s.rates.accidentals / 4.0 * t.acquisition_time_s * transmission);

  const double idler_singles =
      s.rates.singles_signal / s.rates.eta_signal * s.rates.eta_idler * transmission + l.idler_detector.dark_rate;
  const double predicted =
      link::accidental_rate(s.rates.singles_signal + s.rates.dark_signal, idler_singles, l.coincidence_window_ns);

  const auto settings = config::resolve_settings(t);
  auto data = tomo::simulate_tomography(rho, settings, pairs, accidental, seed, t.acquisition_time_s);
  double total = 0.0;
  for (double n : data.counts) total += n;

  report::SimulationSummary sum{seed,
                                s.rates.singles_signal,
                                coincidences,
                                after_link,
                                s.rates.accidentals,
                                predicted,
                                bright.coincidence_to_singles_ratio,
                                bright.delta_nu_GHz,
                                bright.brightness,
                                transmission,
                                broadening,
                                capture,
                                drift,
                                t.acquisition_time_s,
                                pairs,
                                accidental,
                                state::fidelity_to_pure(rho, state::phi_plus()),
                                static_cast<std::uint64_t>(total)};
  return {std::move(data), sum};
}

// ---- tomo / montecarlo ----

struct TomoOptions {
  tomo::Method method = tomo::Method::mle;
  int montecarlo_runs = 0;
  bool subtract_accidentals = false;
  std::optional<std::uint64_t> seed;
  tomo::MleOptions mle{};
  unsigned threads = 0;
};

inline report::ReconstructionReport run_tomo(const tomo::TomographyData& input, const TomoOptions& opt) {
  if (opt.montecarlo_runs != 0 && !opt.seed) throw UsageError("--montecarlo requires --seed");
  if (opt.montecarlo_runs < 0) throw UsageError("--montecarlo must be non-negative");
  const tomo::TomographyData data = opt.subtract_accidentals ? tomo::subtract_accidentals(input) : input;
  const auto result =
      opt.method == tomo::Method::mle ? tomo::mle_reconstruct(data, opt.mle) : tomo::linear_inversion(data);
  auto rep = report::ReconstructionReport::from(result, opt.subtract_accidentals);
  if (opt.method == tomo::Method::mle) {
    const auto f = tomo::fidelity_report(input, opt.mle);
    rep.fidelity_report = report::FidelityBlock{f.raw, f.accidental_subtracted};
  }
  if (opt.montecarlo_runs > 0) {
    const tomo::MonteCarloOptions mc{opt.subtract_accidentals, opt.mle, opt.threads};
    const auto r = tomo::monte_carlo_errors(input, opt.montecarlo_runs, *opt.seed, mc);
    rep.montecarlo = report::MonteCarloBlock::from(r, *opt.seed, opt.subtract_accidentals);
  }
  return rep;
}

inline report::MonteCarloBlock run_montecarlo(const tomo::TomographyData& data, int runs,
                                              std::optional<std::uint64_t> seed, const tomo::MonteCarloOptions& opt) {
  if (!seed) throw UsageError("montecarlo requires --seed");
  if (runs < 2) throw UsageError("--runs must be at least 2");
  return report::MonteCarloBlock::from(tomo::monte_carlo_errors(data, runs, *seed, opt), *seed,
                                       opt.subtract_accidentals);
}

// ---- misc ----

inline std::uint64_t require_seed(std::optional<std::uint64_t> flag, std::optional<std::uint64_t> from_config) {
  if (flag) return *flag;
  if (from_config) return *from_config;
  throw UsageError("a seed is required: pass --seed or set \"seed\" in the config");
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(path.string() + ": cannot open for writing");
  out << text;
}

}  // namespace sagnac::cli
