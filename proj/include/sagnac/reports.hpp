#pragma once

// Machine-readable report types emitted by the CLI. Every type converts to and
// from JSON losslessly.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "sagnac/quantum_state.hpp"
#include "sagnac/tomography.hpp"

namespace nlohmann {

template <class T>
struct adl_serializer<std::optional<T>> {
  static void to_json(json& j, const std::optional<T>& v) {
    if (v) j = *v;
    else j = nullptr;
  }
  static void from_json(const json& j, std::optional<T>& v) {
    if (j.is_null()) v.reset();
    else v = j.get<T>();
  }
};

}  // namespace nlohmann

namespace sagnac::report {

using json = nlohmann::json;

struct DriftRow {
  double element_length_mm;
  double delta_T_K;
  double dphi_pump_rad;
  double dphi_signal_rad;
  double dphi_idler_rad;
  double sagnac_rad;
  double sagnac_over_pi;
  double mach_zehnder_rad;
  double mach_zehnder_over_pi;
  bool operator==(const DriftRow&) const = default;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(DriftRow, element_length_mm, delta_T_K, dphi_pump_rad, dphi_signal_rad,
                                   dphi_idler_rad, sagnac_rad, sagnac_over_pi, mach_zehnder_rad, mach_zehnder_over_pi)

struct DriftReport {
  std::string material;
  double pump_nm;
  double signal_nm;
  double idler_nm;
  double energy_residual_per_nm;
  double reference_wavelength_nm;
  std::vector<DriftRow> rows;
  bool operator==(const DriftReport&) const = default;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(DriftReport, material, pump_nm, signal_nm, idler_nm, energy_residual_per_nm,
                                   reference_wavelength_nm, rows)

struct BrightnessReport {
  double center_nm;
  double delta_lambda_nm;
  double delta_nu_GHz;
  double brightness;  // s^-1 mW^-1 THz^-1, bandwidth from delta_lambda
  std::optional<double> quoted_delta_nu_GHz;
  std::optional<double> brightness_at_quoted_delta_nu;
  double coincidence_to_singles_ratio;
  double crystal_length_mm;
  double reference_length_mm;
  double bandwidth_at_length_nm;
  double pair_rate_at_length;
  double brightness_scaling_ratio;
  bool operator==(const BrightnessReport&) const = default;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(BrightnessReport, center_nm, delta_lambda_nm, delta_nu_GHz, brightness,
                                   quoted_delta_nu_GHz, brightness_at_quoted_delta_nu, coincidence_to_singles_ratio,
                                   crystal_length_mm, reference_length_mm, bandwidth_at_length_nm,
                                   pair_rate_at_length, brightness_scaling_ratio)

struct DispersionRow {
  double length_km;
  double broadening_ns;
  double transmission;
  double gate_capture_fraction;
  bool operator==(const DispersionRow&) const = default;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(DispersionRow, length_km, broadening_ns, transmission, gate_capture_fraction)

struct DispersionReport {
  double dispersion_ps_nm_km;
  double delta_lambda_nm;
  double loss_dB_km;
  double gate_width_ns;
  std::vector<DispersionRow> rows;
  bool operator==(const DispersionReport&) const = default;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(DispersionReport, dispersion_ps_nm_km, delta_lambda_nm, loss_dB_km, gate_width_ns,
                                   rows)

struct SimulationSummary {
  std::uint64_t seed;
  double singles_signal;
  double coincidences;
  double coincidences_after_link;
  double accidentals_measured;
  double accidentals_predicted;
  double coincidence_to_singles_ratio;
  double delta_nu_GHz;
  double brightness;
  double fiber_transmission;
  double dispersion_broadening_ns;
  double gate_capture_fraction;
  double thermal_drift_rad;
  double acquisition_time_s;
  double pairs_per_setting;
  double accidental_per_setting;
  double source_fidelity_phi_plus;
  std::uint64_t total_counts;
  bool operator==(const SimulationSummary&) const = default;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(SimulationSummary, seed, singles_signal, coincidences, coincidences_after_link,
                                   accidentals_measured, accidentals_predicted, coincidence_to_singles_ratio,
                                   delta_nu_GHz, brightness, fiber_transmission, dispersion_broadening_ns,
                                   gate_capture_fraction, thermal_drift_rad, acquisition_time_s, pairs_per_setting,
                                   accidental_per_setting, source_fidelity_phi_plus, total_counts)

struct MonteCarloBlock {
  std::uint64_t seed;
  int runs;
  double fidelity_mean;
  double fidelity_std;
  int nonconverged_runs;
  bool accidentals_subtracted;
  std::vector<std::uint64_t> per_run_seeds;
  std::vector<std::optional<double>> per_run_fidelity;  // null: resample carried no counts
  bool operator==(const MonteCarloBlock&) const = default;

  static MonteCarloBlock from(const tomo::MonteCarloReport& r, std::uint64_t seed, bool subtracted) {
    MonteCarloBlock b{seed, r.runs, r.fidelity_mean, r.fidelity_std, r.nonconverged_runs, subtracted,
                      r.per_run_seeds, {}};
    for (double f : r.per_run_fidelity) {
      b.per_run_fidelity.push_back(std::isnan(f) ? std::nullopt : std::optional<double>(f));
    }
    return b;
  }
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(MonteCarloBlock, seed, runs, fidelity_mean, fidelity_std, nonconverged_runs,
                                   accidentals_subtracted, per_run_seeds, per_run_fidelity)

using Matrix4Rows = std::array<std::array<double, 4>, 4>;

struct DensityBlock {
  Matrix4Rows re;
  Matrix4Rows im;
  bool operator==(const DensityBlock&) const = default;

  static DensityBlock from(const state::DensityMatrix4& rho) {
    DensityBlock b{};
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) {
        b.re[r][c] = rho(r, c).real();
        b.im[r][c] = rho(r, c).imag();
      }
    return b;
  }
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(DensityBlock, re, im)

struct FidelityBlock {
  double raw;
  double accidental_subtracted;
  bool operator==(const FidelityBlock&) const = default;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(FidelityBlock, raw, accidental_subtracted)

struct ReconstructionReport {
  std::string method;
  DensityBlock rho;
  double fidelity_phi_plus;
  bool physical;
  double min_eigenvalue;
  std::optional<double> log_likelihood;
  std::optional<int> iterations;
  std::optional<bool> converged;
  bool accidentals_subtracted;
  std::optional<FidelityBlock> fidelity_report;
  std::optional<MonteCarloBlock> montecarlo;
  bool operator==(const ReconstructionReport&) const = default;

  static ReconstructionReport from(const tomo::ReconstructionResult& r, bool subtracted) {
    return {tomo::to_string(r.method), DensityBlock::from(r.rho), r.fidelity_phi_plus, r.physical,
            r.rho.min_eigenvalue(),   r.log_likelihood,           r.iterations,         r.converged,
            subtracted,               std::nullopt,               std::nullopt};
  }
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ReconstructionReport, method, rho, fidelity_phi_plus, physical, min_eigenvalue,
                                   log_likelihood, iterations, converged, accidentals_subtracted, fidelity_report,
                                   montecarlo)

struct ReproductionRow {
  std::string id;
  int criterion;
  std::string description;
  double published_value;
  double computed_value;
  double tolerance;
  std::string unit;
  bool pass;
  std::string note;
  bool operator==(const ReproductionRow&) const = default;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ReproductionRow, id, criterion, description, published_value, computed_value, tolerance,
                                   unit, pass, note)

struct ReproductionReport {
  std::uint64_t seed;
  std::vector<ReproductionRow> rows;
  bool all_pass;
  bool operator==(const ReproductionReport&) const = default;
};
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ReproductionReport, seed, rows, all_pass)

// Two-space indented JSON with a trailing newline.
template <class T>
std::string emit(const T& value) {
  return json(value).dump(2) + "\n";
}

template <class T>
T parse(const std::string& text) {
  return json::parse(text).get<T>();
}

}  // namespace sagnac::report
