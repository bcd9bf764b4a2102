#pragma once

// One-shot reproduction check of the published figures. Each row recomputes a
// quoted number (or a property of the pipeline) from built-in constants and
// compares it to the published value at a fixed tolerance.
//
// Sub-stream k of the master seed drives row k, so rows are independent of
// each other and of evaluation order.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "sagnac/commands.hpp"
#include "sagnac/config.hpp"
#include "sagnac/io.hpp"
#include "sagnac/link_detection.hpp"
#include "sagnac/quantum_state.hpp"
#include "sagnac/random.hpp"
#include "sagnac/random_states.hpp"
#include "sagnac/reports.hpp"
#include "sagnac/source_model.hpp"
#include "sagnac/thermal_optics.hpp"
#include "sagnac/tomography.hpp"

namespace sagnac::repro {

// Published source figures.
inline constexpr double kSinglesSignal = 600000.0;
inline constexpr double kCoincidences = 9300.0;
inline constexpr double kAccidentals = 400.0;
inline constexpr double kEtaSignal = 0.30;
inline constexpr double kEtaIdler = 0.15;
inline constexpr double kPumpPower_mW = 1.0;
inline constexpr double kBandwidth_nm = 0.4;
inline constexpr double kSignal_nm = 810.0;
inline constexpr double kQuotedDeltaNu_GHz = 180.0;

namespace detail {

inline std::string fmt(double x, int precision = 6) {
  std::ostringstream os;
  os.precision(precision);
  os << x;
  return os.str();
}

inline bool within_abs(double computed, double expected, double tol) { return std::abs(computed - expected) <= tol; }

inline bool within_rel(double computed, double expected, double rel) {
  return std::abs(computed - expected) <= rel * std::abs(expected);
}

inline double max_entry_error(const state::Matrix4c& a, const state::Matrix4c& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

// Hermiticity, unit trace and PSD checked directly on the matrix.
inline bool physical_invariants(const state::Matrix4c& m) {
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-12) return false;
  if (std::abs(m.trace().real() - 1.0) > 1e-12 || std::abs(m.trace().imag()) > 1e-12) return false;
  Eigen::SelfAdjointEigenSolver<state::Matrix4c> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -1e-12;
}

inline source::SourceRates published_rates() {
  return {kSinglesSignal, 0.0, kCoincidences, kAccidentals, kPumpPower_mW, kEtaSignal, kEtaIdler};
}

}  // namespace detail

using report::ReproductionRow;

inline ReproductionRow check_sagnac_drift() {
  const thermal::DriftScenario s{thermal::bk7(), 8.0, 1.0, thermal::nominal_triple()};
  const double v = std::abs(thermal::sagnac_drift(s)) / std::numbers::pi;
  return {"delta_phi_sagnac", 1, "|Sagnac drift|, BK7, 8 mm, 1 K, 532/810/1550 nm", 0.019, v, 0.001, "pi rad",
          detail::within_abs(v, 0.019, 0.001), ""};
}

inline ReproductionRow check_mach_zehnder() {
  const thermal::DriftScenario s{thermal::bk7(), 8.0, 1.0, thermal::nominal_triple()};
  const double v = thermal::mach_zehnder_drift(s, 532.0) / std::numbers::pi;
  return {"mach_zehnder_532",
          2,
          "uncompensated single-path drift at 532 nm, same scenario",
          0.36,
          v,
          0.05,
          "pi rad (relative tolerance)",
          detail::within_rel(v, 0.36, 0.05),
          "tabulated BK7 constants give " + detail::fmt(v, 4) +
              " pi; the published value is rounded or uses slightly different constants"};
}

inline ReproductionRow check_dispersion_100km() {
  const double v = link::dispersion_broadening({18.0, 100.0, 0.0}, 1.5);
  return {"dispersion_100km", 3, "broadening, D = 18 ps/nm/km, 1.5 nm, 100 km", 2.7, v, 1e-12, "ns",
          detail::within_abs(v, 2.7, 1e-12), ""};
}

inline ReproductionRow check_dispersion_25km() {
  const double v = link::dispersion_broadening({18.0, 25.0, 0.0}, 3.6);
  return {"dispersion_25km", 3, "broadening, D = 18 ps/nm/km, 3.6 nm, 25 km", 1.6, v, 0.03, "ns (relative tolerance)",
          detail::within_rel(v, 1.6, 0.03), "published value is approximate (~1.6 ns)"};
}

inline ReproductionRow check_brightness() {
  const double dnu = source::delta_nu_from_delta_lambda(kBandwidth_nm, kSignal_nm);
  const double v = source::spectral_brightness(detail::published_rates(), dnu * 1e-3);
  const double quoted = source::spectral_brightness(detail::published_rates(), kQuotedDeltaNu_GHz * 1e-3);
  return {"brightness",
          4,
          "spectral brightness, bandwidth from 0.4 nm at 810 nm",
          1.13e6,
          v,
          0.01,
          "s^-1 mW^-1 THz^-1 (relative tolerance)",
          detail::within_rel(v, 1.13e6, 0.01),
          "delta_nu = " + detail::fmt(dnu, 5) + " GHz; with the rounded 180 GHz: " + detail::fmt(quoted, 5)};
}

inline ReproductionRow check_brightness_quoted() {
  const double v = source::spectral_brightness(detail::published_rates(), kQuotedDeltaNu_GHz * 1e-3);
  return {"brightness_180GHz", 4, "spectral brightness with the rounded 180 GHz bandwidth", 1.148e6, v, 0.01,
          "s^-1 mW^-1 THz^-1 (relative tolerance)", detail::within_rel(v, 1.148e6, 0.01), ""};
}

inline ReproductionRow check_coincidence_ratio() {
  const double v = source::coincidence_to_singles_ratio(detail::published_rates());
  return {"coincidence_to_singles", 5, "coincidence-to-singles ratio 9300 / 600000", 0.0155, v, 1e-15, "",
          detail::within_abs(v, 0.0155, 1e-15), ""};
}

// B(L) = R(L) / dnu(L): pair rate grows as sqrt(L), bandwidth shrinks as 1/L.
inline ReproductionRow check_brightness_scaling() {
  const auto brightness_at = [](double length_mm) {
    const source::CrystalConfig c{length_mm, 30.0, kBandwidth_nm, kCoincidences};
    source::SourceRates r = detail::published_rates();
    r.coincidences = source::pair_rate_at_length(c);
    const double dnu = source::delta_nu_from_delta_lambda(source::bandwidth_at_length(c), kSignal_nm);
    return source::spectral_brightness(r, dnu * 1e-3);
  };
  const double v = brightness_at(60.0) / brightness_at(30.0);
  const double expected = std::pow(2.0, 1.5);
  return {"brightness_scaling_2L", 6, "B(2L) / B(L) from the bandwidth and pair-rate scaling laws", expected, v, 1e-12,
          "", detail::within_abs(v, expected, 1e-12), ""};
}

struct RoundTrip {
  double max_linear_error = 0.0;
  double min_mle_fidelity = 1.0;
};

inline RoundTrip roundtrip_stats(std::uint64_t seed, int samples = 100) {
  const auto settings = tomo::standard_16_settings();
  RoundTrip out;
  for (int k = 0; k < samples; ++k) {
    rng::Generator gen(rng::derive_seed(seed, static_cast<std::uint64_t>(k)));
    const auto truth = state::random_density_matrix(gen);
    tomo::TomographyData d{settings, tomo::expected_counts(truth, settings, 1e4, 0.0), 1.0,
                           std::vector<double>(settings.size(), 0.0)};
    const auto lin = tomo::linear_inversion(d);
    out.max_linear_error = std::max(out.max_linear_error, detail::max_entry_error(lin.rho.matrix(), truth.matrix()));
    const auto mle = tomo::mle_reconstruct(d);
    out.min_mle_fidelity = std::min(out.min_mle_fidelity, state::state_fidelity(mle.rho, truth));
  }
  return out;
}

inline std::vector<ReproductionRow> check_roundtrip(std::uint64_t seed) {
  const auto r = roundtrip_stats(seed);
  return {{"tomography_roundtrip_linear", 7, "noiseless linear inversion, 100 random states: max entry error", 0.0,
           r.max_linear_error, 1e-9, "", r.max_linear_error <= 1e-9, ""},
          {"tomography_roundtrip_mle", 7, "noiseless MLE, 100 random states: minimum fidelity to truth", 1.0,
           r.min_mle_fidelity, 1e-6, "", r.min_mle_fidelity >= 1.0 - 1e-6, ""}};
}

// Count vectors: Poisson samples of random states at scales down to a few
// counts (many zeros), random sparse vectors, single and double spikes.
inline std::vector<double> random_count_vector(rng::Generator& gen, int kind) {
  const auto settings = tomo::standard_16_settings();
  std::vector<double> c(settings.size(), 0.0);
  switch (kind) {
    case 0: {
      const auto rho = state::random_density_matrix(gen, 1 + static_cast<int>(gen.next_u64() % 4));
      const double scale = std::pow(10.0, 4.0 * gen.uniform());
      const auto mean = tomo::expected_counts(rho, settings, scale, 0.0);
      for (std::size_t v = 0; v < c.size(); ++v) c[v] = static_cast<double>(gen.poisson(mean[v]));
      break;
    }
    case 1:
      for (auto& x : c)
        if (gen.uniform() < 0.5) x = static_cast<double>(gen.next_u64() % 1000);
      break;
    case 2:
      c[gen.next_u64() % c.size()] = static_cast<double>(1 + gen.next_u64() % 10000);
      break;
    default:
      c[gen.next_u64() % c.size()] = static_cast<double>(1 + gen.next_u64() % 10000);
      c[gen.next_u64() % c.size()] += static_cast<double>(1 + gen.next_u64() % 10000);
      break;
  }
  double total = 0.0;
  for (double x : c) total += x;
  if (total == 0.0) c[gen.next_u64() % c.size()] = 1.0;  // all-zero carries no information
  return c;
}

inline ReproductionRow check_mle_physicality(std::uint64_t seed, int vectors = 1000) {
  const auto settings = tomo::standard_16_settings();
  int ok = 0;
  for (int k = 0; k < vectors; ++k) {
    rng::Generator gen(rng::derive_seed(seed, static_cast<std::uint64_t>(k)));
    tomo::TomographyData d{settings, random_count_vector(gen, k % 4), 1.0, std::vector<double>(settings.size(), 0.0)};
    const auto res = tomo::mle_reconstruct(d);
    if (res.physical && detail::physical_invariants(res.rho.matrix())) ++ok;
  }
  return {"mle_physicality", 8, "MLE on random, sparse and spike count vectors: physical reconstructions",
          static_cast<double>(vectors), static_cast<double>(ok), 0.0, "count", ok == vectors, ""};
}

struct EnsembleStats {
  double mean = 0.0;
  double standard_error = 0.0;
};

inline EnsembleStats werner_ensemble(std::uint64_t seed, int seeds = 50, double p = 0.043, double pairs = 1e4) {
  const auto settings = tomo::standard_16_settings();
  const auto rho = state::werner_mix(state::to_density(state::phi_plus()), p);
  std::vector<double> f;
  for (int k = 0; k < seeds; ++k) {
    const auto d = tomo::simulate_tomography(rho, settings, pairs, 0.0, rng::derive_seed(seed, static_cast<std::uint64_t>(k)));
    f.push_back(tomo::mle_reconstruct(d).fidelity_phi_plus);
  }
  double mean = 0.0;
  for (double x : f) mean += x;
  mean /= seeds;
  double ss = 0.0;
  for (double x : f) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (seeds - 1) / seeds)};
}

inline ReproductionRow check_werner(std::uint64_t seed) {
  const double expected = 1.0 - 0.75 * 0.043;
  const auto s = werner_ensemble(seed);
  const double tol = 3.0 * s.standard_error;
  return {"werner_oracle",
          9,
          "Werner p = 0.043, 1e4 pairs per setting, 50 seeds: mean MLE fidelity",
          expected,
          s.mean,
          tol,
          "(tolerance = 3 standard errors)",
          detail::within_abs(s.mean, expected, tol),
          "z = " + detail::fmt((s.mean - expected) / s.standard_error, 3) +
              "; MLE is biased low when linear inversion leaves the PSD cone"};
}

// phi+-like state at the published rates: N = 2 R_c t with t = 10 s gives a
// few 10^4 counts on the populated settings.
inline tomo::TomographyData montecarlo_input(std::uint64_t seed) {
  const auto rho = state::werner_mix(state::to_density(state::phi_plus()), 1.0 / 30.0);
  return tomo::simulate_tomography(rho, tomo::standard_16_settings(), 2.0 * kCoincidences * 10.0, 0.0, seed);
}

inline ReproductionRow check_montecarlo(std::uint64_t seed) {
  const auto data = montecarlo_input(rng::derive_seed(seed, 0));
  const auto r = tomo::monte_carlo_errors(data, 1000, rng::derive_seed(seed, 1));
  return {"montecarlo_error_bar",
          10,
          "1000-run Monte-Carlo fidelity standard deviation at published count levels",
          0.0015,
          r.fidelity_std,
          0.0015,
          "(accepted band 0.0005 to 0.003)",
          r.fidelity_std >= 0.0005 && r.fidelity_std <= 0.003,
          "order-of-magnitude check; acquisition times are not published; mean fidelity " +
              detail::fmt(r.fidelity_mean, 5)};
}

struct SubtractionStats {
  double mean_raw = 0.0;
  double mean_subtracted = 0.0;
};

inline SubtractionStats subtraction_gain(std::uint64_t seed, int seeds = 50, double pairs = 1e4) {
  const auto settings = tomo::standard_16_settings();
  const auto rho = state::to_density(state::phi_plus());
  const double accidental = pairs * (kAccidentals / kCoincidences) / 4.0;
  double raw = 0.0;
  double sub = 0.0;
  for (int k = 0; k < seeds; ++k) {
    const auto d =
        tomo::simulate_tomography(rho, settings, pairs, accidental, rng::derive_seed(seed, static_cast<std::uint64_t>(k)));
    const auto f = tomo::fidelity_report(d);
    raw += f.raw;
    sub += f.accidental_subtracted;
  }
  return {raw / seeds, sub / seeds};
}

inline ReproductionRow check_subtraction(std::uint64_t seed) {
  const auto s = subtraction_gain(seed);
  const double gain = s.mean_subtracted - s.mean_raw;
  return {"accidental_subtraction",
          11,
          "uniform accidentals (R_a / R_c = 400 / 9300), 50 seeds: subtracted minus raw mean fidelity",
          0.982 - 0.975,
          gain,
          0.0,
          "(pass: gain > 0)",
          gain > 0.0,
          "raw " + detail::fmt(s.mean_raw, 5) + ", subtracted " + detail::fmt(s.mean_subtracted, 5) +
              "; published absolute values are not reconcilable with the published rates"};
}

// Dispersion-free material: identical constants at every wavelength.
inline thermal::MaterialThermalData flat_material() {
  return thermal::MaterialThermalData("flat", {{300.0, 1.5, 1e-5}, {3000.0, 1.5, 1e-5}}, 5e-6);
}

inline double max_null_drift(std::uint64_t seed, int samples = 1000) {
  const auto material = flat_material();
  rng::Generator gen(seed);
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double pump = 350.0 + 400.0 * gen.uniform();
    const double signal = pump * (1.1 + 0.8 * gen.uniform());
    const double idler = thermal::idler_from_energy_conservation(pump, signal);
    if (idler > 3000.0) continue;
    const thermal::DriftScenario s{material, 1.0 + 49.0 * gen.uniform(), -5.0 + 10.0 * gen.uniform(),
                                   {pump, signal, idler}};
    worst = std::max(worst, std::abs(thermal::sagnac_drift(s)));
  }
  return worst;
}

inline ReproductionRow check_self_compensation(std::uint64_t seed) {
  const double v = max_null_drift(seed);
  return {"self_compensation_null", 12, "dispersion-free material, energy-conserving triples: max |Sagnac drift|", 0.0,
          v, 1e-12, "rad", v <= 1e-12, ""};
}

// simulate and tomo twice each from the same seed; outputs must match byte for byte.
inline ReproductionRow check_determinism(std::uint64_t seed) {
  config::ExperimentConfig cfg;
  cfg.drift = config::DriftBlock{};
  const auto run = [&] {
    const auto sim = cli::simulate(cfg, seed);
    std::ostringstream csv;
    io::write_tomography_csv(csv, sim.data);
    std::istringstream back(csv.str());
    const auto data = io::read_tomography_csv(back);
    cli::TomoOptions opt;
    opt.montecarlo_runs = 20;
    opt.seed = seed;
    return csv.str() + report::emit(sim.summary) + report::emit(cli::run_tomo(data, opt));
  };
  const bool same = run() == run();
  return {"determinism", 13, "simulate and tomo with a fixed seed: byte-identical outputs", 1.0, same ? 1.0 : 0.0, 0.0,
          "(1 = identical)", same, ""};
}

inline report::ReproductionReport run_reproduction(std::uint64_t seed) {
  const auto sub = [seed](std::uint64_t k) { return rng::derive_seed(seed, k); };
  report::ReproductionReport rep{seed, {}, true};
  rep.rows.push_back(check_sagnac_drift());
  rep.rows.push_back(check_mach_zehnder());
  rep.rows.push_back(check_dispersion_100km());
  rep.rows.push_back(check_dispersion_25km());
  rep.rows.push_back(check_brightness());
  rep.rows.push_back(check_brightness_quoted());
  rep.rows.push_back(check_coincidence_ratio());
  rep.rows.push_back(check_brightness_scaling());
  for (auto& r : check_roundtrip(sub(7))) rep.rows.push_back(std::move(r));
  rep.rows.push_back(check_mle_physicality(sub(8)));
  rep.rows.push_back(check_werner(sub(9)));
  rep.rows.push_back(check_montecarlo(sub(10)));
  rep.rows.push_back(check_subtraction(sub(11)));
  rep.rows.push_back(check_self_compensation(sub(12)));
  rep.rows.push_back(check_determinism(sub(13)));
  for (const auto& r : rep.rows) rep.all_pass = rep.all_pass && r.pass;
  return rep;
}

// Human-readable table, one line per row.
inline std::string format_table(const report::ReproductionReport& rep) {
  std::ostringstream os;
  for (const auto& r : rep.rows) {
    os << (r.pass ? "[PASS] " : "[FAIL] ") << r.criterion << ' ' << r.id << ": computed " << detail::fmt(r.computed_value, 8)
       << ", expected " << detail::fmt(r.published_value, 8) << ", tolerance " << detail::fmt(r.tolerance, 3);
    if (!r.unit.empty()) os << ' ' << r.unit;
    if (!r.note.empty()) os << "  # " << r.note;
    os << '\n';
  }
  os << (rep.all_pass ? "all rows pass" : "some rows FAIL") << '\n';
  return os.str();
}

}  // namespace sagnac::repro
