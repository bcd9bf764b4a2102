// sagnac_cli: drift, brightness, dispersion, simulate, tomo, montecarlo, paper-check.
//
// Machine-readable output goes to stdout; diagnostics go to stderr.
// Exit codes: 0 success, 1 internal error (or a failing paper-check row),
// 2 input, domain or usage error.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sagnac/commands.hpp"
#include "sagnac/config.hpp"
#include "sagnac/errors.hpp"
#include "sagnac/io.hpp"
#include "sagnac/reports.hpp"
#include "sagnac/reproduction.hpp"

namespace {

using namespace sagnac;

struct DriftArgs {
  std::string config;
  std::string materials;
  std::optional<std::string> material;
  std::optional<double> length_mm, delta_T, pump, signal, idler, reference;
  std::vector<double> delta_T_sweep, length_sweep;
  std::string format = "json";
  std::string csv_out;
};

struct BrightnessArgs {
  std::string config;
  std::optional<double> coincidences, singles, eta_signal, eta_idler, power, delta_lambda, center, quoted, length,
      reference_length;
};

struct DispersionArgs {
  double dispersion = 18.0;
  double length_km = 100.0;
  double delta_lambda = 1.5;
  double loss = 0.2;
  double gate = 2.5;
  std::vector<double> lengths;
  std::string format = "json";
};

struct SimulateArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
};

struct TomoArgs {
  std::string input;
  std::string method = "mle";
  int montecarlo = 0;
  bool subtract = false;
  std::optional<std::uint64_t> seed;
  double tol = 1e-10;
  int max_iter = 5000;
  unsigned threads = 0;
  double acquisition_time = 1.0;
  std::string density_table;
};

struct MonteCarloArgs {
  std::string input;
  int runs = 1000;
  bool subtract = false;
  std::optional<std::uint64_t> seed;
  double tol = 1e-10;
  int max_iter = 5000;
  unsigned threads = 0;
  bool per_run = false;
};

struct PaperCheckArgs {
  std::optional<std::uint64_t> seed;
  bool json = false;
};

template <class T>
void set_if(T& target, const std::optional<T>& value) {
  if (value) target = *value;
}

int cmd_drift(const DriftArgs& a) {
  config::ExperimentConfig cfg;
  if (!a.config.empty()) cfg = config::load_config(a.config);
  if (!a.materials.empty()) {
    auto loaded = io::load_materials(a.materials);
    cfg.materials.insert(cfg.materials.begin(), loaded.begin(), loaded.end());
  }
  config::DriftBlock d = cfg.drift.value_or(config::DriftBlock{});
  set_if(d.material, a.material);
  set_if(d.element_length_mm, a.length_mm);
  set_if(d.delta_T_K, a.delta_T);
  set_if(d.wavelengths.pump_nm, a.pump);
  set_if(d.wavelengths.signal_nm, a.signal);
  set_if(d.wavelengths.idler_nm, a.idler);
  set_if(d.reference_wavelength_nm, a.reference);
  if (!a.delta_T_sweep.empty()) d.delta_T_sweep_K = a.delta_T_sweep;
  if (!a.length_sweep.empty()) d.length_sweep_mm = a.length_sweep;

  const auto rep = cli::compute_drift(d, cfg.materials);
  if (!a.csv_out.empty()) {
    std::ostringstream csv;
    cli::write_drift_csv(csv, rep);
    cli::write_text_file(a.csv_out, csv.str());
  }
  if (a.format == "csv") {
    cli::write_drift_csv(std::cout, rep);
  } else {
    std::cout << report::emit(rep);
  }
  return cli::kSuccess;
}

int cmd_brightness(const BrightnessArgs& a) {
  config::SourceBlock s;
  if (!a.config.empty()) s = config::load_config(a.config).source;
  set_if(s.rates.coincidences, a.coincidences);
  set_if(s.rates.singles_signal, a.singles);
  set_if(s.rates.eta_signal, a.eta_signal);
  set_if(s.rates.eta_idler, a.eta_idler);
  set_if(s.rates.pump_power_mW, a.power);
  set_if(s.reference_bandwidth_nm, a.delta_lambda);
  set_if(s.signal_center_nm, a.center);
  set_if(s.crystal_length_mm, a.length);
  set_if(s.reference_length_mm, a.reference_length);
  if (a.quoted) s.quoted_delta_nu_GHz = a.quoted;
  source::validate(source::CrystalConfig{s.crystal_length_mm, s.reference_length_mm, s.reference_bandwidth_nm,
                                         std::max(s.rates.coincidences, 1.0)});
  std::cout << report::emit(cli::compute_brightness(s));
  return cli::kSuccess;
}

int cmd_dispersion(const DispersionArgs& a) {
  const link::FiberConfig fiber{a.dispersion, a.length_km, a.loss};
  link::validate(fiber);
  for (double l : a.lengths) link::validate(link::FiberConfig{a.dispersion, l, a.loss});
  const auto rep = cli::compute_dispersion(fiber, a.delta_lambda, a.gate, a.lengths);
  if (a.format == "csv") {
    std::cout << "length_km,broadening_ns,transmission,gate_capture_fraction\n";
    for (const auto& r : rep.rows) {
      std::cout << io::format_number(r.length_km) << ',' << io::format_number(r.broadening_ns) << ','
                << io::format_number(r.transmission) << ',' << io::format_number(r.gate_capture_fraction) << '\n';
    }
  } else {
    std::cout << report::emit(rep);
  }
  return cli::kSuccess;
}

int cmd_simulate(const SimulateArgs& a) {
  const auto cfg = config::load_config(a.config);
  const std::uint64_t seed = cli::require_seed(a.seed, cfg.seed);
  const auto out = cli::simulate(cfg, seed);
  std::ostringstream csv;
  io::write_tomography_csv(csv, out.data);
  std::filesystem::path path = a.out;
  if (path.empty()) {
    path = std::filesystem::path(cfg.output_dir.empty() ? "." : cfg.output_dir) / "tomography.csv";
  }
  cli::write_text_file(path, csv.str());
  std::cerr << "wrote " << path.string() << '\n';
  std::cout << report::emit(out.summary);
  return cli::kSuccess;
}

tomo::MleOptions mle_options(double tol, int max_iter) {
  if (!(tol > 0.0)) throw cli::UsageError("--tol must be positive");
  if (max_iter < 0) throw cli::UsageError("--max-iter must be non-negative");
  return {tol, max_iter};
}

int cmd_tomo(const TomoArgs& a) {
  const auto data = io::load_tomography_csv(a.input, a.acquisition_time);
  cli::TomoOptions opt;
  opt.method = a.method == "linear" ? tomo::Method::linear_inversion : tomo::Method::mle;
  opt.montecarlo_runs = a.montecarlo;
  opt.subtract_accidentals = a.subtract;
  opt.seed = a.seed;
  opt.mle = mle_options(a.tol, a.max_iter);
  opt.threads = a.threads;
  if (opt.montecarlo_runs == 1) throw cli::UsageError("--montecarlo needs at least 2 runs");
  const auto rep = cli::run_tomo(data, opt);
  if (!a.density_table.empty()) {
    const auto& re = rep.rho.re;
    const auto& im = rep.rho.im;
    state::Matrix4c m;
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) m(r, c) = state::Complex(re[r][c], im[r][c]);
    std::ostringstream table;
    io::write_density_table(table, state::DensityMatrix4(m));
    cli::write_text_file(a.density_table, table.str());
  }
  std::cout << report::emit(rep);
  return cli::kSuccess;
}

int cmd_montecarlo(const MonteCarloArgs& a) {
  const auto data = io::load_tomography_csv(a.input);
  const tomo::MonteCarloOptions opt{a.subtract, mle_options(a.tol, a.max_iter), a.threads};
  auto block = cli::run_montecarlo(data, a.runs, a.seed, opt);
  if (!a.per_run) {
    block.per_run_fidelity.clear();
    block.per_run_seeds.clear();
  }
  std::cout << report::emit(block);
  return cli::kSuccess;
}

int cmd_paper_check(const PaperCheckArgs& a) {
  if (!a.seed) throw cli::UsageError("paper-check requires --seed");
  const auto rep = repro::run_reproduction(*a.seed);
  if (a.json) {
    std::cout << report::emit(rep);
  } else {
    std::cout << repro::format_table(rep);
  }
  return rep.all_pass ? cli::kSuccess : cli::kInternalError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sagnac entangled-pair source: drift, rates, link budget and tomography"};
  app.require_subcommand(1);

  DriftArgs drift;
  auto* sc_drift = app.add_subcommand("drift", "thermal phase drift, Sagnac vs. single path");
  sc_drift->add_option("--config", drift.config, "experiment config JSON");
  sc_drift->add_option("--materials", drift.materials, "materials JSON (added before built-in BK7)");
  sc_drift->add_option("--material", drift.material, "material name");
  sc_drift->add_option("--length-mm", drift.length_mm, "element length [mm]");
  sc_drift->add_option("--delta-T", drift.delta_T, "temperature change [K]");
  sc_drift->add_option("--pump-nm", drift.pump);
  sc_drift->add_option("--signal-nm", drift.signal);
  sc_drift->add_option("--idler-nm", drift.idler);
  sc_drift->add_option("--reference-nm", drift.reference, "wavelength for the single-path comparison [nm]");
  sc_drift->add_option("--delta-T-sweep", drift.delta_T_sweep, "list of temperature changes [K]");
  sc_drift->add_option("--length-sweep", drift.length_sweep, "list of element lengths [mm]");
  sc_drift->add_option("--format", drift.format)->check(CLI::IsMember({"json", "csv"}));
  sc_drift->add_option("--csv", drift.csv_out, "also write the CSV table here");

  BrightnessArgs bright;
  auto* sc_bright = app.add_subcommand("brightness", "spectral brightness and scaling with crystal length");
  sc_bright->add_option("--config", bright.config);
  sc_bright->add_option("--coincidences", bright.coincidences, "detected coincidence rate [1/s]");
  sc_bright->add_option("--singles", bright.singles, "signal singles rate [1/s]");
  sc_bright->add_option("--eta-signal", bright.eta_signal);
  sc_bright->add_option("--eta-idler", bright.eta_idler);
  sc_bright->add_option("--power-mW", bright.power);
  sc_bright->add_option("--delta-lambda-nm", bright.delta_lambda, "bandwidth at the reference length [nm]");
  sc_bright->add_option("--center-nm", bright.center);
  sc_bright->add_option("--quoted-delta-nu-GHz", bright.quoted, "also evaluate at this bandwidth");
  sc_bright->add_option("--length-mm", bright.length, "crystal length [mm]");
  sc_bright->add_option("--reference-length-mm", bright.reference_length);

  DispersionArgs disp;
  auto* sc_disp = app.add_subcommand("dispersion", "fiber broadening, transmission and gate capture");
  sc_disp->add_option("--dispersion", disp.dispersion, "D [ps/nm/km]")->capture_default_str();
  sc_disp->add_option("--length-km", disp.length_km)->capture_default_str();
  sc_disp->add_option("--delta-lambda-nm", disp.delta_lambda)->capture_default_str();
  sc_disp->add_option("--loss-dB-km", disp.loss)->capture_default_str();
  sc_disp->add_option("--gate-ns", disp.gate)->capture_default_str();
  sc_disp->add_option("--lengths", disp.lengths, "list of fiber lengths [km] (overrides --length-km)");
  sc_disp->add_option("--format", disp.format)->check(CLI::IsMember({"json", "csv"}));

  SimulateArgs sim;
  auto* sc_sim = app.add_subcommand("simulate", "synthetic 16-setting tomography counts");
  sc_sim->add_option("--config", sim.config)->required();
  sc_sim->add_option("--seed", sim.seed, "overrides the config seed");
  sc_sim->add_option("--out", sim.out, "CSV path (default <output_dir>/tomography.csv)");

  TomoArgs tomo_args;
  auto* sc_tomo = app.add_subcommand("tomo", "reconstruct a density matrix from a tomography CSV");
  sc_tomo->add_option("input", tomo_args.input)->required();
  sc_tomo->add_option("--method", tomo_args.method)->check(CLI::IsMember({"mle", "linear"}))->capture_default_str();
  sc_tomo->add_option("--montecarlo", tomo_args.montecarlo, "Monte-Carlo runs for the error bar");
  sc_tomo->add_flag("--subtract-accidentals", tomo_args.subtract);
  sc_tomo->add_option("--seed", tomo_args.seed);
  sc_tomo->add_option("--tol", tomo_args.tol)->capture_default_str();
  sc_tomo->add_option("--max-iter", tomo_args.max_iter)->capture_default_str();
  sc_tomo->add_option("--threads", tomo_args.threads, "0: hardware concurrency");
  sc_tomo->add_option("--acquisition-time-s", tomo_args.acquisition_time)->capture_default_str();
  sc_tomo->add_option("--density-table", tomo_args.density_table, "write row,col,basis_row,basis_col,re,im CSV");

  MonteCarloArgs mc;
  auto* sc_mc = app.add_subcommand("montecarlo", "Poisson-resampling error bar on the MLE fidelity");
  sc_mc->add_option("input", mc.input)->required();
  sc_mc->add_option("--runs", mc.runs)->capture_default_str();
  sc_mc->add_flag("--subtract-accidentals", mc.subtract);
  sc_mc->add_option("--seed", mc.seed);
  sc_mc->add_option("--tol", mc.tol)->capture_default_str();
  sc_mc->add_option("--max-iter", mc.max_iter)->capture_default_str();
  sc_mc->add_option("--threads", mc.threads);
  sc_mc->add_flag("--per-run", mc.per_run, "include per-run seeds and fidelities");

  PaperCheckArgs pc;
  auto* sc_pc = app.add_subcommand("paper-check", "recompute the published figures and report pass/fail");
  sc_pc->add_option("--seed", pc.seed);
  sc_pc->add_flag("--json", pc.json);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kSuccess : cli::kInputError;
  }

  try {
    if (*sc_drift) return cmd_drift(drift);
    if (*sc_bright) return cmd_brightness(bright);
    if (*sc_disp) return cmd_dispersion(disp);
    if (*sc_sim) return cmd_simulate(sim);
    if (*sc_tomo) return cmd_tomo(tomo_args);
    if (*sc_mc) return cmd_montecarlo(mc);
    if (*sc_pc) return cmd_paper_check(pc);
  } catch (const cli::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return cli::kInputError;
  } catch (const ParseError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return cli::kInputError;
  } catch (const DegeneracyError& e) {
    std::cerr << "degenerate input: " << e.what() << '\n';
    return cli::kInputError;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return cli::kInputError;
  } catch (const RangeError& e) {
    std::cerr << "range error: " << e.what() << '\n';
    return cli::kInputError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return cli::kInternalError;
  }
  return cli::kInternalError;
}
