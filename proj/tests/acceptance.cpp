// Acceptance run: every criterion recomputed with independent oracles at its
// stated tolerance, one PASS/FAIL line each. The library's paper-check report
// is cross-checked against the same numbers.
//
//   acceptance <seed> [--cli path --source dir] [--known-red N ...]
//
// Exit status is 1 when a criterion fails that is not listed as a known red.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sagnac/random.hpp"
#include "sagnac/reproduction.hpp"
#include "sagnac/tomography.hpp"

namespace {

using C = std::complex<double>;
using M4 = Eigen::Matrix4cd;
using V2 = Eigen::Vector2cd;
constexpr double kPi = std::numbers::pi;

struct Outcome {
  int criterion;
  bool pass;
  std::string detail;
};

std::string num(double x, int p = 7) {
  std::ostringstream os;
  os.precision(p);
  os << x;
  return os.str();
}

// ---- optics oracles ----

struct Bk7Row {
  double nm, n, dndT;
};
constexpr std::array<Bk7Row, 3> kBk7{{{532.0, 1.5195, 1.55e-6}, {810.0, 1.5106, 1.095e-6}, {1550.0, 1.5007, 8.633e-7}}};
constexpr double kBk7Alpha = 7.1e-6;

double phase(const Bk7Row& r, double length_mm, double dT, double alpha) {
  return 2.0 * kPi * (length_mm / 1000.0) / (r.nm / 1e9) * (r.dndT + r.n * alpha) * dT;
}

// ---- tomography oracles ----

V2 ket(char c) {
  const double s = 1.0 / std::sqrt(2.0);
  switch (c) {
    case 'H': return V2(1.0, 0.0);
    case 'V': return V2(0.0, 1.0);
    case 'D': return V2(s, s);
    case 'A': return V2(s, -s);
    case 'R': return V2(C(s), C(0.0, -s));
    default: return V2(C(s), C(0.0, s));  // L
  }
}

const std::array<std::string, 16> kLabels{"HH", "HV", "VV", "VH", "RH", "RV", "DV", "DH",
                                          "DR", "DD", "RD", "HD", "VD", "VL", "HL", "RL"};

M4 projector(const std::string& label) {
  const V2 a = ket(label[0]);
  const V2 b = ket(label[1]);
  Eigen::Vector4cd v;
  v << a(0) * b(0), a(0) * b(1), a(1) * b(0), a(1) * b(1);
  return v * v.adjoint();
}

const std::vector<M4>& projectors() {
  static const std::vector<M4> p = [] {
    std::vector<M4> out;
    for (const auto& l : kLabels) out.push_back(projector(l));
    return out;
  }();
  return p;
}

double prob(const M4& rho, const M4& proj) { return (rho * proj).trace().real(); }

double phi_plus_fidelity(const M4& rho) {
  return 0.5 * (rho(0, 0) + rho(0, 3) + rho(3, 0) + rho(3, 3)).real();
}

// Hermitian basis: E_aa, E_ab + E_ba, i(E_ab - E_ba).
std::vector<M4> hermitian_basis() {
  std::vector<M4> out;
  for (int a = 0; a < 4; ++a)
    for (int b = a; b < 4; ++b) {
      M4 e = M4::Zero();
      if (a == b) {
        e(a, a) = 1.0;
        out.push_back(e);
        continue;
      }
      e(a, b) = 1.0;
      e(b, a) = 1.0;
      out.push_back(e);
      M4 f = M4::Zero();
      f(a, b) = C(0.0, 1.0);
      f(b, a) = C(0.0, -1.0);
      out.push_back(f);
    }
  return out;
}

// Least-squares solve of Tr(rho Pi_v) = n_v in the Hermitian basis, then trace-normalize.
M4 oracle_linear(const std::vector<double>& counts) {
  static const auto basis = hermitian_basis();
  Eigen::Matrix<double, 16, 16> a;
  Eigen::Matrix<double, 16, 1> n;
  for (int v = 0; v < 16; ++v) {
    n(v) = counts[v];
    for (int k = 0; k < 16; ++k) a(v, k) = prob(basis[k], projectors()[v]);
  }
  const Eigen::Matrix<double, 16, 1> x = a.colPivHouseholderQr().solve(n);
  M4 m = M4::Zero();
  for (int k = 0; k < 16; ++k) m += x(k) * basis[k];
  return m / m.trace().real();
}

M4 psd_sqrt(const M4& m) {
  Eigen::SelfAdjointEigenSolver<M4> es(m);
  const Eigen::Vector4d w = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
}

double uhlmann(const M4& rho, const M4& sigma) {
  const M4 s = psd_sqrt(rho);
  const M4 inner = s * sigma * s;
  Eigen::SelfAdjointEigenSolver<M4> es(0.5 * (inner + inner.adjoint()));
  const double t = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  return t * t;
}

bool physical(const M4& m) {
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-12) return false;
  if (std::abs(m.trace() - C(1.0)) > 1e-12) return false;
  Eigen::SelfAdjointEigenSolver<M4> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -1e-12;
}

M4 ginibre(sagnac::rng::Generator& gen) {
  M4 g;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) g(r, c) = C(gen.normal(), gen.normal());
  const M4 m = g * g.adjoint();
  return m / m.trace().real();
}

M4 werner(double p) {
  M4 phi = M4::Zero();
  phi(0, 0) = phi(0, 3) = phi(3, 0) = phi(3, 3) = 0.5;
  return (1.0 - p) * phi + p * M4::Identity() / 4.0;
}

sagnac::tomo::TomographyData wrap(std::vector<double> counts, double accidental = 0.0) {
  return {sagnac::tomo::standard_16_settings(), std::move(counts), 1.0, std::vector<double>(16, accidental)};
}

// Same sub-stream layout as the simulator: setting v draws from derive_seed(seed, v).
std::vector<double> poisson_counts(const M4& rho, double pairs, double accidental, std::uint64_t seed) {
  std::vector<double> c;
  for (int v = 0; v < 16; ++v) {
    sagnac::rng::Generator gen(sagnac::rng::derive_seed(seed, static_cast<std::uint64_t>(v)));
    c.push_back(static_cast<double>(gen.poisson(pairs * std::max(0.0, prob(rho, projectors()[v])) + accidental)));
  }
  return c;
}

M4 matrix_of(const sagnac::tomo::ReconstructionResult& r) { return r.rho.matrix(); }

struct MeanSe {
  double mean, se;
};

MeanSe mean_se(const std::vector<double>& x) {
  double m = 0.0;
  for (double v : x) m += v;
  m /= static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return {m, std::sqrt(ss / static_cast<double>(x.size() - 1) / static_cast<double>(x.size()))};
}

// ---- criteria ----

Outcome c1() {
  const double d = phase(kBk7[1], 8.0, 1.0, kBk7Alpha) + phase(kBk7[2], 8.0, 1.0, kBk7Alpha) -
                   phase(kBk7[0], 8.0, 1.0, kBk7Alpha);
  const double v = std::abs(d) / kPi;
  return {1, std::abs(v - 0.019) <= 0.001, "|dPhi| = " + num(v, 5) + " pi, target 0.019 pi +- 0.001 pi"};
}

Outcome c2() {
  const double v = phase(kBk7[0], 8.0, 1.0, kBk7Alpha) / kPi;
  return {2, std::abs(v - 0.36) <= 0.05 * 0.36,
          "single-path 532 nm = " + num(v, 5) + " pi, published ~0.36 pi, 5% (gap to 0.36 is a rounding ambiguity)"};
}

Outcome c3() {
  const double a = 18.0 * 1.5 * 100.0 / 1000.0;
  const double b = 18.0 * 3.6 * 25.0 / 1000.0;
  return {3, std::abs(a - 2.7) <= 1e-12 && std::abs(b - 1.6) <= 0.03 * 1.6,
          "100 km: " + num(a) + " ns (2.70); 25 km: " + num(b) + " ns (~1.6, 3%)"};
}

Outcome c4() {
  const double dnu_thz = 299792458.0 * 0.4e-9 / (810e-9 * 810e-9) / 1e12;
  const double b = 9300.0 / (0.30 * 0.15 * 1.0 * dnu_thz);
  const double b180 = 9300.0 / (0.30 * 0.15 * 1.0 * 0.180);
  return {4, std::abs(b - 1.13e6) <= 0.01 * 1.13e6 && std::abs(b180 - 1.148e6) <= 0.01 * 1.148e6,
          "B = " + num(b) + " at " + num(dnu_thz * 1e3, 6) + " GHz; B(180 GHz) = " + num(b180)};
}

Outcome c5() {
  const double r = 9300.0 / 600000.0;
  return {5, std::abs(r - 0.0155) <= 1e-15, "ratio = " + num(r, 10)};
}

Outcome c6() {
  const auto b = [](double length) {
    const sagnac::source::CrystalConfig c{length, 30.0, 0.4, 9300.0};
    return sagnac::source::pair_rate_at_length(c) / sagnac::source::bandwidth_at_length(c);
  };
  const double r = b(60.0) / b(30.0);
  return {6, std::abs(r - std::pow(2.0, 1.5)) <= 1e-12, "B(2L)/B(L) = " + num(r, 15) + " vs 2^1.5"};
}

Outcome c7(std::uint64_t seed, double& linear_err, double& min_fid) {
  linear_err = 0.0;
  min_fid = 1.0;
  for (int k = 0; k < 100; ++k) {
    sagnac::rng::Generator gen(sagnac::rng::derive_seed(seed, static_cast<std::uint64_t>(k)));
    const M4 truth = ginibre(gen);
    std::vector<double> c;
    for (const auto& p : projectors()) c.push_back(1e4 * prob(truth, p));
    linear_err = std::max(linear_err, (oracle_linear(c) - truth).cwiseAbs().maxCoeff());
    const auto lib_lin = sagnac::tomo::linear_inversion(wrap(c));
    linear_err = std::max(linear_err, (matrix_of(lib_lin) - truth).cwiseAbs().maxCoeff());
    min_fid = std::min(min_fid, uhlmann(matrix_of(sagnac::tomo::mle_reconstruct(wrap(c))), truth));
  }
  return {7, linear_err <= 1e-9 && min_fid >= 1.0 - 1e-6,
          "max linear entry error " + num(linear_err, 3) + " (<= 1e-9); min MLE fidelity " + num(min_fid, 12) +
              " (>= 1 - 1e-6)"};
}

Outcome c8(std::uint64_t seed) {
  int ok = 0;
  int zeros = 0;
  for (int k = 0; k < 1000; ++k) {
    sagnac::rng::Generator gen(sagnac::rng::derive_seed(seed ^ 0x5bd1e995ULL, static_cast<std::uint64_t>(k)));
    std::vector<double> c(16, 0.0);
    switch (k % 4) {
      case 0: {
        const M4 rho = ginibre(gen);
        const double scale = std::pow(10.0, 1.0 + 3.0 * gen.uniform());
        for (int v = 0; v < 16; ++v) c[v] = static_cast<double>(gen.poisson(scale * prob(rho, projectors()[v])));
        break;
      }
      case 1:
        for (auto& x : c) x = gen.uniform() < 0.6 ? 0.0 : std::floor(50.0 * gen.uniform());
        break;
      case 2:
        c[k / 4 % 16] = 1.0 + std::floor(1000.0 * gen.uniform());
        break;
      default:
        c[gen.next_u64() % 16] = 5.0;
        c[gen.next_u64() % 16] += 1.0;
        break;
    }
    double total = 0.0;
    for (double x : c) total += x;
    if (total == 0.0) c[0] = 1.0;
    zeros += static_cast<int>(std::count(c.begin(), c.end(), 0.0));
    const auto r = sagnac::tomo::mle_reconstruct(wrap(c));
    if (physical(matrix_of(r))) ++ok;
  }
  return {8, ok == 1000, num(ok) + " / 1000 reconstructions physical (" + num(zeros) + " zero cells in total)"};
}

Outcome c9(std::uint64_t seed, double& mean_out) {
  const M4 rho = werner(0.043);
  std::vector<double> f;
  for (int k = 0; k < 50; ++k) {
    const auto c = poisson_counts(rho, 1e4, 0.0, sagnac::rng::derive_seed(seed, static_cast<std::uint64_t>(k)));
    f.push_back(phi_plus_fidelity(matrix_of(sagnac::tomo::mle_reconstruct(wrap(c)))));
  }
  const auto s = mean_se(f);
  mean_out = s.mean;
  const double target = 1.0 - 0.75 * 0.043;
  return {9, std::abs(s.mean - target) <= 3.0 * s.se,
          "mean MLE fidelity " + num(s.mean) + " vs " + num(target) + ", 3 SE = " + num(3.0 * s.se, 3) +
              ", z = " + num((s.mean - target) / s.se, 3)};
}

Outcome c10(std::uint64_t seed, double& std_out) {
  const auto c = poisson_counts(werner(1.0 / 30.0), 2.0 * 9300.0 * 10.0, 0.0, sagnac::rng::derive_seed(seed, 0));
  const auto mc = sagnac::tomo::monte_carlo_errors(wrap(c), 1000, sagnac::rng::derive_seed(seed, 1));
  std::vector<double> f;
  for (double x : mc.per_run_fidelity)
    if (!std::isnan(x)) f.push_back(x);
  const double sd = mean_se(f).se * std::sqrt(static_cast<double>(f.size()));
  std_out = sd;
  double peak = 0.0;
  for (double x : c) peak = std::max(peak, x);
  return {10, sd >= 0.0005 && sd <= 0.003,
          "1000-run std " + num(sd, 5) + " in [0.0005, 0.003]; largest setting " + num(peak) + " counts"};
}

Outcome c11(std::uint64_t seed, double& gain_out) {
  M4 phi = werner(0.0);
  const double a = 1e4 * 400.0 / 9300.0 / 4.0;
  double raw = 0.0;
  double sub = 0.0;
  for (int k = 0; k < 50; ++k) {
    const auto c = poisson_counts(phi, 1e4, a, sagnac::rng::derive_seed(seed, static_cast<std::uint64_t>(k)));
    std::vector<double> s;
    for (double x : c) s.push_back(std::max(0.0, x - a));
    raw += phi_plus_fidelity(matrix_of(sagnac::tomo::mle_reconstruct(wrap(c, a))));
    sub += phi_plus_fidelity(matrix_of(sagnac::tomo::mle_reconstruct(wrap(s))));
  }
  raw /= 50.0;
  sub /= 50.0;
  gain_out = sub - raw;
  return {11, sub > raw, "mean raw " + num(raw, 6) + ", mean subtracted " + num(sub, 6)};
}

Outcome c12(std::uint64_t seed) {
  const sagnac::thermal::MaterialThermalData flat("flat", {{200.0, 1.7, 3e-6}, {5000.0, 1.7, 3e-6}}, 4e-6);
  sagnac::rng::Generator gen(seed);
  double worst = 0.0;
  double worst_oracle = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const double pump = 300.0 + 500.0 * gen.uniform();
    const double signal = pump * (1.05 + 0.9 * gen.uniform());
    const double idler = 1.0 / (1.0 / pump - 1.0 / signal);
    if (idler > 5000.0) continue;
    const double length = 0.5 + 60.0 * gen.uniform();
    const double dT = -10.0 + 20.0 * gen.uniform();
    const double k_flat = 2.0 * kPi * length * 1e-3 * (3e-6 + 1.7 * 4e-6) * dT * 1e9;
    worst_oracle = std::max(worst_oracle, std::abs(k_flat * (1.0 / signal + 1.0 / idler - 1.0 / pump)));
    worst = std::max(worst, std::abs(sagnac::thermal::sagnac_drift({flat, length, dT, {pump, signal, idler}})));
  }
  return {12, worst <= 1e-12 && worst_oracle <= 1e-12,
          "max |drift| " + num(worst, 3) + " rad (oracle " + num(worst_oracle, 3) + ")"};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Runs one command with stdout captured into a file; returns stdout + file contents.
std::string run_capture(const std::string& cmd, const std::filesystem::path& out) {
  const int rc = std::system((cmd + " > \"" + out.string() + "\" 2>/dev/null").c_str());
  return std::to_string(rc) + "\n" + slurp(out);
}

Outcome c13(std::uint64_t seed, const std::string& cli, const std::string& source) {
  const auto lib = sagnac::repro::check_determinism(seed);
  if (cli.empty()) return {13, lib.pass, "library path only: " + std::string(lib.pass ? "identical" : "differs")};
  const auto dir = std::filesystem::temp_directory_path() / ("sagnac_accept_" + std::to_string(seed));
  std::filesystem::create_directories(dir);
  const std::string cfg = source + "/configs/reference_experiment.json";
  std::array<std::string, 2> outputs;
  for (int pass = 0; pass < 2; ++pass) {
    const auto csv = dir / ("sim" + std::to_string(pass) + ".csv");
    std::string all = run_capture("\"" + cli + "\" simulate --config \"" + cfg + "\" --seed " + std::to_string(seed) +
                                      " --out \"" + csv.string() + "\"",
                                  dir / "stdout.txt");
    all += slurp(csv);
    all += run_capture("\"" + cli + "\" tomo \"" + (dir / "sim0.csv").string() + "\" --montecarlo 50 --seed " +
                           std::to_string(seed),
                       dir / "stdout.txt");
    outputs[pass] = all;
  }
  std::filesystem::remove_all(dir);
  const bool same = outputs[0] == outputs[1] && outputs[0].rfind("0\n", 0) == 0;
  return {13, same && lib.pass,
          std::string("CLI simulate + tomo twice: ") + (same ? "byte-identical" : "DIFFER") + "; library path " +
              (lib.pass ? "identical" : "differs")};
}

}  // namespace

int main(int argc, char** argv) {
  std::uint64_t seed = 2024;
  std::string cli;
  std::string source;
  std::set<int> known_red;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--cli" && i + 1 < argc) cli = argv[++i];
    else if (a == "--source" && i + 1 < argc) source = argv[++i];
    else if (a == "--known-red" && i + 1 < argc) known_red.insert(std::atoi(argv[++i]));
    else seed = std::stoull(a);
  }
  const auto sub = [seed](std::uint64_t k) { return sagnac::rng::derive_seed(seed, k); };

  double lin_err = 0.0;
  double mle_fid = 0.0;
  double werner_mean = 0.0;
  double mc_std = 0.0;
  double gain = 0.0;
  std::vector<Outcome> out{c1(), c2(), c3(), c4(), c5(), c6()};
  out.push_back(c7(sub(7), lin_err, mle_fid));
  out.push_back(c8(sub(8)));
  out.push_back(c9(sub(9), werner_mean));
  out.push_back(c10(sub(10), mc_std));
  out.push_back(c11(sub(11), gain));
  out.push_back(c12(sub(12)));
  out.push_back(c13(sub(13), cli, source));

  // The paper-check report must agree with the oracles.
  const auto rep = sagnac::repro::run_reproduction(seed);
  std::map<std::string, double> lib;
  std::map<int, bool> lib_pass;
  for (const auto& r : rep.rows) {
    lib[r.id] = r.computed_value;
    auto [it, fresh] = lib_pass.emplace(r.criterion, r.pass);
    if (!fresh) it->second = it->second && r.pass;
  }
  const std::vector<std::pair<std::string, bool>> agree{
      {"werner mean", std::abs(lib["werner_oracle"] - werner_mean) <= 1e-12},
      {"monte-carlo std", std::abs(lib["montecarlo_error_bar"] - mc_std) <= 1e-12},
      {"subtraction gain", std::abs(lib["accidental_subtraction"] - gain) <= 1e-12},
      {"sagnac drift", std::abs(lib["delta_phi_sagnac"] - 0.0186956) <= 1e-6},
  };

  int unexpected = 0;
  for (const auto& o : out) {
    const bool red = known_red.count(o.criterion) != 0;
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << "criterion " << o.criterion << ": " << o.detail;
    if (!o.pass && red) std::cout << "  (known red)";
    if (lib_pass.count(o.criterion) && lib_pass[o.criterion] != o.pass) {
      std::cout << "  (paper-check disagrees)";
      ++unexpected;
    }
    std::cout << '\n';
    if (!o.pass && !red) ++unexpected;
  }
  for (const auto& [what, ok] : agree) {
    if (!ok) {
      std::cout << "[FAIL] cross-check: paper-check " << what << " differs from the oracle\n";
      ++unexpected;
    }
  }
  int fails = 0;
  for (const auto& o : out) fails += o.pass ? 0 : 1;
  std::cout << (13 - fails) << " / 13 criteria pass";
  if (fails) std::cout << "; " << (unexpected ? "unexpected failures present" : "only known reds fail");
  std::cout << '\n';
  return unexpected ? 1 : 0;
}
