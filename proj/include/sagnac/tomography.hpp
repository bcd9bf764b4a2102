#pragma once

// Two-qubit polarization tomography from 16 coincidence measurements.
//
// Forward model: n_v = N Tr(rho Pi_v) (+ accidental background), with
// Pi_v = Pi_signal (x) Pi_idler.
//
// Reconstruction:
//  - linear inversion on the 16-dimensional real operator space spanned by
//    sigma_a (x) sigma_b; trace normalization comes out as the count sum over
//    any basis-complete subset (HH+HV+VH+VV for the standard set);
//  - maximum likelihood over rho = T^dag T / Tr(T^dag T) with T lower
//    triangular, maximizing sum_v n_v ln(mu_v) - mu_v where mu_v = Tr(T^dag T Pi_v)
//    (the intensity N is absorbed into T).

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "sagnac/errors.hpp"
#include "sagnac/link_detection.hpp"
#include "sagnac/quantum_state.hpp"
#include "sagnac/random.hpp"

namespace sagnac::tomo {

using state::DensityMatrix4;
using state::Matrix4c;
using state::Polarization;
using state::SingleQubitProjector;

inline constexpr int kSettingCount = 16;

struct MeasurementSetting {
  SingleQubitProjector signal;
  SingleQubitProjector idler;
  std::string label;

  MeasurementSetting(SingleQubitProjector s, SingleQubitProjector i, std::string l)
      : signal(std::move(s)), idler(std::move(i)), label(std::move(l)) {}

  MeasurementSetting(Polarization s, Polarization i)
      : signal(s), idler(i), label(std::string(1, state::to_char(s)) + state::to_char(i)) {}

  Matrix4c projector() const { return state::projector_pair(signal, idler); }
};

// The 16-setting sequence of James, Kwiat, Munro & White, Phys. Rev. A 64, 052312.
inline std::vector<MeasurementSetting> standard_16_settings() {
  using P = Polarization;
  constexpr std::array<std::array<P, 2>, kSettingCount> table{{
      {P::H, P::H}, {P::H, P::V}, {P::V, P::V}, {P::V, P::H},
      {P::R, P::H}, {P::R, P::V}, {P::D, P::V}, {P::D, P::H},
      {P::D, P::R}, {P::D, P::D}, {P::R, P::D}, {P::H, P::D},
      {P::V, P::D}, {P::V, P::L}, {P::H, P::L}, {P::R, P::L},
  }};
  std::vector<MeasurementSetting> out;
  out.reserve(table.size());
  for (const auto& [s, i] : table) out.emplace_back(s, i);
  return out;
}

struct TomographyData {
  std::vector<MeasurementSetting> settings;
  std::vector<double> counts;       // may be non-integer after background subtraction
  double acquisition_time_per_setting_s = 1.0;
  std::vector<double> accidentals;  // expected background counts per setting
};

inline void validate(const TomographyData& d) {
  if (d.settings.size() != kSettingCount || d.counts.size() != kSettingCount ||
      d.accidentals.size() != kSettingCount) {
    throw DomainError("TomographyData: exactly 16 settings, counts and accidentals required");
  }
  for (int v = 0; v < kSettingCount; ++v) {
    if (!(d.counts[v] >= 0.0) || !std::isfinite(d.counts[v])) {
      throw DomainError("TomographyData: count " + std::to_string(v) + " is negative or non-finite");
    }
    if (!(d.accidentals[v] >= 0.0) || !std::isfinite(d.accidentals[v])) {
      throw DomainError("TomographyData: accidental " + std::to_string(v) + " is negative or non-finite");
    }
  }
  for (int a = 0; a < kSettingCount; ++a) {
    const Matrix4c pa = d.settings[a].projector();
    for (int b = a + 1; b < kSettingCount; ++b) {
      if ((pa - d.settings[b].projector()).cwiseAbs().maxCoeff() < state::kAlgebraicTol) {
        throw DomainError("TomographyData: settings " + d.settings[a].label + " and " + d.settings[b].label +
                          " coincide");
      }
    }
  }
}

namespace detail {

inline const std::array<state::Matrix2c, 4>& pauli() {
  static const std::array<state::Matrix2c, 4> s = [] {
    const state::Complex i(0.0, 1.0);
    std::array<state::Matrix2c, 4> p;
    p[0] << 1, 0, 0, 1;
    p[1] << 0, 1, 1, 0;
    p[2] << 0, -i, i, 0;
    p[3] << 1, 0, 0, -1;
    return p;
  }();
  return s;
}

// sigma_{k/4} (x) sigma_{k%4}
inline Matrix4c pauli_product(int k) {
  const auto& p = pauli();
  Matrix4c out;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) out.block<2, 2>(2 * r, 2 * c) = p[k / 4](r, c) * p[k % 4];
  return out;
}

inline std::vector<Matrix4c> projectors(const std::vector<MeasurementSetting>& settings) {
  std::vector<Matrix4c> out;
  out.reserve(settings.size());
  for (const auto& s : settings) out.push_back(s.projector());
  return out;
}

}  // namespace detail

using DesignMatrix = Eigen::Matrix<double, Eigen::Dynamic, kSettingCount>;

// Row v maps the Pauli coordinates s_k = Tr(rho sigma_k) to Tr(rho Pi_v):
// B(v, k) = Tr(Pi_v sigma_k) / 4.
inline DesignMatrix design_matrix(const std::vector<MeasurementSetting>& settings) {
  DesignMatrix b(static_cast<Eigen::Index>(settings.size()), kSettingCount);
  for (std::size_t v = 0; v < settings.size(); ++v) {
    const Matrix4c pi = settings[v].projector();
    for (int k = 0; k < kSettingCount; ++k) {
      b(static_cast<Eigen::Index>(v), k) = (pi * detail::pauli_product(k)).trace().real() / 4.0;
    }
  }
  return b;
}

inline int design_rank(const std::vector<MeasurementSetting>& settings) {
  Eigen::FullPivLU<DesignMatrix> lu(design_matrix(settings));
  lu.setThreshold(1e-10);
  return static_cast<int>(lu.rank());
}

inline std::vector<double> expected_counts(const DensityMatrix4& rho, const std::vector<MeasurementSetting>& settings,
                                           double pairs_per_setting, double accidental_per_setting) {
  rho.require_physical("expected_counts");
  if (!(pairs_per_setting > 0.0)) throw DomainError("expected_counts: pairs_per_setting must be positive");
  if (!(accidental_per_setting >= 0.0)) throw DomainError("expected_counts: accidentals must be non-negative");
  std::vector<double> out;
  out.reserve(settings.size());
  for (const auto& s : settings) {
    const double p = std::max(0.0, state::expectation(rho, s.projector()));
    out.push_back(pairs_per_setting * p + accidental_per_setting);
  }
  return out;
}

// Poisson counts around expected_counts. Setting v uses sub-stream v of `seed`.
inline TomographyData simulate_tomography(const DensityMatrix4& rho, const std::vector<MeasurementSetting>& settings,
                                          double pairs_per_setting, double accidental_per_setting,
                                          std::uint64_t seed, double acquisition_time_s = 1.0) {
  if (!(acquisition_time_s > 0.0)) throw DomainError("simulate_tomography: acquisition time must be positive");
  const auto mean = expected_counts(rho, settings, pairs_per_setting, accidental_per_setting);
  TomographyData d{settings, {}, acquisition_time_s, std::vector<double>(settings.size(), accidental_per_setting)};
  d.counts.reserve(settings.size());
  for (std::size_t v = 0; v < settings.size(); ++v) {
    const auto rec = link::sample_counts(mean[v] / acquisition_time_s, acquisition_time_s, rng::derive_seed(seed, v));
    d.counts.push_back(static_cast<double>(rec.counts));
  }
  return d;
}

inline TomographyData subtract_accidentals(const TomographyData& data) {
  TomographyData out = data;
  for (std::size_t v = 0; v < out.counts.size(); ++v) {
    out.counts[v] = std::max(0.0, data.counts[v] - data.accidentals[v]);
    out.accidentals[v] = 0.0;
  }
  return out;
}

enum class Method { linear_inversion, mle };

inline const char* to_string(Method m) { return m == Method::mle ? "mle" : "linear_inversion"; }

struct ReconstructionResult {
  DensityMatrix4 rho;
  Method method;
  double fidelity_phi_plus;
  bool physical;
  std::optional<double> log_likelihood;
  std::optional<int> iterations;
  std::optional<bool> converged;
  // Log-likelihood after each accepted optimizer step, starting point first.
  std::vector<double> likelihood_history;
};

namespace detail {

// Hermitian matrix with Tr(M Pi_v) matching the counts; trace equals the fitted intensity.
inline Matrix4c linear_unnormalized(const TomographyData& data) {
  const DesignMatrix b = design_matrix(data.settings);
  Eigen::FullPivLU<DesignMatrix> lu(b);
  lu.setThreshold(1e-10);
  if (lu.rank() < kSettingCount) {
    throw DegeneracyError("linear_inversion: measurement settings do not span the operator space (rank " +
                          std::to_string(lu.rank()) + ")");
  }
  const Eigen::Map<const Eigen::Matrix<double, kSettingCount, 1>> n(data.counts.data());
  const Eigen::Matrix<double, kSettingCount, 1> x = lu.solve(n);
  Matrix4c m = Matrix4c::Zero();
  for (int k = 0; k < kSettingCount; ++k) m += x(k) * pauli_product(k);
  m /= 4.0;
  return 0.5 * (m + m.adjoint());
}

}  // namespace detail

inline ReconstructionResult linear_inversion(const TomographyData& data) {
  validate(data);
  const Matrix4c m = detail::linear_unnormalized(data);
  const double intensity = m.trace().real();
  if (!(intensity > 0.0)) {
    throw DegeneracyError("linear_inversion: no counts in the basis-complete settings; trace cannot be normalized");
  }
  DensityMatrix4 rho(m / intensity);
  return {rho, Method::linear_inversion, state::overlap(rho, state::phi_plus()), rho.is_positive(), {}, {}, {}, {}};
}

struct MleOptions {
  double tol = 1e-10;
  int max_iter = 5000;
};

namespace detail {

inline constexpr double kEigenFloor = 1e-6;
using Params = Eigen::Matrix<double, kSettingCount, 1>;

// Parameter layout: 4 real diagonal entries, then (re, im) of T(r, c) for r > c.
inline Matrix4c unpack(const Params& x) {
  Matrix4c t = Matrix4c::Zero();
  int k = 0;
  for (int d = 0; d < 4; ++d) t(d, d) = x(k++);
  for (int r = 1; r < 4; ++r)
    for (int c = 0; c < r; ++c) {
      t(r, c) = state::Complex(x(k), x(k + 1));
      k += 2;
    }
  return t;
}

inline Params pack(const Matrix4c& t) {
  Params x;
  int k = 0;
  for (int d = 0; d < 4; ++d) x(k++) = t(d, d).real();
  for (int r = 1; r < 4; ++r)
    for (int c = 0; c < r; ++c) {
      x(k++) = t(r, c).real();
      x(k++) = t(r, c).imag();
    }
  return x;
}

// Lower-triangular T with T^dag T = m for Hermitian positive definite m.
inline Matrix4c lower_factor(const Matrix4c& m) {
  // Reverse the index order, take the Cholesky factor, reverse back.
  Matrix4c j = Matrix4c::Zero();
  for (int i = 0; i < 4; ++i) j(i, 3 - i) = 1.0;
  Eigen::LLT<Matrix4c> llt(j * m * j);
  if (llt.info() != Eigen::Success) throw DomainError("lower_factor: matrix is not positive definite");
  const Matrix4c l = llt.matrixL();
  const Matrix4c upper = j * l * j;
  Matrix4c t = upper.adjoint();
  // Make the diagonal real and non-negative (Cholesky already gives that).
  for (int d = 0; d < 4; ++d) t(d, d) = std::abs(t(d, d));
  return t;
}

// Poisson objective in count-normalized units:
//   h = sum_v (m_v - c_v) - c_v ln(m_v / c_v),   c_v = n_v / S,  m_v = Tr(T^dag T Pi_v)
// h >= 0 and vanishes iff the model matches the counts exactly. The
// log-likelihood is LL = const - S h.
class PoissonObjective {
 public:
  PoissonObjective(const std::vector<Matrix4c>& projectors, const std::vector<double>& counts, double scale)
      : pi_(projectors), c_(counts.size()) {
    for (std::size_t v = 0; v < counts.size(); ++v) c_[v] = counts[v] / scale;
  }

  double value(const Params& x) const {
    const Matrix4c t = unpack(x);
    const Matrix4c m = t.adjoint() * t;
    double h = 0.0;
    for (std::size_t v = 0; v < pi_.size(); ++v) {
      const double mv = (m * pi_[v]).trace().real();
      if (c_[v] > 0.0) {
        if (!(mv > 0.0)) return std::numeric_limits<double>::infinity();
        // c (x - ln(1 + x)), x = (m - c)/c; keeps precision near the optimum
        const double x = (mv - c_[v]) / c_[v];
        h += c_[v] * (x - std::log1p(x));
      } else {
        h += mv;
      }
    }
    return h;
  }

  Params gradient(const Params& x) const {
    const Matrix4c t = unpack(x);
    const Matrix4c m = t.adjoint() * t;
    Matrix4c g = Matrix4c::Zero();
    for (std::size_t v = 0; v < pi_.size(); ++v) {
      const double mv = (m * pi_[v]).trace().real();
      const double w = c_[v] > 0.0 ? (mv - c_[v]) / mv : 1.0;
      g += w * pi_[v];
    }
    // dh = 2 Re Tr(G T^dag dT)
    const Matrix4c gt = g * t.adjoint();
    Params out;
    int k = 0;
    for (int d = 0; d < 4; ++d) out(k++) = 2.0 * gt(d, d).real();
    for (int r = 1; r < 4; ++r)
      for (int c = 0; c < r; ++c) {
        out(k++) = 2.0 * gt(c, r).real();
        out(k++) = -2.0 * gt(c, r).imag();
      }
    return out;
  }

 private:
  const std::vector<Matrix4c>& pi_;
  std::vector<double> c_;
};

// Linear-inversion estimate pushed into the PSD cone: eigenvalues below
// kEigenFloor times the largest are raised to that floor, then the trace is
// renormalized to 1. Falls back to I/4 when no eigenvalue is positive.
inline Matrix4c physical_start(const TomographyData& data) {
  const Matrix4c m = linear_unnormalized(data);
  Eigen::SelfAdjointEigenSolver<Matrix4c> es(m);
  const double top = es.eigenvalues().maxCoeff();
  if (!(top > 0.0)) return Matrix4c::Identity() / 4.0;
  const Eigen::Vector4d lam = es.eigenvalues().cwiseMax(kEigenFloor * top);
  Matrix4c rho = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
  rho /= rho.trace().real();
  return 0.5 * (rho + rho.adjoint());
}

}  // namespace detail

inline ReconstructionResult mle_reconstruct(const TomographyData& data, const MleOptions& opt = {}) {
  validate(data);
  if (!(opt.tol > 0.0) || opt.max_iter < 0) throw DomainError("mle_reconstruct: invalid options");
  double total = 0.0;
  for (double n : data.counts) total += n;
  if (!(total > 0.0)) throw DegeneracyError("mle_reconstruct: all counts are zero");

  const auto pis = detail::projectors(data.settings);
  const detail::PoissonObjective objective(pis, data.counts, total);

  // LL = sum n ln mu - mu = ll_perfect - S h, with ll_perfect = sum n ln n - n.
  double ll_perfect = 0.0;
  for (double n : data.counts)
    if (n > 0.0) ll_perfect += n * std::log(n) - n;
  const auto log_likelihood = [&](double h) { return ll_perfect - total * h; };

  // Starting point: scale the physical estimate to the best-fitting intensity.
  const Matrix4c rho0 = detail::physical_start(data);
  double predicted = 0.0;
  for (const auto& p : pis) predicted += (rho0 * p).trace().real();
  detail::Params x = detail::pack(detail::lower_factor(rho0 * (1.0 / predicted)));

  double h = objective.value(x);
  detail::Params g = objective.gradient(x);
  Eigen::Matrix<double, kSettingCount, kSettingCount> hinv =
      Eigen::Matrix<double, kSettingCount, kSettingCount>::Identity();
  bool first_update = true;

  std::vector<double> history{log_likelihood(h)};
  int iterations = 0;
  bool converged = false;
  constexpr double kArmijo = 1e-4;
  constexpr int kStallWindow = 5;
  int stalled = 0;

  while (iterations < opt.max_iter) {
    if (g.norm() == 0.0) {
      converged = true;
      break;
    }
    detail::Params p = -hinv * g;
    double slope = g.dot(p);
    if (!(slope < 0.0)) {
      hinv.setIdentity();
      p = -g;
      slope = -g.squaredNorm();
    }

    double step = 1.0;
    double h_new = std::numeric_limits<double>::infinity();
    detail::Params x_new;
    bool accepted = false;
    for (int back = 0; back < 60; ++back) {
      x_new = x + step * p;
      h_new = objective.value(x_new);
      if (h_new <= h + kArmijo * step * slope && h_new < h) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // No representable descent along the search direction: stationary to rounding.
      if (!hinv.isIdentity()) {
        hinv.setIdentity();
        first_update = true;
        continue;
      }
      converged = true;
      break;
    }

    const detail::Params g_new = objective.gradient(x_new);
    const detail::Params s = x_new - x;
    const detail::Params y = g_new - g;
    const double improvement = total * (h - h_new);
    x = x_new;
    h = h_new;
    g = g_new;
    ++iterations;
    history.push_back(log_likelihood(h));

    const double sy = s.dot(y);
    if (sy > 1e-300) {
      if (first_update) {
        hinv *= sy / y.squaredNorm();
        first_update = false;
      }
      const double rho_k = 1.0 / sy;
      const auto eye = Eigen::Matrix<double, kSettingCount, kSettingCount>::Identity();
      hinv = (eye - rho_k * s * y.transpose()) * hinv * (eye - rho_k * y * s.transpose()) +
             rho_k * s * s.transpose();
    }

    // Quasi-Newton steps on a rank-deficient optimum can stall for a single
    // iteration; require the improvement to stay below tol for a short window.
    stalled = improvement < opt.tol ? stalled + 1 : 0;
    if (stalled >= kStallWindow) {
      converged = true;
      break;
    }
  }

  const Matrix4c t = detail::unpack(x);
  Matrix4c m = t.adjoint() * t;
  m /= m.trace().real();
  DensityMatrix4 rho(0.5 * (m + m.adjoint()));

  return {rho,
          Method::mle,
          state::fidelity_to_pure(rho, state::phi_plus()),
          rho.is_positive(),
          history.back(),
          iterations,
          converged,
          std::move(history)};
}

struct MonteCarloOptions {
  bool subtract_accidentals = false;
  MleOptions mle{};
  unsigned threads = 0;  // 0: hardware concurrency
};

struct MonteCarloReport {
  int runs = 0;
  double fidelity_mean = 0.0;
  double fidelity_std = 0.0;
  int nonconverged_runs = 0;
  std::vector<std::uint64_t> per_run_seeds;
  std::vector<double> per_run_fidelity;
};

// Each run resamples n'_v ~ Poisson(n_v) from sub-stream `run` of `seed` and
// repeats the full ML reconstruction. Results do not depend on thread count.
inline MonteCarloReport monte_carlo_errors(const TomographyData& data, int runs, std::uint64_t seed,
                                           const MonteCarloOptions& opt = {}) {
  validate(data);
  if (runs < 2) throw DomainError("monte_carlo_errors: at least 2 runs required");

  MonteCarloReport rep;
  rep.runs = runs;
  rep.per_run_seeds.resize(static_cast<std::size_t>(runs));
  rep.per_run_fidelity.resize(static_cast<std::size_t>(runs));
  std::vector<char> converged(static_cast<std::size_t>(runs), 1);
  for (int r = 0; r < runs; ++r) rep.per_run_seeds[r] = rng::derive_seed(seed, static_cast<std::uint64_t>(r));

  const auto run_one = [&](int r) {
    rng::Generator gen(rep.per_run_seeds[r]);
    TomographyData resampled = data;
    for (auto& n : resampled.counts) n = static_cast<double>(gen.poisson(n));
    if (opt.subtract_accidentals) resampled = subtract_accidentals(resampled);
    try {
      const auto res = mle_reconstruct(resampled, opt.mle);
      rep.per_run_fidelity[r] = res.fidelity_phi_plus;
      converged[r] = res.converged.value_or(false) ? 1 : 0;
    } catch (const DegeneracyError&) {
      // An all-zero resample carries no information about the state.
      rep.per_run_fidelity[r] = std::numeric_limits<double>::quiet_NaN();
      converged[r] = 0;
    }
  };

  unsigned nthreads = opt.threads != 0 ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
  nthreads = std::min<unsigned>(nthreads, static_cast<unsigned>(runs));
  if (nthreads <= 1) {
    for (int r = 0; r < runs; ++r) run_one(r);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(nthreads);
    for (unsigned w = 0; w < nthreads; ++w) {
      pool.emplace_back([&, w] {
        for (int r = static_cast<int>(w); r < runs; r += static_cast<int>(nthreads)) run_one(r);
      });
    }
  }

  // Reduce in run order so the statistics are bitwise independent of scheduling.
  double sum = 0.0;
  int used = 0;
  for (int r = 0; r < runs; ++r) {
    if (!converged[r]) ++rep.nonconverged_runs;
    if (std::isnan(rep.per_run_fidelity[r])) continue;
    sum += rep.per_run_fidelity[r];
    ++used;
  }
  if (used < 2) throw DegeneracyError("monte_carlo_errors: fewer than 2 informative runs");
  rep.fidelity_mean = sum / used;
  double ss = 0.0;
  for (int r = 0; r < runs; ++r) {
    if (std::isnan(rep.per_run_fidelity[r])) continue;
    const double d = rep.per_run_fidelity[r] - rep.fidelity_mean;
    ss += d * d;
  }
  rep.fidelity_std = std::sqrt(ss / (used - 1));
  return rep;
}

struct FidelityPair {
  double raw;
  double accidental_subtracted;
};

inline FidelityPair fidelity_report(const TomographyData& data, const MleOptions& opt = {}) {
  return {mle_reconstruct(data, opt).fidelity_phi_plus, mle_reconstruct(subtract_accidentals(data), opt).fidelity_phi_plus};
}

}  // namespace sagnac::tomo
