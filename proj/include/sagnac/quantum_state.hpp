#pragma once

// Two-qubit polarization states in the ordered basis (HH, HV, VH, VV).
//
// Single-qubit conventions:
//   D = (H + V)/sqrt2    A = (H - V)/sqrt2
//   R = (H - iV)/sqrt2   L = (H + iV)/sqrt2
// R/L signs differ between references; everything downstream (the tomography
// setting table in particular) assumes the signs above.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "sagnac/errors.hpp"

namespace sagnac::state {

using Complex = std::complex<double>;
using Vector2c = Eigen::Vector2cd;
using Vector4c = Eigen::Vector4cd;
using Matrix2c = Eigen::Matrix2cd;
using Matrix4c = Eigen::Matrix4cd;

inline constexpr double kAlgebraicTol = 1e-12;
inline constexpr double kSpectralTol = 1e-9;

class PureState2Q {
 public:
  // Throws DomainError unless ||amplitudes|| = 1 within kAlgebraicTol.
  explicit PureState2Q(const Vector4c& amplitudes) : amp_(amplitudes) {
    if (!amp_.allFinite() || std::abs(amp_.squaredNorm() - 1.0) > kAlgebraicTol) {
      throw DomainError("PureState2Q: amplitudes are not normalized");
    }
  }

  static PureState2Q normalized(const Vector4c& v) {
    const double n = v.norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw DomainError("PureState2Q: zero or non-finite vector");
    return PureState2Q(v / n);
  }

  static PureState2Q basis(int index) {
    if (index < 0 || index > 3) throw DomainError("PureState2Q: basis index out of range");
    Vector4c v = Vector4c::Zero();
    v(index) = 1.0;
    return PureState2Q(v);
  }

  const Vector4c& amplitudes() const { return amp_; }
  Complex operator[](int i) const { return amp_(i); }

 private:
  Vector4c amp_;
};

// Hermitian unit-trace 4x4 matrix. Positivity is not enforced on construction
// so that linear-inversion estimates can be represented; query is_positive().
class DensityMatrix4 {
 public:
  explicit DensityMatrix4(const Matrix4c& m) : m_(m) {
    if (!m_.allFinite()) throw DomainError("DensityMatrix4: non-finite entries");
    if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() >= kAlgebraicTol) {
      throw DomainError("DensityMatrix4: matrix is not Hermitian");
    }
    if (std::abs(m_.trace() - Complex(1.0)) > kSpectralTol) {
      throw DomainError("DensityMatrix4: trace differs from 1");
    }
    // Symmetrize away rounding-level asymmetry.
    m_ = 0.5 * (m_ + m_.adjoint()).eval();
  }

  static DensityMatrix4 maximally_mixed() { return DensityMatrix4(Matrix4c::Identity() / 4.0); }

  const Matrix4c& matrix() const { return m_; }
  Complex operator()(int r, int c) const { return m_(r, c); }

  // Ascending eigenvalues of the Hermitian part.
  Eigen::Vector4d eigenvalues() const {
    Eigen::SelfAdjointEigenSolver<Matrix4c> es(0.5 * (m_ + m_.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues();
  }

  double min_eigenvalue() const { return eigenvalues()(0); }
  bool is_positive() const { return min_eigenvalue() >= -kSpectralTol; }

  void require_physical(const char* where) const {
    if (!is_positive()) throw DomainError(std::string(where) + ": density matrix is not positive semidefinite");
  }

 private:
  Matrix4c m_;
};

enum class Polarization { H, V, D, A, R, L };

inline char to_char(Polarization p) {
  constexpr std::array<char, 6> names{'H', 'V', 'D', 'A', 'R', 'L'};
  return names[static_cast<int>(p)];
}

inline Polarization polarization_from_char(char c) {
  switch (c) {
    case 'H': case 'h': return Polarization::H;
    case 'V': case 'v': return Polarization::V;
    case 'D': case 'd': return Polarization::D;
    case 'A': case 'a': return Polarization::A;
    case 'R': case 'r': return Polarization::R;
    case 'L': case 'l': return Polarization::L;
    default: throw DomainError(std::string("unknown polarization label '") + c + "'");
  }
}

class SingleQubitProjector {
 public:
  explicit SingleQubitProjector(Polarization p) : label_(std::string(1, to_char(p))) {
    const double s = std::numbers::sqrt2 / 2.0;
    const Complex i(0.0, 1.0);
    switch (p) {
      case Polarization::H: v_ << 1.0, 0.0; break;
      case Polarization::V: v_ << 0.0, 1.0; break;
      case Polarization::D: v_ << s, s; break;
      case Polarization::A: v_ << s, -s; break;
      case Polarization::R: v_ << s, -i * s; break;
      case Polarization::L: v_ << s, i * s; break;
    }
  }

  // Arbitrary analyzer state; normalized on construction.
  SingleQubitProjector(const Vector2c& v, std::string label) : v_(v), label_(std::move(label)) {
    const double n = v_.norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw DomainError("SingleQubitProjector: zero or non-finite vector");
    v_ /= n;
  }

  const Vector2c& vector() const { return v_; }
  const std::string& label() const { return label_; }
  Matrix2c matrix() const { return v_ * v_.adjoint(); }

 private:
  Vector2c v_;
  std::string label_;
};

inline void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw DomainError(std::string(what) + " must be finite");
}

// (|HH> + e^{i phase}|VV>)/sqrt2
inline PureState2Q phi_state(double phase) {
  require_finite(phase, "phi_state: phase");
  const double s = std::numbers::sqrt2 / 2.0;
  Vector4c v;
  v << s, 0.0, 0.0, std::polar(s, phase);
  return PureState2Q(v);
}

inline PureState2Q phi_plus() { return phi_state(0.0); }

// cos(split)|HH> + e^{i phase} sin(split)|VV>; split = pi/4 is balanced pumping.
inline PureState2Q general_source_state(double split_angle, double phase) {
  require_finite(split_angle, "general_source_state: split_angle");
  require_finite(phase, "general_source_state: phase");
  Vector4c v;
  v << std::cos(split_angle), 0.0, 0.0, std::polar(std::sin(split_angle), phase);
  return PureState2Q(v);
}

inline DensityMatrix4 to_density(const PureState2Q& psi) {
  return DensityMatrix4(psi.amplitudes() * psi.amplitudes().adjoint());
}

// <psi|rho|psi> with no physicality check; used for estimates that may be non-positive.
inline double overlap(const DensityMatrix4& rho, const PureState2Q& psi) {
  const Vector4c& a = psi.amplitudes();
  return (a.adjoint() * rho.matrix() * a)(0, 0).real();
}

inline double fidelity_to_pure(const DensityMatrix4& rho, const PureState2Q& target) {
  rho.require_physical("fidelity_to_pure");
  double f = overlap(rho, target);
  if (f < 0.0 && f > -kSpectralTol) f = 0.0;
  if (f > 1.0 && f < 1.0 + kSpectralTol) f = 1.0;
  return f;
}

// (1 - p) rho + p I/4
inline DensityMatrix4 werner_mix(const DensityMatrix4& rho, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("werner_mix: p must lie in [0, 1]");
  return DensityMatrix4((1.0 - p) * rho.matrix() + p * Matrix4c::Identity() / 4.0);
}

// Pi_a (x) Pi_b, signal qubit first.
inline Matrix4c projector_pair(const SingleQubitProjector& a, const SingleQubitProjector& b) {
  const Matrix2c pa = a.matrix();
  const Matrix2c pb = b.matrix();
  Matrix4c out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = pa(i, j) * pb;
  return out;
}

inline double expectation(const DensityMatrix4& rho, const Matrix4c& op) {
  return (rho.matrix() * op).trace().real();
}

namespace detail {

inline Matrix4c hermitian_sqrt(const Matrix4c& m) {
  Eigen::SelfAdjointEigenSolver<Matrix4c> es(0.5 * (m + m.adjoint()));
  Eigen::Vector4d root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace detail

// Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2 between two states.
inline double state_fidelity(const DensityMatrix4& rho, const DensityMatrix4& sigma) {
  const Matrix4c r = detail::hermitian_sqrt(rho.matrix());
  const Matrix4c inner = r * sigma.matrix() * r;
  Eigen::SelfAdjointEigenSolver<Matrix4c> es(0.5 * (inner + inner.adjoint()), Eigen::EigenvaluesOnly);
  const double t = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  return std::min(1.0, t * t);
}

inline double trace_distance(const DensityMatrix4& rho, const DensityMatrix4& sigma) {
  const Matrix4c d = rho.matrix() - sigma.matrix();
  Eigen::SelfAdjointEigenSolver<Matrix4c> es(0.5 * (d + d.adjoint()), Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace sagnac::state
