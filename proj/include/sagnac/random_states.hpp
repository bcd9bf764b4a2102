#pragma once

// Random two-qubit states for property checks and simulation studies.

#include "sagnac/quantum_state.hpp"
#include "sagnac/random.hpp"

namespace sagnac::state {

inline PureState2Q random_pure_state(rng::Generator& gen) {
  Vector4c v;
  for (int i = 0; i < 4; ++i) v(i) = Complex(gen.normal(), gen.normal());
  return PureState2Q::normalized(v);
}

// G G^dag / Tr with G a 4 x rank complex Gaussian matrix. rank = 4 samples the
// Hilbert-Schmidt measure; smaller ranks give rank-deficient states.
inline DensityMatrix4 random_density_matrix(rng::Generator& gen, int rank = 4) {
  if (rank < 1 || rank > 4) throw DomainError("random_density_matrix: rank must be 1..4");
  Eigen::Matrix<Complex, 4, Eigen::Dynamic> g(4, rank);
  for (int c = 0; c < rank; ++c)
    for (int r = 0; r < 4; ++r) g(r, c) = Complex(gen.normal(), gen.normal());
  Matrix4c m = g * g.adjoint();
  m /= m.trace().real();
  return DensityMatrix4(0.5 * (m + m.adjoint()));
}

}  // namespace sagnac::state
