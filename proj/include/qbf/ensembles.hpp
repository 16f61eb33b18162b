#pragma once
// Random-object factory: Haar unitaries (Ginibre + QR with phase fix),
// Hilbert-Schmidt random density matrices, canonical purifications, and the
// figure-protocol random Hamiltonian, all driven by explicit seeded streams.

#include <qbf/cmatrix.hpp>
#include <qbf/gellmann.hpp>

#include <cstdint>
#include <random>

namespace qbf {

// Splittable deterministic stream: (seed, stream_id) fully determines the
// draw sequence.  Gaussians come from an explicit Box-Muller transform on the
// engine's uniforms rather than std::normal_distribution, whose algorithm is
// implementation-defined and would break replay across standard libraries.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream_id);

  double uniform();           // [0, 1)
  double gaussian();          // N(0, 1)
  Complex complex_gaussian(); // independent N(0,1) real and imaginary parts

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Density matrix with validated invariants: Hermitian and unit trace within
// 1e-10 (then exactly symmetrized/renormalized), eigenvalues >= -1e-10.
struct DensityMatrix {
  Matrix mat;
  Index dim() const { return mat.rows(); }
  double purity() const { return (mat * mat).trace().real(); }
};

// Validating constructor; throws std::invalid_argument on violated invariants.
DensityMatrix make_density(Matrix m);

// i.i.d. standard complex Gaussian entries.
Matrix ginibre(Index rows, Index cols, RandomStream& rng);

// Haar-distributed d x d unitary: QR of a Ginibre matrix with the R-diagonal
// phase correction (plain QR is not Haar; it biases second moments).
Matrix haar_unitary(Index d, RandomStream& rng);

// rho = G G^dagger / Tr(G G^dagger) with G ~ Ginibre(dA x dC): the measure
// induced by tracing a dC-dim ancilla out of a Haar-random bipartite pure
// state.  Mean purity (dA + dC)/(dA*dC + 1).
DensityMatrix hs_density(Index dA, Index dC, RandomStream& rng);

// Canonical purification sum_k sqrt(p_k) |v_k>|k> on dimension dim(rho)*dA,
// battery factor first.  Requires dA >= rank(rho) (eigenvalues > 1e-12).
DensityMatrix purify(const DensityMatrix& rho, Index dA);

// Figure protocol: a_1..a_d ~ U[0,1], the remaining d^2-1-d coefficients and
// a0 zero.
HamiltonianCoeffs random_hamiltonian_fig1(Index d, RandomStream& rng);

// Rank-1 projector onto a Haar-random unit vector.
DensityMatrix random_pure_state(Index d, RandomStream& rng);

}  // namespace qbf
