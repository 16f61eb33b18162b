#include <qbf/ensembles.hpp>

#include <cmath>
#include <numbers>

namespace qbf {

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
  // seed_seq expansion is fully specified by the standard, so the engine
  // state (and with it every draw) replays bit-identically everywhere.
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream_id),
                    static_cast<std::uint32_t>(stream_id >> 32)};
  engine_.seed(seq);
}

double RandomStream::uniform() {
  // Top 53 bits of the engine word give a dyadic rational in [0, 1).
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomStream::gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double r = std::sqrt(-2.0 * std::log(1.0 - uniform()));
  const double t = 2.0 * std::numbers::pi * uniform();
  spare_ = r * std::sin(t);
  has_spare_ = true;
  return r * std::cos(t);
}

Complex RandomStream::complex_gaussian() {
  // One Box-Muller pair per complex draw, independent of gaussian()'s cache.
  const double r = std::sqrt(-2.0 * std::log(1.0 - uniform()));
  const double t = 2.0 * std::numbers::pi * uniform();
  return {r * std::cos(t), r * std::sin(t)};
}

DensityMatrix make_density(Matrix m) {
  require(m.rows() == m.cols(), "make_density: matrix not square");
  if (hermiticity_defect(m) > 1e-10)
    throw std::invalid_argument("make_density: matrix is not Hermitian within 1e-10");
  m = ((m + m.adjoint()) / 2.0).eval();

  const double tr = m.trace().real();
  if (std::abs(tr - 1.0) > 1e-10)
    throw std::invalid_argument("make_density: trace differs from 1 by more than 1e-10");
  m /= tr;

  Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -1e-10)
    throw std::invalid_argument("make_density: negative eigenvalue beyond -1e-10");
  return {std::move(m)};
}

Matrix ginibre(Index rows, Index cols, RandomStream& rng) {
  require(rows >= 1 && cols >= 1, "ginibre: dimensions must be positive");
  Matrix g(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) g(i, j) = rng.complex_gaussian();
  return g;
}

Matrix haar_unitary(Index d, RandomStream& rng) {
  require(d >= 1, "haar_unitary: dimension must be positive");
  Matrix g = ginibre(d, d, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix u = qr.householderQ();
  // Fix the R-diagonal phases: without this the decomposition is not unique
  // and the resulting Q is not Haar-distributed.
  for (Index j = 0; j < d; ++j) {
    const Complex r = qr.matrixQR()(j, j);
    const double mag = std::abs(r);
    u.col(j) *= mag > 0.0 ? r / mag : Complex{1.0, 0.0};
  }
  return u;
}

DensityMatrix hs_density(Index dA, Index dC, RandomStream& rng) {
  require(dA >= 1 && dC >= 1, "hs_density: dimensions must be positive");
  Matrix g = ginibre(dA, dC, rng);
  Matrix m = g * g.adjoint();
  m /= m.trace().real();
  return make_density(std::move(m));
}

DensityMatrix purify(const DensityMatrix& rho, Index dA) {
  require(dA >= 1, "purify: ancilla dimension must be positive");
  const Index d = rho.dim();
  Eigh eig = hermitian_eig(rho.mat);

  // Occupied levels in descending weight order; ancilla level k pairs with
  // the k-th largest eigenvalue.
  std::vector<Index> occupied;
  for (Index i = d - 1; i >= 0; --i)
    if (eig.values(i) > 1e-12) occupied.push_back(i);
  if (static_cast<Index>(occupied.size()) > dA)
    throw std::invalid_argument("purify: ancilla dimension is below rank(rho)");

  Vector psi = Vector::Zero(d * dA);
  for (std::size_t k = 0; k < occupied.size(); ++k) {
    const double w = std::sqrt(eig.values(occupied[k]));
    for (Index i = 0; i < d; ++i)
      psi(i * dA + static_cast<Index>(k)) = w * eig.vectors(i, occupied[k]);
  }
  psi.normalize();  // strip rounding from discarded sub-threshold weight
  return make_density(psi * psi.adjoint());
}

HamiltonianCoeffs random_hamiltonian_fig1(Index d, RandomStream& rng) {
  require(d >= 2, "random_hamiltonian_fig1: dimension must be at least 2");
  HamiltonianCoeffs c;
  c.a0 = 0.0;
  c.a = Eigen::VectorXd::Zero(d * d - 1);
  for (Index i = 0; i < d; ++i) c.a(i) = rng.uniform();
  return c;
}

DensityMatrix random_pure_state(Index d, RandomStream& rng) {
  require(d >= 1, "random_pure_state: dimension must be positive");
  Vector v(d);
  for (Index i = 0; i < d; ++i) v(i) = rng.complex_gaussian();
  v.normalize();
  return make_density(v * v.adjoint());
}

}  // namespace qbf
