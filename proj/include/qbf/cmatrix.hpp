#pragma once
// Dense complex-matrix kernel on top of Eigen: checked products, Kronecker
// products, partial traces, swap operators and Hermitian eigendecomposition.
//
// Subsystem convention used throughout: the first tensor factor is the
// slowest index ("battery first, auxiliary second"), so a composite index
// into H_B (x) H_A reads  row = b*dA + a.

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <vector>

namespace qbf {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Index = Eigen::Index;

inline void require(bool cond, const char* what) {
  if (!cond) throw std::invalid_argument(what);
}

// Ordered local dimensions of the tensor factors of a composite space.
struct SubsystemDims {
  std::vector<Index> dims;

  SubsystemDims(std::initializer_list<Index> d) : dims(d) { check(); }
  explicit SubsystemDims(std::vector<Index> d) : dims(std::move(d)) { check(); }

  Index total() const {
    Index t = 1;
    for (Index d : dims) t *= d;
    return t;
  }
  std::size_t count() const { return dims.size(); }

 private:
  void check() const {
    require(!dims.empty(), "SubsystemDims: need at least one factor");
    for (Index d : dims) require(d >= 1, "SubsystemDims: dimensions must be positive");
  }
};

// Checked matrix product.  Eigen's operator* only asserts in debug builds;
// sampling code wants a hard error on shape bugs in release builds too.
template <typename A, typename B>
auto matmul(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  require(a.cols() == b.rows(), "matmul: inner dimensions differ");
  return (a * b).eval();
}

template <typename A>
auto adjoint(const Eigen::MatrixBase<A>& a) {
  return a.adjoint().eval();
}

// Kronecker product with the first factor as the slow index.
template <typename A, typename B>
auto kron(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  using Result = Eigen::Matrix<typename A::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Result out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i < a.rows(); ++i)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b.derived();
  return out;
}

// Max |m - m^dagger| entry; 0 for exactly Hermitian matrices.
template <typename A>
double hermiticity_defect(const Eigen::MatrixBase<A>& m) {
  require(m.rows() == m.cols(), "hermiticity_defect: matrix not square");
  return (m.derived() - m.derived().adjoint()).cwiseAbs().maxCoeff();
}

// Trace out every subsystem not listed in `keep`; kept factors preserve
// their relative order.  keep indexes into dims (0-based).
template <typename A>
auto partial_trace(const Eigen::MatrixBase<A>& m, const SubsystemDims& dims,
                   const std::vector<int>& keep) {
  using Result = Eigen::Matrix<typename A::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const std::size_t k = dims.count();
  require(m.rows() == m.cols(), "partial_trace: matrix not square");
  require(dims.total() == m.rows(), "partial_trace: dims do not match matrix");
  require(!keep.empty(), "partial_trace: keep set is empty");

  std::vector<bool> kept(k, false);
  for (int s : keep) {
    require(s >= 0 && static_cast<std::size_t>(s) < k, "partial_trace: keep index out of range");
    require(!kept[s], "partial_trace: duplicate keep index");
    kept[s] = true;
  }

  // Strides of each subsystem in the composite index (first factor slowest).
  std::vector<Index> stride(k, 1);
  for (std::size_t s = k - 1; s-- > 0;) stride[s] = stride[s + 1] * dims.dims[s + 1];

  std::vector<std::size_t> kept_idx, traced_idx;
  for (std::size_t s = 0; s < k; ++s) (kept[s] ? kept_idx : traced_idx).push_back(s);

  Index dk = 1, dt = 1;
  for (auto s : kept_idx) dk *= dims.dims[s];
  for (auto s : traced_idx) dt *= dims.dims[s];

  // Composite offset of a flat multi-index over the given subsystems.
  auto offset = [&](const std::vector<std::size_t>& subs, Index flat) {
    Index off = 0;
    for (std::size_t s = subs.size(); s-- > 0;) {
      const Index d = dims.dims[subs[s]];
      off += (flat % d) * stride[subs[s]];
      flat /= d;
    }
    return off;
  };

  Result out = Result::Zero(dk, dk);
  for (Index r = 0; r < dk; ++r)
    for (Index c = 0; c < dk; ++c) {
      const Index ro = offset(kept_idx, r), co = offset(kept_idx, c);
      typename A::Scalar sum{};
      for (Index t = 0; t < dt; ++t) {
        const Index to = offset(traced_idx, t);
        sum += m(ro + to, co + to);
      }
      out(r, c) = sum;
    }
  return out;
}

// S = sum_{a,b} |b,a><a,b| : H^{d1} (x) H^{d2} -> H^{d2} (x) H^{d1}.
// For d1 == d2 this is the usual SWAP with S^2 = I exactly.
inline Matrix swap_operator(Index d1, Index d2) {
  require(d1 >= 1 && d2 >= 1, "swap_operator: dimensions must be positive");
  Matrix s = Matrix::Zero(d1 * d2, d1 * d2);
  for (Index a = 0; a < d1; ++a)
    for (Index b = 0; b < d2; ++b) s(b * d1 + a, a * d2 + b) = 1.0;
  return s;
}

struct Eigh {
  Eigen::VectorXd values;  // ascending
  Matrix vectors;          // columns are the matching eigenvectors
};

// Eigendecomposition of a Hermitian matrix (entrywise tolerance 1e-10);
// the input is symmetrized before the solve to strip floating drift.
inline Eigh hermitian_eig(const Matrix& m) {
  require(m.rows() == m.cols(), "hermitian_eig: matrix not square");
  if (hermiticity_defect(m) > 1e-10)
    throw std::invalid_argument("hermitian_eig: matrix is not Hermitian within 1e-10");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(((m + m.adjoint()) / 2.0).eval());
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("hermitian_eig: eigensolver failed to converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

template <typename A, typename B>
double frobenius_distance(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "frobenius_distance: shape mismatch");
  return (a.derived() - b.derived()).norm();
}

}  // namespace qbf
