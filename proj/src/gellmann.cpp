#include <qbf/gellmann.hpp>

#include <cmath>

namespace qbf {

namespace {

// Textbook generators satisfy Tr(lambda_i lambda_j) = 2*delta_ij; we use the
// convention Tr = d*delta_ij, which is that times d/2, so every element is
// scaled by sqrt(d/2).  For d = 2 the scale is 1 and the elements are the Paulis.
double basis_scale(Index d) { return std::sqrt(static_cast<double>(d) / 2.0); }

}  // namespace

Matrix gellmann_element(Index d, Index i) {
  require(d >= 2, "gellmann_element: dimension must be at least 2");
  require(i >= 0 && i < d * d - 1, "gellmann_element: element index out of range");

  const Index pairs = d * (d - 1) / 2;
  Matrix m = Matrix::Zero(d, d);

  if (i < 2 * pairs) {
    // Pair generators: flat pair index in row-major order over j < k.
    Index flat = i % pairs;
    Index j = 0;
    Index row_len = d - 1;
    while (flat >= row_len) {
      flat -= row_len;
      --row_len;
      ++j;
    }
    const Index k = j + 1 + flat;
    if (i < pairs) {  // symmetric: |j><k| + |k><j|
      m(j, k) = 1.0;
      m(k, j) = 1.0;
    } else {  // antisymmetric: -i(|j><k| - |k><j|)
      m(j, k) = Complex{0.0, -1.0};
      m(k, j) = Complex{0.0, 1.0};
    }
  } else {
    // Diagonal generator l (1-based): sqrt(2/(l(l+1))) (sum_{j<=l} |j><j| - l|l><l|),
    // indices 0-based so entry l is -l.
    const Index l = i - 2 * pairs + 1;
    const double norm = std::sqrt(2.0 / static_cast<double>(l * (l + 1)));
    for (Index j = 0; j < l; ++j) m(j, j) = norm;
    m(l, l) = -norm * static_cast<double>(l);
  }
  return basis_scale(d) * m;
}

GellMannBasis build_basis(Index d) {
  require(d >= 2, "build_basis: dimension must be at least 2");
  GellMannBasis basis;
  basis.dim = d;
  basis.elements.reserve(d * d - 1);
  for (Index i = 0; i < d * d - 1; ++i) basis.elements.push_back(gellmann_element(d, i));
  return basis;
}

HamiltonianCoeffs decompose(const Matrix& h, const GellMannBasis& basis) {
  const Index d = basis.dim;
  require(h.rows() == d && h.cols() == d, "decompose: dimension mismatch with basis");
  if (hermiticity_defect(h) > 1e-10)
    throw std::invalid_argument("decompose: matrix is not Hermitian within 1e-10");

  HamiltonianCoeffs c;
  c.a0 = h.trace().real() / static_cast<double>(d);
  c.a.resize(d * d - 1);
  // Orthogonality Tr(lambda_i lambda_j) = d*delta_ij gives a_i = Tr(H lambda_i)/d.
  for (Index i = 0; i < d * d - 1; ++i)
    c.a(i) = (h * basis.elements[i]).trace().real() / static_cast<double>(d);
  return c;
}

Matrix synthesize(const HamiltonianCoeffs& c, const GellMannBasis& basis) {
  require(c.a.size() == basis.dim * basis.dim - 1, "synthesize: coefficient count mismatch");
  Matrix h = c.a0 * Matrix::Identity(basis.dim, basis.dim);
  for (Index i = 0; i < c.a.size(); ++i)
    if (c.a(i) != 0.0) h += c.a(i) * basis.elements[i];
  return h;
}

Matrix synthesize(const HamiltonianCoeffs& c, Index d) {
  require(c.a.size() == d * d - 1, "synthesize: coefficient count mismatch");
  Matrix h = c.a0 * Matrix::Identity(d, d);
  for (Index i = 0; i < c.a.size(); ++i)
    if (c.a(i) != 0.0) h += c.a(i) * gellmann_element(d, i);
  return h;
}

double sum_sq(const HamiltonianCoeffs& c) { return c.a.squaredNorm(); }

}  // namespace qbf
