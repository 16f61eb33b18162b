#pragma once
// Generalized Gell-Mann basis, normalized so Tr(lambda_i lambda_j) = d*delta_ij,
// and Hamiltonian decomposition H = a0*I + sum_i a_i*lambda_i.
//
// Element ordering (fixed so coefficient vectors are reproducible): symmetric
// pair generators in row-major pair order (0,1),(0,2),...,(d-2,d-1), then the
// antisymmetric pairs in the same order, then the d-1 diagonal generators.

#include <qbf/cmatrix.hpp>

#include <Eigen/Dense>

namespace qbf {

struct GellMannBasis {
  Index dim = 0;
  std::vector<Matrix> elements;  // d^2 - 1 generators
};

struct HamiltonianCoeffs {
  double a0 = 0.0;           // identity component, Tr(H)/d
  Eigen::VectorXd a;         // d^2 - 1 traceless components
};

// The i-th generator (0-based) for dimension d, built on demand.
Matrix gellmann_element(Index d, Index i);

GellMannBasis build_basis(Index d);

HamiltonianCoeffs decompose(const Matrix& h, const GellMannBasis& basis);

Matrix synthesize(const HamiltonianCoeffs& c, const GellMannBasis& basis);

// Synthesis without a prebuilt basis; generates elements on demand and skips
// zero coefficients, so sparse coefficient vectors stay cheap at large d.
Matrix synthesize(const HamiltonianCoeffs& c, Index d);

// beta = sum_{i>=1} a_i^2, the coefficient weight all fluctuation formulas use.
double sum_sq(const HamiltonianCoeffs& c);

}  // namespace qbf
