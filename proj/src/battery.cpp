#include <qbf/battery.hpp>

#include <cmath>

namespace qbf {

namespace {

void check_hamiltonian(const DensityMatrix& rho, const Matrix& h) {
  require(h.rows() == h.cols(), "battery: Hamiltonian not square");
  require(h.rows() == rho.dim(), "battery: state and Hamiltonian dimensions differ");
  if (hermiticity_defect(h) > 1e-10)
    throw std::invalid_argument("battery: Hamiltonian is not Hermitian within 1e-10");
}

}  // namespace

BatterySpec make_battery(DensityMatrix rho, HamiltonianCoeffs coeffs) {
  const Index d = rho.dim();
  require(coeffs.a.size() == d * d - 1, "make_battery: coefficient count mismatch");
  Matrix h = synthesize(coeffs, d);
  check_hamiltonian(rho, h);
  return {std::move(rho), std::move(h), std::move(coeffs)};
}

BatterySpec make_battery(DensityMatrix rho, const Matrix& hamiltonian,
                         const GellMannBasis& basis) {
  check_hamiltonian(rho, hamiltonian);
  require(basis.dim == rho.dim(), "make_battery: basis dimension mismatch");
  HamiltonianCoeffs coeffs = decompose(hamiltonian, basis);
  if (frobenius_distance(synthesize(coeffs, basis), hamiltonian) > 1e-9)
    throw std::invalid_argument("make_battery: coefficients do not round-trip to H");
  return {std::move(rho), hamiltonian, std::move(coeffs)};
}

double energy(const DensityMatrix& rho, const Matrix& h) {
  check_hamiltonian(rho, h);
  const Complex tr = (rho.mat * h).trace();
  if (std::abs(tr.imag()) > 1e-10)
    throw std::runtime_error("energy: imaginary residue beyond 1e-10");
  return tr.real();
}

Matrix reduced_after(const BatterySpec& b, const ProcessRealization& p) {
  const Index dB = b.dim();
  switch (p.cls) {
    case ProcessClass::Unitary: {
      require(p.unitary.rows() == dB && p.unitary.cols() == dB,
              "reduced_after: unitary dimension mismatch");
      return p.unitary * b.rho.mat * p.unitary.adjoint();
    }
    case ProcessClass::Cptp: {
      require(p.aux_state.has_value(), "reduced_after: Cptp realization lacks aux state");
      require(p.dA == p.aux_state->dim(), "reduced_after: aux dimension mismatch");
      require(p.unitary.rows() == dB * p.dA, "reduced_after: joint unitary dimension mismatch");
      Matrix joint = kron(b.rho.mat, p.aux_state->mat);
      Matrix evolved = p.unitary * joint * p.unitary.adjoint();
      return partial_trace(evolved, SubsystemDims{dB, p.dA}, {0});
    }
    case ProcessClass::General: {
      require(p.joint_state.has_value(), "reduced_after: General realization lacks joint state");
      require(p.joint_state->dim() == dB * p.dA, "reduced_after: joint state dimension mismatch");
      require(p.unitary.rows() == dB * p.dA, "reduced_after: joint unitary dimension mismatch");
      Matrix evolved = p.unitary * p.joint_state->mat * p.unitary.adjoint();
      return partial_trace(evolved, SubsystemDims{dB, p.dA}, {0});
    }
  }
  throw std::logic_error("reduced_after: unknown process class");
}

double extracted_energy(const BatterySpec& b, const ProcessRealization& p) {
  const Matrix after = reduced_after(b, p);
  return ((b.rho.mat - after) * b.hamiltonian).trace().real();
}

DensityMatrix passive_state(const BatterySpec& b) {
  Eigh state = hermitian_eig(b.rho.mat);       // ascending
  Eigh ham = hermitian_eig(b.hamiltonian);     // ascending
  const Index d = b.dim();
  // k-th largest population on the k-th lowest energy level.
  Matrix sigma = Matrix::Zero(d, d);
  for (Index k = 0; k < d; ++k) {
    const double population = state.values(d - 1 - k);
    sigma += population * (ham.vectors.col(k) * ham.vectors.col(k).adjoint());
  }
  return make_density(std::move(sigma));
}

double ergotropy(const BatterySpec& b) {
  return energy(b.rho, b.hamiltonian) - energy(passive_state(b), b.hamiltonian);
}

}  // namespace qbf
