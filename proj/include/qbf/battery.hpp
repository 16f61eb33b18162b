#pragma once
// The battery model: energies, extracted energy under a concrete process
// realization, passive states and ergotropy.

#include <qbf/cmatrix.hpp>
#include <qbf/ensembles.hpp>
#include <qbf/gellmann.hpp>

#include <optional>

namespace qbf {

enum class ProcessClass { Unitary, Cptp, General };

constexpr const char* to_string(ProcessClass c) {
  switch (c) {
    case ProcessClass::Unitary: return "unitary";
    case ProcessClass::Cptp: return "cptp";
    case ProcessClass::General: return "general";
  }
  return "?";
}

// Battery = initial state rho_B plus Hamiltonian H_B; the coefficient form is
// authoritative (all closed forms consume sum a_i^2) and the matrix is cached.
struct BatterySpec {
  DensityMatrix rho;
  Matrix hamiltonian;
  HamiltonianCoeffs coeffs;

  Index dim() const { return rho.dim(); }
  double alpha1() const { return rho.purity(); }
  double sum_sq() const { return coeffs.a.squaredNorm(); }
};

// Build from state + coefficients (synthesizes H_B on demand; the cheap path
// for sparse coefficient vectors at large d).
BatterySpec make_battery(DensityMatrix rho, HamiltonianCoeffs coeffs);

// Build from state + Hamiltonian matrix (decomposes against the basis).
BatterySpec make_battery(DensityMatrix rho, const Matrix& hamiltonian,
                         const GellMannBasis& basis);

// One sampled realization of an extraction process.
struct ProcessRealization {
  ProcessClass cls = ProcessClass::Unitary;
  Index dA = 0;                           // 0 for Unitary
  Matrix unitary;                         // U_B (d_B) or U_BA (d_B*d_A)
  std::optional<DensityMatrix> aux_state;   // rho_A, Cptp only
  std::optional<DensityMatrix> joint_state; // rho_BA, General only
};

// Re Tr(rho H); imaginary residue beyond 1e-10 is rejected.
double energy(const DensityMatrix& rho, const Matrix& h);

// The evolved battery marginal rho'_B for a realization: U rho U^dagger for
// Unitary, Tr_A(U rho_BA U^dagger) for dilated classes.
Matrix reduced_after(const BatterySpec& b, const ProcessRealization& p);

// Extracted energy for one realization: Tr(rho_B H_B) - Tr(rho'_B H_B).
// May be negative (charging); the ensemble statistics need the signed value.
double extracted_energy(const BatterySpec& b, const ProcessRealization& p);

// Eigenvalues of rho_B descending paired with eigenvalues of H_B ascending,
// assembled in H_B's eigenbasis; no unitary extracts energy from it.
DensityMatrix passive_state(const BatterySpec& b);

// Maximum unitarily extractable energy: energy(rho_B) - energy(passive).
double ergotropy(const BatterySpec& b);

}  // namespace qbf
