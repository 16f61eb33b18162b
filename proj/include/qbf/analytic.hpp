#pragma once
// Closed forms: average extractable energy, fixed-auxiliary-dimension
// fluctuations per process class, Hilbert-Schmidt purity machinery, truncated
// averages over auxiliary dimensions with exact bounds, regime conditions,
// and asymptotic scaling predictions.

#include <qbf/battery.hpp>

#include <utility>

namespace qbf {

// Inputs every fixed-dA fluctuation formula consumes.
struct FluctuationInputs {
  Index dB = 2;         // battery dimension
  Index dA = 0;         // auxiliary dimension; 0 when not applicable
  double alpha1 = 1.0;  // battery purity Tr(rho_B^2), in [1/dB, 1]
  double sum_sq = 1.0;  // sum_i a_i^2 of the Hamiltonian coefficients
};

// Truncated fluctuation average over auxiliary dimensions 2..n+1, with exact
// (telescoping / harmonic-sum) bounds that bracket the value strictly.
struct FiniteNAverage {
  Index n = 1;
  double value = 0.0;
  double lower_bound = 0.0;
  double upper_bound = 0.0;
};

// Tr(rho_B H_B) - Tr(H_B)/d_B; the same for all three process classes.
double avg_extractable_energy(const BatterySpec& b);

// (d_B*alpha1 - 1)/(d_B^2 - 1) * sum_sq.  Zero iff maximally mixed or trivial H.
double fluct_unitary(const FluctuationInputs& in);

// (d_B*d_A*alpha - 1)/(d_B^2*d_A^2 - 1) * sum_sq with alpha = alpha_cptp(dA, alpha1).
double fluct_cptp_fixed_dA(const FluctuationInputs& in);

// sum_sq/(d_B*d_A + 1); independent of alpha1.
double fluct_general_fixed_dA(const FluctuationInputs& in);

// Dispatch on the process class (Unitary ignores dA).
double fluct_fixed_dA(ProcessClass cls, const FluctuationInputs& in);

// Mean purity of the Hilbert-Schmidt ensemble: (dA + dC)/(dA*dC + 1).
double avg_purity_hs(Index dA, Index dC);

// Effective joint purity 2*dA*alpha1/(dA^2 + 1) = alpha1 * avg_purity_hs(dA, dA).
double alpha_cptp(Index dA, double alpha1);

// Second-moment normalization integral of the Hilbert-Schmidt ensemble:
// closed form (dA + dC)*dA*dC, or the direct double Gamma sum over index
// pairs (i, p) with i - p in {0, 1, 2}.  Both are exact; requires dC >= dA.
enum class TraceJ2Method { Direct, Closed };
double trace_J2(Index dA, Index dC, TraceJ2Method method = TraceJ2Method::Closed);

// alpha1 < (dA + dB)/(1 + dA*dB)  <=>  general fluctuation exceeds unitary.
bool cond_general_exceeds_unitary(Index dB, Index dA, double alpha1);

// alpha1 > dB(dA^2-1)/(dA^2 dB^2 - 1 - beta1 dA (dB^2-1))  <=>  unitary
// exceeds cptp.  Throws std::domain_error when the denominator is not
// positive (out of regime).  beta1 defaults to avg_purity_hs(dA, dA).
bool cond_unitary_exceeds_cptp(Index dB, Index dA, double alpha1, double beta1);
bool cond_unitary_exceeds_cptp(Index dB, Index dA, double alpha1);

// Strict ordering of the three fixed-dA fluctuations; exact float ties get
// the dedicated Degenerate outcome instead of an arbitrary ordering.
enum class FluctOrdering {
  GeneralUnitaryCptp,
  GeneralCptpUnitary,
  UnitaryGeneralCptp,
  Degenerate,
};

constexpr const char* to_string(FluctOrdering o) {
  switch (o) {
    case FluctOrdering::GeneralUnitaryCptp: return "G>U>CPTP";
    case FluctOrdering::GeneralCptpUnitary: return "G>CPTP>U";
    case FluctOrdering::UnitaryGeneralCptp: return "U>G>CPTP";
    case FluctOrdering::Degenerate: return "degenerate";
  }
  return "?";
}

FluctOrdering classify_ordering(Index dB, Index dA, double alpha1);
// Ordering of explicit per-unit-sum_sq values (u, c, g); used by the above.
FluctOrdering classify_ordering_values(double u, double c, double g);

// Large-dB approximations of the pairwise gaps, per unit sum_sq.
double large_dB_gap_u_minus_cptp(Index dB, Index dA, double alpha1);
double large_dB_gap_g_minus_u(Index dB, Index dA, double alpha1);

// Average fluctuation over auxiliary dimensions 2..n+1 (Cptp or General) with
// exact strict bounds.  General bounds are harmonic partial sums; Cptp bounds
// come from telescoping envelopes of the two partial-fraction kernels.
FiniteNAverage finite_n_avg(ProcessClass process, Index n, Index dB,
                            double alpha1, double sum_sq);

// Exact partial harmonic sum H_m = sum_{j=1}^m 1/j.
double harmonic_number(Index m);

// ln-approximated General bounds {lower, upper} (H_m ~ ln m + gamma); an
// annotation only — the exact bounds live in FiniteNAverage.
std::pair<double, double> finite_n_general_log_bounds(Index n, Index dB,
                                                      double sum_sq);

// Scan axes used for scaling predictions and parameter sweeps.
enum class ScanAxis { AuxDim, BatteryDim, MaxAuxDim };

constexpr const char* to_string(ScanAxis a) {
  switch (a) {
    case ScanAxis::AuxDim: return "dA";
    case ScanAxis::BatteryDim: return "dB";
    case ScanAxis::MaxAuxDim: return "n";
  }
  return "?";
}

// Predicted log-log slope of the fluctuation along an axis, everything else
// held fixed; log_correction marks a ln(x)/x-type decay (slope -1 plus drift).
struct ScalingPrediction {
  double exponent = 0.0;
  bool log_correction = false;
};

ScalingPrediction scaling_exponent_prediction(ProcessClass process, ScanAxis axis);

}  // namespace qbf
