#include <qbf/analytic.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qbf {

namespace {

void check_common(Index dB, double alpha1, double sum_sq) {
  require(dB >= 2, "fluctuation inputs: dB must be at least 2");
  require(sum_sq >= 0.0, "fluctuation inputs: sum_sq must be nonnegative");
  const double lo = 1.0 / static_cast<double>(dB);
  require(alpha1 >= lo - 1e-9 && alpha1 <= 1.0 + 1e-9,
          "fluctuation inputs: alpha1 must lie in [1/dB, 1]");
}

void check_inputs(const FluctuationInputs& in, bool needs_aux) {
  check_common(in.dB, in.alpha1, in.sum_sq);
  if (needs_aux) require(in.dA >= 2, "fluctuation inputs: dA must be at least 2");
}

// Gamma(n) = (n-1)! for integer n >= 1.
long double gamma_int(Index n) {
  long double f = 1.0L;
  for (Index k = 2; k < n; ++k) f *= static_cast<long double>(k);
  return f;
}

// One term of the direct double Gamma sum.  Exact long-double factorial
// arithmetic while every argument is small enough that the products stay
// integer-exact; log-Gamma with nearest-integer rounding beyond (every term
// is a positive integer).
double gamma_term(Index m, Index i, Index p) {
  const Index num_args[] = {m + p + 3, i + 1, 3, 3};
  const Index den_args[] = {m + i + 1, i - p + 1, i - p + 1, 3 - i + p, 3 - i + p, p + 1};
  Index max_arg = 3;
  for (Index a : num_args) max_arg = std::max(max_arg, a);
  for (Index a : den_args) max_arg = std::max(max_arg, a);

  if (max_arg <= 13) {
    long double num = 1.0L, den = 1.0L;
    for (Index a : num_args) num *= gamma_int(a);
    for (Index a : den_args) den *= gamma_int(a);
    return static_cast<double>(num / den);
  }
  double lg = 0.0;
  for (Index a : num_args) lg += std::lgamma(static_cast<double>(a));
  for (Index a : den_args) lg -= std::lgamma(static_cast<double>(a));
  return std::round(std::exp(lg));
}

}  // namespace

double avg_extractable_energy(const BatterySpec& b) {
  const double tr_h = b.hamiltonian.trace().real();
  return energy(b.rho, b.hamiltonian) - tr_h / static_cast<double>(b.dim());
}

double fluct_unitary(const FluctuationInputs& in) {
  check_inputs(in, false);
  const double dB = static_cast<double>(in.dB);
  return (dB * in.alpha1 - 1.0) / (dB * dB - 1.0) * in.sum_sq;
}

double alpha_cptp(Index dA, double alpha1) {
  require(dA >= 1, "alpha_cptp: dA must be positive");
  const double d = static_cast<double>(dA);
  return 2.0 * d * alpha1 / (d * d + 1.0);
}

double fluct_cptp_fixed_dA(const FluctuationInputs& in) {
  check_inputs(in, true);
  const double dB = static_cast<double>(in.dB);
  const double dA = static_cast<double>(in.dA);
  const double alpha = alpha_cptp(in.dA, in.alpha1);
  return (dB * dA * alpha - 1.0) / (dB * dB * dA * dA - 1.0) * in.sum_sq;
}

double fluct_general_fixed_dA(const FluctuationInputs& in) {
  check_inputs(in, true);
  const double dB = static_cast<double>(in.dB);
  const double dA = static_cast<double>(in.dA);
  return in.sum_sq / (dB * dA + 1.0);
}

double fluct_fixed_dA(ProcessClass cls, const FluctuationInputs& in) {
  switch (cls) {
    case ProcessClass::Unitary: return fluct_unitary(in);
    case ProcessClass::Cptp: return fluct_cptp_fixed_dA(in);
    case ProcessClass::General: return fluct_general_fixed_dA(in);
  }
  throw std::logic_error("fluct_fixed_dA: unknown process class");
}

double avg_purity_hs(Index dA, Index dC) {
  require(dA >= 1 && dC >= 1, "avg_purity_hs: dimensions must be positive");
  return static_cast<double>(dA + dC) / (static_cast<double>(dA) * static_cast<double>(dC) + 1.0);
}

double trace_J2(Index dA, Index dC, TraceJ2Method method) {
  require(dA >= 1, "trace_J2: dA must be positive");
  if (dC < dA) throw std::invalid_argument("trace_J2: requires dC >= dA");
  if (method == TraceJ2Method::Closed)
    return static_cast<double>(dA + dC) * static_cast<double>(dA) * static_cast<double>(dC);

  const Index m = dC - dA;
  double total = 0.0;
  for (Index i = 0; i < dA; ++i)
    for (Index p = std::max<Index>(Index{0}, i - 2); p <= i; ++p)
      total += gamma_term(m, i, p);
  return total;
}

bool cond_general_exceeds_unitary(Index dB, Index dA, double alpha1) {
  require(dB >= 2 && dA >= 2, "cond_general_exceeds_unitary: dimensions must be >= 2");
  const double b = static_cast<double>(dB), a = static_cast<double>(dA);
  return alpha1 < (a + b) / (1.0 + a * b);
}

bool cond_unitary_exceeds_cptp(Index dB, Index dA, double alpha1, double beta1) {
  require(dB >= 2 && dA >= 2, "cond_unitary_exceeds_cptp: dimensions must be >= 2");
  const double b = static_cast<double>(dB), a = static_cast<double>(dA);
  const double den = a * a * b * b - 1.0 - beta1 * a * (b * b - 1.0);
  if (den <= 0.0)
    throw std::domain_error("cond_unitary_exceeds_cptp: nonpositive denominator (out of regime)");
  return alpha1 > b * (a * a - 1.0) / den;
}

bool cond_unitary_exceeds_cptp(Index dB, Index dA, double alpha1) {
  return cond_unitary_exceeds_cptp(dB, dA, alpha1, avg_purity_hs(dA, dA));
}

FluctOrdering classify_ordering_values(double u, double c, double g) {
  if (u == c || c == g || u == g) return FluctOrdering::Degenerate;
  if (g > u && u > c) return FluctOrdering::GeneralUnitaryCptp;
  if (g > c && c > u) return FluctOrdering::GeneralCptpUnitary;
  if (u > g && g > c) return FluctOrdering::UnitaryGeneralCptp;
  // The general fluctuation dominates the cptp one for every input, so the
  // remaining permutations cannot occur.
  throw std::logic_error("classify_ordering_values: cptp exceeded general");
}

FluctOrdering classify_ordering(Index dB, Index dA, double alpha1) {
  const FluctuationInputs in{dB, dA, alpha1, 1.0};
  return classify_ordering_values(fluct_unitary(in), fluct_cptp_fixed_dA(in),
                                  fluct_general_fixed_dA(in));
}

double large_dB_gap_u_minus_cptp(Index dB, Index dA, double alpha1) {
  require(dB >= 2 && dA >= 1, "large_dB_gap_u_minus_cptp: bad dimensions");
  const double b = static_cast<double>(dB), a = static_cast<double>(dA);
  return (a * alpha1 - alpha_cptp(dA, alpha1)) / (b * a);
}

double large_dB_gap_g_minus_u(Index dB, Index dA, double alpha1) {
  require(dB >= 2 && dA >= 1, "large_dB_gap_g_minus_u: bad dimensions");
  const double b = static_cast<double>(dB), a = static_cast<double>(dA);
  return ((a + b) / (1.0 + a * b) - alpha1) / b;
}

double harmonic_number(Index m) {
  require(m >= 0, "harmonic_number: negative argument");
  double h = 0.0;
  for (Index j = m; j >= 1; --j) h += 1.0 / static_cast<double>(j);  // small terms first
  return h;
}

FiniteNAverage finite_n_avg(ProcessClass process, Index n, Index dB,
                            double alpha1, double sum_sq) {
  require(n >= 1, "finite_n_avg: n must be at least 1");
  check_common(dB, alpha1, sum_sq);

  FiniteNAverage out;
  out.n = n;
  const double nn = static_cast<double>(n);
  const double b = static_cast<double>(dB);

  switch (process) {
    case ProcessClass::General: {
      double s = 0.0;
      for (Index dA = n + 1; dA >= 2; --dA)
        s += 1.0 / (b * static_cast<double>(dA) + 1.0);
      out.value = sum_sq * s / nn;
      out.lower_bound = sum_sq / (nn * b) * (harmonic_number(n + 2) - 1.5);
      out.upper_bound = sum_sq / (nn * b) * (harmonic_number(n + 1) - 1.0);
      return out;
    }
    case ProcessClass::Cptp: {
      double s = 0.0;
      for (Index dA = n + 1; dA >= 2; --dA)
        s += fluct_cptp_fixed_dA({dB, dA, alpha1, 1.0});
      out.value = sum_sq * s / nn;
      // Partial fractions: each fixed-dA term equals p/(dA^2 - 1/dB^2)
      // + r/(dA^2 + 1) with p < 0 < r; both kernels telescope strictly
      // between L = 1/2 - 1/(n+2) and U = 1 - 1/(n+1), and the negative
      // coefficient swaps which envelope bounds which side.
      const double q = b * b / (b * b + 1.0);
      const double p = (2.0 * alpha1 * q - b) / (b * b * b);
      const double r = 2.0 * alpha1 * q / b;
      const double env_lo = 0.5 - 1.0 / (nn + 2.0);
      const double env_hi = 1.0 - 1.0 / (nn + 1.0);
      out.lower_bound = sum_sq / nn * (p * env_hi + r * env_lo);
      out.upper_bound = sum_sq / nn * (p * env_lo + r * env_hi);
      return out;
    }
    case ProcessClass::Unitary:
      break;
  }
  throw std::invalid_argument("finite_n_avg: only Cptp and General truncate over auxiliaries");
}

std::pair<double, double> finite_n_general_log_bounds(Index n, Index dB,
                                                      double sum_sq) {
  require(n >= 1 && dB >= 2, "finite_n_general_log_bounds: bad arguments");
  const double nn = static_cast<double>(n);
  const double scale = sum_sq / (nn * static_cast<double>(dB));
  const double g = std::numbers::egamma;
  return {scale * (std::log(nn + 2.0) + g - 1.5),
          scale * (std::log(nn + 1.0) + g - 1.0)};
}

ScalingPrediction scaling_exponent_prediction(ProcessClass process, ScanAxis axis) {
  switch (axis) {
    case ScanAxis::BatteryDim:
      return {-1.0, false};
    case ScanAxis::AuxDim:
      switch (process) {
        case ProcessClass::Unitary: return {0.0, false};
        case ProcessClass::Cptp: return {-2.0, false};
        case ProcessClass::General: return {-1.0, false};
      }
      break;
    case ScanAxis::MaxAuxDim:
      switch (process) {
        case ProcessClass::Unitary: return {0.0, false};
        case ProcessClass::Cptp: return {-1.0, false};
        case ProcessClass::General: return {-1.0, true};
      }
      break;
  }
  throw std::logic_error("scaling_exponent_prediction: unknown process/axis");
}

}  // namespace qbf
