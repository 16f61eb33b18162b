#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <qbf/analytic.hpp>
#include <qbf/ensembles.hpp>

#include <cmath>

using namespace qbf;

namespace {

DensityMatrix diag_state(std::initializer_list<double> pops) {
  const Index d = static_cast<Index>(pops.size());
  Matrix m = Matrix::Zero(d, d);
  Index i = 0;
  for (double p : pops) m(i, i) = p, ++i;
  return make_density(std::move(m));
}

}  // namespace

TEST_CASE("average extractable energy is Tr(rho H) minus Tr(H)/d") {
  // Ground state of sigma_z (energy -1): Tr(rho H) = -1, Tr(H)/2 = 0.
  HamiltonianCoeffs c;
  c.a0 = 0.0;
  c.a = Eigen::VectorXd::Zero(3);
  c.a(2) = 1.0;
  BatterySpec ground = make_battery(diag_state({0.0, 1.0}), c);
  CHECK(avg_extractable_energy(ground) == doctest::Approx(-1.0).epsilon(1e-14));

  // Maximally mixed battery: zero for any Hamiltonian.
  RandomStream rng(31, 0);
  GellMannBasis basis = build_basis(3);
  Matrix h = Matrix::Zero(3, 3);
  for (Index i = 0; i < 3; ++i) h(i, i) = rng.uniform();
  BatterySpec mixed =
      make_battery(diag_state({1.0 / 3, 1.0 / 3, 1.0 / 3}), h, basis);
  CHECK(std::abs(avg_extractable_energy(mixed)) < 1e-14);

  // Trivial Hamiltonian c*I: zero for any state.
  HamiltonianCoeffs trivial;
  trivial.a0 = 2.7;
  trivial.a = Eigen::VectorXd::Zero(3);
  BatterySpec flat = make_battery(diag_state({0.9, 0.1}), trivial);
  CHECK(std::abs(avg_extractable_energy(flat)) < 1e-14);
}

TEST_CASE("unitary fluctuation closed form") {
  CHECK(fluct_unitary({2, 0, 1.0, 1.0}) == doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(fluct_unitary({3, 0, 0.5, 2.0}) == doctest::Approx(0.125).epsilon(1e-15));

  // Maximally mixed battery: exactly zero when 1/dB is exact in binary.
  CHECK(fluct_unitary({2, 0, 0.5, 1.0}) == 0.0);
  CHECK(fluct_unitary({4, 0, 0.25, 3.0}) == 0.0);
  CHECK(std::abs(fluct_unitary({3, 0, 1.0 / 3, 1.0})) < 1e-16);

  CHECK(fluct_unitary({2, 0, 1.0, 0.0}) == 0.0);
  CHECK_THROWS_AS(fluct_unitary({1, 0, 1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(fluct_unitary({2, 0, 0.3, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(fluct_unitary({2, 0, 1.2, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(fluct_unitary({2, 0, 1.0, -1.0}), std::invalid_argument);
}

TEST_CASE("alpha_cptp and the average HS purity") {
  CHECK(alpha_cptp(2, 1.0) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(alpha_cptp(1, 0.37) == doctest::Approx(0.37).epsilon(1e-15));
  CHECK(std::abs(alpha_cptp(1000, 1.0) - 2e-3) / 2e-3 < 0.01);

  CHECK(avg_purity_hs(2, 2) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(avg_purity_hs(1, 7) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(avg_purity_hs(2, 4) == doctest::Approx(2.0 / 3).epsilon(1e-15));
  CHECK(avg_purity_hs(3, 5) == avg_purity_hs(5, 3));

  // alpha = alpha1 * mean purity; never exceeds alpha1 (equality iff dA = 1).
  for (Index dA : {1, 2, 3, 10, 100}) {
    const double a = alpha_cptp(dA, 0.7);
    CHECK(a == doctest::Approx(0.7 * avg_purity_hs(dA, dA)).epsilon(1e-14));
    if (dA == 1)
      CHECK(a == doctest::Approx(0.7).epsilon(1e-15));
    else
      CHECK(a < 0.7);
  }
}

TEST_CASE("trace_J2 closed form and direct Gamma sum agree exactly") {
  CHECK(trace_J2(2, 2, TraceJ2Method::Closed) == 16.0);
  CHECK(trace_J2(2, 2, TraceJ2Method::Direct) == 16.0);
  CHECK(trace_J2(3, 3, TraceJ2Method::Closed) == 54.0);
  CHECK(trace_J2(3, 3, TraceJ2Method::Direct) == 54.0);

  for (Index dA = 1; dA <= 8; ++dA)
    for (Index dC = dA; dC <= 8; ++dC)
      CHECK(trace_J2(dA, dC, TraceJ2Method::Direct) ==
            trace_J2(dA, dC, TraceJ2Method::Closed));

  // Larger arguments exercise the log-Gamma path; terms are still integers.
  CHECK(trace_J2(12, 15, TraceJ2Method::Direct) == 27.0 * 12 * 15);
  CHECK(trace_J2(30, 40, TraceJ2Method::Direct) == 70.0 * 30 * 40);

  CHECK_THROWS_AS(trace_J2(3, 2, TraceJ2Method::Closed), std::invalid_argument);

  // Mean purity follows from the normalization: Tr J(2)/(dAdC (dAdC + 1)).
  for (Index d = 2; d <= 6; ++d) {
    const double dd = static_cast<double>(d * d);
    CHECK(trace_J2(d, d) / (dd * (dd + 1.0)) ==
          doctest::Approx(avg_purity_hs(d, d)).epsilon(1e-14));
  }
}

TEST_CASE("cptp fluctuation closed form and asymptotics") {
  CHECK(fluct_cptp_fixed_dA({2, 2, 1.0, 1.0}) ==
        doctest::Approx(11.0 / 75).epsilon(1e-15));
  // Maximally mixed battery goes through the same formula, no special case.
  CHECK(fluct_cptp_fixed_dA({2, 2, 0.5, 1.0}) == doctest::Approx(0.04).epsilon(1e-14));

  // Large dA at small dB: the two-term expansion 2*alpha1/(dA^2 dB)
  // - 1/(dA^2 dB^2) is accurate to 0.1%; the leading term alone is 25% off.
  const double v = fluct_cptp_fixed_dA({2, 1000, 1.0, 1.0});
  const double two_term = 2.0 / (1e6 * 2.0) - 1.0 / (1e6 * 4.0);
  CHECK(std::abs(v - two_term) / two_term < 1e-3);

  // At large dB the leading term dominates to within 1%.
  const double v2 = fluct_cptp_fixed_dA({200, 1000, 1.0, 1.0});
  CHECK(std::abs(v2 - 2.0 / (1e6 * 200.0)) / (2.0 / (1e6 * 200.0)) < 0.01);

  CHECK_THROWS_AS(fluct_cptp_fixed_dA({2, 1, 1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("general fluctuation closed form") {
  CHECK(fluct_general_fixed_dA({2, 2, 1.0, 1.0}) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(fluct_general_fixed_dA({2, 1000, 1.0, 1.0}) ==
        doctest::Approx(1.0 / 2001).epsilon(1e-15));
  CHECK(fluct_general_fixed_dA({2, 2, 1.0, 0.0}) == 0.0);
  // Independent of the battery purity.
  CHECK(fluct_general_fixed_dA({2, 2, 0.5, 1.0}) ==
        fluct_general_fixed_dA({2, 2, 1.0, 1.0}));
}

TEST_CASE("cptp never exceeds general on a dense random grid") {
  RandomStream rng(32, 0);
  for (Index dB = 2; dB <= 16; ++dB)
    for (Index dA = 2; dA <= 16; ++dA)
      for (int k = 0; k < 100; ++k) {
        const double lo = 1.0 / static_cast<double>(dB);
        const double alpha1 = lo + (1.0 - lo) * rng.uniform();
        FluctuationInputs in{dB, dA, alpha1, 1.0};
        CHECK(fluct_cptp_fixed_dA(in) <= fluct_general_fixed_dA(in) + 1e-15);
      }
}

TEST_CASE("regime conditions match the closed-form comparisons") {
  CHECK_FALSE(cond_general_exceeds_unitary(2, 2, 1.0));
  CHECK(cond_general_exceeds_unitary(2, 2, 0.55));
  CHECK_FALSE(cond_general_exceeds_unitary(2, 2, 0.8));  // boundary is strict

  CHECK(cond_unitary_exceeds_cptp(2, 2, 1.0, 0.8));
  CHECK_FALSE(cond_unitary_exceeds_cptp(2, 2, 0.55, 0.8));
  CHECK(cond_unitary_exceeds_cptp(2, 2, 1.0) ==
        cond_unitary_exceeds_cptp(2, 2, 1.0, avg_purity_hs(2, 2)));
  CHECK_THROWS_AS(cond_unitary_exceeds_cptp(2, 2, 1.0, 3.0), std::domain_error);

  // Both conditions agree with direct comparison of the closed forms.
  RandomStream rng(33, 0);
  for (int k = 0; k < 100; ++k) {
    const Index dB = 2 + static_cast<Index>(rng.uniform() * 10);
    const Index dA = 2 + static_cast<Index>(rng.uniform() * 10);
    const double lo = 1.0 / static_cast<double>(dB);
    const double alpha1 = lo + (1.0 - lo) * rng.uniform();
    FluctuationInputs in{dB, dA, alpha1, 1.0};
    CHECK(cond_general_exceeds_unitary(dB, dA, alpha1) ==
          (fluct_general_fixed_dA(in) > fluct_unitary(in)));
    CHECK(cond_unitary_exceeds_cptp(dB, dA, alpha1) ==
          (fluct_unitary(in) > fluct_cptp_fixed_dA(in)));
  }
}

TEST_CASE("ordering classification") {
  CHECK(classify_ordering(2, 2, 1.0) == FluctOrdering::UnitaryGeneralCptp);
  CHECK(classify_ordering(2, 2, 0.55) == FluctOrdering::GeneralCptpUnitary);
  CHECK(classify_ordering(2, 2, 0.7) == FluctOrdering::GeneralUnitaryCptp);

  CHECK(classify_ordering_values(0.1, 0.1, 0.2) == FluctOrdering::Degenerate);
  CHECK(classify_ordering_values(0.3, 0.1, 0.2) == FluctOrdering::UnitaryGeneralCptp);

  CHECK(to_string(FluctOrdering::GeneralUnitaryCptp) == std::string("G>U>CPTP"));
  CHECK(to_string(FluctOrdering::GeneralCptpUnitary) == std::string("G>CPTP>U"));
  CHECK(to_string(FluctOrdering::UnitaryGeneralCptp) == std::string("U>G>CPTP"));
}

TEST_CASE("large-dB gap approximations track the exact differences") {
  // U - CPTP gap: nonnegative, zero in the trivial-ancilla limit.
  CHECK(large_dB_gap_u_minus_cptp(512, 1, 0.9) == 0.0);
  for (double a1 : {0.55, 0.8, 1.0})
    CHECK(large_dB_gap_u_minus_cptp(512, 2, a1) >= 0.0);

  {
    FluctuationInputs in{512, 2, 1.0, 1.0};
    const double exact = fluct_unitary(in) - fluct_cptp_fixed_dA(in);
    const double approx = large_dB_gap_u_minus_cptp(512, 2, 1.0);
    CHECK(std::abs(exact - approx) / std::abs(exact) < 0.05);
  }
  {
    FluctuationInputs in{512, 2, 0.3, 1.0};
    const double exact = fluct_general_fixed_dA(in) - fluct_unitary(in);
    const double approx = large_dB_gap_g_minus_u(512, 2, 0.3);
    CHECK(std::abs(exact - approx) / std::abs(exact) < 0.05);
  }

  // Sign flips exactly at the general-vs-unitary condition boundary.
  const double boundary = (2.0 + 200.0) / (1.0 + 2.0 * 200.0);
  CHECK(large_dB_gap_g_minus_u(200, 2, boundary - 1e-6) > 0.0);
  CHECK(large_dB_gap_g_minus_u(200, 2, boundary + 1e-6) < 0.0);
  // Pure battery at large dB: unitary fluctuation exceeds general.
  CHECK(large_dB_gap_g_minus_u(200, 2, 1.0) < 0.0);

  // The approximation error vanishes faster than 1/dB: scaled by dB it must
  // decrease along a dyadic ladder.
  double prev = 1e300;
  for (Index dB : {64, 128, 256, 512, 1024}) {
    FluctuationInputs in{dB, 2, 1.0, 1.0};
    const double exact = fluct_unitary(in) - fluct_cptp_fixed_dA(in);
    const double err = std::abs(exact - large_dB_gap_u_minus_cptp(dB, 2, 1.0)) *
                       static_cast<double>(dB);
    CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("finite-n general average: value, strict harmonic bounds, decay") {
  // Single-term average (n = 1) is the dA = 2 value itself.
  FiniteNAverage one = finite_n_avg(ProcessClass::General, 1, 2, 1.0, 1.0);
  CHECK(one.value == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(one.lower_bound < one.value);
  CHECK(one.value < one.upper_bound);

  for (Index n : {10, 100, 1000})
    for (Index dB : {2, 3, 7}) {
      FiniteNAverage f = finite_n_avg(ProcessClass::General, n, dB, 1.0, 2.5);
      CHECK(f.lower_bound < f.value);
      CHECK(f.value < f.upper_bound);
    }

  // Strictly decreasing in n.
  double prev = finite_n_avg(ProcessClass::General, 2, 2, 1.0, 1.0).value;
  for (Index n = 3; n <= 50; ++n) {
    const double cur = finite_n_avg(ProcessClass::General, n, 2, 1.0, 1.0).value;
    CHECK(cur < prev);
    prev = cur;
  }

  // Vanishes like ln(n)/n: faster than 1/n^0.9 but measurably slower than
  // the plain 1/n a pure power law would give over n = 100 -> 10^4.
  const double v100 = finite_n_avg(ProcessClass::General, 100, 2, 1.0, 1.0).value;
  const double v10000 = finite_n_avg(ProcessClass::General, 10000, 2, 1.0, 1.0).value;
  CHECK(v10000 < v100 / 40.0);
  CHECK(v10000 > v100 / 100.0);

  // The ln-form annotation converges to the exact harmonic bounds.
  FiniteNAverage f = finite_n_avg(ProcessClass::General, 10000, 2, 1.0, 1.0);
  auto [lo, hi] = finite_n_general_log_bounds(10000, 2, 1.0);
  CHECK(std::abs(lo - f.lower_bound) / f.lower_bound < 1e-4);
  CHECK(std::abs(hi - f.upper_bound) / f.upper_bound < 1e-4);
}

TEST_CASE("finite-n cptp average: telescoping envelopes bracket the value") {
  for (Index n : {1, 2, 10, 100, 1000})
    for (Index dB : {2, 3, 7})
      for (double alpha1 : {0.5, 0.8, 1.0}) {
        if (alpha1 < 1.0 / static_cast<double>(dB)) continue;
        FiniteNAverage f = finite_n_avg(ProcessClass::Cptp, n, dB, alpha1, 1.7);
        CHECK(f.lower_bound < f.value);
        CHECK(f.value < f.upper_bound);
      }

  // Vanishes with n.
  const double v100 = finite_n_avg(ProcessClass::Cptp, 100, 2, 1.0, 1.0).value;
  const double v10000 = finite_n_avg(ProcessClass::Cptp, 10000, 2, 1.0, 1.0).value;
  CHECK(v10000 < v100 / 50.0);

  CHECK_THROWS_AS(finite_n_avg(ProcessClass::Unitary, 10, 2, 1.0, 1.0),
                  std::invalid_argument);
}

TEST_CASE("harmonic numbers are exact partial sums") {
  CHECK(harmonic_number(0) == 0.0);
  CHECK(harmonic_number(1) == 1.0);
  CHECK(harmonic_number(4) == doctest::Approx(25.0 / 12).epsilon(1e-15));
  CHECK(harmonic_number(100) == doctest::Approx(5.1873775176).epsilon(1e-9));
}

TEST_CASE("scaling exponent predictions") {
  CHECK(scaling_exponent_prediction(ProcessClass::Cptp, ScanAxis::AuxDim).exponent == -2.0);
  CHECK(scaling_exponent_prediction(ProcessClass::General, ScanAxis::AuxDim).exponent == -1.0);
  CHECK(scaling_exponent_prediction(ProcessClass::Unitary, ScanAxis::AuxDim).exponent == 0.0);
  for (ProcessClass c : {ProcessClass::Unitary, ProcessClass::Cptp, ProcessClass::General}) {
    CHECK(scaling_exponent_prediction(c, ScanAxis::BatteryDim).exponent == -1.0);
    CHECK_FALSE(scaling_exponent_prediction(c, ScanAxis::BatteryDim).log_correction);
  }
  CHECK(scaling_exponent_prediction(ProcessClass::Cptp, ScanAxis::MaxAuxDim).exponent == -1.0);
  CHECK_FALSE(scaling_exponent_prediction(ProcessClass::Cptp, ScanAxis::MaxAuxDim).log_correction);
  CHECK(scaling_exponent_prediction(ProcessClass::General, ScanAxis::MaxAuxDim).exponent == -1.0);
  CHECK(scaling_exponent_prediction(ProcessClass::General, ScanAxis::MaxAuxDim).log_correction);

  CHECK(to_string(ScanAxis::AuxDim) == std::string("dA"));
  CHECK(to_string(ScanAxis::BatteryDim) == std::string("dB"));
  CHECK(to_string(ScanAxis::MaxAuxDim) == std::string("n"));
}

TEST_CASE("fluct_fixed_dA dispatches on the process class") {
  FluctuationInputs in{3, 4, 0.8, 1.3};
  CHECK(fluct_fixed_dA(ProcessClass::Unitary, in) == fluct_unitary(in));
  CHECK(fluct_fixed_dA(ProcessClass::Cptp, in) == fluct_cptp_fixed_dA(in));
  CHECK(fluct_fixed_dA(ProcessClass::General, in) == fluct_general_fixed_dA(in));
}
