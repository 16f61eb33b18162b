#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <qbf/ensembles.hpp>

#include <cmath>
#include <vector>

using namespace qbf;

TEST_CASE("RandomStream replays bit-identically and streams are distinct") {
  RandomStream a(42, 7), b(42, 7);
  for (int i = 0; i < 64; ++i) CHECK(a.uniform() == b.uniform());
  for (int i = 0; i < 64; ++i) CHECK(a.gaussian() == b.gaussian());

  RandomStream c(42, 8), d(43, 7);
  RandomStream ref(42, 7);
  int same_c = 0, same_d = 0;
  for (int i = 0; i < 64; ++i) {
    const double r = ref.uniform();
    if (c.uniform() == r) ++same_c;
    if (d.uniform() == r) ++same_d;
  }
  CHECK(same_c == 0);
  CHECK(same_d == 0);
}

TEST_CASE("uniform draws live in [0,1) and fill the interval") {
  RandomStream rng(1, 0);
  double lo = 1.0, hi = 0.0, sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
  }
  CHECK(lo < 1e-3);
  CHECK(hi > 1.0 - 1e-3);
  CHECK(std::abs(sum / n - 0.5) < 5.0 / std::sqrt(12.0 * n));  // 5 SE
}

TEST_CASE("gaussian draws have standard-normal moments") {
  RandomStream rng(2, 0);
  const int n = 200000;
  double s1 = 0.0, s2 = 0.0, s4 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = rng.gaussian();
    s1 += g;
    s2 += g * g;
    s4 += g * g * g * g;
  }
  const double mean = s1 / n, var = s2 / n - mean * mean, kurt = s4 / n;
  CHECK(std::abs(mean) < 5.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::abs(var - 1.0) < 5.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(kurt - 3.0) < 5.0 * std::sqrt(96.0 / n));  // Var(g^4) = 105 - 9
}

TEST_CASE("complex_gaussian parts are independent standard normals") {
  RandomStream rng(3, 0);
  const int n = 200000;
  double sr = 0.0, si = 0.0, srr = 0.0, sii = 0.0, sri = 0.0;
  for (int i = 0; i < n; ++i) {
    const Complex z = rng.complex_gaussian();
    sr += z.real();
    si += z.imag();
    srr += z.real() * z.real();
    sii += z.imag() * z.imag();
    sri += z.real() * z.imag();
  }
  const double se_mean = 5.0 / std::sqrt(static_cast<double>(n));
  CHECK(std::abs(sr / n) < se_mean);
  CHECK(std::abs(si / n) < se_mean);
  CHECK(std::abs(srr / n - 1.0) < 5.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(sii / n - 1.0) < 5.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(sri / n) < se_mean);  // Var(xy) = 1
}

TEST_CASE("make_density validates and normalizes") {
  Matrix ok(2, 2);
  ok << 0.7, Complex{0.1, 0.2}, Complex{0.1, -0.2}, 0.3;
  DensityMatrix rho = make_density(ok);
  CHECK(std::abs(rho.mat.trace().real() - 1.0) < 1e-15);
  CHECK(hermiticity_defect(rho.mat) == 0.0);

  Matrix bad_herm(2, 2);
  bad_herm << 0.5, 1.0, 0.0, 0.5;
  CHECK_THROWS_AS(make_density(bad_herm), std::invalid_argument);

  Matrix bad_trace = Matrix::Identity(2, 2);
  CHECK_THROWS_AS(make_density(bad_trace), std::invalid_argument);

  Matrix bad_psd(2, 2);
  bad_psd << 1.5, 0.0, 0.0, -0.5;
  CHECK_THROWS_AS(make_density(bad_psd), std::invalid_argument);

  CHECK_THROWS_AS(make_density(Matrix::Ones(2, 3)), std::invalid_argument);
}

TEST_CASE("purity of known states") {
  Matrix m = Matrix::Zero(3, 3);
  m.diagonal().setConstant(1.0 / 3.0);
  CHECK(make_density(m).purity() == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  Matrix p = Matrix::Zero(3, 3);
  p(0, 0) = 1.0;
  CHECK(make_density(p).purity() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ginibre entries have the right shape and moments") {
  RandomStream rng(4, 0);
  Matrix g = ginibre(3, 5, rng);
  CHECK(g.rows() == 3);
  CHECK(g.cols() == 5);

  RandomStream rng2(4, 0);
  CHECK(frobenius_distance(ginibre(3, 5, rng2), g) == 0.0);

  // E|z|^2 = 2 with our unit-variance-per-part convention.
  RandomStream rng3(5, 0);
  const int n = 40000;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += std::norm(rng3.complex_gaussian());
  CHECK(std::abs(s / n - 2.0) < 5.0 * std::sqrt(8.0 / n));  // Var|z|^2 = 4, extra slack
}

TEST_CASE("haar_unitary is unitary and deterministic") {
  for (Index d : {1, 2, 3, 5, 8}) {
    RandomStream rng(6, static_cast<std::uint64_t>(d));
    Matrix u = haar_unitary(d, rng);
    CHECK(frobenius_distance(u.adjoint() * u, Matrix::Identity(d, d)) < 1e-12);
    RandomStream rng2(6, static_cast<std::uint64_t>(d));
    CHECK(frobenius_distance(haar_unitary(d, rng2), u) == 0.0);
  }
}

TEST_CASE("haar_unitary matches the invariant-measure moments") {
  // E[Tr U] = 0 and E[|Tr U|^2] = 1 for d >= 2; the second fails for plain QR
  // without the phase correction, which is exactly what it guards.
  const Index d = 3;
  const int n = 20000;
  RandomStream rng(7, 0);
  Complex mean_tr = 0.0;
  double mean_abs2 = 0.0, mean_e00 = 0.0;
  for (int i = 0; i < n; ++i) {
    Matrix u = haar_unitary(d, rng);
    const Complex tr = u.trace();
    mean_tr += tr;
    mean_abs2 += std::norm(tr);
    mean_e00 += std::norm(u(0, 0));
  }
  mean_tr /= static_cast<double>(n);
  mean_abs2 /= n;
  mean_e00 /= n;
  const double se = 1.0 / std::sqrt(static_cast<double>(n));
  CHECK(std::abs(mean_tr) < 5.0 * se);            // Var(Re Tr) = Var(Im Tr) = 1/2
  CHECK(std::abs(mean_abs2 - 1.0) < 5.0 * se);    // Var(|Tr|^2) = 1
  CHECK(std::abs(mean_e00 - 1.0 / d) < 5.0 * se); // E|U_00|^2 = 1/d
}

TEST_CASE("haar first moment twirls any operator to Tr(X)/d times identity") {
  const Index d = 3;
  const int n = 20000;
  Matrix x(d, d);
  x << Complex{1, 0}, Complex{0.5, 0.25}, Complex{0, -1},
       Complex{0.5, -0.25}, Complex{-2, 0}, Complex{0.1, 0.1},
       Complex{0, 1}, Complex{0.1, -0.1}, Complex{0.5, 0};
  RandomStream rng(8, 0);
  Matrix acc = Matrix::Zero(d, d);
  for (int i = 0; i < n; ++i) {
    Matrix u = haar_unitary(d, rng);
    acc += u * x * u.adjoint();
  }
  acc /= static_cast<double>(n);
  Matrix target = (x.trace() / static_cast<double>(d)) * Matrix::Identity(d, d);
  CHECK((acc - target).cwiseAbs().maxCoeff() < 10.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("hs_density is a valid state with the known mean purity") {
  struct Case { Index dA, dC; };
  for (Case c : {Case{2, 2}, Case{3, 3}, Case{2, 4}}) {
    RandomStream rng(9, static_cast<std::uint64_t>(c.dA * 10 + c.dC));
    const int n = 20000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
      DensityMatrix rho = hs_density(c.dA, c.dC, rng);
      CHECK(rho.dim() == c.dA);
      const double p = rho.purity();
      s += p;
      s2 += p * p;
    }
    const double mean = s / n;
    const double se = std::sqrt((s2 / n - mean * mean) / n);
    const double expect = static_cast<double>(c.dA + c.dC) /
                          static_cast<double>(c.dA * c.dC + 1);
    CHECK(std::abs(mean - expect) < 5.0 * se);
  }
}

TEST_CASE("purify reproduces the state and orders ancilla levels by weight") {
  Matrix m(2, 2);
  m << 0.7, 0.0, 0.0, 0.3;
  DensityMatrix rho = make_density(m);
  DensityMatrix psi = purify(rho, 2);
  CHECK(psi.dim() == 4);
  CHECK(psi.purity() == doctest::Approx(1.0).epsilon(1e-12));

  // Battery factor first: joint index = i*dA + k.  Largest weight pairs with
  // ancilla level 0, so only (i=0,k=0) and (i=1,k=1) are occupied.
  CHECK(std::abs(psi.mat(0, 0).real() - 0.7) < 1e-12);
  CHECK(std::abs(psi.mat(3, 3).real() - 0.3) < 1e-12);
  CHECK(std::abs(psi.mat(1, 1)) < 1e-12);
  CHECK(std::abs(psi.mat(2, 2)) < 1e-12);

  Matrix back = partial_trace(psi.mat, {2, 2}, {0});
  CHECK(frobenius_distance(back, rho.mat) < 1e-12);
}

TEST_CASE("purify handles random states, rank deficiency, and undersized ancillas") {
  RandomStream rng(10, 0);
  DensityMatrix rho = hs_density(3, 3, rng);
  DensityMatrix psi = purify(rho, 3);
  CHECK(frobenius_distance(partial_trace(psi.mat, {3, 3}, {0}), rho.mat) < 1e-10);
  CHECK(psi.purity() == doctest::Approx(1.0).epsilon(1e-10));

  // A pure state has rank 1, so a single ancilla level suffices.
  DensityMatrix pure = random_pure_state(3, rng);
  DensityMatrix triv = purify(pure, 1);
  CHECK(frobenius_distance(partial_trace(triv.mat, {3, 1}, {0}), pure.mat) < 1e-10);

  // Oversized ancilla also works (extra levels stay empty).
  DensityMatrix big = purify(rho, 5);
  CHECK(frobenius_distance(partial_trace(big.mat, {3, 5}, {0}), rho.mat) < 1e-10);

  Matrix mm = Matrix::Zero(3, 3);
  mm.diagonal().setConstant(1.0 / 3.0);
  CHECK_THROWS_AS(purify(make_density(mm), 2), std::invalid_argument);
}

TEST_CASE("random_hamiltonian_fig1 draws d uniform coefficients and zeros the rest") {
  for (Index d : {2, 3, 7}) {
    RandomStream rng(11, static_cast<std::uint64_t>(d));
    HamiltonianCoeffs c = random_hamiltonian_fig1(d, rng);
    CHECK(c.a0 == 0.0);
    CHECK(c.a.size() == d * d - 1);
    for (Index i = 0; i < d; ++i) {
      CHECK(c.a(i) >= 0.0);
      CHECK(c.a(i) < 1.0);
    }
    for (Index i = d; i < d * d - 1; ++i) CHECK(c.a(i) == 0.0);
  }
  RandomStream rng(11, 99);
  CHECK_THROWS_AS(random_hamiltonian_fig1(1, rng), std::invalid_argument);
}

TEST_CASE("random_pure_state is pure and its mean is maximally mixed") {
  const Index d = 4;
  RandomStream rng(12, 0);
  Matrix acc = Matrix::Zero(d, d);
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    DensityMatrix psi = random_pure_state(d, rng);
    CHECK(psi.purity() == doctest::Approx(1.0).epsilon(1e-10));
    acc += psi.mat;
  }
  acc /= static_cast<double>(n);
  Matrix target = Matrix::Identity(d, d) / static_cast<double>(d);
  CHECK((acc - target).cwiseAbs().maxCoeff() < 5.0 / std::sqrt(static_cast<double>(n)));
}
