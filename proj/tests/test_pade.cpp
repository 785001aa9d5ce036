#include <gtest/gtest.h>

#include <random>

#include "hplab/pade.hpp"

using namespace hplab;

namespace {

Germ jacobi_germ(const char* alpha) {
  Num a(alpha);
  return Germ::product({{"-1", a}, {"1", a.scaled(-1)}});
}

// (z+1)(z-0.5)/((z-3)(z-2)), a degree-2 rational function with value 1 at infinity.
Germ rational2() { return Germ::product({{"-1", "1"}, {"3", "-1"}, {"0.5", "1"}, {"2", "-1"}}); }

std::vector<BigComplex> sample_points(int count, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-3, 3);
  std::vector<BigComplex> z;
  while (static_cast<int>(z.size()) < count) {
    double x = u(rng), y = u(rng);
    if (std::abs(y) < 0.5) continue;
    z.emplace_back(BigReal(x), BigReal(y));
  }
  return z;
}

Germ random_germ(std::mt19937& rng) {
  std::uniform_int_distribution<int> pt(-20, 20), ex(1, 5);
  auto point = [&] { return Num(std::to_string(pt(rng)) + "/10", std::to_string(pt(rng)) + "/10"); };
  int p1 = ex(rng), p2 = ex(rng);
  return Germ::product({{point(), Num(std::to_string(p1) + "/7")},
                        {point(), Num(std::to_string(p2) + "/7")},
                        {point(), Num("-" + std::to_string(p1 + p2) + "/7")}});
}

}  // namespace

TEST(PadePolynomials, OrderOneForJacobiGerm) {
  PrecisionScope s({60});
  BigReal alpha = parse_real("1/3");
  auto pp = pade_polynomials(expand_at_infinity(jacobi_germ("1/3"), 2), 1);
  // [1/1] = (z + alpha)/(z - alpha): P1 = z - alpha, P0 = -(z + alpha)
  EXPECT_LT(abs(pp.p1[0] + BigComplex(alpha)), pow10(-55));
  EXPECT_EQ(pp.p1[1], BigComplex(1));
  EXPECT_LT(abs(pp.p0[0] + BigComplex(alpha)), pow10(-55));
  EXPECT_LT(abs(pp.p0[1] + 1), pow10(-55));
  EXPECT_TRUE(pp.cert.ok);
  BigComplex z(2);
  EXPECT_LT(abs(pade_eval(pp, z) - BigComplex((2 + alpha) / (2 - alpha))), pow10(-55));
}

TEST(PadePolynomials, OrderZeroIsLeadingCoefficient) {
  PrecisionScope s({60});
  LaurentSeries sr{{BigComplex(BigReal("2.5")), BigComplex(1), BigComplex(7)}};
  auto pp = pade_polynomials(sr, 0);
  EXPECT_EQ(pade_eval(pp, BigComplex(BigReal(0), BigReal(9))), BigComplex(BigReal("2.5")));
}

TEST(PadePolynomials, ReproducesRationalFunction) {
  PrecisionScope s({60});
  Germ g = rational2();
  for (int n : {2, 3, 5}) {
    auto pp = pade_polynomials(expand_at_infinity(g, 2 * n), n);
    EXPECT_LT(pp.cert.max_residual, pow10(-50)) << n;
    for (const auto& z : sample_points(10, 7 + n)) {
      BigComplex v = eval_germ(g, z);
      EXPECT_LT(abs(pade_eval(pp, z) - v) / abs(v), pow10(-45)) << n;
    }
  }
}

TEST(PadePolynomials, DegenerateBlockFallsBack) {
  PrecisionScope s({60});
  // 1 + 1/z^3: the n = 1 system has a zero row and a two-dimensional kernel.
  LaurentSeries sr{{BigComplex(1), BigComplex(), BigComplex(), BigComplex(1)}};
  auto pp = pade_polynomials(sr, 1);
  EXPECT_EQ(pp.n, 1);
  EXPECT_EQ(pp.effective_n, 0);
}

TEST(PadePolynomials, RejectsShortSeries) {
  PrecisionScope s({60});
  EXPECT_THROW(pade_polynomials(expand_at_infinity(jacobi_germ("1/3"), 3), 2), std::invalid_argument);
}

TEST(PadeFromGerm, CertificateAtDoublePrecision) {
  auto pp = pade_from_germ(jacobi_germ("1/3"), 20);
  EXPECT_TRUE(pp.cert.ok);
  EXPECT_EQ(pp.cert.digits, 60u + 12u * 20u);
  EXPECT_EQ(pp.cert.verify_digits, 2 * pp.cert.digits);
  EXPECT_EQ(pp.cert.from_power, -1);
  EXPECT_EQ(pp.cert.to_power, -20);
  EXPECT_EQ(pp.p1.degree(), 20);
}

TEST(PadeFromGerm, DifferentNormalizationsGiveSameApproximant) {
  PrecisionScope s({200});
  Germ g = Germ::product({{{"-1.2", "0.8"}, "1/3"}, {{"0.9", "1.5"}, "1/3"}, {{"0.5", "-1.2"}, "-2/3"}});
  const int n = 10;
  auto sr = expand_at_infinity(g, 2 * n);
  auto a = pade_polynomials(sr, n);
  NullSpaceOptions opt;
  opt.forced_free = n + 1;  // P1_0 = 1 instead of the default free column
  auto b = pade_polynomials(sr, n, opt);
  for (const auto& z : sample_points(20, 11)) {
    BigComplex x = pade_eval(a, z), y = pade_eval(b, z);
    EXPECT_LT(abs(x - y) / abs(x), pow10(-100));
  }
}

TEST(PadeFromGerm, CollinearWithJacobiOracle) {
  PrecisionScope s({100});
  BigReal alpha = parse_real("1/3");
  auto sr = expand_at_infinity(jacobi_germ("1/3"), 40);
  for (int n = 1; n <= 20; ++n) {
    auto pp = pade_polynomials(sr, n);
    EXPECT_GT(collinearity(pp.p1, jacobi_oracle(n, alpha)), 1 - pow10(-20)) << n;
  }
}

TEST(Multipoint, SingleNodeAtInfinityEqualsPade) {
  std::mt19937 rng(2024);
  for (int trial = 0; trial < 5; ++trial) {
    Germ g = random_germ(rng);
    const int n = 6;
    MultipointSpec spec{{{std::nullopt, g, 2 * n + 1}}};
    auto mp = multipoint_pade(spec, n);
    auto pp = pade_from_germ(g, n);
    PrecisionScope s({mp.cert.digits});
    for (const auto& z : sample_points(5, 100 + trial)) {
      BigComplex x = multipoint_eval(mp, z), y = pade_eval(pp, z);
      EXPECT_LT(abs(x - y) / abs(y), pow10(-40)) << trial;
    }
  }
}

TEST(Multipoint, TwoPointReproducesRationalFunction) {
  Germ g = rational2();
  const int n = 3;
  auto mp = multipoint_pade(two_point_spec(g, g, n), n);
  EXPECT_TRUE(mp.cert.ok);
  PrecisionScope s({mp.cert.digits});
  for (const auto& z : sample_points(10, 3)) {
    BigComplex v = eval_germ(g, z);
    EXPECT_LT(abs(multipoint_eval(mp, z) - v) / abs(v), pow10(-60));
  }
}

namespace {

std::pair<Germ, Germ> figure5_germs() {
  Germ f0 = Germ::product({{"1/2", "-1/2"}, {"2", "-1/2"}});
  std::get<ProductTerm>(f0.terms[0].term).anchor = Anchor{"0", "2^(-1/2)"};
  Germ finf = Germ::product({{"1/2", "-1/2"}, {"2", "-1/2"}}, "2^(-1/2)") + Germ::constant("1");
  return {f0, finf};
}

}  // namespace

TEST(Multipoint, FigureFiveResidualOrders) {
  auto [f0, finf] = figure5_germs();
  const int n = 30;
  auto mp = multipoint_pade(two_point_spec(f0, finf, n), n);
  EXPECT_TRUE(mp.cert.ok);
  EXPECT_LE(mp.cert.max_residual, mp.cert.threshold);
  // Independent check: Q f0 - P through z^(n-1) at 0, Q finf - P through z^0 at infinity.
  PrecisionScope s({2 * mp.cert.digits});
  TaylorSeries t = expand_at_point(f0, BigComplex(), n - 1);
  for (int m = 0; m < n; ++m) {
    BigComplex acc = -mp.P[m];
    BigReal scale = abs(mp.P[m]);
    for (int k = 0; k <= m; ++k) {
      acc.add_mul(mp.Q[k], t.d[m - k]);
      scale += abs(mp.Q[k] * t.d[m - k]);
    }
    EXPECT_LT(abs(acc) / scale, mp.cert.threshold) << "z^" << m;
  }
  LaurentSeries sr = expand_at_infinity(finf, n + 1);
  TwoSidedExpansion e = poly_times_series(mp.Q, sr);
  for (int m = n; m >= 0; --m) {
    BigComplex v = e.at_power(m) - mp.P[m];
    EXPECT_LT(abs(v) / (mp.Q.max_abs() + mp.P.max_abs()), mp.cert.threshold) << "z^" << m;
  }
}

TEST(Multipoint, FootnoteConventionSolves) {
  auto [f0, finf] = figure5_germs();
  auto spec = two_point_spec(f0, finf, 10, TwoPointConvention::footnote);
  EXPECT_EQ(spec.nodes[0].multiplicity, 11);
  EXPECT_EQ(spec.nodes[1].multiplicity, 10);
  EXPECT_TRUE(multipoint_pade(spec, 10).cert.ok);
}

TEST(Multipoint, RejectsWrongMultiplicities) {
  PrecisionScope s({60});
  MultipointSpec spec{{{std::nullopt, jacobi_germ("1/3"), 4}}};
  EXPECT_THROW(multipoint_system(spec, 2), std::invalid_argument);
}

TEST(JFraction, FirstCoefficients) {
  PrecisionScope s({60});
  BigReal alpha = parse_real("1/3");
  auto jf = jfraction_coeffs(expand_at_infinity(jacobi_germ("1/3"), 10), 5);
  ASSERT_EQ(jf.depth(), 5);
  EXPECT_FALSE(jf.terminated);
  EXPECT_LT(abs(jf.A[0] - BigComplex(2 * alpha)), pow10(-55));
  EXPECT_LT(abs(jf.B[0] - BigComplex(alpha)), pow10(-55));
  for (const auto& a : jf.A) EXPECT_FALSE(a.is_zero());
}

TEST(JFraction, RationalTerminates) {
  PrecisionScope s({60});
  BigComplex b(BigReal("0.4"), BigReal("-1.5"));
  Germ g = Germ::constant("1") + Germ::product({{{"0.4", "-1.5"}, "-1"}});
  auto jf = jfraction_coeffs(expand_at_infinity(g, 8), 4);
  ASSERT_EQ(jf.depth(), 1);
  EXPECT_TRUE(jf.terminated);
  EXPECT_LT(abs(jf.A[0] - 1), pow10(-55));
  EXPECT_LT(abs(jf.B[0] - b), pow10(-55));
}

TEST(JFraction, TruncateValues) {
  PrecisionScope s({60});
  auto jf = jfraction_coeffs(expand_at_infinity(jacobi_germ("1/3"), 40), 20);
  EXPECT_LT(abs(jn_eval(jf, 1, BigComplex(2)) - BigComplex(BigReal("1.4"))), pow10(-55));
  EXPECT_EQ(jn_eval(jf, 0, BigComplex(5)), jf.c0);
  EXPECT_THROW(jn_eval(jf, 21, BigComplex(2)), std::invalid_argument);
}

TEST(JFraction, TruncatesEqualPadeInGenericCase) {
  PrecisionScope s({120});
  Germ g = Germ::product({{{"-1.2", "0.8"}, "1/3"}, {{"0.9", "1.5"}, "1/3"}, {{"0.5", "-1.2"}, "-2/3"}});
  auto sr = expand_at_infinity(g, 24);
  auto jf = jfraction_coeffs(sr, 12);
  ASSERT_EQ(jf.depth(), 12);
  auto pp = pade_polynomials(sr, 12);
  for (const auto& z : sample_points(20, 5)) {
    BigComplex x = jn_eval(jf, 12, z), y = pade_eval(pp, z);
    EXPECT_LT(abs(x - y) / abs(y), pow10(-60));
  }
}

TEST(JFraction, DenominatorsCollinearWithPade) {
  PrecisionScope s({100});
  auto sr = expand_at_infinity(jacobi_germ("1/3"), 40);
  auto jf = jfraction_coeffs(sr, 20);
  auto q = jfraction_denominators(jf, 20);
  ASSERT_EQ(q.size(), 21u);
  for (int k = 1; k <= 20; ++k)
    EXPECT_GT(collinearity(q[k], pade_polynomials(sr, k).p1), 1 - pow10(-50)) << k;
}

TEST(JacobiOracle, LowDegrees) {
  PrecisionScope s({60});
  BigReal alpha = parse_real("1/3");
  auto p0 = jacobi_oracle(0, alpha);
  EXPECT_EQ(p0.degree(), 0);
  EXPECT_EQ(p0[0], BigComplex(1));
  auto p1 = jacobi_oracle(1, alpha);
  EXPECT_LT(abs(p1[0] + BigComplex(alpha)), pow10(-55));
  EXPECT_EQ(p1[1], BigComplex(1));
}

TEST(JacobiOracle, DifferentialEquationResidual) {
  PrecisionScope s({60});
  BigReal alpha = parse_real("1/3");
  for (int n : {5, 17, 30}) {
    Poly w = jacobi_oracle(n, alpha), d1 = w.derivative(), d2 = d1.derivative();
    for (int k = 0; k < 10; ++k) {
      BigComplex z(BigReal(k) / 4 - 1, BigReal(k % 3) / 5);
      BigComplex r = (z * z - 1) * d2(z) + BigReal(2) * (z - BigComplex(alpha)) * d1(z) -
                     BigReal(n * (n + 1)) * w(z);
      BigComplex scale = abs((z * z - 1) * d2(z)) + abs(BigReal(n * (n + 1)) * w(z)) + 1;
      EXPECT_LT(abs(r) / abs(scale), pow10(-60 + 15)) << n;
    }
  }
}
