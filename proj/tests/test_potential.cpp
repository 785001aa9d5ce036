#include <gtest/gtest.h>

#include <random>

#include "hplab/potential.hpp"

using namespace hplab;

namespace {

const double kPi = 3.14159265358979323846;

std::array<BigComplex, 3> fig1_triple() {
  return {parse_complex("-1.2", "0.8"), parse_complex("0.9", "1.5"), parse_complex("0.5", "-1.2")};
}

double spread_on(const EquilibriumIntervals& eq, int points) {
  double lo = eq.E.front().lo, hi = eq.E.back().hi;
  double mn = 1e300, mx = -1e300;
  for (int i = 0; i < points; ++i) {
    double x = lo + (hi - lo) * (i + 0.5) / points;
    bool inside = false;
    for (const auto& s : eq.E) inside |= (x > s.lo && x < s.hi);
    if (!inside) continue;
    double v = eq.potential({x, 0});
    mn = std::min(mn, v);
    mx = std::max(mx, v);
  }
  return mx - mn;
}

}  // namespace

TEST(EquilibriumIntervals, SingleSegmentClosedForms) {
  auto eq = equilibrium_intervals({{-1, 1}});
  for (double x : {-0.9, -0.3, 0.0, 0.55, 0.999})
    EXPECT_NEAR(eq.lambda(x), 1 / (kPi * std::sqrt(1 - x * x)), 1e-12);
  EXPECT_NEAR(eq.lambda.mass(), 1, 1e-12);
  EXPECT_NEAR(eq.robin, std::log(2.0), 1e-12);
  EXPECT_NEAR(eq.green({2, 0}), std::log(2 + std::sqrt(3.0)), 1e-10);
  EXPECT_NEAR(eq.green({2, 0}), 1.316958, 1e-6);
}

TEST(EquilibriumIntervals, SymmetricPairHasOddPolynomial) {
  for (double a : {0.1, 0.3, 0.7}) {
    auto eq = equilibrium_intervals({{-1, -a}, {a, 1}});
    ASSERT_EQ(eq.p.size(), 2u);
    EXPECT_NEAR(eq.p[0], 0, 1e-12);
    EXPECT_NEAR(eq.lambda.mass(), 1, 1e-12);
    // |x| / (pi sqrt((1 - x^2)(x^2 - a^2))) integrates to 1 (u = x^2)
    double x = (1 + a) / 2;
    EXPECT_NEAR(eq.lambda(x), x / (kPi * std::sqrt((1 - x * x) * (x * x - a * a))), 1e-12);
  }
}

TEST(EquilibriumIntervals, PotentialConstantOnSupport) {
  EXPECT_LE(spread_on(equilibrium_intervals({{-1, 1}}), 200), 1e-8);
  EXPECT_LE(spread_on(equilibrium_intervals({{-1, -0.3}, {0.3, 1}}), 200), 1e-8);
  EXPECT_LE(spread_on(equilibrium_intervals({{-2.5, -1.3}, {-0.8, 0.8}, {1.3, 2.5}}), 200), 1e-8);
  EXPECT_LE(spread_on(equilibrium_intervals({{-3, -2.9}, {0, 0.4}}), 200), 1e-8);
}

TEST(EquilibriumIntervals, GreenFunctionProperties) {
  auto eq = equilibrium_intervals({{-2.5, -1.3}, {-0.8, 0.8}, {1.3, 2.5}});
  for (double x : {-2.0, -0.5, 0.1, 2.2}) EXPECT_NEAR(eq.green({x, 0}), 0, 1e-8);
  for (std::complex<double> z : {std::complex<double>(-1, 0), {1.05, 0}, {0, 0.2}, {2, 1}, {-5, 0}, {0, -3}})
    EXPECT_GT(eq.green(z), 0) << z;
  for (std::complex<double> z : {std::complex<double>(1e4, 0), {0, 1e4}, {-7e3, 7e3}})
    EXPECT_NEAR(eq.green(z) - std::log(std::abs(z)), eq.robin, 1e-3);
}

TEST(EquilibriumIntervals, RejectsOverlap) {
  EXPECT_THROW(equilibrium_intervals({{-1, 0.5}, {0.2, 1}}), std::invalid_argument);
  EXPECT_THROW(equilibrium_intervals({{1, 1}}), std::invalid_argument);
  EXPECT_THROW(equilibrium_intervals({}), std::invalid_argument);
}

TEST(GreenKernels, SegmentMatchesQuadrature) {
  auto eq = equilibrium_intervals({{-1, 1}});
  for (std::complex<double> z : {std::complex<double>(0, 1), {1.5, -0.2}, {-3, 0}, {0.3, 0.01}})
    EXPECT_NEAR(green_segment_infinity(z), eq.green(z), 1e-10) << z;
}

TEST(GreenKernels, SymmetryAndBoundaryValues) {
  std::complex<double> z(0.2, 0.7), w(-0.5, -1.1);
  EXPECT_NEAR(green_segment(z, w), green_segment(w, z), 1e-13);
  EXPECT_NEAR(green_gap(z, w), green_gap(w, z), 1e-13);
  EXPECT_NEAR(green_segment(0.4, w), 0, 1e-13);  // on E
  EXPECT_NEAR(green_gap(2.5, w), 0, 1e-13);      // on F
  EXPECT_NEAR(green_gap(-1.5, w), 0, 1e-13);
  EXPECT_GT(green_gap(0.5, w), 0);
  // g_F(z, 0) = g_E(1/z, infinity)
  EXPECT_NEAR(green_gap(z, 0.0), green_segment_infinity(1.0 / z), 1e-13);
}

TEST(PaperDensities, PointValuesAndSymmetry) {
  auto d = paper_densities(BigReal(1) / 3);
  EXPECT_NEAR(d.eta_E(0.0), std::sqrt(3.0) / (2 * kPi), 1e-15);
  EXPECT_NEAR(d.eta_E(0.0), 0.275664, 1e-6);
  for (double x : {0.1, 0.5, 0.93, 0.9999}) {
    EXPECT_DOUBLE_EQ(d.eta_E(x), d.eta_E(-x));
    EXPECT_GT(d.eta_E(x), 0);
  }
  for (double x : {1.0001, 1.5, 7.0, 1e6}) {
    EXPECT_NEAR(d.eta_F(x), d.eta_F(-x), 1e-15 * d.eta_F(x));
    EXPECT_GT(d.eta_F(x), 0);
  }
  EXPECT_EQ(d.eta_E(1.5), 0);
  EXPECT_EQ(d.eta_F(0.5), 0);
}

TEST(PaperDensities, MassesAreOne) {
  auto d = paper_densities(BigReal(1) / 3);
  EXPECT_NEAR(d.eta_E.mass(), 1, 1e-8);
  EXPECT_NEAR(d.eta_F.mass(), 1, 1e-8);
  // mass of eta_F by x -> 1/x on each half line
  double half = d.eta_F.mass_in(1, std::numeric_limits<double>::infinity());
  EXPECT_NEAR(half, 0.5, 1e-8);
}

TEST(PaperDensities, Errors) {
  auto d = paper_densities(BigReal(1) / 3);
  EXPECT_THROW(d.eta_E(1.0), std::domain_error);
  EXPECT_THROW(d.eta_E(-1.0), std::domain_error);
  EXPECT_THROW(d.eta_F(1.0), std::domain_error);
  EXPECT_THROW(paper_densities(BigReal(1) / 2), std::invalid_argument);
  EXPECT_THROW(paper_densities(BigReal(1)), std::invalid_argument);
}

TEST(EquilibriumResidual, PaperDensitiesSatisfyBothIdentities) {
  auto d = paper_densities(BigReal(1) / 3);
  auto r = equilibrium_residual(Condenser{}, d.eta_E, d.eta_F);
  ASSERT_EQ(r.e_side.values.size(), 100u);
  EXPECT_LE(r.e_side.spread, 1e-4);
  EXPECT_LE(r.f_side.spread, 1e-3);
  // the F-side constant is 6 log 2
  EXPECT_NEAR(r.f_side.values[0], 6 * std::log(2.0), 1e-8);
}

TEST(EquilibriumResidual, ZeroMassControlFails) {
  auto d = paper_densities(BigReal(1) / 3);
  DensityRef zero({{-1, 1}}, [](const DensityPoint&) { return 0.0; });
  DensityRef zero_f(d.eta_F.support(), [](const DensityPoint&) { return 0.0; });
  auto r = equilibrium_residual(Condenser{}, zero, zero_f);
  // reduces to 3 g_E(y, inf), which grows from 3 g_E(1.01) to 3 g_E(10)
  EXPECT_GT(r.f_side.spread, 1.0);
}

TEST(EquilibriumResidual, AffineCondenser) {
  // eta measures pushed to E = [2, 5]
  auto d = paper_densities(BigReal(1) / 3);
  const double lo = 2, hi = 5, k = 2 / (hi - lo);
  auto to_unit = [=](double x) { return (2 * x - lo - hi) / (hi - lo); };
  DensityRef e({{lo, hi}}, [=](const DensityPoint& p) {
    return k * d.eta_E.at({to_unit(p.x), p.dlo * k, p.dhi * k, 0});
  });
  const double inf = std::numeric_limits<double>::infinity();
  DensityRef f({{-inf, lo}, {hi, inf}}, [=](const DensityPoint& p) {
    double u = to_unit(p.x);
    return k * d.eta_F.at({u, p.dlo * k, p.dhi * k, p.interval});
  });
  auto r = equilibrium_residual(Condenser{{lo, hi}}, e, f, 40, 40);
  EXPECT_LE(r.e_side.spread, 1e-4);
  EXPECT_LE(r.f_side.spread, 1e-3);
}

TEST(GreenPotential, FrozenValueAtTwoI) {
  auto d = paper_densities(BigReal(1) / 3);
  EXPECT_NEAR(green_potential_gap(d.eta_E, {0, 2}), 0.27057015806, 1e-9);
  EXPECT_LT(std::exp(-2 * green_potential_gap(d.eta_E, {0, 2})), 1);
}

TEST(Chebotarev, EquilateralIsCentroid) {
  PrecisionScope s({100});
  BigReal t = 2 * pi_value() / 3;
  auto c = chebotarev_point({BigComplex(1), polar(BigReal(1), t), polar(BigReal(1), 2 * t)}, 100);
  EXPECT_LE(abs(c.v), BigReal("1e-10"));
}

TEST(Chebotarev, FigureOneTriple) {
  PrecisionScope s({100});
  auto c = chebotarev_point(fig1_triple(), 100);
  EXPECT_LE(c.residual, pow10(-33));
  // recomputed at higher precision and quadrature level
  auto rr = chebotarev_period_residual(fig1_triple(), c.v, 130, 11);
  EXPECT_LE(abs(rr[0]), BigReal("1e-20"));
  EXPECT_LE(abs(rr[1]), BigReal("1e-20"));
  // golden value, agreed between 60- and 200-digit runs
  BigComplex golden = parse_complex("0.0157069673478307784790932148130", "0.474013227124351681268131689636");
  EXPECT_LE(abs(c.v - golden), BigReal("1e-28"));
}

TEST(Chebotarev, AffineEquivariance) {
  const unsigned digits = 60;
  PrecisionScope outer({digits});
  auto base = chebotarev_point(fig1_triple(), digits);
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int trial = 0; trial < 2; ++trial) {
    PrecisionScope s({digits});
    BigComplex m(u(rng), u(rng)), b(u(rng), u(rng));
    auto a = fig1_triple();
    for (auto& x : a) x = m * x + b;
    auto c = chebotarev_point(a, digits);
    EXPECT_LE(abs(c.v - (m * base.v + b)), pow10(-static_cast<long>(digits) / 4)) << trial;
  }
}

TEST(Chebotarev, DegenerateTriples) {
  PrecisionScope s({40});
  EXPECT_THROW(chebotarev_point({BigComplex(0), BigComplex(1), BigComplex(3)}, 40), std::invalid_argument);
  EXPECT_THROW(chebotarev_point({BigComplex(0), BigComplex(1), BigComplex(1)}, 40), std::invalid_argument);
}

TEST(StahlArcs, EquilateralArcsAreRadial) {
  std::array<std::complex<double>, 3> a{1.0, std::polar(1.0, 2 * kPi / 3), std::polar(1.0, 4 * kPi / 3)};
  auto g = trace_stahl_arcs(a, 0.0);
  ASSERT_TRUE(g.consistent) << g.note;
  for (int j = 0; j < 3; ++j) {
    ASSERT_GE(g.arcs[j].size(), 3u);
    EXPECT_EQ(g.arcs[j].front(), a[j]);
    EXPECT_EQ(g.arcs[j].back(), 0.0);
    for (auto z : g.arcs[j]) EXPECT_LE(std::abs((z * std::conj(a[j])).imag()), 1e-8);
  }
}

TEST(StahlArcs, AbelianIntegralVanishesOnArcs) {
  PrecisionScope s({60});
  auto c = chebotarev_point(fig1_triple(), 60);
  std::array<std::complex<double>, 3> a;
  auto big = fig1_triple();
  for (int j = 0; j < 3; ++j) a[j] = big[j].to_cdouble();
  auto g = trace_stahl_arcs(a, c.v.to_cdouble());
  ASSERT_TRUE(g.consistent) << g.note;
  for (int j = 0; j < 3; ++j) {
    auto re = abelian_real_part(g, j);
    ASSERT_EQ(re.size(), g.arcs[j].size());
    for (double x : re) EXPECT_LE(std::abs(x), 1e-5);
  }
}

TEST(StahlArcs, WrongZeroIsFlagged) {
  std::array<std::complex<double>, 3> a{1.0, std::polar(1.0, 2 * kPi / 3), std::polar(1.0, 4 * kPi / 3)};
  auto g = trace_stahl_arcs(a, {0.2, 0.1});
  EXPECT_FALSE(g.consistent);
  EXPECT_FALSE(g.note.empty());
}
