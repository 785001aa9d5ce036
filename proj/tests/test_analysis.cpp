#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "hplab/analysis.hpp"

using namespace hplab;

namespace {

Germ jacobi_germ(const char* alpha) {
  Num a(alpha);
  return Germ::product({{"-1", a}, {"1", a.scaled(-1)}});
}

Germ fig1_germ() {
  return Germ::product({{{"-1.2", "0.8"}, "1/3"}, {{"0.9", "1.5"}, "1/3"}, {{"0.5", "-1.2"}, "-2/3"}});
}

// Hermite approximants of the alpha = 1/3 germ on [-1, 1], computed once per n.
const HermiteApproximants& case_h(int n) {
  static std::map<int, HermiteApproximants> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, hermite_approximants(hp_from_germ(jacobi_germ("1/3"), n))).first;
  return it->second;
}

const PadePair& case_pade(int n) {
  static std::map<int, PadePair> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, pade_from_germ(jacobi_germ("1/3"), n)).first;
  return it->second;
}

std::vector<Segment> unit_segment() { return {{-1, 1}}; }

}  // namespace

TEST(InterpolationNodes, AtLeastTwoNMinusTenAtSixty) {
  auto ns = interpolation_nodes(case_h(60), jacobi_germ("1/3"), unit_segment(), 60);
  EXPECT_GE(ns.count, 2u * 60 - 10);
  EXPECT_LE(ns.deficit, 10);
  EXPECT_EQ(ns.pole_brackets, 0u);
}

TEST(InterpolationNodes, NodesAreIncreasingGenuineSignChanges) {
  auto ns = interpolation_nodes(case_h(60), jacobi_germ("1/3"), unit_segment(), 60);
  ASSERT_EQ(ns.nodes.size(), ns.count);
  for (std::size_t i = 0; i < ns.nodes.size(); ++i) {
    EXPECT_GT(ns.nodes[i], -1);
    EXPECT_LT(ns.nodes[i], 1);
    if (i > 0) {
      EXPECT_LT(ns.nodes[i - 1], ns.nodes[i]);
    }
    EXPECT_LT(ns.check_minus[i] * ns.check_plus[i], 0) << "node " << ns.nodes[i];
  }
}

TEST(InterpolationNodes, ReflectedGermHasReflectedNodes) {
  // ((z - 1)/(z + 1))^{1/3} is f(-z) for f = ((z + 1)/(z - 1))^{1/3}.
  const int n = 30;
  auto f = jacobi_germ("1/3"), g = jacobi_germ("-1/3");
  auto nf = interpolation_nodes(case_h(n), f, unit_segment(), n);
  auto ng = interpolation_nodes(hermite_approximants(hp_from_germ(g, n)), g, unit_segment(), n);
  ASSERT_EQ(nf.count, ng.count);
  for (std::size_t i = 0; i < nf.count; ++i) EXPECT_NEAR(nf.nodes[i], -ng.nodes[ng.count - 1 - i], 1e-8);
}

TEST(InterpolationNodes, NodeMeasureApproachesEquilibriumDensity) {
  const int n = 100;
  auto ns = interpolation_nodes(case_h(n), jacobi_germ("1/3"), unit_segment(), n);
  std::vector<cplx> pts(ns.nodes.begin(), ns.nodes.end());
  auto eta = paper_densities(BigReal(1) / 3).eta_E;
  auto k = kolmogorov_distance(counting_measure(pts, 2.0 * n), eta, 0.95);
  EXPECT_LE(k.distance, 0.05);
}

TEST(InterpolationNodes, RejectsCoarseGrid) {
  EXPECT_THROW(interpolation_nodes(case_h(20), jacobi_germ("1/3"), unit_segment(), 20, 10), std::invalid_argument);
}

TEST(Alternation, RunCoversTheGuaranteedCountAtSixty) {
  auto rep = alternation_check(case_h(60), jacobi_germ("1/3"), 60, 0.1);
  EXPECT_EQ(rep.required, 108);
  EXPECT_GE(static_cast<long>(rep.run_length), rep.required);
  for (std::size_t i = rep.run_begin + 1; i < rep.run_begin + rep.run_length; ++i)
    EXPECT_LT(rep.weighted[i] * rep.weighted[i - 1], 0);
}

TEST(Alternation, CentralMagnitudesAreOrderOne) {
  auto rep = alternation_check(case_h(60), jacobi_germ("1/3"), 60, 0.1);
  EXPECT_GE(rep.central_min, 0.5);
  EXPECT_LE(rep.central_max, 2.0);
}

TEST(Alternation, RunLengthGrowsWithN) {
  long prev = 0;
  for (int n : {20, 40, 60}) {
    auto rep = alternation_check(case_h(n), jacobi_germ("1/3"), n, 0.1);
    EXPECT_GE(static_cast<long>(rep.run_length), prev - 2) << "n = " << n;
    prev = static_cast<long>(rep.run_length);
  }
}

TEST(Alternation, RejectsOtherRegimes) {
  EXPECT_THROW(alternation_check(case_h(20), jacobi_germ("1/3"), 20, 1.5), std::invalid_argument);
  auto g = jacobi_germ("1/5");
  auto h = hermite_approximants(hp_from_germ(g, 4));
  EXPECT_THROW(alternation_check(h, g, 4, 0.1), std::invalid_argument);
}

namespace {

ErrorFn pade_error() {
  return [](int n, const BigComplex& z) {
    const auto& pp = case_pade(n);
    PrecisionScope s({pp.cert.digits});
    return abs(eval_germ(jacobi_germ("1/3"), z) - pade_eval(pp, z));
  };
}

ErrorFn hermite_error() {
  return [](int n, const BigComplex& z) {
    const auto& h = case_h(n);
    PrecisionScope s({poly_digits(h.den)});
    auto target = second_branch_target(jacobi_germ("1/3"), h.convention);
    return abs(target.at(z) - h.h1(z));
  };
}

}  // namespace

TEST(RateMap, PadeRateAtTwoMatchesGreenFunction) {
  auto m = rate_map(pade_error(), {40, 60}, {{2, 0}}, {Predictor::stahl_gE, unit_segment()});
  const double closed = std::pow(2 + std::sqrt(3.0), -2);
  EXPECT_NEAR(m.points[0].predicted, closed, 1e-9);
  EXPECT_NEAR(m.points[0].observed / closed, 1, 0.1);
  EXPECT_NEAR(m.points[0].cross_check / closed, 1, 0.1);
}

TEST(RateMap, NonePassesObservedThrough) {
  auto err = pade_error();
  auto m = rate_map(err, {60, 40}, {{0, 1.5}}, {});
  ASSERT_EQ(m.n, (std::vector<int>{40, 60}));
  const auto& p = m.points[0];
  EXPECT_TRUE(std::isnan(p.predicted));
  EXPECT_TRUE(std::isnan(p.ratio));
  double direct = std::exp(log(err(60, BigComplex(0.0, 1.5))).convert_to<double>() / 60);
  EXPECT_DOUBLE_EQ(p.observed, direct);
}

TEST(RateMap, TheoremOneRegimeContractsAtTwoI) {
  auto m = rate_map(hermite_error(), {40, 60}, {{0, 2}}, {Predictor::theorem1_GF, unit_segment()});
  EXPECT_LE(m.points[0].observed, 1 - 1e-3);
  EXPECT_NEAR(m.points[0].predicted, std::exp(-2 * 0.27057015806), 1e-8);
  EXPECT_NEAR(m.points[0].ratio, 1, 0.05);
}

TEST(RateMap, PredictionsLieStrictlyInsideUnitInterval) {
  RatePredictor gE{Predictor::stahl_gE, {{-1, -0.2}, {0.4, 1}}};
  RatePredictor gF{Predictor::theorem1_GF, unit_segment()};
  RatePredictor bus{Predictor::buslaev_green, unit_segment(), {0, 3}};
  for (std::complex<double> z : {std::complex<double>(0.1, 0.3), {2, 1}, {-3, -0.5}, {0.9, 0.05}}) {
    for (const auto& p : {gE, gF, bus}) {
      double r = predicted_rate(p, z);
      EXPECT_GT(r, 0);
      EXPECT_LT(r, 1);
    }
  }
}

TEST(RateMap, SurrogateGreenIsSymmetricInItsArguments) {
  std::complex<double> z(0.4, 0.7), w(-1.5, 2);
  double gzw = -std::log(predicted_rate({Predictor::buslaev_green, unit_segment(), w}, z));
  double gwz = -std::log(predicted_rate({Predictor::buslaev_green, unit_segment(), z}, w));
  EXPECT_NEAR(gzw, gwz, 1e-12);
  EXPECT_THROW(predicted_rate({Predictor::buslaev_green, unit_segment(), 0.5}, z), std::invalid_argument);
}

TEST(RateMap, UnderflowDropsThePoint) {
  ErrorFn zero = [](int, const BigComplex&) { return BigReal(0); };
  auto m = rate_map(zero, {10, 20}, {{2, 0}}, {Predictor::stahl_gE, unit_segment()});
  EXPECT_TRUE(m.points[0].dropped);
  EXPECT_FALSE(m.points[0].note.empty());
  EXPECT_TRUE(std::isnan(m.points[0].observed));
}

TEST(RateMap, NeedsTwoOrders) { EXPECT_THROW(rate_map(pade_error(), {40}, {{2, 0}}, {}), std::invalid_argument); }

TEST(Orthogonality, PadeDenominatorIsOrthogonalBelowN) {
  const int n = 20;
  const auto& pp = case_pade(n);
  std::vector<int> ks;
  for (int k = 0; k <= n; ++k) ks.push_back(k);
  auto r = orthogonality_residual(pp.p1, jacobi_germ("1/3"), ks, Orthogonality::pade_eq65);
  const double bound = std::pow(10.0, -static_cast<double>(r.digits) / 4);
  double worst = 0;
  for (int k = 0; k < n; ++k) {
    EXPECT_LE(r.residual[k], bound) << "k = " << k;
    worst = std::max(worst, r.residual[k]);
  }
  EXPECT_GE(r.residual[n], 1e3 * worst);
}

TEST(Orthogonality, HermiteDenominatorAgainstPadeDenominators) {
  const int n = 20;
  auto g = jacobi_germ("1/3");
  auto t = hp_from_germ(g, n);
  std::vector<int> ks;
  std::vector<Poly> aux;
  for (int k = 1; k <= n + 1; ++k) {
    ks.push_back(k);
    aux.push_back(pade_from_germ(g, n + k).p1);
  }
  auto r = orthogonality_residual(t.q2, g, ks, Orthogonality::hp_eq69, aux);
  const double bound = std::pow(10.0, -static_cast<double>(r.digits) / 4);
  double worst = 0;
  for (int i = 0; i < n; ++i) {
    EXPECT_LE(r.residual[i], bound) << "k = " << ks[i];
    worst = std::max(worst, r.residual[i]);
  }
  EXPECT_GE(r.residual[n], 1e3 * worst);
  EXPECT_THROW(orthogonality_residual(t.q2, g, ks, Orthogonality::hp_eq69), std::invalid_argument);
}

TEST(Orthogonality, EvenMomentsOfAnOddJumpVanish) {
  // z^{2/3} ((z - 1)(z + 1))^{-1/3}: the jump across [-1, 1] is odd in x.
  Germ g = Germ::product({{"-1", "-1/3"}, {"0", "2/3"}, {"1", "-1/3"}});
  PrecisionScope s({60});
  Poly one = Poly::constant(BigComplex(1));
  auto r = orthogonality_residual(one, g, {0, 1, 2, 3, 4}, Orthogonality::pade_eq65);
  for (int k : {0, 2, 4}) EXPECT_LE(r.residual[k], 1e-40) << "k = " << k;
  for (int k : {1, 3}) EXPECT_GE(r.residual[k], 1e-3) << "k = " << k;
}

TEST(JacobiAsymptotics, RatioApproachesOneLikeOneOverN) {
  auto rows = jacobi_asymptotics_check({50, 100}, BigReal(1) / 3, BigComplex(2));
  EXPECT_LE(rows[0].deviation, 0.05);
  EXPECT_LE(rows[1].deviation, 0.6 * rows[0].deviation);
}

TEST(JacobiAsymptotics, RealOnTheRealAxis) {
  const unsigned digits = 60;
  auto rows = jacobi_asymptotics_check({30}, BigReal(1) / 3, BigComplex(2), digits);
  EXPECT_LE(rows[0].imag_oracle, std::pow(10.0, -static_cast<double>(digits) / 2));
  EXPECT_LE(rows[0].imag_rhs, std::pow(10.0, -static_cast<double>(digits) / 2));
  EXPECT_GT(rows[0].ratio.real(), 0);
}

TEST(JacobiAsymptotics, ComplexPointAndNegativeExponent) {
  auto rows = jacobi_asymptotics_check({40, 80}, BigReal(-1) / 4, BigComplex(0.3, 1.1));
  EXPECT_LE(rows[0].deviation, 0.05);
  EXPECT_LE(rows[1].deviation, 0.6 * rows[0].deviation);
  EXPECT_THROW(jacobi_asymptotics_check({10}, BigReal(1) / 3, BigComplex(0.5)), std::domain_error);
}

TEST(UniformCheck, FigureOneErrorDecreasesOnCircle) {
  LimitSet limit;
  {
    PrecisionScope s({60});
    std::array<BigComplex, 3> a{parse_complex("-1.2", "0.8"), parse_complex("0.9", "1.5"),
                                parse_complex("0.5", "-1.2")};
    auto c = chebotarev_point(a, 60);
    auto geo = trace_stahl_arcs({a[0].to_cdouble(), a[1].to_cdouble(), a[2].to_cdouble()}, c.v.to_cdouble());
    for (const auto& arc : geo.arcs) limit.curves.push_back(arc);
  }
  std::vector<cplx> K;
  for (int i = 0; i < 200; ++i) K.push_back(std::polar(3.0, 2 * detail::kPi * i / 200));
  auto rows = nuttall_uniform_check(fig1_germ(), {60, 130}, K, 0.05, limit);
  ASSERT_TRUE(rows[0].sup_error && rows[1].sup_error);
  EXPECT_LT(*rows[1].sup_error, *rows[0].sup_error);
  EXPECT_EQ(rows[0].used + rows[0].excluded, K.size());
}

TEST(UniformCheck, WindowInsideDiskIsNotApplicable) {
  std::vector<cplx> K{{1, 1}, {1.001, 1}, {1, 1.002}};
  std::vector<double> err{1, 2, 3};
  EXPECT_FALSE(sup_outside_disks(K, err, {{1, 1}}, 0.01).has_value());
  auto partial = sup_outside_disks(K, err, {{1, 1}}, 0.0015);
  ASSERT_TRUE(partial.has_value());
  EXPECT_EQ(*partial, 3);
}

TEST(UniformCheck, RationalFunctionIsReproduced) {
  Germ g = Germ::product({{"-1", "1"}, {"3", "-1"}, {"0.5", "1"}, {"2", "-1"}});
  std::vector<cplx> K;
  for (int i = 0; i < 32; ++i) K.push_back(std::polar(5.0, 2 * detail::kPi * i / 32));
  for (int n : {2, 4}) {
    auto rows = nuttall_uniform_check(g, {n}, K, 1e-3, LimitSet{});
    auto pp = pade_from_germ(g, n);
    ASSERT_TRUE(rows[0].sup_error);
    EXPECT_LE(*rows[0].sup_error, std::pow(10.0, -static_cast<double>(pp.cert.digits) / 2)) << "n = " << n;
  }
}

TEST(Hausdorff, OneSidedDistanceSkipsDisks) {
  std::vector<cplx> A{{0, 0}, {1, 0}, {5, 5}}, B{{0, 0.1}, {1, -0.2}};
  auto d = one_sided_hausdorff(A, B, {}, 0.1);
  ASSERT_TRUE(d);
  EXPECT_NEAR(*d, std::abs(cplx(5, 5) - cplx(1, -0.2)), 1e-15);
  auto d2 = one_sided_hausdorff(A, B, {{5, 5}}, 0.1);
  EXPECT_NEAR(*d2, 0.2, 1e-15);
  EXPECT_FALSE(one_sided_hausdorff(A, B, {{0, 0}, {1, 0}, {5, 5}}, 0.5));
}
