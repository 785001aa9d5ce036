#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <random>

#include "hplab/pade.hpp"
#include "hplab/roots.hpp"

using namespace hplab;

namespace {

Poly from_roots(const std::vector<BigComplex>& r) {
  Poly p = Poly::constant(1);
  for (const auto& z : r) p = p * Poly({-z, BigComplex(1)});
  return p;
}

DensityRef arcsine() {
  return DensityRef({{-1, 1}}, [](const DensityPoint& p) {
    return 1 / (3.14159265358979323846 * std::sqrt(p.dlo * p.dhi));
  });
}

double nearest(const std::vector<cplx>& set, cplx z) {
  double best = 1e300;
  for (auto w : set) best = std::min(best, std::abs(w - z));
  return best;
}

}  // namespace

TEST(FindRoots, Quadratic) {
  PrecisionScope s({60});
  auto zs = find_roots(Poly({BigComplex(-1), BigComplex(0), BigComplex(1)}));
  ASSERT_EQ(zs.size(), 2u);
  EXPECT_TRUE(zs.ok);
  auto r = zs.as_cdouble();
  std::sort(r.begin(), r.end(), [](cplx a, cplx b) { return a.real() < b.real(); });
  EXPECT_NEAR(r[0].real(), -1, 1e-15);
  EXPECT_NEAR(r[1].real(), 1, 1e-15);
}

TEST(FindRoots, RecoversConstructedRoots) {
  PrecisionScope s({60});
  std::vector<BigComplex> r;
  for (int k = 1; k <= 10; ++k) r.push_back(BigComplex(BigReal(k) / 10));
  auto zs = find_roots(from_roots(r));
  EXPECT_TRUE(zs.ok);
  BigReal worst = 0;
  for (const auto& t : r) {
    BigReal best = 10;
    for (const auto& z : zs.roots) best = std::min(best, abs(z - t));
    worst = std::max(worst, best);
  }
  EXPECT_LT(worst, pow10(-30 + 8));
}

TEST(FindRoots, AgreesWithCompanionEigenvalues) {
  PrecisionScope s({50});
  std::mt19937 rng(17);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 3 + trial;
    std::vector<BigComplex> c;
    for (int k = 0; k < n; ++k) c.emplace_back(g(rng), g(rng));
    c.emplace_back(1.0, 0.0);
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 1; i < n; ++i) comp(i, i - 1) = 1;
    for (int i = 0; i < n; ++i) comp(i, n - 1) = -c[i].to_cdouble();
    Eigen::VectorXcd ev = comp.eigenvalues();
    auto got = find_roots(Poly(c)).as_cdouble();
    for (int i = 0; i < n; ++i) EXPECT_LT(nearest(got, ev[i]), 1e-9) << trial;
  }
}

TEST(FindRoots, ConjugateClosureAndRootSum) {
  PrecisionScope s({60});
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> u(-9, 9);
  std::vector<BigComplex> c;
  for (int k = 0; k < 15; ++k) c.push_back(BigComplex(BigReal(u(rng))));
  c.push_back(BigComplex(3));
  Poly p(c);
  auto zs = find_roots(p);
  EXPECT_TRUE(zs.ok);
  BigComplex sum;
  for (const auto& z : zs.roots) {
    sum += z;
    BigReal best = 10;
    for (const auto& w : zs.roots) best = std::min(best, abs(conj(z) - w));
    EXPECT_LT(best, pow10(-30));
  }
  BigComplex expect = -p[14] / p[15];
  EXPECT_LT(abs(sum - expect) / (1 + abs(expect)), pow10(-30 + 5));
}

TEST(FindRoots, DoubleRoot) {
  PrecisionScope s({60});
  auto zs = find_roots(Poly({BigComplex(), BigComplex(), BigComplex(1)}));
  for (const auto& z : zs.roots) EXPECT_LT(abs(z), pow10(-25));
  auto m = counting_measure(zs, 2);
  ASSERT_EQ(m.points.size(), 1u);
  EXPECT_DOUBLE_EQ(m.weights[0], 1.0);
}

TEST(FindRoots, RejectsConstants) {
  PrecisionScope s({60});
  EXPECT_THROW(find_roots(Poly::constant(2)), std::invalid_argument);
}

TEST(FindRoots, PadeDenominatorZerosOnTheInterval) {
  Num a("1/3");
  Germ g = Germ::product({{"-1", a}, {"1", a.scaled(-1)}});
  auto pp = pade_from_germ(g, 100);
  PrecisionScope s({pp.cert.digits});
  auto zs = find_roots(pp.p1);
  EXPECT_TRUE(zs.ok);
  ASSERT_EQ(zs.size(), 100u);
  for (auto z : zs.as_cdouble()) {
    EXPECT_LT(std::abs(z.imag()), 1e-6);
    EXPECT_LT(std::abs(z.real()), 1 + 1e-6);
  }
}

TEST(CountingMeasure, MassAndEmptyCases) {
  PrecisionScope s({40});
  EXPECT_EQ(counting_measure(Poly::constant(3), 1).points.size(), 0u);
  EXPECT_EQ(counting_measure(Poly::constant(3), 1).mass(), 0.0);
  std::vector<BigComplex> r;
  for (int k = 0; k < 7; ++k) r.push_back(BigComplex(BigReal(k), BigReal(1)));
  auto m = counting_measure(from_roots(r), 7);
  EXPECT_NEAR(m.mass(), 1.0, 1e-15);
  EXPECT_THROW(counting_measure(std::vector<cplx>{}, 0), std::invalid_argument);
}

TEST(Froissart, ConstructedDoublet) {
  std::vector<cplx> zeros{{2, 2}, {0.3, 0}}, poles{{2 + 1e-4, 2}, {-0.3, 0}};
  auto lim = LimitSet::segments({{-1, 1}});
  auto pairs = froissart_pairs(zeros, poles, 0.01, lim, 0.05);
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_EQ(pairs[0].zero, 0u);
  EXPECT_EQ(pairs[0].pole, 0u);
  auto swapped = froissart_pairs(poles, zeros, 0.01, lim, 0.05);
  ASSERT_EQ(swapped.size(), 1u);
  EXPECT_EQ(swapped[0].zero, pairs[0].pole);
  EXPECT_EQ(swapped[0].pole, pairs[0].zero);
}

TEST(Froissart, SymmetricAndDisjointOnRandomInput) {
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> u(-3, 3);
  std::vector<cplx> zeros, poles;
  for (int i = 0; i < 60; ++i) zeros.emplace_back(u(rng), u(rng));
  for (int i = 0; i < 60; ++i) poles.emplace_back(u(rng), u(rng));
  LimitSet none;
  auto a = froissart_pairs(zeros, poles, 0.3, none, 0);
  auto b = froissart_pairs(poles, zeros, 0.3, none, 0);
  ASSERT_EQ(a.size(), b.size());
  std::set<std::pair<std::size_t, std::size_t>> sa, sb;
  std::set<std::size_t> used_z, used_p;
  for (const auto& p : a) {
    sa.insert({p.zero, p.pole});
    EXPECT_TRUE(used_z.insert(p.zero).second);
    EXPECT_TRUE(used_p.insert(p.pole).second);
  }
  for (const auto& p : b) sb.insert({p.pole, p.zero});
  EXPECT_EQ(sa, sb);
}

TEST(Froissart, Triplets) {
  std::vector<cplx> z0{{1, 2}, {5, 5}}, z1{{1.001, 2}, {-5, 5}}, z2{{1, 2.001}, {0, 0}};
  auto t = froissart_triplets(z0, z1, z2, 0.01, LimitSet{}, 0);
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0].i0, 0u);
  EXPECT_EQ(t[0].i1, 0u);
  EXPECT_EQ(t[0].i2, 0u);
}

TEST(Kolmogorov, UniformAgainstArcsine) {
  EmpiricalMeasure m;
  const int N = 20000;
  for (int i = 0; i < N; ++i) {
    m.points.emplace_back(-1 + (2.0 * i + 1) / N, 0);
    m.weights.push_back(1.0 / N);
  }
  // sup |x/2 - arcsin(x)/pi| at x = sqrt(1 - 4/pi^2)
  double x = std::sqrt(1 - 4 / (M_PI * M_PI));
  double expect = x / 2 - std::asin(x) / M_PI;
  EXPECT_NEAR(expect, 0.1055, 5e-4);
  EXPECT_NEAR(kolmogorov_distance(m, arcsine()).distance, expect, 1e-4);
}

TEST(Kolmogorov, ReferenceMassChecked) {
  DensityRef half({{0, 1}}, [](const DensityPoint&) { return 0.5; });
  EXPECT_THROW(kolmogorov_distance(EmpiricalMeasure{}, half), std::invalid_argument);
  EXPECT_NEAR(arcsine().mass(), 1.0, 1e-12);
}

TEST(Kolmogorov, MetricProperties) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-2, 2);
  auto random_measure = [&] {
    EmpiricalMeasure m;
    for (int i = 0; i < 40; ++i) {
      m.points.emplace_back(u(rng), 0);
      m.weights.push_back(1.0 / 40);
    }
    return m;
  };
  for (int t = 0; t < 10; ++t) {
    auto a = random_measure(), b = random_measure(), c = random_measure();
    EXPECT_EQ(kolmogorov_distance(a, a), 0.0);
    EXPECT_NEAR(kolmogorov_distance(a, b), kolmogorov_distance(b, a), 1e-15);
    EXPECT_LE(kolmogorov_distance(a, c), kolmogorov_distance(a, b) + kolmogorov_distance(b, c) + 1e-15);
  }
}

TEST(Kolmogorov, JacobiZerosApproachArcsine) {
  PrecisionScope s({120});
  BigReal alpha = parse_real("1/3");
  double d50 = kolmogorov_distance(counting_measure(jacobi_oracle(50, alpha), 50), arcsine()).distance;
  double d100 = kolmogorov_distance(counting_measure(jacobi_oracle(100, alpha), 100), arcsine()).distance;
  EXPECT_LT(d100, d50);
  EXPECT_LT(d100, 0.05);
}

TEST(Kolmogorov, WindowedComparisonOnUnboundedSupport) {
  // Cauchy density on the line; points at its quantiles.
  DensityRef cauchy({{-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()}},
                    [](const DensityPoint& p) { return 1 / (M_PI * (1 + p.x * p.x)); });
  EXPECT_NEAR(cauchy.mass(), 1.0, 1e-10);
  EmpiricalMeasure m;
  const int N = 2000;
  for (int i = 0; i < N; ++i) {
    m.points.emplace_back(std::tan(M_PI * ((i + 0.5) / N - 0.5)), 0);
    m.weights.push_back(1.0 / N);
  }
  auto rep = kolmogorov_distance(m, cauchy, 10);
  EXPECT_LT(rep.distance, 1e-3);
  EXPECT_NEAR(rep.ref_outside_mass, 1 - 2 * std::atan(10.0) / M_PI, 1e-10);
  EXPECT_NEAR(rep.outside_mass, rep.ref_outside_mass, 1e-3);
}
