#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hplab/arith.hpp"
#include "hplab/germ.hpp"
#include "hplab/hermite.hpp"
#include "hplab/pade.hpp"
#include "hplab/potential.hpp"
#include "hplab/quadrature.hpp"
#include "hplab/roots.hpp"

namespace hplab {

// Decimal digits carried by the coefficients of p.
inline unsigned poly_digits(const Poly& p) {
  unsigned d = 0;
  for (const auto& c : p.coeffs()) d = std::max(d, static_cast<unsigned>(c.real().precision()));
  return d == 0 ? current_precision().digits : d;
}

// Limit f_2 of H_{n,1} for a real-subclass germ with a single exponent
// magnitude: const * base under the definition convention, -const * base under
// the theorem-1 convention (H_{n,1} = -Q1/Q2).
struct SecondBranchTarget {
  SecondBranch sb;
  SignConvention convention = SignConvention::theorem1;

  BigReal factor() const { return convention == SignConvention::theorem1 ? BigReal(-sb.constant) : sb.constant; }
  BigReal on_cut(const BigReal& x) const { return factor() * sb.base_real(x); }
  BigComplex at(const BigComplex& z) const { return BigComplex(factor()) * sb.base(z); }
};

inline SecondBranchTarget second_branch_target(const Germ& f, SignConvention conv) {
  return {second_branch(f), conv};
}

// ---------------------------------------------------------------------------
// Interpolation nodes: sign changes of f_2 - H_{n,1} on the cuts.

struct NodeSet {
  int n = 0;
  std::vector<double> nodes;  // increasing, in the open cuts
  std::size_t count = 0;
  long deficit = 0;                  // 2n - count, the observed m
  std::size_t pole_brackets = 0;     // sign changes caused by poles of H, dropped
  std::vector<double> check_plus, check_minus;  // (f_2 - H)(node +- 1e-10)
};

namespace detail {

// Grid clustered double-exponentially at both ends of (lo, hi).
inline std::vector<double> cut_grid(double lo, double hi, int points) {
  std::vector<double> g;
  const double T = 3.2, half = (hi - lo) / 2, mid = (lo + hi) / 2;
  for (int i = 0; i <= points; ++i) {
    double t = -T + 2 * T * i / points;
    double x = mid + half * std::tanh(kPi / 2 * std::sinh(t));
    if (x > lo && x < hi && (g.empty() || x > g.back())) g.push_back(x);
  }
  return g;
}

struct NodeScanner {
  const HermiteApproximants& H;
  const SecondBranchTarget& target;

  // (f_2 Q2 - N1) and Q2 at x; sign(f_2 - H) = sign(first) * sign(second).
  std::pair<BigReal, BigReal> parts(double x) const {
    BigReal bx(x);
    BigReal den = H.den.eval_real(bx).real();
    BigReal num = H.num1.eval_real(bx).real();
    return {target.on_cut(bx) * den - num, den};
  }
  BigReal error(double x) const {
    auto [g, d] = parts(x);
    return g / d;
  }
};

inline int sgn(const BigReal& x) { return x > 0 ? 1 : (x < 0 ? -1 : 0); }

}  // namespace detail

inline NodeSet interpolation_nodes(const HermiteApproximants& H, const Germ& f, const std::vector<Segment>& E, int n,
                                   int grid_factor = 40) {
  if (n < 1) throw std::invalid_argument("n must be positive");
  if (grid_factor < 40) throw std::invalid_argument("grid needs at least 40n points per segment");
  PrecisionScope scope(Precision{poly_digits(H.den)});
  auto target = second_branch_target(f, H.convention);
  detail::NodeScanner scan{H, target};
  NodeSet ns;
  ns.n = n;
  for (const auto& seg : E) {
    auto grid = detail::cut_grid(seg.lo, seg.hi, grid_factor * n);
    std::vector<std::pair<BigReal, BigReal>> val;
    val.reserve(grid.size());
    for (double x : grid) val.push_back(scan.parts(x));
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
      int g0 = detail::sgn(val[i].first), g1 = detail::sgn(val[i + 1].first);
      int d0 = detail::sgn(val[i].second), d1 = detail::sgn(val[i + 1].second);
      if (g0 * d0 == g1 * d1 || g0 == 0 || g1 == 0) continue;
      if (d0 != d1) {
        ++ns.pole_brackets;
        continue;
      }
      double a = grid[i], b = grid[i + 1];
      int sa = g0;
      while (b - a > 1e-12) {
        double m = (a + b) / 2;
        if (m <= a || m >= b) break;
        int sm = detail::sgn(scan.parts(m).first);
        if (sm == 0) {
          a = b = m;
          break;
        }
        if (sm == sa)
          a = m;
        else
          b = m;
      }
      double x = (a + b) / 2;
      ns.nodes.push_back(x);
      ns.check_minus.push_back(scan.error(x - 1e-10).convert_to<double>());
      ns.check_plus.push_back(scan.error(x + 1e-10).convert_to<double>());
    }
  }
  std::sort(ns.nodes.begin(), ns.nodes.end());
  ns.count = ns.nodes.size();
  ns.deficit = 2L * n - static_cast<long>(ns.count);
  return ns;
}

// ---------------------------------------------------------------------------
// Almost-Chebyshev alternation for f = ((z + 1)/(z - 1))^(1/3): extrema of
// w_n(x) (f_2 - H_{n,1})(x), w_n(x) = e^{2n G_F^{eta_E}(x)} (3/2) ((1 - x)/(1 + x))^(1/3),
// between consecutive interpolation nodes.

struct AlternationReport {
  int n = 0;
  double theta = 0;
  long required = 0;  // floor(2n(1 - theta))
  std::vector<double> x, weighted;  // extrema and weighted values, increasing x
  std::size_t run_begin = 0, run_length = 0;  // longest alternating run
  double central_min = 0, central_max = 0;    // |weighted| over |x| < 1/2
  NodeSet nodes;
};

// G_F^{eta_E}(x) on (-1, 1).
inline double green_potential_gap_on_cut(const DensityRef& eta_E, double x) {
  double sx = detail::gap_map(x);
  return eta_E.integrate(
      [&](const DensityPoint& p) {
        double d = std::isnan(p.offset) ? p.x - x : p.offset;
        double st = detail::gap_map(p.x);
        return std::log(std::abs(1 - st * sx)) -
               detail::log_map_gap(detail::gap_map, detail::gap_map_derivative, p.x, x, d);
      },
      -std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(), {x});
}

inline AlternationReport alternation_check(const HermiteApproximants& H, const Germ& f, int n, double theta) {
  if (!(theta > 0 && theta < 1)) throw std::invalid_argument("theta must lie in (0, 1)");
  auto sb = second_branch(f);
  auto cs = cut_system(f);
  {
    PrecisionScope s({30});
    if (abs(sb.alpha - BigReal(1) / 3) > eps_digits(10) || cs.E.size() != 1 || cs.E[0].lo != -1 || cs.E[0].hi != 1)
      throw std::invalid_argument("the weighted alternation is stated for exponent 1/3 on [-1, 1]");
  }
  AlternationReport rep;
  rep.n = n;
  rep.theta = theta;
  rep.required = static_cast<long>(std::floor(2 * n * (1 - theta)));
  rep.nodes = interpolation_nodes(H, f, cs.E, n);
  if (rep.nodes.count < 3) throw std::runtime_error("fewer than 2 extrema");
  auto eta = paper_densities(BigReal(1) / 3).eta_E;
  PrecisionScope scope(Precision{poly_digits(H.den)});
  auto target = second_branch_target(f, H.convention);
  detail::NodeScanner scan{H, target};
  auto weighted = [&](double x) {
    BigReal e = scan.error(x);
    if (e == 0) return 0.0;
    double lg = log(abs(e)).convert_to<double>() + 2 * n * green_potential_gap_on_cut(eta, x) +
                std::log(1.5) + std::log((1 - x) / (1 + x)) / 3;
    return (e > 0 ? 1.0 : -1.0) * std::exp(lg);
  };
  const auto& nd = rep.nodes.nodes;
  for (std::size_t i = 0; i + 1 < nd.size(); ++i) {
    double a = nd[i], b = nd[i + 1];
    // coarse scan then golden-section refinement of |weighted|
    const int coarse = 8;
    double best_x = a, best_v = 0;
    for (int k = 1; k < coarse; ++k) {
      double x = a + (b - a) * k / coarse;
      double v = std::abs(weighted(x));
      if (v > best_v) best_v = v, best_x = x;
    }
    double lo = std::max(a, best_x - (b - a) / coarse), hi = std::min(b, best_x + (b - a) / coarse);
    const double gr = (std::sqrt(5.0) - 1) / 2;
    double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
    double fc = std::abs(weighted(c)), fd = std::abs(weighted(d));
    for (int it = 0; it < 30; ++it) {
      if (fc > fd) {
        hi = d, d = c, fd = fc;
        c = hi - gr * (hi - lo);
        fc = std::abs(weighted(c));
      } else {
        lo = c, c = d, fc = fd;
        d = lo + gr * (hi - lo);
        fd = std::abs(weighted(d));
      }
    }
    double x = (lo + hi) / 2;
    rep.x.push_back(x);
    rep.weighted.push_back(weighted(x));
  }
  std::size_t start = 0;
  for (std::size_t i = 1; i <= rep.weighted.size(); ++i) {
    bool breaks = i == rep.weighted.size() || rep.weighted[i] * rep.weighted[i - 1] >= 0;
    if (breaks) {
      if (i - start > rep.run_length) rep.run_begin = start, rep.run_length = i - start;
      start = i;
    }
  }
  rep.central_min = std::numeric_limits<double>::infinity();
  rep.central_max = 0;
  for (std::size_t i = 0; i < rep.x.size(); ++i)
    if (std::abs(rep.x[i]) < 0.5) {
      rep.central_min = std::min(rep.central_min, std::abs(rep.weighted[i]));
      rep.central_max = std::max(rep.central_max, std::abs(rep.weighted[i]));
    }
  return rep;
}

// ---------------------------------------------------------------------------
// Convergence-rate maps.

enum class Predictor { none, stahl_gE, theorem1_GF, buslaev_green };

struct RatePredictor {
  Predictor kind = Predictor::none;
  std::vector<Segment> E;            // cuts (stahl_gE), condenser plate (theorem1_GF), surrogate segment (buslaev_green)
  std::complex<double> pole = 0.0;   // buslaev_green
};

struct RatePoint {
  std::complex<double> z;
  double observed = std::numeric_limits<double>::quiet_NaN();     // |error(n_max)|^(1/n_max)
  double cross_check = std::numeric_limits<double>::quiet_NaN();  // same at the second largest n
  double predicted = std::numeric_limits<double>::quiet_NaN();
  double ratio = std::numeric_limits<double>::quiet_NaN();        // observed / predicted
  bool dropped = false;
  std::string note;
};

struct RateMap {
  std::vector<int> n;
  Predictor predictor = Predictor::none;
  std::vector<RatePoint> points;
};

// |error| of the approximant of order n at z.
using ErrorFn = std::function<BigReal(int, const BigComplex&)>;

inline double predicted_rate(const RatePredictor& p, std::complex<double> z) {
  switch (p.kind) {
    case Predictor::none:
      return std::numeric_limits<double>::quiet_NaN();
    case Predictor::stahl_gE: {
      auto eq = equilibrium_intervals(p.E);
      return std::exp(-2 * eq.green(z));
    }
    case Predictor::theorem1_GF: {
      if (p.E.size() != 1) throw std::invalid_argument("theorem-1 predictor needs a single plate");
      Condenser c{p.E[0]};
      std::complex<double> u(c.to_unit(z.real()), z.imag() * c.unit_scale());
      if (u.imag() == 0) throw std::domain_error("theorem-1 predictor needs z off the real axis");
      auto eta = paper_densities(BigReal(1) / 3).eta_E;
      return std::exp(-2 * green_potential_gap(eta, u));
    }
    case Predictor::buslaev_green: {
      if (p.E.size() != 1) throw std::invalid_argument("two-point surrogate needs a single segment");
      Condenser c{p.E[0]};
      auto unit = [&](std::complex<double> w) {
        return std::complex<double>(c.to_unit(w.real()), w.imag() * c.unit_scale());
      };
      auto w = unit(p.pole);
      if (w.imag() == 0 && std::abs(w.real()) <= 1) throw std::invalid_argument("pole lies on the segment");
      return std::exp(-green_segment(unit(z), w));
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

inline RateMap rate_map(const ErrorFn& error, std::vector<int> n_list, const std::vector<std::complex<double>>& grid,
                        const RatePredictor& pred) {
  if (n_list.size() < 2) throw std::invalid_argument("rate map needs at least two orders");
  std::sort(n_list.begin(), n_list.end());
  RateMap map;
  map.n = n_list;
  map.predictor = pred.kind;
  const int nmax = n_list.back(), nsec = n_list[n_list.size() - 2];
  for (auto z : grid) {
    RatePoint p;
    p.z = z;
    BigComplex bz(z.real(), z.imag());
    BigReal e1 = error(nmax, bz), e2 = error(nsec, bz);
    if (e1 == 0 || e2 == 0) {
      p.dropped = true;
      p.note = "error underflows the working precision";
    } else {
      p.observed = std::exp(log(e1).convert_to<double>() / nmax);
      p.cross_check = std::exp(log(e2).convert_to<double>() / nsec);
    }
    if (pred.kind != Predictor::none) {
      try {
        p.predicted = predicted_rate(pred, z);
        if (!p.dropped) p.ratio = p.observed / p.predicted;
      } catch (const std::domain_error& ex) {
        p.note = ex.what();
      }
    }
    map.points.push_back(p);
  }
  return map;
}

// ---------------------------------------------------------------------------
// Orthogonality residuals on the cuts.
//   pade: int_E P_{n,1}(x) x^k Df(x) dx, k = 0..n-1
//   hp:   int_E Q_{n,2}(x) P_{n+k,1}(x) f~(x) Df(x) dx, k = 1..n
// each normalized by the integral of the absolute integrand.

enum class Orthogonality { pade_eq65, hp_eq69 };

struct OrthogonalityReport {
  std::vector<int> k;
  std::vector<double> residual;
  unsigned digits = 0;
};

namespace detail {

// Integrals of several integrands sharing one set of quadrature nodes:
// signed values and their absolute values. Convergence is judged on the
// total, which the absolute parts dominate.
struct Moments {
  std::vector<BigComplex> value;
  std::vector<BigReal> mag;

  Moments() = default;
  explicit Moments(int) {}

  Moments& operator+=(const Moments& o) {
    if (value.empty()) {
      value.resize(o.value.size());
      mag.resize(o.mag.size());
    }
    for (std::size_t i = 0; i < o.value.size(); ++i) value[i] += o.value[i];
    for (std::size_t i = 0; i < o.mag.size(); ++i) mag[i] += o.mag[i];
    return *this;
  }
  friend Moments operator*(const BigReal& s, Moments m) {
    for (auto& x : m.value) x *= s;
    for (auto& x : m.mag) x *= s;
    return m;
  }
  friend Moments operator*(Moments m, const BigReal& s) { return s * std::move(m); }
  friend Moments operator-(Moments a, const Moments& b) {
    Moments nb = BigReal(-1) * b;
    return a += nb;
  }
  friend BigReal abs(const Moments& m) {
    BigReal t = 0;
    for (const auto& x : m.value) t += abs(x);
    for (const auto& x : m.mag) t += abs(x);
    return t;
  }
};

// f+ - f- and f+ + f- at x in (lo, hi) with exact distances to the ends.
inline std::pair<BigComplex, BigComplex> jump_and_sum(const ProductValues& v, const BigReal& x, const BigReal& lo,
                                                      const BigReal& hi, const BigReal& dlo, const BigReal& dhi) {
  BigReal lg = 0;
  for (std::size_t j = 0; j < v.a.size(); ++j) {
    BigReal a = v.a[j].real();
    BigReal d = a == lo ? dlo : (a == hi ? dhi : abs(x - a));
    lg += v.alpha[j].real() * log(d);
  }
  BigReal th = pi_value() * real_phase_sum(v, x).real();
  BigComplex m = v.scale * BigComplex(exp(lg));
  return {m * BigComplex(BigReal(0), 2 * sin(th)), m * BigComplex(2 * cos(th))};
}

}  // namespace detail

inline OrthogonalityReport orthogonality_residual(const Poly& p, const Germ& g, const std::vector<int>& ks,
                                                  Orthogonality which, const std::vector<Poly>& aux = {},
                                                  unsigned digits = 0) {
  if (!is_real_subclass(g)) throw std::invalid_argument("orthogonality needs a real-subclass germ");
  if (which == Orthogonality::hp_eq69 && aux.size() != ks.size())
    throw std::invalid_argument("one auxiliary Padé denominator per k is required");
  if (digits == 0) digits = poly_digits(p);
  PrecisionScope scope(Precision{digits});
  auto cs = cut_system(g);
  auto v = detail::materialize(g.single_product(), g.terms[0].weight);
  TanhSinh<BigReal> rule(10);
  BigReal tol = pow10(-static_cast<long>(digits) / 3 - 5);
  std::vector<BigComplex> total(ks.size());
  std::vector<BigReal> scale(ks.size());
  for (const auto& seg : cs.E) {
    BigReal lo(seg.lo), hi(seg.hi);
    auto integrand = [&](const BigReal& x, const BigReal& da, const BigReal& db) {
      auto [jump, sum] = detail::jump_and_sum(v, x, lo, hi, da, db);
      BigComplex common = p.eval_real(x) * jump;
      if (which == Orthogonality::hp_eq69) common *= sum;
      detail::Moments m;
      m.value.reserve(ks.size());
      for (std::size_t i = 0; i < ks.size(); ++i) {
        BigComplex t = which == Orthogonality::pade_eq65 ? common * pow_int(BigComplex(x), ks[i])
                                                         : common * aux[i].eval_real(x);
        m.mag.push_back(abs(t));
        m.value.push_back(std::move(t));
      }
      return m;
    };
    auto r = rule.integrate(integrand, lo, hi, tol).value;
    for (std::size_t i = 0; i < ks.size(); ++i) {
      total[i] += r.value[i];
      scale[i] += r.mag[i];
    }
  }
  OrthogonalityReport rep;
  rep.digits = digits;
  rep.k = ks;
  for (std::size_t i = 0; i < ks.size(); ++i)
    rep.residual.push_back(scale[i] == 0 ? 0.0 : (abs(total[i]) / scale[i]).convert_to<double>());
  return rep;
}

// ---------------------------------------------------------------------------
// Strong asymptotics of P_n^{(-alpha, alpha)} off [-1, 1]:
//   ((z-1)/(z+1))^{alpha/2} (z + (z^2-1)^{1/2})^{n+1/2} / (z^2-1)^{1/4} (1 + O(1/n)).
// The right side carries no normalization constant; it is compared with the
// polynomial divided by its leading coefficient binom(2n, n)/2^n and the right
// side divided by 2^{n+1/2}, both asymptotic to z^n at infinity.

struct JacobiAsymptoticsRow {
  int n = 0;
  BigComplex ratio;
  double deviation = 0;  // |ratio - 1|
  double imag_oracle = 0, imag_rhs = 0;  // |Im| at real z, relative
};

inline BigComplex jacobi_asymptotic_rhs(int n, const BigReal& alpha, const BigComplex& z) {
  BigComplex zm = z - BigComplex(1), zp = z + BigComplex(1);
  BigComplex root = sqrt(zm) * sqrt(zp);
  BigComplex phi = z + root;
  BigComplex half(BigReal(1) / 2), quarter(BigReal(1) / 4);
  return pow(zm / zp, BigComplex(alpha / 2)) * pow(phi, BigComplex(BigReal(n) + BigReal(1) / 2)) /
         pow(zm * zp, quarter);
}

inline std::vector<JacobiAsymptoticsRow> jacobi_asymptotics_check(const std::vector<int>& n_list, const BigReal& alpha,
                                                                  const BigComplex& z, unsigned digits = 60) {
  std::vector<JacobiAsymptoticsRow> rows;
  for (int n : n_list) {
    PrecisionScope scope(Precision{digits + static_cast<unsigned>(n)});
    if (z.imag() == 0 && abs(z.real()) <= 1) throw std::domain_error("z on [-1, 1]");
    Poly P = jacobi_oracle(n, alpha);
    BigComplex pz = P(z);
    BigReal kn = 1;  // binom(2n, n) / 2^n
    for (int j = 1; j <= n; ++j) kn = kn * BigReal(n + j) / BigReal(2 * j);
    BigComplex rhs = jacobi_asymptotic_rhs(n, alpha, z);
    BigReal scale = pow(BigReal(2), BigReal(n) + BigReal(1) / 2);
    JacobiAsymptoticsRow r;
    r.n = n;
    r.ratio = (pz / BigComplex(kn)) / (rhs / BigComplex(scale));
    r.deviation = abs(r.ratio - BigComplex(1)).convert_to<double>();
    if (z.imag() == 0) {
      r.imag_oracle = (abs(pz.imag()) / abs(pz)).convert_to<double>();
      r.imag_rhs = (abs(rhs.imag()) / abs(rhs)).convert_to<double>();
    }
    rows.push_back(r);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Uniform convergence off small disks around spurious points.

// sup of err over points farther than eps from every center; empty when no
// point survives.
inline std::optional<double> sup_outside_disks(const std::vector<std::complex<double>>& K, const std::vector<double>& err,
                                               const std::vector<std::complex<double>>& centers, double eps) {
  std::optional<double> sup;
  for (std::size_t i = 0; i < K.size(); ++i) {
    bool excluded = std::any_of(centers.begin(), centers.end(), [&](auto c) { return std::abs(K[i] - c) < eps; });
    if (excluded) continue;
    sup = std::max(sup.value_or(0.0), err[i]);
  }
  return sup;
}

struct UniformCheckRow {
  int n = 0;
  std::optional<double> sup_error;  // empty: every point excluded
  std::size_t used = 0, excluded = 0;
  std::vector<std::complex<double>> spurious;  // Froissart poles
};

inline std::vector<UniformCheckRow> nuttall_uniform_check(const Germ& f, const std::vector<int>& n_list,
                                                          const std::vector<std::complex<double>>& K, double eps,
                                                          const LimitSet& limit, double doublet_radius = 1e-3,
                                                          double margin = 0.05) {
  std::vector<UniformCheckRow> rows;
  for (int n : n_list) {
    auto pp = pade_from_germ(f, n);
    PrecisionScope scope(Precision{pp.cert.digits});
    UniformCheckRow row;
    row.n = n;
    std::vector<std::complex<double>> zeros, poles;
    if (pp.p0.degree() >= 1) zeros = find_roots(pp.p0).as_cdouble();
    if (pp.p1.degree() >= 1) poles = find_roots(pp.p1).as_cdouble();
    for (const auto& d : froissart_pairs(zeros, poles, doublet_radius, limit, margin)) row.spurious.push_back(poles[d.pole]);
    std::vector<double> err;
    for (auto z : K) {
      BigComplex bz(z.real(), z.imag());
      err.push_back(abs(eval_germ(f, bz) - pade_eval(pp, bz)).convert_to<double>());
    }
    row.sup_error = sup_outside_disks(K, err, row.spurious, eps);
    for (auto z : K) {
      bool ex = std::any_of(row.spurious.begin(), row.spurious.end(), [&](auto c) { return std::abs(z - c) < eps; });
      (ex ? row.excluded : row.used)++;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

// max over a in A (outside the eps-disks) of the distance from a to B.
inline std::optional<double> one_sided_hausdorff(const std::vector<std::complex<double>>& A,
                                                 const std::vector<std::complex<double>>& B,
                                                 const std::vector<std::complex<double>>& centers, double eps) {
  std::optional<double> worst;
  for (auto a : A) {
    if (std::any_of(centers.begin(), centers.end(), [&](auto c) { return std::abs(a - c) < eps; })) continue;
    double best = std::numeric_limits<double>::infinity();
    for (auto b : B) best = std::min(best, std::abs(a - b));
    worst = std::max(worst.value_or(0.0), best);
  }
  return worst;
}

}  // namespace hplab
