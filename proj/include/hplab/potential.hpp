#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "hplab/arith.hpp"
#include "hplab/density.hpp"
#include "hplab/germ.hpp"
#include "hplab/quadrature.hpp"

namespace hplab {

namespace detail {

constexpr double kPi = 3.14159265358979323846;

inline double dens_tol() { return 1e-13; }

// Small dense solve with partial pivoting.
inline std::vector<double> solve_dense(std::vector<std::vector<double>> m, std::vector<double> rhs) {
  const std::size_t n = rhs.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
    if (m[piv][c] == 0) throw std::runtime_error("singular gap system");
    std::swap(m[piv], m[c]);
    std::swap(rhs[piv], rhs[c]);
    for (std::size_t r = c + 1; r < n; ++r) {
      double f = m[r][c] / m[c][c];
      for (std::size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
      rhs[r] -= f * rhs[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t c = n; c-- > 0;) {
    double s = rhs[c];
    for (std::size_t k = c + 1; k < n; ++k) s -= m[c][k] * x[k];
    x[c] = s / m[c][c];
  }
  return x;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Equilibrium measure of a finite union of real segments.

struct EquilibriumIntervals {
  std::vector<Segment> E;
  std::vector<double> p;  // P_{q-1}, ascending coefficients
  DensityRef lambda;
  double robin = 0;  // gamma_E = V^lambda on E

  // Logarithmic potential V^lambda(z) = -int log|z - t| dlambda(t).
  // The integration is split at Re z, which keeps it accurate for z on or near E.
  double potential(std::complex<double> z) const {
    double x = z.real(), y = z.imag();
    return lambda.integrate(
        [x, y](const DensityPoint& q) {
          double d = std::isnan(q.offset) ? q.x - x : q.offset;
          return y == 0 ? -std::log(std::abs(d)) : -0.5 * std::log(d * d + y * y);
        },
        -std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(), {x});
  }
  // g_E(z, infinity).
  double green(std::complex<double> z) const { return robin - potential(z); }
};

inline EquilibriumIntervals equilibrium_intervals(std::vector<Segment> E) {
  if (E.empty()) throw std::invalid_argument("no segments");
  std::sort(E.begin(), E.end(), [](const Segment& a, const Segment& b) { return a.lo < b.lo; });
  for (std::size_t i = 0; i < E.size(); ++i) {
    if (!(E[i].lo < E[i].hi)) throw std::invalid_argument("empty segment");
    if (i > 0 && E[i].lo <= E[i - 1].hi) throw std::invalid_argument("segments overlap");
  }
  const std::size_t q = E.size();
  std::vector<double> ends;
  for (const auto& s : E) {
    ends.push_back(s.lo);
    ends.push_back(s.hi);
  }
  // 1/sqrt|prod (x - e_j)|, with the two ends of the current interval given as distances.
  auto inv_root = [ends](double x, std::size_t skip, double d1, double d2) {
    double r = std::sqrt(d1 * d2);
    for (std::size_t j = 0; j < ends.size(); ++j)
      if (j != skip && j != skip + 1) r *= std::sqrt(std::abs(x - ends[j]));
    return 1 / r;
  };
  static const TanhSinh<double> rule(8);
  // Gap conditions, with the leading coefficient fixed to 1.
  std::vector<double> p(q, 0.0);
  p[q - 1] = 1;
  if (q > 1) {
    std::vector<std::vector<double>> m(q - 1, std::vector<double>(q - 1));
    std::vector<double> rhs(q - 1);
    for (std::size_t g = 0; g + 1 < q; ++g) {
      std::size_t skip = 2 * g + 1;  // gap (e_{2g+1}, e_{2g+2}), zero-based
      for (std::size_t k = 0; k < q; ++k) {
        auto f = [&](double x, double da, double db) { return std::pow(x, static_cast<double>(k)) * inv_root(x, skip, da, db); };
        double v = rule.integrate(f, ends[skip], ends[skip + 1], detail::dens_tol()).value;
        if (k + 1 < q)
          m[g][k] = v;
        else
          rhs[g] = -v;
      }
    }
    auto c = detail::solve_dense(m, rhs);
    for (std::size_t k = 0; k + 1 < q; ++k) p[k] = c[k];
  }
  auto poly = [](const std::vector<double>& c, double x) {
    double s = 0;
    for (std::size_t k = c.size(); k-- > 0;) s = s * x + c[k];
    return s;
  };
  std::vector<Interval> support;
  for (const auto& s : E) support.push_back({s.lo, s.hi});
  auto make = [&](const std::vector<double>& c) {
    return DensityRef(
        support,
        [c, inv_root, poly](const DensityPoint& d) {
          return std::abs(poly(c, d.x)) * inv_root(d.x, 2 * d.interval, d.dlo, d.dhi) / detail::kPi;
        },
        "equilibrium");
  };
  double mass = make(p).mass();
  for (auto& c : p) c /= mass;
  EquilibriumIntervals eq{E, p, make(p), 0};
  eq.robin = eq.potential({(E[0].lo + E[0].hi) / 2, 0});
  return eq;
}

// ---------------------------------------------------------------------------
// Closed-form Green functions for [-1, 1] and for the complement of R \ (-1, 1).

// Exterior conformal map of [-1, 1], |joukowski_inverse(u)| > 1 off the segment.
inline std::complex<double> joukowski_inverse(std::complex<double> u) {
  return u + std::sqrt(u - 1.0) * std::sqrt(u + 1.0);
}

// g_E(u, w) for E = [-1, 1], w finite.
inline double green_segment(std::complex<double> u, std::complex<double> w) {
  std::complex<double> s = 1.0 / joukowski_inverse(u), b = 1.0 / joukowski_inverse(w);
  return std::log(std::abs(1.0 - std::conj(b) * s)) - std::log(std::abs(s - b));
}
inline double green_segment_infinity(std::complex<double> u) { return std::log(std::abs(joukowski_inverse(u))); }

// g_F(t, z) for the domain C \ F, F = R \ (-1, 1), via t -> 1/t.
inline double green_gap(std::complex<double> t, std::complex<double> z) {
  auto inv = [](std::complex<double> x) {
    return x == 0.0 ? std::complex<double>(std::numeric_limits<double>::infinity(), 0) : 1.0 / x;
  };
  std::complex<double> u = inv(t), w = inv(z);
  std::complex<double> s = std::isinf(u.real()) ? 0.0 : 1.0 / joukowski_inverse(u);
  std::complex<double> b = std::isinf(w.real()) ? 0.0 : 1.0 / joukowski_inverse(w);
  return std::log(std::abs(1.0 - std::conj(b) * s)) - std::log(std::abs(s - b));
}

// ---------------------------------------------------------------------------
// The explicit measures eta_E on (-1, 1) and eta_F on the closure of R \ [-1, 1].

struct PaperDensities {
  DensityRef eta_E, eta_F;
};

inline PaperDensities paper_densities(const BigReal& alpha) {
  BigReal two_a = 2 * alpha;
  if (abs(two_a - round(two_a)) < eps_digits(10)) throw std::invalid_argument("2 alpha must not be an integer");
  const double c = std::sqrt(3.0) / (2 * detail::kPi);
  DensityRef e({{-1, 1}}, [c](const DensityPoint& p) {
    // 1 - x = dhi, 1 + x = dlo
    return c / 2 * std::cbrt(1 / (p.dlo * p.dhi)) * (1 / std::cbrt(p.dhi) + 1 / std::cbrt(p.dlo));
  }, "eta_E");
  const double inf = std::numeric_limits<double>::infinity();
  DensityRef f({{-inf, -1}, {1, inf}}, [c](const DensityPoint& p) {
    double am1 = p.interval == 0 ? p.dhi : p.dlo;  // |x| - 1
    double ap1 = std::abs(p.x) + 1;
    return c * std::cbrt(1 / (am1 * ap1)) * (1 / std::cbrt(am1) - 1 / std::cbrt(ap1));
  }, "eta_F");
  return {e, f};
}

// ---------------------------------------------------------------------------
// Equilibrium identities of the Nuttall condenser (E, F) with E a segment.
//   E side: 3 V^{eta_E}(x) + G_F^{eta_E}(x) = const on E
//   F side: 3 V_*^{eta_F}(y) + G_E^{eta_F}(y) + 3 g_E(y, inf) = const on F
// where V_*^mu(y) = -int log|1 - y/t| dmu(t).

struct Condenser {
  Segment E{-1, 1};
  double to_unit(double x) const { return (2 * x - E.lo - E.hi) / (E.hi - E.lo); }
  double from_unit(double u) const { return (E.lo + E.hi) / 2 + u * (E.hi - E.lo) / 2; }
  double unit_scale() const { return 2 / (E.hi - E.lo); }
};

struct IdentityResidual {
  std::vector<double> grid, values;
  double spread = 0;  // max - min
};

struct EquilibriumResidual {
  IdentityResidual e_side, f_side;
};

namespace detail {

// x -> 1/Phi(1/x) on (-1, 1) and its derivative.
inline double gap_map(double x) { return x / (1 + std::sqrt((1 - x) * (1 + x))); }
inline double gap_map_derivative(double x) {
  double s = gap_map(x);
  return (1 + s * s) / (2 * std::sqrt((1 - x) * (1 + x)));
}
// y -> 1/Phi(y) for |y| > 1 and its derivative.
inline double ext_map(double y) {
  double r = std::sqrt((std::abs(y) - 1) * (std::abs(y) + 1));
  return 1 / (y + std::copysign(r, y));
}
inline double ext_map_derivative(double y) {
  return -std::abs(ext_map(y)) / std::sqrt((std::abs(y) - 1) * (std::abs(y) + 1));
}

// log|s(t) - s(x)| given d = t - x exactly.
template <class Map, class Deriv>
double log_map_gap(Map s, Deriv ds, double t, double x, double d) {
  if (std::abs(d) < 1e-7) return std::log(std::abs(d)) + std::log(std::abs(ds(x)));
  return std::log(std::abs(s(t) - s(x)));
}

inline void finish(IdentityResidual& r) {
  auto [mn, mx] = std::minmax_element(r.values.begin(), r.values.end());
  r.spread = *mx - *mn;
}

}  // namespace detail

inline double identity_e_side(const Condenser& c, const DensityRef& eta_E, double x) {
  const double k = c.unit_scale(), u = c.to_unit(x);
  return eta_E.integrate(
      [&](const DensityPoint& p) {
        double d = (std::isnan(p.offset) ? p.x - x : p.offset) * k;
        double t = c.to_unit(p.x);
        double st = detail::gap_map(t), sx = detail::gap_map(u);
        double g = std::log(std::abs(1 - st * sx)) -
                   detail::log_map_gap(detail::gap_map, detail::gap_map_derivative, t, u, d);
        return -3 * std::log(std::abs(d)) + g;
      },
      -std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(), {x});
}

inline double identity_f_side(const Condenser& c, const DensityRef& eta_F, double y) {
  const double k = c.unit_scale(), v = c.to_unit(y);
  double val = eta_F.integrate(
      [&](const DensityPoint& p) {
        double d = (std::isnan(p.offset) ? p.x - y : p.offset) * k;
        double t = c.to_unit(p.x);
        double vstar = std::abs(v / t) < 0.5 ? -std::log1p(-v / t) : -std::log(std::abs(d)) + std::log(std::abs(t));
        double st = detail::ext_map(t), sy = detail::ext_map(v);
        double g = std::log(std::abs(1 - st * sy)) -
                   detail::log_map_gap(detail::ext_map, detail::ext_map_derivative, t, v, d);
        return 3 * vstar + g;
      },
      -std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(), {y});
  return val + 3 * green_segment_infinity(v);
}

// Left sides of both identities on grids of (-0.99, 0.99) and [1.01, 10]
// (unit coordinates of the condenser), with their max - min spreads.
inline EquilibriumResidual equilibrium_residual(const Condenser& c, const DensityRef& eta_E, const DensityRef& eta_F,
                                                int e_points = 100, int f_points = 100) {
  if (!(c.E.lo < c.E.hi)) throw std::invalid_argument("empty plate");
  EquilibriumResidual r;
  for (int i = 0; i < e_points; ++i) {
    double u = -0.99 + 1.98 * i / std::max(1, e_points - 1);
    double x = c.from_unit(u);
    r.e_side.grid.push_back(x);
    r.e_side.values.push_back(identity_e_side(c, eta_E, x));
  }
  for (int i = 0; i < f_points; ++i) {
    double u = 1.01 + 8.99 * i / std::max(1, f_points - 1);
    double y = c.from_unit(u);
    r.f_side.grid.push_back(y);
    r.f_side.values.push_back(identity_f_side(c, eta_F, y));
  }
  detail::finish(r.e_side);
  detail::finish(r.f_side);
  return r;
}

// G_F^mu(z) = int g_F(t, z) dmu(t) for z off the real axis.
inline double green_potential_gap(const DensityRef& mu, std::complex<double> z) {
  if (z.imag() == 0) throw std::domain_error("z must be off the real axis");
  return mu.integrate([z](const DensityPoint& p) { return green_gap(p.x, z); });
}

// ---------------------------------------------------------------------------
// Chebotarev point of three branch points: the zero v of the quadratic
// differential -(z - v)/A(z) dz^2 for which the periods of
// int sqrt((z - v)/A(z)) dz between branch points are purely imaginary.

struct ChebotarevResult {
  BigComplex v;
  BigReal residual;  // max |Re period|
  int iterations = 0;
  unsigned digits = 0;
};

namespace detail {

// Integral of sqrt((z - v)/A(z)) (or its v-derivative) from a[j] to a[k]
// along the straight segment, detouring around v on a semicircle when v is
// within 1e-2 of it. The square root is continued along the path.
struct PeriodPath {
  struct Piece {
    bool arc = false;
    BigComplex from, to;          // straight piece
    int from_branch = -1, to_branch = -1;
    BigComplex center;            // arc piece
    BigReal radius, th0, th1;
  };
  std::vector<Piece> pieces;
  BigComplex ref;
};

inline PeriodPath period_path(const std::array<BigComplex, 3>& a, const BigComplex& v, int j, int k) {
  PeriodPath path;
  BigComplex d = a[k] - a[j];
  BigReal len = abs(d);
  BigComplex u = d / BigComplex(len);
  BigReal s = ((v - a[j]) * conj(u)).real();  // projection
  BigComplex foot = a[j] + u * s;
  BigReal dist = abs(v - foot);
  const BigReal near("1e-2"), rho("2e-2");
  if (dist < near && s > -near && s < len + near) {
    if (s < 2 * rho || s > len - 2 * rho) throw std::domain_error("Chebotarev candidate too close to a branch point");
    // side of the line holding v (or the third point when v is on the line)
    int m = 3 - j - k;
    BigReal side = ((v - foot) * conj(u)).imag();
    if (side == 0) side = ((a[m] - foot) * conj(u)).imag();
    BigReal sign = side > 0 ? BigReal(-1) : BigReal(1);  // bulge away
    BigReal base = arg(u);
    PeriodPath::Piece p1, arc, p2;
    p1.from = a[j];
    p1.to = foot - u * BigComplex(rho);
    p1.from_branch = j;
    arc.arc = true;
    arc.center = foot;
    arc.radius = rho;
    arc.th0 = base + pi_value();
    arc.th1 = base + pi_value() - sign * pi_value();
    p2.from = foot + u * BigComplex(rho);
    p2.to = a[k];
    p2.to_branch = k;
    path.pieces = {p1, arc, p2};
    path.ref = foot + polar(rho, base + pi_value() - sign * pi_value() / 2);
  } else {
    PeriodPath::Piece p;
    p.from = a[j];
    p.to = a[k];
    p.from_branch = j;
    p.to_branch = k;
    path.pieces = {p};
    path.ref = (a[j] + a[k]) / BigComplex(2);
  }
  return path;
}

// sqrt(w) continued from the reference difference wref.
inline BigComplex tracked_sqrt(const BigComplex& w, const BigComplex& wref, const BigReal& th_ref) {
  BigReal th = th_ref + arg(w / wref);
  return polar(sqrt(abs(w)), th / 2);
}

struct PeriodValues {
  BigComplex period, derivative;
};

inline PeriodValues period_integral(const std::array<BigComplex, 3>& a, const BigComplex& v, int j, int k,
                                    const TanhSinh<BigReal>& rule, const BigReal& tol) {
  PeriodPath path = period_path(a, v, j, k);
  std::array<BigComplex, 3> ref_d;
  std::array<BigReal, 3> ref_th;
  for (int i = 0; i < 3; ++i) {
    ref_d[i] = path.ref - a[i];
    ref_th[i] = arg(ref_d[i]);
  }
  BigComplex ref_v = path.ref - v;
  BigReal ref_vth = arg(ref_v);
  // integrand pair at z with exact differences z - a[i]
  auto integrand = [&](const BigComplex& z, const std::array<BigComplex, 3>& dz) {
    BigComplex den = tracked_sqrt(dz[0], ref_d[0], ref_th[0]) * tracked_sqrt(dz[1], ref_d[1], ref_th[1]) *
                     tracked_sqrt(dz[2], ref_d[2], ref_th[2]);
    BigComplex zv = z - v;
    BigComplex f = tracked_sqrt(zv, ref_v, ref_vth) / den;
    return std::array<BigComplex, 2>{f, f / (BigComplex(-2) * zv)};
  };
  PeriodValues out{BigComplex(0), BigComplex(0)};
  for (const auto& pc : path.pieces) {
    for (int which = 0; which < 2; ++which) {
      if (!pc.arc) {
        BigComplex d = pc.to - pc.from;
        BigReal len = abs(d);
        BigComplex u = d / BigComplex(len);
        auto f = [&](const BigReal& x, const BigReal& da, const BigReal& db) {
          BigComplex z = da <= db ? pc.from + u * da : pc.to - u * db;
          std::array<BigComplex, 3> dz;
          for (int i = 0; i < 3; ++i) {
            if (i == pc.from_branch)
              dz[i] = u * da;
            else if (i == pc.to_branch)
              dz[i] = u * (-db);
            else
              dz[i] = z - a[i];
          }
          (void)x;
          return integrand(z, dz)[which] * u;
        };
        auto r = rule.integrate(f, BigReal(0), len, tol);
        (which == 0 ? out.period : out.derivative) += r.value;
      } else {
        auto f = [&](const BigReal& th, const BigReal&, const BigReal&) {
          BigComplex e = polar(BigReal(1), th);
          BigComplex z = pc.center + e * pc.radius;
          std::array<BigComplex, 3> dz{z - a[0], z - a[1], z - a[2]};
          return integrand(z, dz)[which] * (BigComplex(BigReal(0), pc.radius) * e);
        };
        auto r = rule.integrate(f, pc.th0, pc.th1, tol);
        (which == 0 ? out.period : out.derivative) += r.value;
      }
    }
  }
  return out;
}

inline void check_triple(const std::array<BigComplex, 3>& a) {
  BigReal scale = abs(a[1] - a[0]) + abs(a[2] - a[0]);
  if (abs(a[1] - a[0]) == 0 || abs(a[2] - a[0]) == 0 || abs(a[2] - a[1]) == 0)
    throw std::invalid_argument("branch points must be distinct");
  if (abs(((a[1] - a[0]) * conj(a[2] - a[0])).imag()) <= BigReal("1e-12") * scale * scale)
    throw std::invalid_argument("collinear branch points");
}

}  // namespace detail

// Real parts of the periods from a[0] to a[1] and from a[0] to a[2].
inline std::array<BigReal, 2> chebotarev_period_residual(const std::array<BigComplex, 3>& a, const BigComplex& v,
                                                         unsigned digits, int max_level = 12) {
  PrecisionScope s({digits});
  TanhSinh<BigReal> rule(max_level);
  BigReal tol = pow10(-static_cast<long>(digits) + 5);
  return {detail::period_integral(a, v, 0, 1, rule, tol).period.real(),
          detail::period_integral(a, v, 0, 2, rule, tol).period.real()};
}

inline ChebotarevResult chebotarev_point(std::array<BigComplex, 3> a, unsigned digits = 100) {
  PrecisionScope s({digits});
  for (auto& x : a) x = with_digits(x, digits);
  detail::check_triple(a);
  TanhSinh<BigReal> rule(10);
  BigReal tol = pow10(-static_cast<long>(digits) + 5);
  BigReal target = pow10(-static_cast<long>(digits) / 3);
  BigReal scale = std::max({abs(a[1] - a[0]), abs(a[2] - a[0]), abs(a[2] - a[1])});
  BigComplex v = (a[0] + a[1] + a[2]) / BigComplex(3);
  ChebotarevResult res;
  res.digits = digits;
  for (int it = 0; it <= 50; ++it) {
    auto p1 = detail::period_integral(a, v, 0, 1, rule, tol);
    auto p2 = detail::period_integral(a, v, 0, 2, rule, tol);
    BigReal f1 = p1.period.real(), f2 = p2.period.real();
    res.v = v;
    res.iterations = it;
    res.residual = std::max(abs(f1), abs(f2));
    if (res.residual < target) return res;
    // d Re P / dx = Re P', d Re P / dy = -Im P'
    BigReal j11 = p1.derivative.real(), j12 = -p1.derivative.imag();
    BigReal j21 = p2.derivative.real(), j22 = -p2.derivative.imag();
    BigReal det = j11 * j22 - j12 * j21;
    if (det == 0) break;
    BigReal dx = -(j22 * f1 - j12 * f2) / det, dy = -(-j21 * f1 + j11 * f2) / det;
    BigComplex step(dx, dy);
    BigReal cap = scale / 4;
    if (abs(step) > cap) step *= cap / abs(step);
    v += step;
  }
  throw std::runtime_error("Chebotarev Newton iteration did not converge");
}

// ---------------------------------------------------------------------------
// Critical trajectories -(z - v)/A(z) dz^2 > 0 from each branch point to v.

struct StahlGeometry {
  std::array<std::complex<double>, 3> a;
  std::complex<double> v;
  std::array<std::vector<std::complex<double>>, 3> arcs;
  bool consistent = true;
  std::string note;
};

namespace detail {

inline std::complex<double> quad_ratio(const std::array<std::complex<double>, 3>& a, std::complex<double> v,
                                       std::complex<double> z) {
  return (z - v) / ((z - a[0]) * (z - a[1]) * (z - a[2]));
}

// Unit direction dz with q dz^2 < 0, oriented along prev.
inline std::complex<double> trajectory_direction(std::complex<double> q, std::complex<double> prev) {
  std::complex<double> d = std::sqrt(-std::conj(q) / std::abs(q));
  if ((d * std::conj(prev)).real() < 0) d = -d;
  return d;
}

}  // namespace detail

// The three arcs are traced from v outward along its critical directions and
// stored from a_j to v. Near a simple pole neighbouring trajectories turn
// around it, so outward tracing lands on a_j stably, while trajectories
// approaching the zero v separate.
inline StahlGeometry trace_stahl_arcs(const std::array<std::complex<double>, 3>& a, std::complex<double> v,
                                      double step = 1e-3, double stop = 1e-6) {
  StahlGeometry g{a, v, {}, true, {}};
  double rmax = 0;
  for (auto x : a) rmax = std::max(rmax, std::abs(x));
  const double escape = 10 * rmax;
  const double max_length = 20 * (std::abs(a[0] - a[1]) + std::abs(a[1] - a[2]) + std::abs(a[2] - a[0]));
  // q ~ c (z - v): the critical directions satisfy -c e^{3i phi} > 0.
  std::complex<double> c = 1.0 / ((v - a[0]) * (v - a[1]) * (v - a[2]));
  double base = std::arg(-std::conj(c));
  std::array<bool, 3> hit{false, false, false};
  auto field = [&](std::complex<double> w, std::complex<double> prev) {
    return detail::trajectory_direction(detail::quad_ratio(a, v, w), prev);
  };
  for (int k = 0; k < 3; ++k) {
    std::complex<double> dir = std::polar(1.0, (base + 2 * detail::kPi * k) / 3);
    std::vector<std::complex<double>> path{v};
    std::complex<double> z = v + stop * dir;
    path.push_back(z);
    int target = -1;
    double best = std::numeric_limits<double>::infinity();
    int rising = 0;
    double length = 0;
    for (;;) {
      if (length > max_length) {
        g.note = "critical trajectory " + std::to_string(k) + " does not reach a branch point";
        break;
      }
      double near_v = std::abs(z - v), near_a = std::numeric_limits<double>::infinity();
      int j = 0;
      for (int i = 0; i < 3; ++i)
        if (std::abs(z - a[i]) < near_a) near_a = std::abs(z - a[i]), j = i;
      if (near_a < stop) {
        target = j;
        break;
      }
      double h = std::min({step, near_v / 20, near_a / 20});
      auto k1 = field(z, dir);
      auto k2 = field(z + 0.5 * h * k1, k1);
      auto k3 = field(z + 0.5 * h * k2, k2);
      auto k4 = field(z + h * k3, k3);
      std::complex<double> dz = h / 6 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      dir = dz / std::abs(dz);
      z += dz;
      length += std::abs(dz);
      path.push_back(z);
      if (near_a < best) {
        best = near_a;
        rising = 0;
      } else if (best < 10 * step && ++rising > 50) {
        g.note = "critical trajectory " + std::to_string(k) + " misses the nearest branch point by " + std::to_string(best);
        break;
      }
      if (std::abs(z) > escape) {
        g.note = "critical trajectory " + std::to_string(k) + " escapes";
        break;
      }
    }
    if (target < 0 || hit[target]) {
      g.consistent = false;
      if (g.note.empty()) g.note = "critical trajectories do not end at distinct branch points";
      continue;
    }
    hit[target] = true;
    path.push_back(a[target]);
    g.arcs[target].assign(path.rbegin(), path.rend());
  }
  return g;
}

// Re int_{a_j}^{z} sqrt((t - v)/A(t)) dt at every vertex of arc j, accumulated
// along the polyline with the square root continued from vertex to vertex.
inline std::vector<double> abelian_real_part(const StahlGeometry& g, int j) {
  const auto& arc = g.arcs[j];
  std::vector<double> out{0.0};
  if (arc.size() < 2) return out;
  auto root = [&](std::complex<double> z, std::complex<double> prev) {
    std::complex<double> r = std::sqrt(detail::quad_ratio(g.a, g.v, z));
    if (std::abs(r + prev) < std::abs(r - prev)) r = -r;
    return r;
  };
  static const TanhSinh<double> rule(8);
  std::complex<double> total = 0;
  // First segment: (t - a_j)^{-1/2} singularity at the start.
  std::complex<double> d = arc[1] - arc[0];
  double len = std::abs(d);
  std::complex<double> u = d / len;
  // t - a_j = u s on the first segment
  std::complex<double> ref = std::sqrt((arc[1] - g.v) / ((arc[1] - g.a[0]) * (arc[1] - g.a[1]) * (arc[1] - g.a[2])));
  auto first = [&](double, double s, double) {
    std::complex<double> t = arc[0] + u * s;
    std::complex<double> rest = (t - g.v);
    for (int k = 0; k < 3; ++k)
      if (k != j) rest /= (t - g.a[k]);
    std::complex<double> r = std::sqrt(rest / (u * s));
    if (std::abs(r + ref) < std::abs(r - ref)) r = -r;
    return r * u;
  };
  auto re = rule.integrate([&](double x, double da, double db) { return first(x, da, db).real(); }, 0.0, len, 1e-12);
  auto im = rule.integrate([&](double x, double da, double db) { return first(x, da, db).imag(); }, 0.0, len, 1e-12);
  total += std::complex<double>(re.value, im.value);
  out.push_back(total.real());
  std::complex<double> prev = ref;
  // Remaining segments: three-point Gauss-Legendre.
  static const double gx[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
  static const double gw[3] = {5.0 / 9, 8.0 / 9, 5.0 / 9};
  for (std::size_t i = 1; i + 1 < arc.size(); ++i) {
    std::complex<double> p = arc[i], q = arc[i + 1];
    std::complex<double> half = (q - p) / 2.0, mid = (p + q) / 2.0, acc = 0;
    for (int m = 0; m < 3; ++m) {
      std::complex<double> r = root(mid + gx[m] * half, prev);
      acc += gw[m] * r;
      if (m == 2) prev = r;
    }
    total += acc * half;
    out.push_back(total.real());
  }
  return out;
}

}  // namespace hplab
