#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "hplab/arith.hpp"
#include "hplab/density.hpp"

namespace hplab {

using cplx = std::complex<double>;

struct ZeroSet {
  std::vector<BigComplex> roots;
  std::vector<BigReal> residual;    // |p(z)| / sum |a_k| |z|^k
  std::vector<BigReal> correction;  // size of the last Aberth step
  std::vector<bool> converged;
  int degree = 0;
  int sweeps = 0;
  unsigned digits = 0;
  bool ok = true;

  std::size_t size() const { return roots.size(); }
  std::vector<cplx> as_cdouble() const {
    std::vector<cplx> r;
    for (const auto& z : roots) r.push_back(z.to_cdouble());
    return r;
  }
};

struct RootOptions {
  int max_sweeps = 500;  // per precision stage
};

namespace detail {

inline double log_abs(const BigComplex& z) {
  return z.is_zero() ? -std::numeric_limits<double>::infinity() : log(abs(z)).convert_to<double>();
}

// Cauchy's bound: the positive root of |a_n| x^n = sum_{k<n} |a_k| x^k.
inline double cauchy_bound(const Poly& p) {
  int n = p.degree();
  std::vector<double> la(n + 1);
  for (int k = 0; k <= n; ++k) la[k] = log_abs(p[k]) - log_abs(p[n]);
  auto excess = [&](double lx) {  // log of sum_{k<n} |a_k/a_n| x^(k-n)
    double m = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < n; ++k) m = std::max(m, la[k] + (k - n) * lx);
    if (!std::isfinite(m)) return m;
    double s = 0;
    for (int k = 0; k < n; ++k) s += std::exp(la[k] + (k - n) * lx - m);
    return m + std::log(s);
  };
  double lo = -800, hi = 800;
  if (!std::isfinite(excess(lo))) return 1.0;
  for (int it = 0; it < 200; ++it) {
    double mid = (lo + hi) / 2;
    (excess(mid) > 0 ? lo : hi) = mid;
  }
  return std::exp(hi);
}

struct HornerPair {
  BigComplex p, dp;
  BigReal scale;  // sum |a_k| |z|^k
};

// p(z), p'(z) and sum |a_k| |z|^k in one pass, against MPFR directly.
inline HornerPair horner2(const std::vector<BigComplex>& a, const std::vector<BigReal>& abs_a,
                          const BigComplex& z) {
  BigReal pr = 0, pi = 0, dr = 0, di = 0, sc = 0, az = abs(z), t, u;
  auto* PR = pr.backend().data();
  auto* PI = pi.backend().data();
  auto* DR = dr.backend().data();
  auto* DI = di.backend().data();
  auto* T = t.backend().data();
  auto* U = u.backend().data();
  const auto* ZR = z.real().backend().data();
  const auto* ZI = z.imag().backend().data();
  for (std::size_t k = a.size(); k-- > 0;) {
    // d = d z + p
    mpfr_mul(T, DR, ZR, MPFR_RNDN);
    mpfr_fms(T, DI, ZI, T, MPFR_RNDN);  // di zi - dr zr
    mpfr_mul(U, DR, ZI, MPFR_RNDN);
    mpfr_fma(DI, DI, ZR, U, MPFR_RNDN);
    mpfr_sub(DR, PR, T, MPFR_RNDN);
    mpfr_add(DI, DI, PI, MPFR_RNDN);
    // p = p z + a_k
    mpfr_mul(T, PR, ZR, MPFR_RNDN);
    mpfr_fms(T, PI, ZI, T, MPFR_RNDN);
    mpfr_mul(U, PR, ZI, MPFR_RNDN);
    mpfr_fma(PI, PI, ZR, U, MPFR_RNDN);
    mpfr_sub(PR, a[k].real().backend().data(), T, MPFR_RNDN);
    mpfr_add(PI, PI, a[k].imag().backend().data(), MPFR_RNDN);
    mpfr_fma(sc.backend().data(), sc.backend().data(), az.backend().data(),
             abs_a[k].backend().data(), MPFR_RNDN);
  }
  return {{pr, pi}, {dr, di}, sc};
}

// sum_{j != i} 1/(z_i - z_j), written against MPFR directly to avoid
// temporaries in the O(n^2) part of each sweep.
inline BigComplex reciprocal_sum(const std::vector<BigComplex>& z, int i) {
  BigReal dr, di, nr, t, sr = 0, si = 0;
  auto* DR = dr.backend().data();
  auto* DI = di.backend().data();
  auto* NR = nr.backend().data();
  auto* T = t.backend().data();
  const auto* ZR = z[i].real().backend().data();
  const auto* ZI = z[i].imag().backend().data();
  for (std::size_t j = 0; j < z.size(); ++j) {
    if (static_cast<int>(j) == i) continue;
    mpfr_sub(DR, ZR, z[j].real().backend().data(), MPFR_RNDN);
    mpfr_sub(DI, ZI, z[j].imag().backend().data(), MPFR_RNDN);
    mpfr_sqr(NR, DR, MPFR_RNDN);
    mpfr_fma(NR, DI, DI, NR, MPFR_RNDN);
    mpfr_div(T, DR, NR, MPFR_RNDN);
    mpfr_add(sr.backend().data(), sr.backend().data(), T, MPFR_RNDN);
    mpfr_div(T, DI, NR, MPFR_RNDN);
    mpfr_sub(si.backend().data(), si.backend().data(), T, MPFR_RNDN);
  }
  return {sr, si};
}

// Global phase in double precision on the rescaled polynomial q(w) = p(R w),
// whose roots lie in the unit disk; returns approximate roots of p.
inline std::vector<std::complex<double>> aberth_double(const Poly& p, double R, int max_sweeps) {
  const int n = p.degree();
  const double lr = std::log(R);
  std::vector<double> lb(n + 1);
  double top = -std::numeric_limits<double>::infinity();
  for (int k = 0; k <= n; ++k) {
    lb[k] = log_abs(p[k]) + k * lr;
    top = std::max(top, lb[k]);
  }
  std::vector<std::complex<double>> b(n + 1), w(n), step(n);
  std::vector<double> ab(n + 1);
  for (int k = 0; k <= n; ++k) {
    double arg = p[k].is_zero() ? 0.0 : atan2(p[k].imag(), p[k].real()).convert_to<double>();
    ab[k] = std::exp(lb[k] - top);
    b[k] = std::polar(ab[k], arg);
  }
  const double two_pi = 2 * 3.14159265358979323846;
  for (int k = 0; k < n; ++k) w[k] = std::polar(1.0, two_pi * k / n + 0.31);
  std::vector<bool> frozen(n, false);
  double best = -1;
  int since_best = 0;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double worst = 0;
    for (int i = 0; i < n; ++i) {
      step[i] = 0;
      if (frozen[i]) continue;
      std::complex<double> q = 0, dq = 0;
      double sc = 0, aw = std::abs(w[i]);
      for (int k = n; k >= 0; --k) {
        dq = dq * w[i] + q;
        q = q * w[i] + b[k];
        sc = sc * aw + ab[k];
      }
      if (std::abs(q) <= 1e-14 * sc || dq == 0.0) {
        frozen[i] = true;
        continue;
      }
      std::complex<double> sum = 0;
      for (int j = 0; j < n; ++j)
        if (j != i) sum += 1.0 / (w[i] - w[j]);
      std::complex<double> N = q / dq;
      step[i] = N / (1.0 - N * sum);
      worst = std::max(worst, std::abs(step[i]) / (1 + aw));
    }
    for (int i = 0; i < n; ++i) {
      if (frozen[i]) continue;
      w[i] -= step[i];
      if (std::abs(step[i]) <= 1e-10 * (1 + std::abs(w[i]))) frozen[i] = true;
    }
    if (std::all_of(frozen.begin(), frozen.end(), [](bool f) { return f; })) break;
    if (best < 0 || worst < best * 0.99) {
      best = worst;
      since_best = 0;
    } else if (best < 1e-3 && ++since_best > 40) {
      break;
    }
  }
  for (auto& x : w) x *= R;
  return w;
}

}  // namespace detail

// Aberth-Ehrlich iteration with Jacobi-style sweeps, started on the circle of
// radius equal to Cauchy's bound. The global phase runs in double precision on
// the rescaled polynomial, then the roots are refined at increasing precision
// up to the working one; each stage stops when every root is frozen (step
// below 10^(-d/2) or residual at rounding level) or when the largest step
// stops shrinking.
inline ZeroSet find_roots(const Poly& p, const RootOptions& opt = {}) {
  const int n = p.degree();
  if (n < 1) throw std::invalid_argument("find_roots needs degree >= 1");
  const unsigned P = current_precision().digits;
  ZeroSet zs;
  zs.degree = n;
  zs.digits = P;

  std::vector<unsigned> stages;
  for (unsigned d : {std::max(kMinDigits, P / 8), std::max(kMinDigits, P / 3), P})
    if (stages.empty() || d > stages.back()) stages.push_back(std::min(d, P));

  std::vector<BigComplex> z(n);
  {
    auto w = detail::aberth_double(p, detail::cauchy_bound(p), opt.max_sweeps);
    PrecisionScope s({stages.front()});
    for (int k = 0; k < n; ++k)
      z[k] = BigComplex(w[k]);
  }

  std::vector<BigReal> corr(n), resid(n);
  std::vector<bool> frozen(n);
  for (std::size_t st = 0; st < stages.size(); ++st) {
    const unsigned d = stages[st];
    const bool last = st + 1 == stages.size();
    PrecisionScope scope({d});
    std::vector<BigComplex> a(n + 1);
    std::vector<BigReal> abs_a(n + 1);
    for (int k = 0; k <= n; ++k) {
      a[k] = with_digits(p[k], d);
      abs_a[k] = abs(a[k]);
    }
    for (auto& x : z) x = with_digits(x, d);
    std::fill(frozen.begin(), frozen.end(), false);
    const BigReal step_tol = pow10(-static_cast<long>(d) / 2);
    const BigReal resid_tol = pow10(-static_cast<long>(d) + 5);
    BigReal best = -1;
    int since_best = 0;
    for (int sweep = 0; sweep < opt.max_sweeps; ++sweep) {
      std::vector<BigComplex> w(n);
      BigReal worst = 0;
      for (int i = 0; i < n; ++i) {
        if (frozen[i]) continue;
        auto h = detail::horner2(a, abs_a, z[i]);
        resid[i] = h.scale == 0 ? BigReal(0) : abs(h.p) / h.scale;
        if (h.p.is_zero() || resid[i] <= resid_tol) {
          frozen[i] = true;
          corr[i] = 0;
          continue;
        }
        BigComplex sum = detail::reciprocal_sum(z, i);
        if (h.dp.is_zero()) {
          w[i] = BigComplex(BigReal(1) + abs(z[i])) * step_tol;  // nudge off a critical point
        } else {
          BigComplex N = h.p / h.dp;
          w[i] = N / (BigComplex(1) - N * sum);
        }
        corr[i] = abs(w[i]);
        worst = std::max(worst, corr[i] / (1 + abs(z[i])));
      }
      for (int i = 0; i < n; ++i)
        if (!frozen[i]) {
          z[i] -= w[i];
          if (corr[i] <= step_tol * (1 + abs(z[i]))) frozen[i] = true;
        }
      ++zs.sweeps;
      if (std::all_of(frozen.begin(), frozen.end(), [](bool b) { return b; })) break;
      if (best < 0 || worst < best * 0.99) {
        best = worst;
        since_best = 0;
      } else if (!last && best < BigReal("1e-3") && ++since_best > 40) {
        break;
      }
    }
    if (last) {
      for (int i = 0; i < n; ++i) {
        auto h = detail::horner2(a, abs_a, z[i]);
        resid[i] = h.scale == 0 ? BigReal(0) : abs(h.p) / h.scale;
      }
    }
  }
  zs.roots = std::move(z);
  zs.residual = std::move(resid);
  zs.correction = std::move(corr);
  zs.converged.assign(frozen.begin(), frozen.end());
  zs.ok = std::all_of(frozen.begin(), frozen.end(), [](bool b) { return b; });
  return zs;
}

// Real by the scale-aware band |Im z| < 1e-8 (1 + |z|).
inline bool is_real_root(cplx z, double band = 1e-8) { return std::abs(z.imag()) < band * (1 + std::abs(z)); }

struct EmpiricalMeasure {
  std::vector<cplx> points;
  std::vector<double> weights;

  double mass() const {
    double m = 0;
    for (double w : weights) m += w;
    return m;
  }
  double real_mass(double band = 1e-8) const {
    double m = 0;
    for (std::size_t i = 0; i < points.size(); ++i)
      if (is_real_root(points[i], band)) m += weights[i];
    return m;
  }
};

// (1/n) * sum of point masses at the roots, coincident roots merged.
inline EmpiricalMeasure counting_measure(const std::vector<cplx>& roots, double n) {
  if (!(n > 0)) throw std::invalid_argument("normalization must be positive");
  std::vector<cplx> r = roots;
  std::sort(r.begin(), r.end(), [](cplx a, cplx b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  EmpiricalMeasure m;
  for (const auto& z : r) {
    if (!m.points.empty() && std::abs(z - m.points.back()) <= 1e-14 * (1 + std::abs(z))) {
      m.weights.back() += 1 / n;
      continue;
    }
    m.points.push_back(z);
    m.weights.push_back(1 / n);
  }
  return m;
}

inline EmpiricalMeasure counting_measure(const ZeroSet& zs, double n) {
  return counting_measure(zs.as_cdouble(), n);
}

// Zero-counting measure of a polynomial; a constant gives the empty measure.
inline EmpiricalMeasure counting_measure(const Poly& p, double n) {
  if (p.degree() < 1) return {};
  return counting_measure(find_roots(p), n);
}

struct KolmogorovReport {
  double distance = 0;
  double nonreal_mass = 0;       // empirical mass off the real line, excluded
  double outside_mass = 0;       // empirical real mass outside the window
  double ref_outside_mass = 0;   // reference mass outside the window
};

// sup_x |m([-R, x]) - ref([-R, x])| over real support points and the window
// ends; R = infinity compares full CDFs.
inline KolmogorovReport kolmogorov_distance(const EmpiricalMeasure& m, const DensityRef& ref,
                                            double window = std::numeric_limits<double>::infinity()) {
  double total = ref.mass();
  if (std::abs(total - 1) > 1e-8) throw std::invalid_argument("reference mass differs from 1");
  KolmogorovReport rep;
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < m.points.size(); ++i) {
    if (!is_real_root(m.points[i])) {
      rep.nonreal_mass += m.weights[i];
      continue;
    }
    double x = m.points[i].real();
    if (std::abs(x) > window) {
      rep.outside_mass += m.weights[i];
      continue;
    }
    pts.emplace_back(x, m.weights[i]);
  }
  std::sort(pts.begin(), pts.end());
  double lo = -window;
  rep.ref_outside_mass = ref.mass_in(-std::numeric_limits<double>::infinity(), lo) +
                         ref.mass_in(window, std::numeric_limits<double>::infinity());
  double fm = 0, fr = 0, prev = lo, sup = 0;
  for (const auto& [x, w] : pts) {
    fr += ref.mass_in(prev, x);
    prev = x;
    sup = std::max(sup, std::abs(fm - fr));
    fm += w;
    sup = std::max(sup, std::abs(fm - fr));
  }
  fr += ref.mass_in(prev, window);
  sup = std::max(sup, std::abs(fm - fr));
  rep.distance = sup;
  return rep;
}

// Kolmogorov distance between two measures on the real line (real parts of
// real-classified points).
inline double kolmogorov_distance(const EmpiricalMeasure& a, const EmpiricalMeasure& b) {
  std::vector<std::pair<double, double>> ev;
  for (std::size_t i = 0; i < a.points.size(); ++i)
    if (is_real_root(a.points[i])) ev.emplace_back(a.points[i].real(), a.weights[i]);
  for (std::size_t i = 0; i < b.points.size(); ++i)
    if (is_real_root(b.points[i])) ev.emplace_back(b.points[i].real(), -b.weights[i]);
  std::sort(ev.begin(), ev.end());
  double f = 0, sup = 0;
  for (std::size_t i = 0; i < ev.size(); ++i) {
    f += ev[i].second;
    if (i + 1 == ev.size() || ev[i + 1].first != ev[i].first) sup = std::max(sup, std::abs(f));
  }
  return sup;
}

// Union of polylines (real segments are two-point polylines).
struct LimitSet {
  std::vector<std::vector<cplx>> curves;

  static LimitSet segments(const std::vector<Interval>& iv) {
    LimitSet l;
    for (const auto& s : iv) l.curves.push_back({cplx(s.lo, 0), cplx(s.hi, 0)});
    return l;
  }
  double distance(cplx z) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : curves) {
      if (c.size() == 1) best = std::min(best, std::abs(z - c[0]));
      for (std::size_t i = 0; i + 1 < c.size(); ++i) {
        cplx a = c[i], b = c[i + 1], d = b - a;
        double L2 = std::norm(d);
        double t = L2 == 0 ? 0 : std::clamp(((z - a) * std::conj(d)).real() / L2, 0.0, 1.0);
        best = std::min(best, std::abs(z - (a + t * d)));
      }
    }
    return best;
  }
};

struct FroissartPair {
  std::size_t zero, pole;
  double distance;
};

// Greedy closest-first matching of zero-pole pairs closer than radius, both
// members farther than margin from the limit set.
inline std::vector<FroissartPair> froissart_pairs(const std::vector<cplx>& zeros,
                                                  const std::vector<cplx>& poles, double radius,
                                                  const LimitSet& limit, double margin) {
  if (!(radius > 0)) throw std::invalid_argument("radius must be positive");
  auto free_point = [&](cplx z) { return limit.distance(z) > margin; };
  std::vector<FroissartPair> cand;
  for (std::size_t i = 0; i < zeros.size(); ++i) {
    if (!free_point(zeros[i])) continue;
    for (std::size_t j = 0; j < poles.size(); ++j) {
      double d = std::abs(zeros[i] - poles[j]);
      if (d < radius && free_point(poles[j])) cand.push_back({i, j, d});
    }
  }
  std::sort(cand.begin(), cand.end(), [](const FroissartPair& a, const FroissartPair& b) {
    return std::tie(a.distance, a.zero, a.pole) < std::tie(b.distance, b.zero, b.pole);
  });
  std::vector<bool> zu(zeros.size()), pu(poles.size());
  std::vector<FroissartPair> out;
  for (const auto& c : cand) {
    if (zu[c.zero] || pu[c.pole]) continue;
    zu[c.zero] = pu[c.pole] = true;
    out.push_back(c);
  }
  return out;
}

struct FroissartTriplet {
  std::size_t i0, i1, i2;
  double diameter;
};

// Triples (one zero from each set) with all pairwise distances below radius,
// matched greedily by diameter.
inline std::vector<FroissartTriplet> froissart_triplets(const std::vector<cplx>& z0,
                                                        const std::vector<cplx>& z1,
                                                        const std::vector<cplx>& z2, double radius,
                                                        const LimitSet& limit, double margin) {
  if (!(radius > 0)) throw std::invalid_argument("radius must be positive");
  auto free_point = [&](cplx z) { return limit.distance(z) > margin; };
  std::vector<FroissartTriplet> cand;
  for (std::size_t k = 0; k < z2.size(); ++k) {
    if (!free_point(z2[k])) continue;
    std::vector<std::size_t> near0, near1;
    for (std::size_t i = 0; i < z0.size(); ++i)
      if (std::abs(z0[i] - z2[k]) < radius && free_point(z0[i])) near0.push_back(i);
    for (std::size_t j = 0; j < z1.size(); ++j)
      if (std::abs(z1[j] - z2[k]) < radius && free_point(z1[j])) near1.push_back(j);
    for (auto i : near0)
      for (auto j : near1) {
        double d01 = std::abs(z0[i] - z1[j]);
        if (d01 >= radius) continue;
        double diam = std::max({d01, std::abs(z0[i] - z2[k]), std::abs(z1[j] - z2[k])});
        cand.push_back({i, j, k, diam});
      }
  }
  std::sort(cand.begin(), cand.end(), [](const FroissartTriplet& a, const FroissartTriplet& b) {
    return std::tie(a.diameter, a.i0, a.i1, a.i2) < std::tie(b.diameter, b.i0, b.i1, b.i2);
  });
  std::vector<bool> u0(z0.size()), u1(z1.size()), u2(z2.size());
  std::vector<FroissartTriplet> out;
  for (const auto& c : cand) {
    if (u0[c.i0] || u1[c.i1] || u2[c.i2]) continue;
    u0[c.i0] = u1[c.i1] = u2[c.i2] = true;
    out.push_back(c);
  }
  return out;
}

}  // namespace hplab
