#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "hplab/arith.hpp"
#include "hplab/errors.hpp"
#include "hplab/germ.hpp"
#include "hplab/nullspace.hpp"
#include "hplab/pade.hpp"
#include "hplab/policy.hpp"

namespace hplab {

struct HermiteTriple {
  Poly q0, q1, q2;
  int n = 0;
  std::size_t nullity = 1;
  std::size_t free_column = 0;
  std::size_t rows = 0;
  int max_coefficient_index = 0;  // highest c_k read from each series
  ResidualCertificate cert;
};

// Rows for powers z^n .. z^-(2n+1) of Q0 + Q1 f + Q2 f^2.
inline Matrix<BigComplex> hp_system(const LaurentSeries& sf, const LaurentSeries& sf2, int n,
                                    int* max_index = nullptr) {
  if (n < 0) throw std::invalid_argument("negative order");
  if (sf.order() < 3 * n + 1 || sf2.order() < 3 * n + 1)
    throw std::invalid_argument("series must reach c_{3n+1}");
  const int rows = 3 * n + 2;
  Matrix<BigComplex> m(rows, 3 * (n + 1));
  int used = 0;
  for (int row = 0; row < rows; ++row) {
    int power = n - row;
    if (power >= 0) m(row, power) = BigComplex(1);
    for (int k = std::max(power, 0); k <= n; ++k) {
      m(row, (n + 1) + k) = sf.c[k - power];
      m(row, 2 * (n + 1) + k) = sf2.c[k - power];
      used = std::max(used, k - power);
    }
  }
  if (max_index) *max_index = used;
  return m;
}

inline BigReal hp_residual(const HermiteTriple& t, const LaurentSeries& sf,
                           const LaurentSeries& sf2) {
  auto m = hp_system(sf, sf2, t.n);
  std::vector<BigComplex> x;
  for (const Poly* p : {&t.q0, &t.q1, &t.q2})
    for (int k = 0; k <= t.n; ++k) x.push_back(k < static_cast<int>(p->size()) ? (*p)[k] : BigComplex());
  return system_residual(m, x);
}

inline HermiteTriple hp_type1(const LaurentSeries& sf, const LaurentSeries& sf2, int n,
                              const NullSpaceOptions& opt = {}) {
  HermiteTriple t;
  t.n = n;
  auto m = hp_system(sf, sf2, n, &t.max_coefficient_index);
  t.rows = m.rows;
  auto nv = detail::solve_null(m, opt);
  t.nullity = nv.nullity;
  t.free_column = nv.free_column;
  t.q0 = detail::slice_poly(nv.x, 0, n + 1);
  t.q1 = detail::slice_poly(nv.x, n + 1, n + 1);
  t.q2 = detail::slice_poly(nv.x, 2 * (n + 1), n + 1);
  t.cert.from_power = n;
  t.cert.to_power = -(2 * n + 1);
  t.cert.digits = t.cert.verify_digits = current_precision().digits;
  t.cert.max_residual = system_residual(m, nv.x);
  t.cert.threshold = verification_threshold(t.cert.digits);
  t.cert.ok = t.cert.max_residual <= t.cert.threshold;
  return t;
}

struct HpSeries {
  LaurentSeries sf, sf2;
  BigReal square_mismatch = 0;  // independent f^2 expansion vs series product
};

// f and f^2 series; f^2 from the doubled-exponent germ when available, with
// the series product as a cross-check.
inline HpSeries hp_series(const Germ& g, int n) {
  HpSeries s;
  s.sf = expand_at_infinity(g, 3 * n + 1);
  LaurentSeries prod = series_mul(s.sf, s.sf);
  if (auto g2 = squared(g)) {
    s.sf2 = expand_at_infinity(*g2, 3 * n + 1);
    BigReal scale = 0;
    for (const auto& c : prod.c) scale = std::max(scale, abs(c));
    for (int k = 0; k <= prod.order(); ++k) {
      BigReal d = abs(prod.c[k] - s.sf2.c[k]) / (scale == 0 ? BigReal(1) : scale);
      if (d > s.square_mismatch) s.square_mismatch = d;
    }
    if (s.square_mismatch > pow10(-static_cast<long>(current_precision().digits) / 2))
      throw std::runtime_error("f^2 expansion disagrees with the series square");
  } else {
    s.sf2 = std::move(prod);
  }
  return s;
}

inline HermiteTriple hp_from_germ(const Germ& g, int n, const PrecisionPolicy& policy = {}) {
  return solve_with_escalation(policy, n, [&](Precision P, int retry) {
    HermiteTriple t;
    bool unstable = false;
    {
      PrecisionScope scope(P);
      auto s = hp_series(g, n);
      t = hp_type1(s.sf, s.sf2, n);
    }
    if (t.nullity > 1) {
      PrecisionScope scope(Precision{2 * P.digits});
      auto s = hp_series(g, n);
      auto t2 = hp_type1(s.sf, s.sf2, n);
      if (t2.nullity > 1 && t2.nullity == t.nullity)
        throw DegenerateInput("1, f, f^2 rationally dependent: null space of dimension " +
                              std::to_string(t2.nullity));
      unstable = t2.nullity > 1;  // null space still shrinking with precision
      t = std::move(t2);
      P.digits *= 2;
    }
    {
      PrecisionScope scope(Precision{2 * P.digits});
      auto s = hp_series(g, n);
      t.cert.max_residual = hp_residual(t, s.sf, s.sf2);
    }
    t.cert.digits = P.digits;
    t.cert.verify_digits = 2 * P.digits;
    t.cert.threshold = verification_threshold(P.digits);
    t.cert.retries = retry;
    t.cert.ok = !unstable && t.cert.max_residual <= t.cert.threshold;
    return t;
  });
}

enum class SignConvention { definition, theorem1 };

struct HermiteApproximants {
  Poly num0, num1, den;
  SignConvention convention = SignConvention::theorem1;

  BigComplex h0(const BigComplex& z) const { return ratio(num0, z); }
  BigComplex h1(const BigComplex& z) const { return ratio(num1, z); }
  BigReal h1_real(const BigReal& x) const { return num1.eval_real(x) / den.eval_real(x); }

 private:
  BigComplex ratio(const Poly& num, const BigComplex& z) const {
    BigComplex d = den(z);
    if (d.is_zero()) throw BranchError("pole of the Hermite approximant");
    return num(z) / d;
  }
};

inline HermiteApproximants hermite_approximants(const HermiteTriple& t,
                                                SignConvention conv = SignConvention::theorem1) {
  if (t.q2.is_zero()) throw DegenerateInput("Q_{n,2} vanishes identically");
  HermiteApproximants h;
  h.convention = conv;
  h.den = t.q2;
  h.num0 = conv == SignConvention::theorem1 ? -t.q0 : t.q0;
  h.num1 = conv == SignConvention::theorem1 ? -t.q1 : t.q1;
  return h;
}

struct UniquenessReport {
  std::size_t free_column_a = 0, free_column_b = 0;
  BigReal max_rel_diff_h0 = 0, max_rel_diff_h1 = 0;
};

// Solves the same system twice with different free columns and compares the
// approximants at the given points.
inline UniquenessReport hp_uniqueness(const LaurentSeries& sf, const LaurentSeries& sf2, int n,
                                      const std::vector<BigComplex>& points) {
  auto a = hp_type1(sf, sf2, n);
  std::size_t alt = a.free_column;
  BigReal best = -1;
  std::vector<const Poly*> blocks{&a.q1, &a.q2};
  for (std::size_t b = 0; b < 2; ++b)
    for (int k = 0; k <= n; ++k) {
      std::size_t col = (b + 1) * (n + 1) + k;
      if (col == a.free_column) continue;
      BigReal v = abs((*blocks[b])[k]);
      if (v > best) {
        best = v;
        alt = col;
      }
    }
  NullSpaceOptions opt;
  opt.forced_free = alt;
  auto b = hp_type1(sf, sf2, n, opt);
  auto ha = hermite_approximants(a), hb = hermite_approximants(b);
  UniquenessReport r;
  r.free_column_a = a.free_column;
  r.free_column_b = b.free_column;
  for (const auto& z : points) {
    BigComplex x0 = ha.h0(z), y0 = hb.h0(z), x1 = ha.h1(z), y1 = hb.h1(z);
    r.max_rel_diff_h0 = std::max(r.max_rel_diff_h0, abs(x0 - y0) / abs(x0));
    r.max_rel_diff_h1 = std::max(r.max_rel_diff_h1, abs(x1 - y1) / abs(x1));
  }
  return r;
}

struct TrendReport {
  std::vector<int> n;
  std::vector<BigComplex> points;
  // err[i][p]: error at n[i], point p
  std::vector<std::vector<double>> conj1_error, conj2_error;
  BigComplex conj1_constant, conj2_constant;  // fitted at the largest n
  bool single_alpha_regime = false;
};

namespace detail {

// argmin_k sum |r_i - k t_i|^2.
inline BigComplex fit_constant(const std::vector<BigComplex>& r, const std::vector<BigComplex>& t) {
  BigComplex num;
  BigReal den = 0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    num.add_mul(conj(t[i]), r[i]);
    den += norm(t[i]);
  }
  return num / den;
}

}  // namespace detail

// Conjecture 1 compares Q0/Q2 with f^2, Conjecture 2 compares Q1/Q2 with
// const * f (definition-convention ratios). In the single-exponent real regime
// the targets are built from the second-branch base and the conjecture-1
// constant is fixed to 1; otherwise both constants are fitted against the
// branch normalized at infinity.
inline TrendReport conjecture_trends(const Germ& g, const std::vector<int>& n_list,
                                     const std::vector<BigComplex>& points,
                                     const PrecisionPolicy& policy = {}) {
  if (n_list.empty()) throw std::invalid_argument("empty n list");
  TrendReport rep;
  rep.n = n_list;
  rep.points = points;
  std::optional<SecondBranch> sb;
  try {
    PrecisionScope scope(Precision{policy.digits(*std::max_element(n_list.begin(), n_list.end()))});
    sb = second_branch(g);
  } catch (const std::exception&) {
  }
  rep.single_alpha_regime = sb.has_value();
  auto g2 = squared(g);

  std::vector<std::vector<BigComplex>> r0(n_list.size()), r1(n_list.size());
  std::vector<BigComplex> t1, t2;
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    auto trip = hp_from_germ(g, n_list[i], policy);
    auto h = hermite_approximants(trip, SignConvention::definition);
    PrecisionScope scope(Precision{trip.cert.digits});
    for (const auto& z : points) {
      r0[i].push_back(h.h0(z));
      r1[i].push_back(h.h1(z));
    }
  }
  PrecisionScope scope(Precision{std::max(60u, policy.base)});
  for (const auto& z : points) {
    if (sb) {
      BigComplex b = sb->base(z);
      t1.push_back(b * b);
      t2.push_back(b);
    } else {
      t1.push_back(g2 ? eval_germ(*g2, z) : eval_germ(g, z) * eval_germ(g, z));
      t2.push_back(eval_germ(g, z));
    }
  }
  rep.conj1_constant = sb ? BigComplex(1) : detail::fit_constant(r0.back(), t1);
  rep.conj2_constant = detail::fit_constant(r1.back(), t2);
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    std::vector<double> e1, e2;
    for (std::size_t p = 0; p < points.size(); ++p) {
      e1.push_back(abs(r0[i][p] - rep.conj1_constant * t1[p]).convert_to<double>());
      e2.push_back(abs(r1[i][p] - rep.conj2_constant * t2[p]).convert_to<double>());
    }
    rep.conj1_error.push_back(std::move(e1));
    rep.conj2_error.push_back(std::move(e2));
  }
  return rep;
}

}  // namespace hplab
