#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hplab/arith.hpp"
#include "hplab/errors.hpp"

namespace hplab {

// A complex number kept as exact text ("1/3", "-0.8", "2.5e-1") so that it can
// be materialized at any working precision.
struct Num {
  std::string re = "0";
  std::string im = "0";
  long mult = 1;  // integer multiplier applied on materialization

  Num() = default;
  Num(std::string r, std::string i = "0") : re(std::move(r)), im(std::move(i)) {}  // NOLINT
  Num(const char* r) : re(r) {}                                                    // NOLINT

  BigComplex value() const {
    BigComplex v = parse_complex(re, im);
    if (mult != 1) v *= BigReal(mult);
    return v;
  }
  bool is_real() const { return parse_real(im) == 0; }
  Num scaled(long k) const {
    Num r = *this;
    r.mult *= k;
    return r;
  }
  friend bool operator==(const Num&, const Num&) = default;
};

struct Factor {
  Num point;
  Num exponent;
};

// Branch fixed by its value at a finite point instead of at infinity; the
// value is the principal power value^exponent.
struct Anchor {
  Num point;
  Num value;
  Num exponent = "1";
  BigComplex materialize() const { return pow(value.value(), exponent.value()); }
};

// (scale * prod (z - a_j)^alpha_j)^power.
struct ProductTerm {
  Num scale = "1";
  std::vector<Factor> factors;
  std::optional<Anchor> anchor;
  long power = 1;
};

// log((z - a)/(z - b)), principal branch.
struct LogTerm {
  Num a, b;
};

struct ConstantTerm {
  Num value;
};

using Term = std::variant<ProductTerm, LogTerm, ConstantTerm>;

struct WeightedTerm {
  Num weight = "1";
  Term term;
};

struct Germ {
  std::vector<WeightedTerm> terms;
  std::string label;

  static Germ product(std::vector<Factor> factors, Num scale = "1") {
    Germ g;
    g.terms.push_back({"1", ProductTerm{std::move(scale), std::move(factors), std::nullopt, 1}});
    return g;
  }
  static Germ constant(Num v) {
    Germ g;
    g.terms.push_back({"1", ConstantTerm{std::move(v)}});
    return g;
  }
  static Germ log_ratio(Num a, Num b) {
    Germ g;
    g.terms.push_back({"1", LogTerm{std::move(a), std::move(b)}});
    return g;
  }
  Germ operator+(const Germ& o) const {
    Germ g = *this;
    g.terms.insert(g.terms.end(), o.terms.begin(), o.terms.end());
    return g;
  }

  bool is_single_product() const {
    return terms.size() == 1 && std::holds_alternative<ProductTerm>(terms[0].term);
  }
  const ProductTerm& single_product() const {
    if (!is_single_product()) throw std::invalid_argument("germ is not a single product term");
    return std::get<ProductTerm>(terms[0].term);
  }
};

// Germ of f^2 when f is a single unit-weight product: exponents and
// constants doubled.
inline std::optional<Germ> squared(const Germ& g) {
  if (!g.is_single_product() || !(g.terms[0].weight == Num("1"))) return std::nullopt;
  Germ s = g;
  s.label = g.label.empty() ? "" : g.label + "^2";
  std::get<ProductTerm>(s.terms[0].term).power *= 2;
  return s;
}

namespace detail {

struct ProductValues {
  BigComplex scale;  // includes weight, anchor constant, and power
  std::vector<BigComplex> a;
  std::vector<BigComplex> alpha;  // already multiplied by power
  bool anchored = false;
};

inline BigComplex principal_product(const std::vector<BigComplex>& a,
                                    const std::vector<BigComplex>& alpha, const BigComplex& z) {
  BigComplex lg;
  for (std::size_t j = 0; j < a.size(); ++j) {
    BigComplex d = z - a[j];
    if (d.is_zero()) throw BranchError("evaluation at a branch point");
    lg += alpha[j] * log(d);
  }
  return exp(lg);
}

inline ProductValues materialize(const ProductTerm& t, const Num& weight) {
  ProductValues v;
  for (const auto& f : t.factors) {
    v.a.push_back(f.point.value());
    v.alpha.push_back(f.exponent.value() * BigReal(t.power));
  }
  BigComplex s = pow_int(t.scale.value(), t.power);
  if (t.anchor) {
    BigComplex p = t.anchor->point.value();
    BigComplex base = principal_product(v.a, v.alpha, p);
    s = pow_int(t.anchor->materialize(), t.power) / base;
    v.anchored = true;
  }
  v.scale = s * weight.value();
  return v;
}

inline bool all_real(const ProductValues& v) {
  for (std::size_t j = 0; j < v.a.size(); ++j)
    if (!v.a[j].is_real() || !v.alpha[j].is_real()) return false;
  return true;
}

// Integer value of sum(alpha) if it is one (to working precision).
inline std::optional<long> integer_exponent_sum(const ProductValues& v) {
  BigComplex s;
  for (const auto& al : v.alpha) s += al;
  BigReal r = round(s.real());
  BigReal tol = eps_digits(10);
  if (abs(s.real() - r) > tol || abs(s.imag()) > tol) return std::nullopt;
  return r.convert_to<long>();
}

// Value on the branch normalized at infinity: for |z| beyond every branch
// point, z^(sum alpha) prod (1 - a_j/z)^alpha_j; inside, continued along the
// ray from z outward, so cuts are the segments [0, a_j].
inline BigComplex infinity_branch(const ProductValues& v, const BigComplex& z, long sum) {
  BigReal rmax = 0;
  for (const auto& a : v.a) rmax = std::max(rmax, abs(a));
  BigReal rz = abs(z);
  auto far_value = [&](const BigComplex& w) {
    BigComplex lg;
    for (std::size_t j = 0; j < v.a.size(); ++j) lg += v.alpha[j] * log(BigComplex(1) - v.a[j] / w);
    return pow_int(w, sum) * exp(lg);
  };
  if (rz > rmax * BigReal("1.0001")) return far_value(z);
  BigComplex dir = rz == 0 ? BigComplex(1) : z / rz;
  BigComplex w0 = dir * (rmax * 2 + 1);
  BigComplex val = far_value(w0);
  BigComplex lg;
  for (std::size_t j = 0; j < v.a.size(); ++j) {
    BigComplex num = z - v.a[j];
    if (num.is_zero()) throw BranchError("evaluation at a branch point");
    BigComplex ratio = num / (w0 - v.a[j]);
    if (ratio.real() <= 0 && abs(ratio.imag()) <= eps_digits(10) * abs(ratio))
      throw BranchError("evaluation on a cut");
    lg += v.alpha[j] * log(ratio);
  }
  return val * exp(lg);
}

// Combined multiplier across the left ray of every real branch point, used to
// decide whether a real x lies on an effective cut of the principal product.
inline BigComplex real_phase_sum(const ProductValues& v, const BigReal& x) {
  BigComplex s;
  for (std::size_t j = 0; j < v.a.size(); ++j)
    if (v.a[j].real() > x) s += v.alpha[j];
  return s;
}

inline bool is_integer(const BigComplex& s) {
  BigReal r = round(s.real());
  BigReal tol = eps_digits(10);
  return abs(s.real() - r) <= tol && abs(s.imag()) <= tol;
}

inline BigComplex eval_product(const ProductValues& v, const BigComplex& z) {
  if (all_real(v)) {
    if (z.imag() == 0) {
      for (const auto& a : v.a)
        if (a.real() == z.real()) throw BranchError("evaluation at a branch point");
      if (!is_integer(real_phase_sum(v, z.real()))) throw BranchError("evaluation on a cut");
    }
    return v.scale * principal_product(v.a, v.alpha, z);
  }
  if (v.anchored) return v.scale * principal_product(v.a, v.alpha, z);
  auto sum = integer_exponent_sum(v);
  if (!sum) return v.scale * principal_product(v.a, v.alpha, z);
  return v.scale * infinity_branch(v, z, *sum);
}

inline LaurentSeries expand_product_at_infinity(const ProductValues& v, int N) {
  if (v.anchored) throw std::invalid_argument("normalization point is not infinity");
  auto sum = integer_exponent_sum(v);
  if (!sum || *sum > 0)
    throw std::invalid_argument("product term needs a non-positive integer exponent sum at infinity");
  int shift = static_cast<int>(-*sum);
  int M = N - shift;
  LaurentSeries out{std::vector<BigComplex>(N + 1)};
  if (M < 0) return out;
  // g(w) = prod (1 - a_j w)^alpha_j, g'/g = sum_k h_k w^k.
  std::vector<BigComplex> h(M + 1), apow(v.a.size(), BigComplex(1)), g(M + 1);
  for (int k = 0; k <= M; ++k) {
    BigComplex hk;
    for (std::size_t j = 0; j < v.a.size(); ++j) {
      apow[j] *= v.a[j];
      hk.sub_mul(v.alpha[j], apow[j]);
    }
    h[k] = hk;
  }
  g[0] = BigComplex(1);
  for (int m = 0; m < M; ++m) {
    BigComplex acc;
    for (int k = 0; k <= m; ++k) acc.add_mul(h[k], g[m - k]);
    g[m + 1] = acc / BigReal(m + 1);
  }
  for (int m = 0; m <= M; ++m) out.c[m + shift] = v.scale * g[m];
  return out;
}

inline std::vector<BigComplex> taylor_log_derivative(const std::vector<BigComplex>& h,
                                                     const BigComplex& d0, int N) {
  std::vector<BigComplex> d(N + 1);
  d[0] = d0;
  for (int m = 0; m < N; ++m) {
    BigComplex acc;
    for (int k = 0; k <= m; ++k) acc.add_mul(h[k], d[m - k]);
    d[m + 1] = acc / BigReal(m + 1);
  }
  return d;
}

}  // namespace detail

inline BigComplex eval_germ(const Germ& g, const BigComplex& z) {
  BigComplex total;
  for (const auto& wt : g.terms) {
    if (const auto* p = std::get_if<ProductTerm>(&wt.term)) {
      total += detail::eval_product(detail::materialize(*p, wt.weight), z);
    } else if (const auto* l = std::get_if<LogTerm>(&wt.term)) {
      BigComplex a = l->a.value(), b = l->b.value();
      BigComplex num = z - a, den = z - b;
      if (num.is_zero() || den.is_zero()) throw BranchError("evaluation at a branch point");
      BigComplex r = num / den;
      if (r.real() <= 0 && abs(r.imag()) <= eps_digits(10) * abs(r))
        throw BranchError("evaluation on a cut");
      total += wt.weight.value() * log(r);
    } else {
      total += wt.weight.value() * std::get<ConstantTerm>(wt.term).value.value();
    }
  }
  return total;
}

inline LaurentSeries expand_at_infinity(const Germ& g, int N) {
  if (N < 0) throw std::invalid_argument("negative truncation order");
  LaurentSeries out{std::vector<BigComplex>(N + 1)};
  for (const auto& wt : g.terms) {
    if (const auto* p = std::get_if<ProductTerm>(&wt.term)) {
      LaurentSeries s = detail::expand_product_at_infinity(detail::materialize(*p, wt.weight), N);
      for (int k = 0; k <= N; ++k) out.c[k] += s.c[k];
    } else if (const auto* l = std::get_if<LogTerm>(&wt.term)) {
      BigComplex a = l->a.value(), b = l->b.value(), w = wt.weight.value();
      BigComplex ak(1), bk(1);
      for (int k = 1; k <= N; ++k) {
        ak *= a;
        bk *= b;
        out.c[k] += w * (bk - ak) / BigReal(k);
      }
    } else {
      out.c[0] += wt.weight.value() * std::get<ConstantTerm>(wt.term).value.value();
    }
  }
  return out;
}

// Taylor coefficients at z0 on the branch eval_germ selects there.
inline TaylorSeries expand_at_point(const Germ& g, const BigComplex& z0, int N) {
  if (N < 0) throw std::invalid_argument("negative truncation order");
  TaylorSeries out{z0, std::vector<BigComplex>(N + 1)};
  for (const auto& wt : g.terms) {
    if (const auto* p = std::get_if<ProductTerm>(&wt.term)) {
      auto v = detail::materialize(*p, wt.weight);
      std::vector<BigComplex> inv(v.a.size()), pw(v.a.size());
      for (std::size_t j = 0; j < v.a.size(); ++j) {
        BigComplex d = z0 - v.a[j];
        if (d.is_zero()) throw BranchError("expansion point is a branch point");
        inv[j] = BigComplex(1) / d;
        pw[j] = inv[j];
      }
      std::vector<BigComplex> h(N + 1);
      for (int k = 0; k <= N; ++k) {
        BigComplex hk;
        for (std::size_t j = 0; j < v.a.size(); ++j) {
          hk.add_mul(v.alpha[j], pw[j]);
          pw[j] *= inv[j];
        }
        h[k] = (k % 2) ? -hk : hk;
      }
      BigComplex d0 = p->anchor && p->anchor->point.value() == z0
                          ? pow_int(p->anchor->materialize(), p->power) * wt.weight.value()
                          : detail::eval_product(v, z0);
      auto d = detail::taylor_log_derivative(h, d0, N);
      for (int k = 0; k <= N; ++k) out.d[k] += d[k];
    } else if (const auto* l = std::get_if<LogTerm>(&wt.term)) {
      BigComplex a = l->a.value(), b = l->b.value(), w = wt.weight.value();
      Germ single;
      single.terms.push_back(wt);
      out.d[0] += eval_germ(single, z0);
      BigComplex ia = BigComplex(1) / (z0 - a), ib = BigComplex(1) / (z0 - b);
      BigComplex pa = ia, pb = ib;
      for (int k = 1; k <= N; ++k) {
        BigComplex t = w * (pa - pb) / BigReal(k);
        out.d[k] += (k % 2) ? t : -t;
        pa *= ia;
        pb *= ib;
      }
    } else {
      out.d[0] += wt.weight.value() * std::get<ConstantTerm>(wt.term).value.value();
    }
  }
  return out;
}

inline bool is_laguerre(const Germ& g) {
  if (!g.is_single_product()) return false;
  const auto& p = g.single_product();
  if (p.anchor) return false;
  auto v = detail::materialize(p, g.terms[0].weight);
  for (std::size_t i = 0; i < v.a.size(); ++i) {
    if (detail::is_integer(v.alpha[i])) return false;
    for (std::size_t j = i + 1; j < v.a.size(); ++j)
      if (v.a[i] == v.a[j]) return false;
  }
  auto s = detail::integer_exponent_sum(v);
  return s && *s == 0;
}

inline bool is_real_subclass(const Germ& g) {
  if (!g.is_single_product()) return false;
  const auto& p = g.single_product();
  if (!p.scale.is_real() || !g.terms[0].weight.is_real()) return false;
  for (const auto& f : p.factors)
    if (!f.point.is_real() || !f.exponent.is_real()) return false;
  return true;
}

struct Segment {
  double lo, hi;
};

struct CutSystem {
  std::vector<Segment> E;
  bool contains(double x) const {
    return std::any_of(E.begin(), E.end(), [x](const Segment& s) { return s.lo <= x && x <= s.hi; });
  }
};

inline CutSystem cut_system(const Germ& g) {
  if (!is_real_subclass(g)) throw std::invalid_argument("cut system needs a real-subclass germ");
  auto v = detail::materialize(g.single_product(), g.terms[0].weight);
  std::vector<BigReal> pts;
  for (const auto& a : v.a) pts.push_back(a.real());
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  CutSystem cs;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    BigReal mid = (pts[i] + pts[i + 1]) / 2;
    if (detail::is_integer(detail::real_phase_sum(v, mid))) continue;
    double lo = pts[i].convert_to<double>(), hi = pts[i + 1].convert_to<double>();
    if (!cs.E.empty() && cs.E.back().hi == lo)
      cs.E.back().hi = hi;
    else
      cs.E.push_back({lo, hi});
  }
  return cs;
}

struct BoundaryValues {
  BigComplex plus, minus, jump, sum;  // f+, f-, f+ - f-, f+ + f-
};

// Limits from the upper (plus) and lower (minus) half-planes at a real x in E°.
inline BoundaryValues boundary_values(const Germ& g, const BigReal& x) {
  if (!is_real_subclass(g)) throw std::invalid_argument("boundary values need a real-subclass germ");
  auto v = detail::materialize(g.single_product(), g.terms[0].weight);
  BigComplex phase = detail::real_phase_sum(v, x);
  if (detail::is_integer(phase)) throw std::domain_error("x is not interior to a cut");
  BigReal lg = 0;
  for (std::size_t j = 0; j < v.a.size(); ++j) {
    BigReal d = abs(x - v.a[j].real());
    if (d == 0) throw std::domain_error("x is a branch point");
    lg += v.alpha[j].real() * log(d);
  }
  BigReal mod = exp(lg);
  BigReal th = pi_value() * phase.real();
  BoundaryValues b;
  b.plus = v.scale * polar(mod, th);
  b.minus = v.scale * polar(mod, -th);
  b.jump = b.plus - b.minus;
  b.sum = b.plus + b.minus;
  return b;
}

// f_2 = constant * base, with base(z) = e^{-i pi phi sgn Im z} f(z), phi the
// common value of sum_{a_k > x} alpha_k on E. base is holomorphic off F and
// real on E.
struct SecondBranch {
  Germ f;
  BigReal alpha;     // |alpha|
  BigReal phi;       // phase sum on E
  BigReal constant;  // -2 cos(pi alpha)

  BigComplex base(const BigComplex& z) const {
    if (z.imag() == 0) {
      auto b = boundary_values(f, z.real());
      return b.plus * polar(BigReal(1), -pi_value() * phi);
    }
    BigReal s = z.imag() > 0 ? BigReal(1) : BigReal(-1);
    return eval_germ(f, z) * polar(BigReal(1), -pi_value() * phi * s);
  }
  // Real-valued base on E°.
  BigReal base_real(const BigReal& x) const {
    auto v = detail::materialize(f.single_product(), f.terms[0].weight);
    BigReal lg = 0;
    for (std::size_t j = 0; j < v.a.size(); ++j) lg += v.alpha[j].real() * log(abs(x - v.a[j].real()));
    return v.scale.real() * exp(lg);
  }
};

inline SecondBranch second_branch(const Germ& g) {
  if (!is_real_subclass(g)) throw std::invalid_argument("second branch needs a real-subclass germ");
  auto v = detail::materialize(g.single_product(), g.terms[0].weight);
  if (v.alpha.empty()) throw std::invalid_argument("empty product");
  BigReal a = abs(v.alpha[0].real());
  for (const auto& al : v.alpha)
    if (abs(abs(al.real()) - a) > eps_digits(10))
      throw std::invalid_argument("second branch needs a single exponent magnitude");
  if (abs(a - BigReal(1) / 2) <= eps_digits(10))
    throw DegenerateInput("alpha = 1/2: 1, f, f^2 are rationally dependent");
  if (a == 0 || a > BigReal(1) / 2) throw std::invalid_argument("|alpha| must lie in (0, 1/2)");
  auto cs = cut_system(g);
  if (cs.E.empty()) throw std::invalid_argument("germ has no cuts");
  BigReal phi = detail::real_phase_sum(v, BigReal((cs.E[0].lo + cs.E[0].hi) / 2)).real();
  for (const auto& s : cs.E) {
    BigReal p2 = detail::real_phase_sum(v, BigReal((s.lo + s.hi) / 2)).real();
    if (abs(p2 - phi) > eps_digits(10))
      throw std::invalid_argument("phase differs between cut components");
  }
  return {g, a, phi, -2 * cos(pi_value() * a)};
}

}  // namespace hplab
