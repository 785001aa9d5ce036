#pragma once

#include <algorithm>
#include <cctype>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/mpfr.hpp>

namespace hplab {

using BigReal = boost::multiprecision::mpfr_float;

struct Precision {
  unsigned digits = 60;
};

inline constexpr unsigned kMinDigits = 30;

// Installs P as the default precision of newly created BigReal values for the
// lifetime of the scope. Values keep their own precision once created.
class PrecisionScope {
 public:
  explicit PrecisionScope(Precision p) : saved_(BigReal::default_precision()) {
    if (p.digits < kMinDigits) throw std::invalid_argument("working precision below 30 digits");
    BigReal::default_precision(p.digits);
  }
  ~PrecisionScope() { BigReal::default_precision(saved_); }
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  unsigned saved_;
};

inline Precision current_precision() { return {BigReal::default_precision()}; }

inline BigReal pi_value() {
  BigReal r;
  mpfr_const_pi(r.backend().data(), MPFR_RNDN);
  return r;
}

inline BigReal pow10(long e) { return boost::multiprecision::pow(BigReal(10), BigReal(e)); }

// 10^(-(P - slack)) at the current precision.
inline BigReal eps_digits(long slack = 0) {
  return pow10(-static_cast<long>(BigReal::default_precision()) + slack);
}

inline int cmp_abs(const BigReal& a, const BigReal& b) {
  return mpfr_cmpabs(a.backend().data(), b.backend().data());
}

namespace detail {

inline BigReal parse_rational(std::string s) {
  if (s.size() >= 2 && s.front() == '(' && s.back() == ')') s = s.substr(1, s.size() - 2);
  if (s.empty()) throw std::invalid_argument("empty number");
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return BigReal(s);
    BigReal num(s.substr(0, slash));
    BigReal den(s.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator in '" + s + "'");
    return num / den;
  } catch (const std::runtime_error&) {
    throw std::invalid_argument("not a number: '" + s + "'");
  }
}

}  // namespace detail

// Accepts decimal/scientific literals, "p/q" rationals, and "a^b" with a > 0
// (e.g. "2^(-1/2)"); rounded once at the current precision.
inline BigReal parse_real(std::string_view text) {
  std::string s(text);
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }),
          s.end());
  auto caret = s.find('^');
  if (caret == std::string::npos) return detail::parse_rational(s);
  BigReal base = detail::parse_rational(s.substr(0, caret));
  BigReal ex = detail::parse_rational(s.substr(caret + 1));
  if (base <= 0) throw std::invalid_argument("power base must be positive in '" + s + "'");
  return boost::multiprecision::pow(base, ex);
}

inline std::string to_decimal(const BigReal& x, int digits = 30) {
  if (x == 0) return "0";
  return x.str(digits, std::ios_base::scientific);
}

class BigComplex {
 public:
  BigComplex() : re_(0), im_(0) {}
  BigComplex(const BigReal& re) : re_(re), im_(0) {}  // NOLINT
  BigComplex(const BigReal& re, const BigReal& im) : re_(re), im_(im) {}
  BigComplex(int re) : re_(re), im_(0) {}  // NOLINT
  BigComplex(double re, double im) : re_(re), im_(im) {}
  explicit BigComplex(std::complex<double> z) : re_(z.real()), im_(z.imag()) {}

  const BigReal& real() const { return re_; }
  const BigReal& imag() const { return im_; }
  BigReal& real() { return re_; }
  BigReal& imag() { return im_; }

  BigComplex& operator+=(const BigComplex& o) {
    re_ += o.re_;
    im_ += o.im_;
    return *this;
  }
  BigComplex& operator-=(const BigComplex& o) {
    re_ -= o.re_;
    im_ -= o.im_;
    return *this;
  }
  BigComplex& operator*=(const BigComplex& o) {
    BigReal r = re_ * o.re_ - im_ * o.im_;
    im_ = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(r);
    return *this;
  }
  BigComplex& operator*=(const BigReal& s) {
    re_ *= s;
    im_ *= s;
    return *this;
  }
  BigComplex& operator/=(const BigComplex& o) {
    // Smith's scaling keeps the denominator away from overflow.
    if (cmp_abs(o.re_, o.im_) >= 0) {
      BigReal t = o.im_ / o.re_;
      BigReal d = o.re_ + o.im_ * t;
      BigReal r = (re_ + im_ * t) / d;
      im_ = (im_ - re_ * t) / d;
      re_ = std::move(r);
    } else {
      BigReal t = o.re_ / o.im_;
      BigReal d = o.re_ * t + o.im_;
      BigReal r = (re_ * t + im_) / d;
      im_ = (im_ * t - re_) / d;
      re_ = std::move(r);
    }
    return *this;
  }
  BigComplex& operator/=(const BigReal& s) {
    re_ /= s;
    im_ /= s;
    return *this;
  }

  // this -= a * b without a temporary complex.
  void sub_mul(const BigComplex& a, const BigComplex& b) {
    re_ -= a.re_ * b.re_;
    re_ += a.im_ * b.im_;
    im_ -= a.re_ * b.im_;
    im_ -= a.im_ * b.re_;
  }
  void add_mul(const BigComplex& a, const BigComplex& b) {
    re_ += a.re_ * b.re_;
    re_ -= a.im_ * b.im_;
    im_ += a.re_ * b.im_;
    im_ += a.im_ * b.re_;
  }

  bool is_zero() const { return re_ == 0 && im_ == 0; }
  bool is_real() const { return im_ == 0; }
  unsigned precision() const { return std::max(re_.precision(), im_.precision()); }
  std::complex<double> to_cdouble() const {
    return {re_.convert_to<double>(), im_.convert_to<double>()};
  }

  friend BigComplex operator+(BigComplex a, const BigComplex& b) { return a += b; }
  friend BigComplex operator-(BigComplex a, const BigComplex& b) { return a -= b; }
  friend BigComplex operator*(BigComplex a, const BigComplex& b) { return a *= b; }
  friend BigComplex operator*(BigComplex a, const BigReal& s) { return a *= s; }
  friend BigComplex operator*(const BigReal& s, BigComplex a) { return a *= s; }
  friend BigComplex operator/(BigComplex a, const BigComplex& b) { return a /= b; }
  friend BigComplex operator/(BigComplex a, const BigReal& s) { return a /= s; }
  friend BigComplex operator-(const BigComplex& a) { return {-a.re_, -a.im_}; }
  friend bool operator==(const BigComplex& a, const BigComplex& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }

 private:
  BigReal re_, im_;
};

// Copies rounded to d decimal digits (a plain copy keeps the source precision).
inline BigReal with_digits(const BigReal& x, unsigned d) { return BigReal(x, d); }
inline BigComplex with_digits(const BigComplex& z, unsigned d) {
  return {BigReal(z.real(), d), BigReal(z.imag(), d)};
}

inline BigReal real(const BigComplex& z) { return z.real(); }
inline BigReal imag(const BigComplex& z) { return z.imag(); }
inline BigComplex conj(const BigComplex& z) { return {z.real(), -z.imag()}; }
inline BigReal norm(const BigComplex& z) { return z.real() * z.real() + z.imag() * z.imag(); }
inline BigReal abs(const BigComplex& z) { return sqrt(norm(z)); }
inline BigReal arg(const BigComplex& z) { return atan2(z.imag(), z.real()); }
// |re| + |im|, used for pivot comparisons.
inline BigReal mag1(const BigComplex& z) { return abs(z.real()) + abs(z.imag()); }
inline BigReal mag1(const BigReal& x) { return abs(x); }

inline BigComplex polar(const BigReal& r, const BigReal& theta) {
  return {r * cos(theta), r * sin(theta)};
}
inline BigComplex exp(const BigComplex& z) { return polar(exp(z.real()), z.imag()); }
// Principal branch, imaginary part in (-pi, pi].
inline BigComplex log(const BigComplex& z) {
  if (z.is_zero()) throw std::domain_error("log of zero");
  return {log(abs(z)), arg(z)};
}
inline BigComplex sqrt(const BigComplex& z) {
  if (z.is_zero()) return z;
  return polar(sqrt(abs(z)), arg(z) / 2);
}
// Principal power z^a = exp(a log z).
inline BigComplex pow(const BigComplex& z, const BigComplex& a) {
  if (z.is_zero()) {
    if (a.real() > 0) return BigComplex();
    throw std::domain_error("zero to a non-positive power");
  }
  return exp(a * log(z));
}
inline BigComplex pow_int(BigComplex z, long k) {
  if (k < 0) return BigComplex(1) / pow_int(std::move(z), -k);
  BigComplex r(1);
  while (k) {
    if (k & 1) r *= z;
    z *= z;
    k >>= 1;
  }
  return r;
}

inline BigComplex parse_complex(std::string_view re, std::string_view im = "0") {
  return {parse_real(re), parse_real(im)};
}

inline std::string to_decimal(const BigComplex& z, int digits = 30) {
  return to_decimal(z.real(), digits) + (z.imag() < 0 ? " - " : " + ") +
         to_decimal(abs(z.imag()), digits) + "i";
}

// Dense polynomial, ascending coefficients. The stored vector may carry
// trailing zeros; degree() reports the exact degree.
class Poly {
 public:
  Poly() = default;
  explicit Poly(std::vector<BigComplex> coeffs) : c_(std::move(coeffs)) {}
  static Poly constant(const BigComplex& v) { return Poly({v}); }
  static Poly monomial(std::size_t k, const BigComplex& v = BigComplex(1)) {
    std::vector<BigComplex> c(k + 1);
    c[k] = v;
    return Poly(std::move(c));
  }

  const std::vector<BigComplex>& coeffs() const { return c_; }
  std::vector<BigComplex>& coeffs() { return c_; }
  std::size_t size() const { return c_.size(); }
  const BigComplex& operator[](std::size_t k) const { return c_[k]; }

  int degree() const {
    for (std::size_t k = c_.size(); k-- > 0;)
      if (!c_[k].is_zero()) return static_cast<int>(k);
    return -1;
  }
  bool is_zero() const { return degree() < 0; }
  bool is_real() const {
    return std::all_of(c_.begin(), c_.end(), [](const BigComplex& z) { return z.is_real(); });
  }
  BigComplex leading() const {
    int d = degree();
    return d < 0 ? BigComplex() : c_[d];
  }
  BigReal max_abs() const {
    BigReal m = 0;
    for (const auto& z : c_) m = std::max(m, abs(z));
    return m;
  }

  BigComplex operator()(const BigComplex& z) const {
    BigComplex acc;
    for (std::size_t k = c_.size(); k-- > 0;) {
      acc *= z;
      acc += c_[k];
    }
    return acc;
  }
  // Real-argument evaluation of a real-coefficient polynomial.
  BigReal eval_real(const BigReal& x) const {
    BigReal acc = 0;
    for (std::size_t k = c_.size(); k-- > 0;) {
      acc *= x;
      acc += c_[k].real();
    }
    return acc;
  }

  Poly derivative() const {
    if (c_.size() <= 1) return Poly({BigComplex()});
    std::vector<BigComplex> d(c_.size() - 1);
    for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = c_[k] * BigReal(static_cast<long>(k));
    return Poly(std::move(d));
  }

  Poly& operator*=(const BigComplex& s) {
    for (auto& z : c_) z *= s;
    return *this;
  }

  friend Poly operator+(const Poly& a, const Poly& b) {
    std::vector<BigComplex> r(std::max(a.size(), b.size()));
    for (std::size_t k = 0; k < a.size(); ++k) r[k] += a.c_[k];
    for (std::size_t k = 0; k < b.size(); ++k) r[k] += b.c_[k];
    return Poly(std::move(r));
  }
  friend Poly operator-(const Poly& a) {
    Poly r = a;
    for (auto& z : r.c_) z = -z;
    return r;
  }
  friend Poly operator-(const Poly& a, const Poly& b) { return a + (-b); }
  friend Poly operator*(const Poly& a, const Poly& b) {
    if (a.c_.empty() || b.c_.empty()) return Poly({BigComplex()});
    std::vector<BigComplex> r(a.size() + b.size() - 1);
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a.c_[i].is_zero()) continue;
      for (std::size_t j = 0; j < b.size(); ++j) r[i + j].add_mul(a.c_[i], b.c_[j]);
    }
    return Poly(std::move(r));
  }
  friend Poly operator*(Poly a, const BigComplex& s) { return a *= s; }

 private:
  std::vector<BigComplex> c_;
};

// c_0 + c_1/z + ... + c_N/z^N.
struct LaurentSeries {
  std::vector<BigComplex> c;
  int order() const { return static_cast<int>(c.size()) - 1; }
  bool is_real() const {
    return std::all_of(c.begin(), c.end(), [](const BigComplex& z) { return z.is_real(); });
  }
  // Partial sum S_N(z).
  BigComplex partial_sum(const BigComplex& z) const {
    BigComplex w = BigComplex(1) / z, acc;
    for (std::size_t k = c.size(); k-- > 0;) {
      acc *= w;
      acc += c[k];
    }
    return acc;
  }
};

// d_0 + d_1 (z - z0) + ... + d_N (z - z0)^N.
struct TaylorSeries {
  BigComplex center;
  std::vector<BigComplex> d;
  int order() const { return static_cast<int>(d.size()) - 1; }
};

inline LaurentSeries series_mul(const LaurentSeries& a, const LaurentSeries& b) {
  int n = std::min(a.order(), b.order());
  if (n < 0) return {};
  LaurentSeries r{std::vector<BigComplex>(n + 1)};
  for (int i = 0; i <= n; ++i)
    for (int j = 0; i + j <= n; ++j) r.c[i + j].add_mul(a.c[i], b.c[j]);
  return r;
}

inline LaurentSeries series_add(const LaurentSeries& a, const LaurentSeries& b) {
  int n = std::min(a.order(), b.order());
  LaurentSeries r{std::vector<BigComplex>(std::max(n + 1, 0))};
  for (int i = 0; i <= n; ++i) r.c[i] = a.c[i] + b.c[i];
  return r;
}

// Coefficients of Q(z) * s(z), powers z^top down to z^lowest.
struct TwoSidedExpansion {
  int top = 0;
  int lowest = 0;
  std::vector<BigComplex> coeff;  // coeff[i] <-> power top - i
  const BigComplex& at_power(int m) const {
    if (m > top || m < lowest) throw std::out_of_range("power outside valid range");
    return coeff[top - m];
  }
};

inline TwoSidedExpansion poly_times_series(const Poly& q, const LaurentSeries& s) {
  TwoSidedExpansion r;
  int d = std::max(q.degree(), 0);
  r.top = d;
  r.lowest = d - s.order();
  r.coeff.assign(r.top - r.lowest + 1, BigComplex());
  for (int m = r.top; m >= r.lowest; --m) {
    BigComplex& acc = r.coeff[r.top - m];
    for (int k = std::max(m, 0); k <= d && k < static_cast<int>(q.size()); ++k) {
      int idx = k - m;
      if (idx > s.order()) continue;
      acc.add_mul(q[k], s.c[idx]);
    }
  }
  return r;
}

}  // namespace hplab
