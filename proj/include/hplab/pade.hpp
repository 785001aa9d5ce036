#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hplab/arith.hpp"
#include "hplab/errors.hpp"
#include "hplab/germ.hpp"
#include "hplab/nullspace.hpp"
#include "hplab/policy.hpp"

namespace hplab {

namespace detail {

template <class S>
S scalar_from(const BigComplex& z) {
  if constexpr (std::is_same_v<S, BigReal>) {
    return z.real();
  } else {
    return z;
  }
}

template <class S>
std::vector<BigComplex> to_complex(const std::vector<S>& x) {
  return std::vector<BigComplex>(x.begin(), x.end());
}

// Null vector of a system given as complex entries; solved in real arithmetic
// when every entry is real.
inline NullVector<BigComplex> solve_null(const Matrix<BigComplex>& m, const NullSpaceOptions& opt) {
  bool real = std::all_of(m.a.begin(), m.a.end(), [](const BigComplex& z) { return z.is_real(); });
  if (!real) return null_vector(m, opt);
  Matrix<BigReal> r(m.rows, m.cols);
  for (std::size_t i = 0; i < m.a.size(); ++i) r.a[i] = m.a[i].real();
  auto nv = null_vector(r, opt);
  return {to_complex(nv.x), nv.rank, nv.nullity, nv.free_column, nv.smallest_pivot};
}

inline Poly slice_poly(const std::vector<BigComplex>& x, std::size_t from, std::size_t count) {
  return Poly(std::vector<BigComplex>(x.begin() + from, x.begin() + from + count));
}

inline BigComplex binomial(long k, long m) {
  BigReal r = 1;
  for (long i = 1; i <= m; ++i) r = r * BigReal(k - m + i) / BigReal(i);
  return r;
}

}  // namespace detail

struct PadePair {
  Poly p0, p1;
  int n = 0;
  int effective_n = 0;
  std::size_t nullity = 1;
  ResidualCertificate cert;
};

// Rows for powers z^n .. z^-n of P0 + P1 f; unknowns (P0_0..P0_n, P1_0..P1_n).
inline Matrix<BigComplex> pade_system(const LaurentSeries& s, int n) {
  if (s.order() < 2 * n) throw std::invalid_argument("series too short for [n/n]");
  Matrix<BigComplex> m(2 * n + 1, 2 * n + 2);
  for (int row = 0; row <= 2 * n; ++row) {
    int power = n - row;
    if (power >= 0) m(row, power) = BigComplex(1);
    for (int k = std::max(power, 0); k <= n; ++k) m(row, n + 1 + k) = s.c[k - power];
  }
  return m;
}

inline BigReal pade_residual(const PadePair& pp, const LaurentSeries& s, int n) {
  TwoSidedExpansion e = poly_times_series(pp.p1, s);
  BigReal worst = 0;
  for (int m = -1; m >= -n && m >= e.lowest; --m) {
    BigReal scale = 0;
    for (int k = 0; k < static_cast<int>(pp.p1.size()); ++k)
      if (k - m <= s.order()) scale += abs(pp.p1[k]) * abs(s.c[k - m]);
    if (scale == 0) continue;
    BigReal r = abs(e.at_power(m)) / scale;
    if (r > worst) worst = r;
  }
  return worst;
}

// [n/n] Padé polynomials from c_0..c_{2n}. A degenerate block (nullity > 1)
// falls back to the largest smaller order with a one-dimensional null space.
inline PadePair pade_polynomials(const LaurentSeries& s, int n, const NullSpaceOptions& opt = {}) {
  if (n < 0) throw std::invalid_argument("negative order");
  for (int m = n; m >= 0; --m) {
    auto nv = detail::solve_null(pade_system(s, m), opt);
    if (nv.nullity > 1 && m > 0) continue;
    PadePair pp;
    pp.n = n;
    pp.effective_n = m;
    pp.nullity = nv.nullity;
    pp.p0 = detail::slice_poly(nv.x, 0, m + 1);
    pp.p1 = detail::slice_poly(nv.x, m + 1, m + 1);
    if (pp.p1.is_zero()) throw DegenerateInput("Padé denominator vanishes identically");
    BigComplex lead = pp.p1[m];
    if (abs(lead) > eps_digits(10) * pp.p1.max_abs()) {
      BigComplex inv = BigComplex(1) / lead;
      pp.p0 *= inv;
      pp.p1 *= inv;
    }
    pp.cert.from_power = -1;
    pp.cert.to_power = -m;
    pp.cert.digits = current_precision().digits;
    pp.cert.verify_digits = pp.cert.digits;
    pp.cert.max_residual = pade_residual(pp, s, m);
    pp.cert.threshold = verification_threshold(pp.cert.digits);
    pp.cert.ok = pp.cert.max_residual <= pp.cert.threshold;
    return pp;
  }
  throw DegenerateInput("no Padé solution");
}

inline PadePair pade_from_germ(const Germ& g, int n, const PrecisionPolicy& policy = {}) {
  return solve_with_escalation(policy, n, [&](Precision P, int retry) {
    PadePair pp;
    {
      PrecisionScope scope(P);
      pp = pade_polynomials(expand_at_infinity(g, 2 * n), n);
    }
    bool stable = true;
    if (pp.effective_n < n) {
      // a structural block survives doubled precision; a numerical one shrinks
      PrecisionScope scope(Precision{2 * P.digits});
      stable = pade_polynomials(expand_at_infinity(g, 2 * n), n).effective_n == pp.effective_n;
    }
    {
      PrecisionScope scope(Precision{2 * P.digits});
      pp.cert.max_residual = pade_residual(pp, expand_at_infinity(g, 2 * n), pp.effective_n);
    }
    pp.cert.verify_digits = 2 * P.digits;
    pp.cert.threshold = verification_threshold(P.digits);
    pp.cert.retries = retry;
    pp.cert.ok = stable && pp.cert.max_residual <= pp.cert.threshold;
    return pp;
  });
}

inline BigComplex pade_eval(const PadePair& pp, const BigComplex& z) {
  BigComplex den = pp.p1(z);
  if (den.is_zero()) throw BranchError("pole of the approximant");
  return -pp.p0(z) / den;
}

// |<u, v>| / (|u| |v|) on coefficient vectors.
inline BigReal collinearity(const Poly& u, const Poly& v) {
  std::size_t len = std::max(u.size(), v.size());
  BigComplex dot;
  BigReal nu = 0, nv = 0;
  for (std::size_t k = 0; k < len; ++k) {
    BigComplex a = k < u.size() ? u[k] : BigComplex(), b = k < v.size() ? v[k] : BigComplex();
    dot.add_mul(a, conj(b));
    nu += norm(a);
    nv += norm(b);
  }
  if (nu == 0 || nv == 0) return 0;
  return abs(dot) / sqrt(nu * nv);
}

struct MultipointNode {
  std::optional<Num> point;  // nullopt is infinity
  Germ germ;
  int multiplicity = 0;
};

struct MultipointSpec {
  std::vector<MultipointNode> nodes;
};

enum class TwoPointConvention {
  displayed,  // n conditions at 0, n+1 at infinity
  footnote    // n+1 conditions at 0, n at infinity
};

inline MultipointSpec two_point_spec(const Germ& f0, const Germ& finf, int n,
                                     TwoPointConvention conv = TwoPointConvention::displayed) {
  int n0 = conv == TwoPointConvention::displayed ? n : n + 1;
  return {{{Num("0"), f0, n0}, {std::nullopt, finf, 2 * n + 1 - n0}}};
}

struct MultipointResult {
  Poly P, Q;
  int n = 0;
  std::size_t nullity = 1;
  ResidualCertificate cert;
};

// Stacked rows of Q f_j - P at each node; unknowns (P_0..P_n, Q_0..Q_n).
inline Matrix<BigComplex> multipoint_system(const MultipointSpec& spec, int n) {
  int total = 0;
  for (const auto& nd : spec.nodes) {
    if (nd.multiplicity < 0) throw std::invalid_argument("negative multiplicity");
    total += nd.multiplicity;
  }
  if (total != 2 * n + 1) throw std::invalid_argument("multiplicities must sum to 2n+1");
  Matrix<BigComplex> m(2 * n + 1, 2 * n + 2);
  int row = 0;
  for (const auto& nd : spec.nodes) {
    if (nd.multiplicity == 0) continue;
    if (!nd.point) {
      LaurentSeries s = expand_at_infinity(nd.germ, nd.multiplicity - 1);
      for (int i = 0; i < nd.multiplicity; ++i, ++row) {
        int power = n - i;
        if (power >= 0) m(row, power) = BigComplex(-1);
        for (int k = std::max(power, 0); k <= n; ++k)
          if (k - power <= s.order()) m(row, n + 1 + k) = s.c[k - power];
      }
      continue;
    }
    BigComplex zj = nd.point->value();
    TaylorSeries t = expand_at_point(nd.germ, zj, nd.multiplicity - 1);
    // shift[k][i] = C(k, i) zj^(k - i): coefficient of (z - zj)^i in z^k.
    std::vector<std::vector<BigComplex>> shift(n + 1);
    for (int k = 0; k <= n; ++k) {
      shift[k].resize(k + 1);
      for (int i = 0; i <= k; ++i) shift[k][i] = detail::binomial(k, i) * pow_int(zj, k - i);
    }
    for (int mm = 0; mm < nd.multiplicity; ++mm, ++row) {
      for (int k = mm; k <= n; ++k) m(row, k) = -shift[k][mm];
      for (int k = 0; k <= n; ++k) {
        BigComplex acc;
        for (int i = 0; i <= std::min(mm, k); ++i) acc.add_mul(shift[k][i], t.d[mm - i]);
        m(row, n + 1 + k) = acc;
      }
    }
  }
  return m;
}

inline BigReal system_residual(const Matrix<BigComplex>& m, const std::vector<BigComplex>& x) {
  BigReal worst = 0;
  for (std::size_t i = 0; i < m.rows; ++i) {
    BigComplex acc;
    BigReal scale = 0;
    for (std::size_t j = 0; j < m.cols; ++j) {
      if (m(i, j).is_zero()) continue;
      BigComplex t = m(i, j) * x[j];
      scale += abs(t);
      acc += t;
    }
    if (scale > 0 && abs(acc) / scale > worst) worst = abs(acc) / scale;
  }
  return worst;
}

inline MultipointResult multipoint_pade(const MultipointSpec& spec, int n,
                                        const PrecisionPolicy& policy = {}) {
  return solve_with_escalation(policy, n, [&](Precision P, int retry) {
    MultipointResult r;
    std::vector<BigComplex> x;
    {
      PrecisionScope scope(P);
      auto nv = detail::solve_null(multipoint_system(spec, n), {});
      x = nv.x;
      r.nullity = nv.nullity;
      r.n = n;
      r.P = detail::slice_poly(x, 0, n + 1);
      r.Q = detail::slice_poly(x, n + 1, n + 1);
      if (r.Q.is_zero()) throw DegenerateInput("multipoint denominator vanishes identically");
    }
    {
      PrecisionScope scope(Precision{2 * P.digits});
      r.cert.max_residual = system_residual(multipoint_system(spec, n), x);
    }
    r.cert.from_power = 0;
    r.cert.to_power = 2 * n;
    r.cert.digits = P.digits;
    r.cert.verify_digits = 2 * P.digits;
    r.cert.threshold = verification_threshold(P.digits);
    r.cert.retries = retry;
    r.cert.ok = r.cert.max_residual <= r.cert.threshold;
    return r;
  });
}

inline BigComplex multipoint_eval(const MultipointResult& r, const BigComplex& z) {
  BigComplex den = r.Q(z);
  if (den.is_zero()) throw BranchError("pole of the approximant");
  return r.P(z) / den;
}

struct JFraction {
  BigComplex c0;
  std::vector<BigComplex> A, B;
  bool terminated = false;  // series is rational and the fraction is exact
  int depth() const { return static_cast<int>(A.size()); }
};

// Functional Euclid algorithm: f - c0 = A/(z - B - (tail)), repeated on the tail.
inline JFraction jfraction_coeffs(const LaurentSeries& s, int K) {
  if (s.order() < 2 * K) throw std::invalid_argument("series too short for requested depth");
  JFraction jf;
  jf.c0 = s.c[0];
  std::vector<BigComplex> t(s.c.begin() + 1, s.c.end());  // t[i] <-> 1/z^(i+1)
  BigReal scale = 1;
  for (const auto& z : t) scale = std::max(scale, abs(z));
  BigReal tol = eps_digits(10) * scale;
  for (int k = 0; k < K; ++k) {
    if (t.size() < 2) break;
    BigComplex A = t[0];
    if (abs(A) <= tol) {
      jf.terminated = true;
      break;
    }
    // u = t/A = w (1 + e_1 w + ...); its reciprocal is z (1 + r_1 w + ...).
    std::size_t L = t.size();
    std::vector<BigComplex> e(L), r(L);
    for (std::size_t i = 0; i < L; ++i) e[i] = t[i] / A;
    r[0] = BigComplex(1);
    for (std::size_t i = 1; i < L; ++i) {
      BigComplex acc;
      for (std::size_t j = 1; j <= i; ++j) acc.sub_mul(e[j], r[i - j]);
      r[i] = acc;
    }
    jf.A.push_back(A);
    jf.B.push_back(-r[1]);
    std::vector<BigComplex> next(L - 2);
    for (std::size_t i = 0; i + 2 < L; ++i) next[i] = -r[i + 2];
    t = std::move(next);
  }
  return jf;
}

inline BigComplex jn_eval(const JFraction& jf, int n, const BigComplex& z) {
  if (n > jf.depth()) throw std::invalid_argument("depth exceeds computed fraction");
  BigComplex v;
  for (int k = n; k-- > 0;) {
    BigComplex den = z - jf.B[k] - v;
    if (den.is_zero()) throw BranchError("pole of the truncated fraction");
    v = jf.A[k] / den;
  }
  return jf.c0 + v;
}

// Denominators Q_k of the truncates: Q_{k+1} = (z - B_{k+1}) Q_k - A_{k+1} Q_{k-1}.
inline std::vector<Poly> jfraction_denominators(const JFraction& jf, int kmax) {
  std::vector<Poly> q{Poly::constant(1)};
  Poly prev = Poly::constant(0);
  for (int k = 0; k < kmax && k < jf.depth(); ++k) {
    Poly next = Poly({-jf.B[k], BigComplex(1)}) * q.back() - prev * jf.A[k];
    prev = q.back();
    q.push_back(next);
  }
  return q;
}

// Jacobi polynomial P_n^{(-alpha, alpha)} from the three-term recurrence.
inline Poly jacobi_oracle(int n, const BigReal& alpha) {
  if (n < 0) throw std::invalid_argument("negative degree");
  BigReal a = -alpha, b = alpha;
  Poly p0 = Poly::constant(1);
  if (n == 0) return p0;
  Poly p1({BigComplex((a - b) / 2), BigComplex(1 + (a + b) / 2)});
  for (int k = 2; k <= n; ++k) {
    BigReal kk = k;
    BigReal s = 2 * kk + a + b;
    BigReal c1 = 2 * kk * (kk + a + b) * (s - 2);
    BigReal c2 = (s - 1) * (a * a - b * b);
    BigReal c3 = (s - 1) * s * (s - 2);
    BigReal c4 = 2 * (kk + a - 1) * (kk + b - 1) * s;
    Poly next = (Poly({BigComplex(c2), BigComplex(c3)}) * p1 - p0 * BigComplex(c4)) *
                BigComplex(BigReal(1) / c1);
    p0 = std::move(p1);
    p1 = std::move(next);
  }
  return p1;
}

}  // namespace hplab
