#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <type_traits>
#include <vector>

#include "hplab/arith.hpp"

namespace hplab {

template <class Real>
Real pi_of() {
  if constexpr (std::is_same_v<Real, double>) {
    return 3.14159265358979323846;
  } else {
    return pi_value();
  }
}

template <class Real>
int decimal_digits_of() {
  if constexpr (std::is_same_v<Real, double>) {
    return 16;
  } else {
    return static_cast<int>(BigReal::default_precision());
  }
}

template <class V, class Real = V>
struct QuadResult {
  V value;
  Real error_estimate;
  int levels = 0;
  std::size_t evaluations = 0;
};

// Tanh-sinh rule on [-1, 1]. Nodes are stored by level (step h0 / 2^level);
// each node carries its distance to the nearer endpoint, computed without
// cancellation, so integrands singular at the ends can be evaluated at nodes
// lying within 10^-P of an endpoint.
template <class Real>
class TanhSinh {
 public:
  struct Node {
    Real x;     // in [0, 1)
    Real comp;  // 1 - x
    Real w;
  };

  explicit TanhSinh(int max_level = 10, double h0 = 1.0) : max_level_(max_level), h0_(h0) {
    digits_ = decimal_digits_of<Real>();
    for (int l = 0; l <= max_level_; ++l) levels_.push_back(build_level(l));
  }

  int digits() const { return digits_; }
  int max_level() const { return max_level_; }

  // f(x, da, db) with x = a + da = b - db; f may be real or complex valued.
  template <class F, class R = std::decay_t<std::invoke_result_t<F&, const Real&, const Real&, const Real&>>,
            class V = std::conditional_t<std::is_convertible_v<R, Real>, Real, R>>
  QuadResult<V, Real> integrate(F&& f, const Real& a, const Real& b, const Real& rel_tol) const {
    using std::abs;
    Real half = (b - a) / 2;
    Real mid = a + half;
    QuadResult<V, Real> res{V(0), Real(0), 0, 0};
    V sum(0);
    V prev(0);
    for (int l = 0; l <= max_level_; ++l) {
      for (const Node& nd : levels_[l]) {
        Real dist = half * nd.comp;
        Real far = half * (1 + nd.x);
        if (nd.x == 0) {
          sum += nd.w * f(mid, half, half);
          ++res.evaluations;
          continue;
        }
        sum += nd.w * f(b - dist, far, dist);
        sum += nd.w * f(a + dist, dist, far);
        res.evaluations += 2;
      }
      Real h = Real(h0_) / pow2(l);
      V estimate = sum * (h * half);
      res.levels = l;
      if (l > 0) {
        res.error_estimate = abs(estimate - prev);
        if (l >= 3 && res.error_estimate <= rel_tol * abs(estimate)) {
          res.value = estimate;
          return res;
        }
      }
      prev = estimate;
      res.value = estimate;
    }
    return res;
  }

 private:
  static Real pow2(int l) {
    Real r = 1;
    for (int i = 0; i < l; ++i) r *= 2;
    return r;
  }

  std::vector<Node> build_level(int l) const {
    using std::cosh;
    using std::exp;
    using std::sinh;
    std::vector<Node> nodes;
    Real h = Real(h0_) / pow2(l);
    Real halfpi = pi_of<Real>() / 2;
    // Stop once weights fall below the representable floor of the sum.
    Real wmin;
    if constexpr (std::is_same_v<Real, double>) {
      wmin = 1e-300;
    } else {
      wmin = pow10(-2 * digits_ - 20);
    }
    for (long k = 0;; ++k) {
      if (l > 0 && k % 2 == 0) continue;
      if (l == 0 && k == 0) {
        nodes.push_back({Real(0), Real(1), halfpi});
        continue;
      }
      if (k > 100000) break;
      Real t = h * Real(k);
      Real u = halfpi * sinh(t);
      Real e2u = exp(2 * u);
      Real comp = 2 / (1 + e2u);
      Real ch = cosh(u);
      Real w = halfpi * cosh(t) / (ch * ch);
      if (w < wmin || comp == 0) break;
      nodes.push_back({1 - comp, comp, w});
    }
    return nodes;
  }

  int max_level_;
  double h0_;
  int digits_;
  std::vector<std::vector<Node>> levels_;
};

}  // namespace hplab
