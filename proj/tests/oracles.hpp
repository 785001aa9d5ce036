#pragma once

// Exact-rational reference computations used as independent oracles.

#include <gmpxx.h>

#include <stdexcept>
#include <vector>

#include "hplab/arith.hpp"

namespace oracle {

using Q = mpq_class;

inline std::vector<Q> poly_mul(const std::vector<Q>& a, const std::vector<Q>& b) {
  std::vector<Q> r(a.size() + b.size() - 1, Q(0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

// c_0..c_N of prod (z - a_j)^alpha_j at infinity (sum alpha = 0), exactly.
inline std::vector<Q> product_series(const std::vector<Q>& a, const std::vector<Q>& alpha, int N) {
  std::vector<Q> h(N + 1, Q(0)), g(N + 1, Q(0));
  for (int k = 0; k <= N; ++k)
    for (std::size_t j = 0; j < a.size(); ++j) {
      Q p = 1;
      for (int e = 0; e <= k; ++e) p *= a[j];
      h[k] -= alpha[j] * p;
    }
  g[0] = 1;
  for (int m = 0; m < N; ++m) {
    Q acc = 0;
    for (int k = 0; k <= m; ++k) acc += h[k] * g[m - k];
    g[m + 1] = acc / (m + 1);
  }
  return g;
}

// One null vector of an exact matrix with one-dimensional kernel, last free
// column set to 1.
inline std::vector<Q> null_vector(std::vector<std::vector<Q>> m) {
  const std::size_t R = m.size(), C = m[0].size();
  std::vector<std::size_t> pivcol;
  std::size_t row = 0;
  for (std::size_t c = 0; c < C && row < R; ++c) {
    std::size_t p = row;
    while (p < R && m[p][c] == 0) ++p;
    if (p == R) continue;
    std::swap(m[p], m[row]);
    for (std::size_t i = 0; i < R; ++i) {
      if (i == row || m[i][c] == 0) continue;
      Q f = m[i][c] / m[row][c];
      for (std::size_t j = c; j < C; ++j) m[i][j] -= f * m[row][j];
    }
    pivcol.push_back(c);
    ++row;
  }
  if (C - pivcol.size() != 1) throw std::runtime_error("kernel is not one-dimensional");
  std::vector<bool> is_piv(C, false);
  for (auto c : pivcol) is_piv[c] = true;
  std::size_t free = 0;
  for (std::size_t c = 0; c < C; ++c)
    if (!is_piv[c]) free = c;
  std::vector<Q> x(C, Q(0));
  x[free] = 1;
  for (std::size_t r = 0; r < pivcol.size(); ++r) x[pivcol[r]] = -m[r][free] / m[r][pivcol[r]];
  return x;
}

inline hplab::BigReal to_big(const Q& q) {
  return hplab::BigReal(q.get_num().get_str()) / hplab::BigReal(q.get_den().get_str());
}

}  // namespace oracle
