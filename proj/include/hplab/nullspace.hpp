#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "hplab/arith.hpp"

namespace hplab {

template <class S>
struct Matrix {
  std::size_t rows = 0, cols = 0;
  std::vector<S> a;
  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, S(0)) {}
  S& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  const S& operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
};

template <class S>
struct NullVector {
  std::vector<S> x;
  std::size_t rank = 0;
  std::size_t nullity = 0;
  std::size_t free_column = 0;
  BigReal smallest_pivot;  // relative to the largest entry
};

struct NullSpaceOptions {
  // Pivots below tol * max|entry| count as zero; default 10^(-P+10).
  std::optional<BigReal> tol;
  // Column that must stay free (receives value 1).
  std::optional<std::size_t> forced_free;
};

namespace detail {

inline bool is_exact_one(const BigReal& x) { return x == 1; }
inline bool is_exact_one(const BigComplex& z) { return z.real() == 1 && z.imag() == 0; }
inline bool is_exact_zero(const BigReal& x) { return x == 0; }
inline bool is_exact_zero(const BigComplex& z) { return z.is_zero(); }
inline void sub_mul(BigReal& acc, const BigReal& a, const BigReal& b) { acc -= a * b; }
inline void sub_mul(BigComplex& acc, const BigComplex& a, const BigComplex& b) {
  acc.sub_mul(a, b);
}

}  // namespace detail

// Null vector of a rectangular system by complete-pivoting elimination.
// Columns holding a single exact 1 (identity blocks such as the P_{n,0} or
// Q_{n,0} coefficients) are eliminated first without arithmetic.
template <class S>
NullVector<S> null_vector(const Matrix<S>& m, const NullSpaceOptions& opt = {}) {
  const std::size_t R = m.rows, C = m.cols;
  if (C == 0) throw std::invalid_argument("empty system");

  std::vector<long> unit_row_of_col(C, -1);
  std::vector<bool> row_used(R, false);
  for (std::size_t j = 0; j < C; ++j) {
    if (opt.forced_free && *opt.forced_free == j) continue;
    long hit = -1;
    bool ok = true;
    for (std::size_t i = 0; i < R && ok; ++i) {
      if (detail::is_exact_zero(m(i, j))) continue;
      if (hit >= 0 || !detail::is_exact_one(m(i, j)) || row_used[i]) ok = false;
      hit = static_cast<long>(i);
    }
    if (ok && hit >= 0) {
      unit_row_of_col[j] = hit;
      row_used[hit] = true;
    }
  }

  std::vector<std::size_t> rows, cols;
  for (std::size_t i = 0; i < R; ++i)
    if (!row_used[i]) rows.push_back(i);
  for (std::size_t j = 0; j < C; ++j)
    if (unit_row_of_col[j] < 0) cols.push_back(j);

  const std::size_t r = rows.size(), c = cols.size();
  std::vector<S> w(r * c);
  BigReal max_entry = 0;
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) {
      w[i * c + j] = m(rows[i], cols[j]);
      BigReal t = mag1(w[i * c + j]);
      if (t > max_entry) max_entry = t;
    }
  BigReal tol = opt.tol ? *opt.tol : eps_digits(10);
  BigReal threshold = tol * (max_entry == 0 ? BigReal(1) : max_entry);

  std::vector<std::size_t> prow(r), pcol(c);
  for (std::size_t i = 0; i < r; ++i) prow[i] = i;
  for (std::size_t j = 0; j < c; ++j) pcol[j] = j;
  std::size_t forced_local = c;
  if (opt.forced_free)
    for (std::size_t j = 0; j < c; ++j)
      if (cols[j] == *opt.forced_free) forced_local = j;

  NullVector<S> out;
  out.smallest_pivot = 1;
  std::size_t k = 0;
  for (; k < std::min(r, c); ++k) {
    std::size_t bi = k, bj = c;
    BigReal best = -1;
    for (std::size_t i = k; i < r; ++i)
      for (std::size_t j = k; j < c; ++j) {
        if (pcol[j] == forced_local) continue;
        BigReal t = mag1(w[prow[i] * c + pcol[j]]);
        if (t > best) {
          best = std::move(t);
          bi = i;
          bj = j;
        }
      }
    if (bj == c || best <= threshold) break;
    std::swap(prow[k], prow[bi]);
    std::swap(pcol[k], pcol[bj]);
    BigReal rel = best / (max_entry == 0 ? BigReal(1) : max_entry);
    if (rel < out.smallest_pivot) out.smallest_pivot = rel;

    const S& piv = w[prow[k] * c + pcol[k]];
    S inv = S(1) / piv;
    for (std::size_t i = k + 1; i < r; ++i) {
      S& lead = w[prow[i] * c + pcol[k]];
      if (detail::is_exact_zero(lead)) continue;
      S f = lead * inv;
      for (std::size_t j = k + 1; j < c; ++j)
        detail::sub_mul(w[prow[i] * c + pcol[j]], f, w[prow[k] * c + pcol[j]]);
      lead = S(0);
    }
  }
  out.rank = k + (R - r);
  out.nullity = C - out.rank;

  // Free variable: the forced column if any, otherwise the last unpivoted one.
  std::size_t free_local = c;
  if (forced_local < c) {
    free_local = forced_local;
  } else if (k < c) {
    free_local = pcol[c - 1];
    for (std::size_t j = k; j < c; ++j) free_local = std::max(free_local, pcol[j]);
  }
  std::vector<S> xl(c, S(0));
  if (free_local < c) xl[free_local] = S(1);
  for (std::size_t t = k; t-- > 0;) {
    S acc(0);
    for (std::size_t j = t + 1; j < c; ++j) {
      const S& u = w[prow[t] * c + pcol[j]];
      if (!detail::is_exact_zero(xl[pcol[j]])) detail::sub_mul(acc, u, xl[pcol[j]]);
    }
    xl[pcol[t]] = acc / w[prow[t] * c + pcol[t]];
  }

  out.x.assign(C, S(0));
  for (std::size_t j = 0; j < c; ++j) out.x[cols[j]] = xl[j];
  for (std::size_t j = 0; j < C; ++j) {
    if (unit_row_of_col[j] < 0) continue;
    S acc(0);
    std::size_t i = static_cast<std::size_t>(unit_row_of_col[j]);
    for (std::size_t jj = 0; jj < C; ++jj)
      if (jj != j && !detail::is_exact_zero(m(i, jj))) detail::sub_mul(acc, m(i, jj), out.x[jj]);
    out.x[j] = acc;
  }
  out.free_column = free_local < c ? cols[free_local] : C;
  return out;
}

}  // namespace hplab
