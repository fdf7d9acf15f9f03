#pragma once

// Brute-force oracles used by the tests. Nothing here shares code with the
// library solvers beyond the LinearProgram container.

#include <cstddef>
#include <optional>
#include <vector>

#include "robust/lp.hpp"

namespace oracle {

using robust::Rational;

// Gaussian elimination on an m x k system; returns the unique solution when the
// columns are independent and the system is consistent.
inline std::optional<std::vector<Rational>> unique_solution(std::vector<std::vector<Rational>> a,
                                                            std::vector<Rational> b) {
  const std::size_t m = a.size();
  const std::size_t k = m ? a[0].size() : 0;
  std::size_t row = 0;
  std::vector<std::size_t> pivcol;
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t p = row;
    while (p < m && a[p][c] == 0) ++p;
    if (p == m) return std::nullopt;  // dependent column
    std::swap(a[p], a[row]);
    std::swap(b[p], b[row]);
    for (std::size_t r = 0; r < m; ++r) {
      if (r == row || a[r][c] == 0) continue;
      Rational f = a[r][c] / a[row][c];
      for (std::size_t cc = c; cc < k; ++cc) a[r][cc] -= f * a[row][cc];
      b[r] -= f * b[row];
    }
    pivcol.push_back(c);
    ++row;
  }
  for (std::size_t r = row; r < m; ++r) {
    if (b[r] != 0) return std::nullopt;
  }
  std::vector<Rational> x(k);
  for (std::size_t r = 0; r < row; ++r) x[pivcol[r]] = b[r] / a[r][pivcol[r]];
  return x;
}

// Vertices of {x >= 0 : A x (kinds) b} enumerated by support: a feasible point
// is a vertex iff the active columns (structural support plus slacks of
// non-tight inequalities) are linearly independent. Exponential in the number
// of variables; rational only.
inline std::vector<std::vector<Rational>> vertices_by_support(const robust::LinearProgram<Rational>& lp) {
  const std::size_t n = lp.num_vars();
  const std::size_t m = lp.num_rows();
  std::vector<std::size_t> slack_row;
  for (std::size_t i = 0; i < m; ++i) {
    if (lp.row(i).kind != robust::RowKind::Equal) slack_row.push_back(i);
  }
  const std::size_t w = n + slack_row.size();
  auto dense = lp.dense_matrix();
  std::vector<std::vector<Rational>> out;
  for (unsigned long mask = 0; mask < (1ul << w); ++mask) {
    std::vector<std::size_t> support;
    for (std::size_t j = 0; j < w; ++j) {
      if (mask >> j & 1ul) support.push_back(j);
    }
    if (support.size() > m) continue;
    std::vector<std::vector<Rational>> a(m, std::vector<Rational>(support.size()));
    std::vector<Rational> b(m);
    for (std::size_t i = 0; i < m; ++i) {
      b[i] = lp.row(i).rhs;
      for (std::size_t c = 0; c < support.size(); ++c) {
        std::size_t j = support[c];
        if (j < n) {
          a[i][c] = dense[i][j];
        } else {
          std::size_t r = slack_row[j - n];
          if (r == i) a[i][c] = lp.row(i).kind == robust::RowKind::LessEqual ? 1 : -1;
        }
      }
    }
    auto z = unique_solution(a, b);
    if (!z) continue;
    bool strictly_positive = true;
    for (const auto& v : *z) strictly_positive = strictly_positive && v > 0;
    if (!strictly_positive) continue;
    std::vector<Rational> x(n, Rational(0));
    for (std::size_t c = 0; c < support.size(); ++c) {
      if (support[c] < n) x[support[c]] = (*z)[c];
    }
    out.push_back(std::move(x));
  }
  return out;
}

}  // namespace oracle

#include "robust/measures.hpp"

namespace oracle {

// Naive dense encoding of the martingale transport polytope M(μ,ν) with all
// rows kept (no redundancy removal), variable (i,j) at i*|ν|+j.
template <class S>
robust::LinearProgram<S> martingale_polytope(const robust::DiscreteMeasure<S>& mu,
                                             const robust::DiscreteMeasure<S>& nu) {
  const std::size_t m = mu.size(), n = nu.size();
  robust::LinearProgram<S> lp(m * n);
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<S> row(m * n, S(0)), bary(m * n, S(0));
    for (std::size_t j = 0; j < n; ++j) {
      row[i * n + j] = S(1);
      bary[i * n + j] = nu.atom(j) - mu.atom(i);
    }
    lp.add_dense_row(row, robust::RowKind::Equal, mu.weight(i));
    lp.add_dense_row(bary, robust::RowKind::Equal, S(0));
  }
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<S> row(m * n, S(0));
    for (std::size_t i = 0; i < m; ++i) row[i * n + j] = S(1);
    lp.add_dense_row(row, robust::RowKind::Equal, nu.weight(j));
  }
  return lp;
}

}  // namespace oracle
