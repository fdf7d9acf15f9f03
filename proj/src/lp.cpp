#include "robust/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace robust {

std::string to_string(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterationLimit: return "iteration_limit";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// LinearProgram

template <class S>
std::size_t LinearProgram<S>::add_row(std::vector<std::pair<std::size_t, S>> entries, RowKind kind, S rhs) {
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  Row row;
  row.kind = kind;
  row.rhs = std::move(rhs);
  for (auto& [j, a] : entries) {
    if (j >= num_vars()) throw ValidationError("constraint references variable " + std::to_string(j) + " out of range");
    if (!row.entries.empty() && row.entries.back().first == j) {
      row.entries.back().second += a;
    } else {
      row.entries.emplace_back(j, std::move(a));
    }
  }
  std::erase_if(row.entries, [](const auto& e) { return e.second == S(0); });
  rows_.push_back(std::move(row));
  return rows_.size() - 1;
}

template <class S>
std::size_t LinearProgram<S>::add_dense_row(const std::vector<S>& coeffs, RowKind kind, S rhs) {
  if (coeffs.size() != num_vars()) throw ValidationError("dense row length does not match the variable count");
  std::vector<std::pair<std::size_t, S>> entries;
  for (std::size_t j = 0; j < coeffs.size(); ++j) {
    if (coeffs[j] != S(0)) entries.emplace_back(j, coeffs[j]);
  }
  return add_row(std::move(entries), kind, std::move(rhs));
}

template <class S>
std::vector<std::vector<S>> LinearProgram<S>::dense_matrix() const {
  std::vector<std::vector<S>> a(rows_.size(), std::vector<S>(num_vars(), S(0)));
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    for (const auto& [j, v] : rows_[i].entries) a[i][j] = v;
  }
  return a;
}

template <class S>
S LinearProgram<S>::activity(std::size_t i, const std::vector<S>& x) const {
  S s(0);
  for (const auto& [j, v] : rows_[i].entries) s += v * x[j];
  return s;
}

template <class S>
S LinearProgram<S>::objective_value(const std::vector<S>& x) const {
  S s(0);
  for (std::size_t j = 0; j < objective_.size(); ++j) {
    if (objective_[j] != S(0)) s += objective_[j] * x[j];
  }
  return s;
}

template <class S>
void LinearProgram<S>::validate() const {
  for (const auto& c : objective_) {
    if (!ScalarTraits<S>::is_finite(c)) throw ValidationError("objective has a non-finite entry");
  }
  for (const auto& r : rows_) {
    if (!ScalarTraits<S>::is_finite(r.rhs)) throw ValidationError("rhs has a non-finite entry");
    for (const auto& [j, v] : r.entries) {
      if (j >= num_vars()) throw ValidationError("constraint references a variable out of range");
      if (!ScalarTraits<S>::is_finite(v)) throw ValidationError("constraint matrix has a non-finite entry");
    }
  }
}

// ---------------------------------------------------------------------------
// Simplex

namespace {

template <class S>
S default_tol(const SolverOptions& o) {
  if constexpr (ScalarTraits<S>::exact) {
    return S(0);
  } else {
    return o.tolerance ? *o.tolerance : ScalarTraits<S>::tolerance();
  }
}

// Dense Gauss-Jordan inverse with partial pivoting; false if singular.
template <class S>
bool invert(std::vector<S>& a, std::size_t m, std::vector<S>& inv, const S& tol) {
  inv.assign(m * m, S(0));
  for (std::size_t i = 0; i < m; ++i) inv[i * m + i] = S(1);
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t piv = m;
    S best(0);
    for (std::size_t r = col; r < m; ++r) {
      S v = abs_value(a[r * m + col]);
      if (v > best) {
        best = v;
        piv = r;
        if constexpr (ScalarTraits<S>::exact) break;
      }
    }
    if (piv == m || best <= tol) return false;
    if (piv != col) {
      for (std::size_t k = 0; k < m; ++k) {
        std::swap(a[piv * m + k], a[col * m + k]);
        std::swap(inv[piv * m + k], inv[col * m + k]);
      }
    }
    const S p = a[col * m + col];
    // earlier columns are already eliminated, so the pivot row of `a` is zero left of col
    std::vector<std::size_t> nz_a, nz_inv;
    for (std::size_t k = col; k < m; ++k) {
      if (a[col * m + k] != S(0)) {
        a[col * m + k] /= p;
        nz_a.push_back(k);
      }
    }
    for (std::size_t k = 0; k < m; ++k) {
      if (inv[col * m + k] != S(0)) {
        inv[col * m + k] /= p;
        nz_inv.push_back(k);
      }
    }
    for (std::size_t r = 0; r < m; ++r) {
      if (r == col) continue;
      const S f = a[r * m + col];
      if (f == S(0)) continue;
      for (std::size_t k : nz_a) a[r * m + k] -= f * a[col * m + k];
      for (std::size_t k : nz_inv) inv[r * m + k] -= f * inv[col * m + k];
    }
  }
  return true;
}

}  // namespace

template <class S>
struct SimplexSolver<S>::Impl {
  using Column = std::vector<std::pair<std::size_t, S>>;

  const SolverOptions& opt;
  S tol;
  std::size_t m = 0;
  std::size_t n_struct = 0;
  std::size_t n_total = 0;
  std::vector<Column> cols;
  std::vector<S> b;
  std::vector<int> row_sign;
  std::vector<char> artificial;
  std::vector<char> eligible;
  std::vector<S> cost;
  std::vector<std::size_t> basis;
  std::vector<long> where;
  std::vector<S> binv;
  std::vector<S> xb;
  std::vector<S> y;
  std::vector<S> alpha;
  S pivot_tol;
  std::size_t iterations = 0;
  std::size_t since_refactor = 0;
  std::size_t degenerate_streak = 0;
  bool bland = false;

  Impl(const SolverOptions& o) : opt(o), tol(default_tol<S>(o)), pivot_tol(ScalarTraits<S>::exact ? S(0) : S(1e-7)) {}

  void build(const LinearProgram<S>& lp) {
    m = lp.num_rows();
    n_struct = lp.num_vars();
    cols.assign(n_struct, {});
    b.resize(m);
    row_sign.resize(m);
    std::vector<RowKind> kinds(m);
    for (std::size_t i = 0; i < m; ++i) {
      const auto& row = lp.row(i);
      const int sign = row.rhs < S(0) ? -1 : 1;
      row_sign[i] = sign;
      b[i] = sign < 0 ? S(-row.rhs) : row.rhs;
      RowKind k = row.kind;
      if (sign < 0 && k == RowKind::LessEqual) k = RowKind::GreaterEqual;
      else if (sign < 0 && k == RowKind::GreaterEqual) k = RowKind::LessEqual;
      kinds[i] = k;
      for (const auto& [j, v] : row.entries) cols[j].emplace_back(i, sign < 0 ? S(-v) : v);
    }
    artificial.assign(n_struct, 0);
    basis.assign(m, 0);
    for (std::size_t i = 0; i < m; ++i) {
      if (kinds[i] == RowKind::LessEqual) {
        cols.push_back({{i, S(1)}});
        artificial.push_back(0);
        basis[i] = cols.size() - 1;
      } else {
        if (kinds[i] == RowKind::GreaterEqual) {
          cols.push_back({{i, S(-1)}});
          artificial.push_back(0);
        }
        cols.push_back({{i, S(1)}});
        artificial.push_back(1);
        basis[i] = cols.size() - 1;
      }
    }
    n_total = cols.size();
    where.assign(n_total, -1);
    for (std::size_t i = 0; i < m; ++i) where[basis[i]] = static_cast<long>(i);
    binv.assign(m * m, S(0));
    for (std::size_t i = 0; i < m; ++i) binv[i * m + i] = S(1);
    xb = b;
    eligible.assign(n_total, 1);
    cost.assign(n_total, S(0));
    alpha.assign(m, S(0));
  }

  bool has_artificials() const {
    for (std::size_t j = 0; j < n_total; ++j) {
      if (artificial[j]) return true;
    }
    return false;
  }

  void compute_duals() {
    y.assign(m, S(0));
    for (std::size_t i = 0; i < m; ++i) {
      const S& c = cost[basis[i]];
      if (c == S(0)) continue;
      for (std::size_t k = 0; k < m; ++k) {
        if (binv[i * m + k] != S(0)) y[k] += c * binv[i * m + k];
      }
    }
  }

  S reduced_cost(std::size_t j) const {
    S d = cost[j];
    for (const auto& [i, a] : cols[j]) {
      if (y[i] != S(0)) d -= y[i] * a;
    }
    return d;
  }

  void compute_alpha(std::size_t q) {
    std::fill(alpha.begin(), alpha.end(), S(0));
    for (const auto& [i, a] : cols[q]) {
      for (std::size_t k = 0; k < m; ++k) {
        const S& v = binv[k * m + i];
        if (v != S(0)) alpha[k] += v * a;
      }
    }
  }

  // Rebuilds B^{-1}, x_B and y from the current basis (double mode).
  void refactor() {
    std::vector<S> dense(m * m, S(0));
    for (std::size_t i = 0; i < m; ++i) {
      for (const auto& [r, a] : cols[basis[i]]) dense[r * m + i] = a;
    }
    std::vector<S> inv;
    if (!invert(dense, m, inv, S(0))) throw InternalConsistencyError("simplex basis became singular");
    binv = std::move(inv);
    xb.assign(m, S(0));
    for (std::size_t k = 0; k < m; ++k) {
      S s(0);
      for (std::size_t i = 0; i < m; ++i) {
        if (b[i] != S(0) && binv[k * m + i] != S(0)) s += binv[k * m + i] * b[i];
      }
      xb[k] = s;
    }
    compute_duals();
    since_refactor = 0;
  }

  void pivot(std::size_t q, std::size_t r, const S& dq) {
    const S ar = alpha[r];
    const S theta = xb[r] / ar;
    for (std::size_t k = 0; k < m; ++k) {
      if (k != r && alpha[k] != S(0)) xb[k] -= theta * alpha[k];
    }
    xb[r] = theta;
    S* row_r = &binv[r * m];
    for (std::size_t k = 0; k < m; ++k) {
      if (row_r[k] != S(0)) row_r[k] /= ar;
    }
    if (dq != S(0)) {
      for (std::size_t k = 0; k < m; ++k) {
        if (row_r[k] != S(0)) y[k] += dq * row_r[k];
      }
    }
    std::vector<std::size_t> nz;
    for (std::size_t k = 0; k < m; ++k) {
      if (row_r[k] != S(0)) nz.push_back(k);
    }
    for (std::size_t i = 0; i < m; ++i) {
      if (i == r || alpha[i] == S(0)) continue;
      const S f = alpha[i];
      S* row_i = &binv[i * m];
      for (std::size_t k : nz) row_i[k] -= f * row_r[k];
    }
    where[basis[r]] = -1;
    // an artificial that leaves never re-enters
    if (artificial[basis[r]]) eligible[basis[r]] = 0;
    basis[r] = q;
    where[q] = static_cast<long>(r);
    ++iterations;
    ++since_refactor;
  }

  std::size_t refactor_interval() const {
    if (opt.refactor_interval) return opt.refactor_interval;
    return std::max<std::size_t>(100, m);
  }

  // Leaving row for the current alpha, or m if unbounded. Exact mode uses the
  // textbook minimum ratio; double mode a two-pass Harris test that prefers
  // large pivots among near-ties. Bland mode breaks ties by lowest variable index.
  std::size_t ratio_test() const {
    std::size_t r = m;
    if constexpr (ScalarTraits<S>::exact) {
      S best(0);
      for (std::size_t k = 0; k < m; ++k) {
        if (alpha[k] <= S(0)) continue;
        S ratio = xb[k] / alpha[k];
        if (r == m || ratio < best || (ratio == best && bland && basis[k] < basis[r])) {
          r = k;
          best = ratio;
        }
      }
      return r;
    } else {
      const double ptol = pivot_tol;
      double bound = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < m; ++k) {
        if (alpha[k] <= ptol) continue;
        bound = std::min(bound, (std::max(xb[k], 0.0) + tol) / alpha[k]);
      }
      if (bound == std::numeric_limits<double>::infinity()) return m;
      double best_alpha = 0;
      for (std::size_t k = 0; k < m; ++k) {
        if (alpha[k] <= ptol) continue;
        if (std::max(xb[k], 0.0) / alpha[k] > bound) continue;
        if (r == m || (bland ? basis[k] < basis[r] : alpha[k] > best_alpha)) {
          r = k;
          best_alpha = alpha[k];
        }
      }
      return r;
    }
  }

  // Maximizes the current cost vector. Returns Optimal, Unbounded or IterationLimit.
  LpStatus run() {
    compute_duals();
    while (true) {
      if (opt.max_iterations && iterations >= opt.max_iterations) return LpStatus::IterationLimit;
      if constexpr (!ScalarTraits<S>::exact) {
        if (since_refactor >= refactor_interval()) refactor();
      }
      std::size_t q = n_total;
      S dq(0);
      for (std::size_t j = 0; j < n_total; ++j) {
        if (where[j] >= 0 || !eligible[j]) continue;
        S d = reduced_cost(j);
        if (d > tol) {
          if (bland) {
            q = j;
            dq = d;
            break;
          }
          if (q == n_total || d > dq) {
            q = j;
            dq = d;
          }
        }
      }
      if (q == n_total) {
        if constexpr (!ScalarTraits<S>::exact) {
          if (since_refactor > 0) {
            refactor();
            continue;
          }
        }
        return LpStatus::Optimal;
      }
      compute_alpha(q);
      const std::size_t r = ratio_test();
      if (r == m) return LpStatus::Unbounded;
      const bool degenerate = (xb[r] < S(0) ? S(0) : xb[r]) <= tol;
      if (degenerate) {
        if (++degenerate_streak >= opt.bland_after) bland = true;
      } else {
        degenerate_streak = 0;
        bland = false;
      }
      if constexpr (!ScalarTraits<S>::exact) {
        if (xb[r] < S(0)) xb[r] = S(0);
      }
      pivot(q, r, dq);
    }
  }

  // After phase one: pivot zero-level artificials out of the basis where possible.
  void drive_out_artificials() {
    for (std::size_t r = 0; r < m; ++r) {
      if (!artificial[basis[r]]) continue;
      std::size_t best_j = n_total;
      S best(0);
      for (std::size_t j = 0; j < n_total; ++j) {
        if (where[j] >= 0 || artificial[j]) continue;
        S a(0);
        for (const auto& [i, v] : cols[j]) {
          if (binv[r * m + i] != S(0)) a += binv[r * m + i] * v;
        }
        S mag = abs_value(a);
        if (mag > max_value(pivot_tol, best)) {
          best = mag;
          best_j = j;
          if constexpr (ScalarTraits<S>::exact) break;
        }
      }
      if (best_j == n_total) continue;
      compute_alpha(best_j);
      S dq(0);
      pivot(best_j, r, dq);
    }
  }

  LpSolution<S> solve(const LinearProgram<S>& lp) {
    LpSolution<S> sol;
    build(lp);
    if (has_artificials()) {
      for (std::size_t j = 0; j < n_total; ++j) cost[j] = artificial[j] ? S(-1) : S(0);
      LpStatus st = run();
      if (st == LpStatus::IterationLimit) {
        sol.status = st;
        sol.iterations = iterations;
        return sol;
      }
      S infeas(0);
      for (std::size_t i = 0; i < m; ++i) {
        if (artificial[basis[i]]) infeas += xb[i];
      }
      S feas_tol = tol;
      if constexpr (!ScalarTraits<S>::exact) {
        S bmax(1);
        for (const auto& v : b) bmax = max_value(bmax, abs_value(v));
        feas_tol = tol * bmax * S(static_cast<double>(m + 1));
      }
      if (infeas > feas_tol) {
        sol.status = LpStatus::Infeasible;
        sol.iterations = iterations;
        return sol;
      }
      drive_out_artificials();
      for (std::size_t j = 0; j < n_total; ++j) {
        if (artificial[j] && where[j] < 0) eligible[j] = 0;
        if (artificial[j]) eligible[j] = 0;
      }
      if constexpr (!ScalarTraits<S>::exact) refactor();
    }
    std::fill(cost.begin(), cost.end(), S(0));
    for (std::size_t j = 0; j < n_struct; ++j) cost[j] = lp.objective()[j];
    degenerate_streak = 0;
    bland = false;
    LpStatus st = run();
    sol.status = st;
    sol.iterations = iterations;
    if (st != LpStatus::Optimal) return sol;
    sol.primal.assign(n_struct, S(0));
    for (std::size_t i = 0; i < m; ++i) {
      if (basis[i] < n_struct) {
        S v = xb[i];
        if constexpr (!ScalarTraits<S>::exact) {
          if (v < S(0)) v = S(0);
        }
        sol.primal[basis[i]] = v;
        sol.basis.push_back(basis[i]);
      }
    }
    std::sort(sol.basis.begin(), sol.basis.end());
    sol.dual.resize(m);
    for (std::size_t i = 0; i < m; ++i) sol.dual[i] = row_sign[i] < 0 ? S(-y[i]) : y[i];
    sol.value = lp.objective_value(sol.primal);
    return sol;
  }
};

template <class S>
LpSolution<S> SimplexSolver<S>::solve(const LinearProgram<S>& lp) {
  lp.validate();
  Impl impl(options_);
  return impl.solve(lp);
}

template <class S>
LpSolution<S> solve_lexicographic_from(const LinearProgram<S>& lp, LpSolution<S> primary,
                                       const std::vector<S>& secondary, const S& epsilon,
                                       const SolverOptions& options) {
  if (secondary.size() != lp.num_vars()) throw ValidationError("secondary objective length does not match");
  if (epsilon < S(0)) throw ValidationError("lexicographic epsilon must be nonnegative");
  if (!primary.optimal()) return primary;
  LinearProgram<S> second = lp;
  second.add_dense_row(lp.objective(), RowKind::GreaterEqual, S(primary.value - epsilon));
  second.set_objective(secondary);
  LpSolution<S> sec = solve(second, options);
  if (!sec.optimal()) {
    throw InternalConsistencyError("secondary stage failed (" + to_string(sec.status) +
                                   ") although the primary optimum exists");
  }
  LpSolution<S> out;
  out.status = LpStatus::Optimal;
  out.primal = std::move(sec.primal);
  out.basis = std::move(sec.basis);
  out.value = lp.objective_value(out.primal);
  out.secondary_value = sec.value;
  out.dual = std::move(primary.dual);
  out.iterations = primary.iterations + sec.iterations;
  return out;
}

template <class S>
LpSolution<S> solve_lexicographic(const LinearProgram<S>& lp, const std::vector<S>& secondary, const S& epsilon,
                                  const SolverOptions& options) {
  if (secondary.size() != lp.num_vars()) throw ValidationError("secondary objective length does not match");
  return solve_lexicographic_from(lp, solve(lp, options), secondary, epsilon, options);
}

template <class S>
LpCheck check_solution(const LinearProgram<S>& lp, const LpSolution<S>& sol) {
  LpCheck c;
  S primal_res(0);
  S dual_res(0);
  for (const auto& v : sol.primal) {
    if (v < S(0)) primal_res = max_value(primal_res, S(-v));
  }
  for (std::size_t i = 0; i < lp.num_rows(); ++i) {
    const auto& row = lp.row(i);
    S act = lp.activity(i, sol.primal);
    S viol(0);
    switch (row.kind) {
      case RowKind::Equal: viol = abs_value(S(act - row.rhs)); break;
      case RowKind::LessEqual: viol = positive_part(S(act - row.rhs)); break;
      case RowKind::GreaterEqual: viol = positive_part(S(row.rhs - act)); break;
    }
    primal_res = max_value(primal_res, viol);
    const S& yi = sol.dual[i];
    if (row.kind == RowKind::LessEqual && yi < S(0)) dual_res = max_value(dual_res, S(-yi));
    if (row.kind == RowKind::GreaterEqual && yi > S(0)) dual_res = max_value(dual_res, yi);
  }
  std::vector<S> aty(lp.num_vars(), S(0));
  S dual_value(0);
  for (std::size_t i = 0; i < lp.num_rows(); ++i) {
    const auto& row = lp.row(i);
    dual_value += row.rhs * sol.dual[i];
    for (const auto& [j, v] : row.entries) aty[j] += v * sol.dual[i];
  }
  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    S d = lp.objective()[j] - aty[j];
    if (d > S(0)) dual_res = max_value(dual_res, d);
  }
  S gap = abs_value(S(lp.objective_value(sol.primal) - dual_value));
  c.primal_residual = to_double(primal_res);
  c.dual_residual = to_double(dual_res);
  c.gap = to_double(gap);
  c.exact_ok = primal_res == S(0) && dual_res == S(0) && gap == S(0);
  return c;
}

// ---------------------------------------------------------------------------
// Vertex enumeration

namespace {

// Row-reduces [A | b] in place; returns the indices of independent rows, or
// nullopt if the system is inconsistent.
template <class S>
std::optional<std::vector<std::size_t>> independent_rows(std::vector<std::vector<S>> a, const S& tol) {
  const std::size_t m = a.size();
  if (m == 0) return std::vector<std::size_t>{};
  const std::size_t w = a[0].size();  // last column is b
  std::vector<std::size_t> order(m);
  for (std::size_t i = 0; i < m; ++i) order[i] = i;
  std::vector<std::size_t> keep;
  std::size_t rank = 0;
  for (std::size_t col = 0; col + 1 < w && rank < m; ++col) {
    std::size_t piv = m;
    S best(0);
    for (std::size_t r = rank; r < m; ++r) {
      S v = abs_value(a[r][col]);
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (piv == m || best <= tol) continue;
    std::swap(a[piv], a[rank]);
    std::swap(order[piv], order[rank]);
    for (std::size_t r = rank + 1; r < m; ++r) {
      if (a[r][col] == S(0)) continue;
      S f = a[r][col] / a[rank][col];
      for (std::size_t k = col; k < w; ++k) a[r][k] -= f * a[rank][k];
    }
    keep.push_back(order[rank]);
    ++rank;
  }
  for (std::size_t r = rank; r < m; ++r) {
    if (abs_value(a[r][w - 1]) > tol) return std::nullopt;
  }
  std::sort(keep.begin(), keep.end());
  return keep;
}

// Solves the square system M z = rhs; false if singular.
template <class S>
bool solve_square(std::vector<S> mat, std::vector<S> rhs, std::size_t r, const S& tol, std::vector<S>& z) {
  for (std::size_t col = 0; col < r; ++col) {
    std::size_t piv = r;
    S best(0);
    for (std::size_t i = col; i < r; ++i) {
      S v = abs_value(mat[i * r + col]);
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (piv == r || best <= tol) return false;
    if (piv != col) {
      for (std::size_t k = 0; k < r; ++k) std::swap(mat[piv * r + k], mat[col * r + k]);
      std::swap(rhs[piv], rhs[col]);
    }
    for (std::size_t i = col + 1; i < r; ++i) {
      if (mat[i * r + col] == S(0)) continue;
      S f = mat[i * r + col] / mat[col * r + col];
      for (std::size_t k = col; k < r; ++k) mat[i * r + k] -= f * mat[col * r + k];
      rhs[i] -= f * rhs[col];
    }
  }
  z.assign(r, S(0));
  for (std::size_t i = r; i-- > 0;) {
    S s = rhs[i];
    for (std::size_t k = i + 1; k < r; ++k) s -= mat[i * r + k] * z[k];
    z[i] = s / mat[i * r + i];
  }
  return true;
}

}  // namespace

template <class S>
std::vector<std::vector<S>> enumerate_vertices(const LinearProgram<S>& lp, std::size_t max_vars) {
  lp.validate();
  const std::size_t n = lp.num_vars();
  const std::size_t limit = std::min<std::size_t>(max_vars, 24);
  if (n > limit) {
    throw RefusalError("vertex enumeration refused: " + std::to_string(n) + " variables exceed the limit of " +
                       std::to_string(limit));
  }
  const S tol = ScalarTraits<S>::tolerance();
  // standard form: structural columns, then one slack per inequality row
  std::size_t m = lp.num_rows();
  std::size_t n_slack = 0;
  for (const auto& row : lp.rows()) n_slack += row.kind != RowKind::Equal;
  const std::size_t w = n + n_slack;
  std::vector<std::vector<S>> aug(m, std::vector<S>(w + 1, S(0)));
  std::size_t s = n;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& row = lp.row(i);
    for (const auto& [j, v] : row.entries) aug[i][j] = v;
    if (row.kind == RowKind::LessEqual) aug[i][s++] = S(1);
    if (row.kind == RowKind::GreaterEqual) aug[i][s++] = S(-1);
    aug[i][w] = row.rhs;
  }
  auto keep = independent_rows(aug, tol);
  if (!keep) return {};
  const std::size_t r = keep->size();
  std::vector<std::vector<S>> out;
  if (r == 0) {
    out.emplace_back(n, S(0));
    return out;
  }
  std::vector<S> rhs(r);
  for (std::size_t i = 0; i < r; ++i) rhs[i] = aug[(*keep)[i]][w];
  std::vector<std::size_t> pick(r);
  for (std::size_t i = 0; i < r; ++i) pick[i] = i;
  std::vector<S> z;
  std::vector<S> mat(r * r);
  auto same = [&](const std::vector<S>& a, const std::vector<S>& b) {
    for (std::size_t j = 0; j < n; ++j) {
      if (abs_value(S(a[j] - b[j])) > tol) return false;
    }
    return true;
  };
  if (r > w) return {};
  while (true) {
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t k = 0; k < r; ++k) mat[i * r + k] = aug[(*keep)[i]][pick[k]];
    }
    if (solve_square(mat, rhs, r, tol, z)) {
      bool feasible = true;
      for (const auto& v : z) {
        if (v < -tol) {
          feasible = false;
          break;
        }
      }
      if (feasible) {
        std::vector<S> x(n, S(0));
        for (std::size_t k = 0; k < r; ++k) {
          if (pick[k] < n) x[pick[k]] = z[k] < S(0) ? S(0) : z[k];
        }
        bool dup = false;
        for (const auto& v : out) {
          if (same(v, x)) {
            dup = true;
            break;
          }
        }
        if (!dup) out.push_back(std::move(x));
      }
    }
    // next combination
    std::size_t i = r;
    while (i > 0 && pick[i - 1] == w - r + (i - 1)) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t k = i; k < r; ++k) pick[k] = pick[k - 1] + 1;
  }
  return out;
}

template class LinearProgram<double>;
template class LinearProgram<Rational>;
template class SimplexSolver<double>;
template class SimplexSolver<Rational>;
template LpSolution<double> solve_lexicographic(const LinearProgram<double>&, const std::vector<double>&,
                                                const double&, const SolverOptions&);
template LpSolution<Rational> solve_lexicographic(const LinearProgram<Rational>&, const std::vector<Rational>&,
                                                  const Rational&, const SolverOptions&);
template LpSolution<double> solve_lexicographic_from(const LinearProgram<double>&, LpSolution<double>,
                                                     const std::vector<double>&, const double&,
                                                     const SolverOptions&);
template LpSolution<Rational> solve_lexicographic_from(const LinearProgram<Rational>&, LpSolution<Rational>,
                                                       const std::vector<Rational>&, const Rational&,
                                                       const SolverOptions&);
template LpCheck check_solution(const LinearProgram<double>&, const LpSolution<double>&);
template LpCheck check_solution(const LinearProgram<Rational>&, const LpSolution<Rational>&);
template std::vector<std::vector<double>> enumerate_vertices(const LinearProgram<double>&, std::size_t);
template std::vector<std::vector<Rational>> enumerate_vertices(const LinearProgram<Rational>&, std::size_t);

}  // namespace robust
