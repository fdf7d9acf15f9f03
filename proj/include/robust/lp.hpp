#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "robust/errors.hpp"
#include "robust/scalar.hpp"

namespace robust {

enum class RowKind { Equal, LessEqual, GreaterEqual };
enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

std::string to_string(LpStatus status);

/// maximize c·x subject to row constraints and x >= 0. Rows are stored sparsely.
template <class S>
class LinearProgram {
 public:
  struct Row {
    std::vector<std::pair<std::size_t, S>> entries;
    RowKind kind = RowKind::Equal;
    S rhs{0};
  };

  LinearProgram() = default;
  explicit LinearProgram(std::size_t num_vars) : objective_(num_vars, S(0)) {}

  std::size_t num_vars() const { return objective_.size(); }
  std::size_t num_rows() const { return rows_.size(); }

  void set_objective(std::vector<S> c) {
    if (c.size() != objective_.size()) throw ValidationError("objective length does not match the variable count");
    objective_ = std::move(c);
  }
  const std::vector<S>& objective() const { return objective_; }
  std::vector<S>& objective() { return objective_; }

  /// Adds a row; duplicate indices are summed and zero coefficients dropped.
  std::size_t add_row(std::vector<std::pair<std::size_t, S>> entries, RowKind kind, S rhs);
  std::size_t add_dense_row(const std::vector<S>& coeffs, RowKind kind, S rhs);

  const std::vector<Row>& rows() const { return rows_; }
  const Row& row(std::size_t i) const { return rows_[i]; }

  std::vector<std::vector<S>> dense_matrix() const;
  /// Row activity a_i·x.
  S activity(std::size_t i, const std::vector<S>& x) const;
  S objective_value(const std::vector<S>& x) const;

  void validate() const;

 private:
  std::vector<S> objective_;
  std::vector<Row> rows_;
};

template <class S>
struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  S value{0};
  std::vector<S> primal;
  /// One multiplier per row: >= 0 for <= rows, <= 0 for >= rows, free for equalities.
  std::vector<S> dual;
  /// Structural variables in the final basis, increasing.
  std::vector<std::size_t> basis;
  std::optional<S> secondary_value;
  std::size_t iterations = 0;

  bool optimal() const { return status == LpStatus::Optimal; }
};

struct SolverOptions {
  /// 0 means unlimited.
  std::size_t max_iterations = 0;
  /// Double mode only: rebuild the basis inverse after this many pivots (0 = by size).
  std::size_t refactor_interval = 0;
  /// Consecutive degenerate pivots before switching to Bland's rule.
  std::size_t bland_after = 50;
  /// Overrides the scalar's default tolerance when set (double mode).
  std::optional<double> tolerance;
};

/// Revised simplex with an explicit basis inverse. One solve at a time per instance.
template <class S>
class SimplexSolver {
 public:
  explicit SimplexSolver(SolverOptions options = {}) : options_(options) {}
  LpSolution<S> solve(const LinearProgram<S>& lp);

 private:
  struct Impl;
  SolverOptions options_;
};

template <class S>
LpSolution<S> solve(const LinearProgram<S>& lp, const SolverOptions& options = {}) {
  return SimplexSolver<S>(options).solve(lp);
}

/// Maximizes the primary objective, then maximizes `secondary` over the set
/// where primary·x >= optimum - epsilon. The returned value is the primary
/// objective at the returned point; duals belong to the primary solve.
template <class S>
LpSolution<S> solve_lexicographic(const LinearProgram<S>& lp, const std::vector<S>& secondary, const S& epsilon,
                                  const SolverOptions& options = {});

/// Secondary stage only, given an optimal primary solution of `lp`.
template <class S>
LpSolution<S> solve_lexicographic_from(const LinearProgram<S>& lp, LpSolution<S> primary,
                                       const std::vector<S>& secondary, const S& epsilon,
                                       const SolverOptions& options = {});

struct LpCheck {
  double primal_residual = 0;  // worst row or bound violation
  double dual_residual = 0;    // worst reduced-cost or sign violation
  double gap = 0;              // |c·x - b·y|
  bool exact_ok = false;       // all three exactly zero (rational mode)
};

/// Independent feasibility, dual feasibility and duality-gap measurement.
template <class S>
LpCheck check_solution(const LinearProgram<S>& lp, const LpSolution<S>& sol);

/// All vertices (basic feasible solutions) of the feasible region, restricted to
/// the structural variables and deduplicated. Refuses above min(max_vars, 24) variables.
template <class S>
std::vector<std::vector<S>> enumerate_vertices(const LinearProgram<S>& lp, std::size_t max_vars = 24);

extern template class LinearProgram<double>;
extern template class LinearProgram<Rational>;
extern template class SimplexSolver<double>;
extern template class SimplexSolver<Rational>;
extern template LpSolution<double> solve_lexicographic(const LinearProgram<double>&, const std::vector<double>&,
                                                       const double&, const SolverOptions&);
extern template LpSolution<Rational> solve_lexicographic(const LinearProgram<Rational>&,
                                                         const std::vector<Rational>&, const Rational&,
                                                         const SolverOptions&);
extern template LpSolution<double> solve_lexicographic_from(const LinearProgram<double>&, LpSolution<double>,
                                                            const std::vector<double>&, const double&,
                                                            const SolverOptions&);
extern template LpSolution<Rational> solve_lexicographic_from(const LinearProgram<Rational>&,
                                                              LpSolution<Rational>, const std::vector<Rational>&,
                                                              const Rational&, const SolverOptions&);
extern template LpCheck check_solution(const LinearProgram<double>&, const LpSolution<double>&);
extern template LpCheck check_solution(const LinearProgram<Rational>&, const LpSolution<Rational>&);
extern template std::vector<std::vector<double>> enumerate_vertices(const LinearProgram<double>&, std::size_t);
extern template std::vector<std::vector<Rational>> enumerate_vertices(const LinearProgram<Rational>&, std::size_t);

}  // namespace robust
