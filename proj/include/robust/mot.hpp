#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "robust/lp.hpp"
#include "robust/measures.hpp"
#include "robust/piecewise.hpp"

namespace robust {

enum class Direction { Max, Min };

std::string to_string(Direction d);

/// Payoff Φ on n-coordinate paths.
template <class S>
struct CostSpec {
  enum class Kind { AbsSum, CallOnSum, Straddle, ConvexOfWeightedAvg, CustomTable };

  Kind kind = Kind::AbsSum;
  S strike{0};
  std::vector<S> weights;  // ConvexOfWeightedAvg
  PiecewiseLinear<S> phi;  // ConvexOfWeightedAvg
  std::vector<S> table;    // CustomTable, one value per product-grid cell in row-major order

  /// |Σ x_i|
  static CostSpec abs_sum() { return {}; }
  /// (Σ x_i - K)_+
  static CostSpec call_on_sum(S k) {
    CostSpec c;
    c.kind = Kind::CallOnSum;
    c.strike = std::move(k);
    return c;
  }
  /// |x_n - x_1|
  static CostSpec straddle() {
    CostSpec c;
    c.kind = Kind::Straddle;
    return c;
  }
  /// φ(Σ w_i x_i) with φ convex piecewise linear.
  static CostSpec convex_of_weighted_avg(std::vector<S> w, PiecewiseLinear<S> f) {
    f.require_convex("cost");
    CostSpec c;
    c.kind = Kind::ConvexOfWeightedAvg;
    c.weights = std::move(w);
    c.phi = std::move(f);
    return c;
  }
  static CostSpec custom_table(std::vector<S> values) {
    CostSpec c;
    c.kind = Kind::CustomTable;
    c.table = std::move(values);
    return c;
  }

  /// Φ at a path; `cell` is the product-grid index, used only by tables.
  S operator()(const std::vector<S>& x, std::size_t cell = 0) const;
  void validate(std::size_t dims, std::size_t cells) const;
};

/// One time step of a multi-period problem: a grid of admissible values and,
/// unless the period is free, the law prescribed on that grid.
template <class S>
struct Period {
  std::vector<S> grid;
  std::optional<std::vector<S>> weights;

  static Period constrained(const DiscreteMeasure<S>& m) { return {m.atoms(), m.weights()}; }
  static Period free(std::vector<S> g) { return {std::move(g), std::nullopt}; }
  bool is_free() const { return !weights.has_value(); }
};

template <class S>
struct MotProblem {
  std::vector<Period<S>> periods;
  CostSpec<S> cost;

  static MotProblem two_step(const DiscreteMeasure<S>& mu, const DiscreteMeasure<S>& nu, CostSpec<S> c) {
    return {{Period<S>::constrained(mu), Period<S>::constrained(nu)}, std::move(c)};
  }
  static MotProblem from_marginals(const std::vector<DiscreteMeasure<S>>& ms, CostSpec<S> c) {
    MotProblem p;
    for (const auto& m : ms) p.periods.push_back(Period<S>::constrained(m));
    p.cost = std::move(c);
    return p;
  }

  std::size_t dims() const { return periods.size(); }
  std::size_t cells() const;
  /// Grid indices of a product-grid cell.
  std::vector<std::size_t> unravel(std::size_t cell) const;
  std::vector<S> point(std::size_t cell) const;
  /// Validates shapes, grids and convex order of consecutive prescribed laws.
  void validate(const S& tol) const;
};

/// Finitely supported joint law of (x_1, ..., x_n). Masses need not sum to one
/// (sub-couplings from splitting are allowed).
template <class S>
struct Coupling {
  struct Point {
    std::vector<S> x;
    S mass;
  };
  std::size_t dims = 2;
  std::vector<Point> points;

  S total_mass() const;
  /// Law of coordinate k (normalized by the total mass).
  DiscreteMeasure<S> marginal(std::size_t k) const;
  template <class F>
  S integrate(F&& f) const {
    S v(0);
    for (const auto& p : points) v += S(f(p.x)) * p.mass;
    return v;
  }
};

struct CouplingResiduals {
  double mass = 0;        // |total - 1|
  double marginal = 0;    // worst marginal mismatch over prescribed periods
  double martingale = 0;  // worst conditional-mean mismatch over prefixes
  bool exact_ok = false;
};

/// Marginal and martingale residuals of a coupling against a problem's periods.
template <class S>
CouplingResiduals coupling_residuals(const Coupling<S>& c, const MotProblem<S>& problem);

template <class S>
struct MotResult {
  Direction direction = Direction::Max;
  Coupling<S> coupling;
  S value{0};
  std::optional<S> secondary_value;
  LpSolution<S> lp;  // in the maximization form actually solved
};

struct MotOptions {
  SolverOptions solver;
  /// Double mode: relative slack on the primary optimum in the secondary stage.
  double lexicographic_epsilon = 1e-12;
  /// Refuse problems with more product-grid cells than this.
  std::size_t max_cells = 200000;
};

/// Optimizes the problem's payoff; with `secondary`, selects among optimizers
/// the one extremizing Φ·x_n² in the given direction.
template <class S>
MotResult<S> solve_problem(const MotProblem<S>& problem, Direction direction,
                           std::optional<Direction> secondary = std::nullopt, const MotOptions& options = {});

template <class S>
MotResult<S> solve_mot(const DiscreteMeasure<S>& mu, const DiscreteMeasure<S>& nu, const CostSpec<S>& cost,
                       Direction direction, std::optional<Direction> secondary = std::nullopt,
                       const MotOptions& options = {}) {
  return solve_problem(MotProblem<S>::two_step(mu, nu, cost), direction, secondary, options);
}

template <class S>
MotResult<S> solve_mot_multi(const std::vector<DiscreteMeasure<S>>& marginals, const CostSpec<S>& cost,
                             Direction direction, const MotOptions& options = {}) {
  return solve_problem(MotProblem<S>::from_marginals(marginals, cost), direction, std::nullopt, options);
}

enum class HedgeKind { Super, Sub };

/// Static payoffs phi[k] on each period grid plus trading functions h[j] on the
/// prefixes (x_1..x_{j+1}) of the product grid, and a cash amount.
template <class S>
struct DualCertificate {
  HedgeKind kind = HedgeKind::Super;
  std::vector<std::vector<S>> phi;
  std::vector<std::vector<S>> h;
  S cash{0};
  S price{0};
  /// Worst pointwise violation of the hedge inequality over the full product grid.
  double max_violation = 0;
  /// |price - primal value|
  double duality_gap = 0;
};

/// Builds the certificate from the row duals, verifies the hedge inequality at
/// every product-grid point and throws InternalConsistencyError on failure.
template <class S>
DualCertificate<S> dual_certificate(const MotProblem<S>& problem, const MotResult<S>& result);

/// Hedge value Σφ_k(x_k) + Σ h_j(x_1..x_{j+1})(x_{j+2} - x_{j+1}) + cash at a cell.
template <class S>
S hedge_value(const MotProblem<S>& problem, const DualCertificate<S>& cert, std::size_t cell);

/// ∫φ dμ₁ for convex φ.
template <class S>
S jensen_lower_bound(const DiscreteMeasure<S>& mu1, const PiecewiseLinear<S>& phi);

template <class S>
struct BoundsReport {
  S lower{0};
  S upper{0};
  MotResult<S> minimizer;
  MotResult<S> maximizer;
  DualCertificate<S> sub_certificate;
  DualCertificate<S> super_certificate;
  S gap_lower{0};
  S gap_upper{0};
};

/// Both directions plus certificates.
template <class S>
BoundsReport<S> compute_bounds(const MotProblem<S>& problem, bool secondary = false, const MotOptions& options = {});

#define ROBUST_MOT_EXTERN(S)                                                                                   \
  extern template CouplingResiduals coupling_residuals(const Coupling<S>&, const MotProblem<S>&);              \
  extern template MotResult<S> solve_problem(const MotProblem<S>&, Direction, std::optional<Direction>,        \
                                             const MotOptions&);                                               \
  extern template S hedge_value(const MotProblem<S>&, const DualCertificate<S>&, std::size_t);                 \
  extern template DualCertificate<S> dual_certificate(const MotProblem<S>&, const MotResult<S>&);              \
  extern template S jensen_lower_bound(const DiscreteMeasure<S>&, const PiecewiseLinear<S>&);                  \
  extern template BoundsReport<S> compute_bounds(const MotProblem<S>&, bool, const MotOptions&);
ROBUST_MOT_EXTERN(double)
ROBUST_MOT_EXTERN(Rational)
#undef ROBUST_MOT_EXTERN

extern template struct CostSpec<double>;
extern template struct CostSpec<Rational>;
extern template struct MotProblem<double>;
extern template struct MotProblem<Rational>;
extern template struct Coupling<double>;
extern template struct Coupling<Rational>;

}  // namespace robust
