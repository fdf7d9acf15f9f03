#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "robust/mot.hpp"
#include "robust/piecewise.hpp"

namespace robust {

/// Piecewise-constant right-continuous path: values[k] holds on [times[k], times[k+1]).
/// The last value is the terminal one and does not enter the average.
template <class S>
struct DiscretePath {
  std::vector<S> times;
  std::vector<S> values;

  void validate() const;
  const S& horizon() const { return times.back(); }
  /// (1/T) Σ values[k] (times[k+1] - times[k]).
  S average() const;
};

template <class S>
struct OneMarginalBounds {
  S lower{0};  // φ(mean ν): stay put, jump at the very end
  S upper{0};  // ∫φ dν: jump at once, then stay put
};

template <class S>
OneMarginalBounds<S> one_marginal_bounds(const DiscreteMeasure<S>& nu, const PiecewiseLinear<S>& phi);

/// LP counterpart: `steps` free periods on atoms(ν) ∪ {mean ν} followed by the
/// terminal period with law ν; payoff φ of the average of the free periods.
template <class S>
MotProblem<S> one_marginal_problem(const DiscreteMeasure<S>& nu, const PiecewiseLinear<S>& phi,
                                   std::size_t steps = 5);

template <class S>
struct HedgePlan {
  PiecewiseLinear<S> static_payoff;
  /// H at each grid time: (1/T)∫₀ᵗ φ'(X_s) ds with the left derivative at kinks.
  std::vector<S> trading_integrand;
};

template <class S>
struct HedgeAudit {
  HedgePlan<S> plan;
  S average{0};
  S gains{0};  // Σ_k H(t_{k+1}) (X_{t_{k+1}} - X_{t_k})
  S slack{0};  // φ(X_T) - gains - φ(average)
};

template <class S>
HedgeAudit<S> superhedge_plan(const PiecewiseLinear<S>& phi, const DiscretePath<S>& path);

/// Finitely many weighted paths on a common time grid.
template <class S>
struct PathLaw {
  struct Path {
    std::vector<S> values;
    S mass;
  };
  std::vector<S> times;
  std::vector<Path> paths;

  DiscretePath<S> path(std::size_t i) const { return {times, paths[i].values}; }
  /// E[f(average)].
  template <class F>
  S expect_average(F&& f) const {
    S v(0);
    for (std::size_t i = 0; i < paths.size(); ++i) v += S(f(path(i).average())) * paths[i].mass;
    return v;
  }
};

template <class S>
struct JumpApproximation {
  PathLaw<S> law;
  S l1_gap{0};  // E|average - (t1 X + (T - t1) Y)/T|
  S bound{0};   // E|Y| / (nT)
};

/// X on [0, t1 - 1/n), then the jump to Y at t1 - 1/n or at t1 with probability
/// 1/2 each (independent of (X, Y), hence a martingale), Y on [t1, T].
/// Throws FalsificationError if the gap exceeds the bound.
template <class S>
JumpApproximation<S> approx_jump_model(const Coupling<S>& law_xy, const S& t1, const S& T, long n);

/// E φ((t1 X + (T - t1) Y)/T) under a two-step coupling.
template <class S>
S two_step_average_expectation(const Coupling<S>& law_xy, const S& t1, const S& T, const PiecewiseLinear<S>& phi);

template <class S>
struct CounterexampleReport {
  Coupling<S> law_yz;
  DiscreteMeasure<S> mu1;
  S price_candidate{0};   // E|Y + Z|, payoff |∫₀² X_t dt|
  S price_constancy{0};   // ∫|x| dμ₁
  S normalized_candidate{0};  // with the 1/T factor
  S normalized_constancy{0};
  bool strict = false;
  bool z_law_is_mu2 = false;
  bool y_law_is_mu1 = false;
  bool martingale = false;
};

template <class S>
CounterexampleReport<S> counterexample_4128();

template <class S>
struct MinNote {
  S heuristic_min{0};  // stay constant on [0, t1), jump to X_{t1}, stay again
  S jensen_floor{0};   // φ(mean): valid for every model
  std::string note;
};

template <class S>
struct TwoMarginalCandidates {
  S max_candidate{0};
  Coupling<S> maximizer;
  MinNote<S> min_note;
};

template <class S>
TwoMarginalCandidates<S> two_marginal_candidate_bounds(const DiscreteMeasure<S>& mu1, const DiscreteMeasure<S>& mu2,
                                                       const S& t1, const S& T, const PiecewiseLinear<S>& phi,
                                                       const MotOptions& options = {});

/// Law of (X_t, X_1, X_2) for some t in [0, 1].
template <class S>
struct ThreeStepModel {
  struct Node {
    S xt, x1, x2, mass;
  };
  std::array<S, 3> times{S(0), S(1), S(2)};
  std::vector<Node> support;

  /// Masses sum to one and both conditional barycenters hold (within tol).
  void validate(const S& tol = ScalarTraits<S>::tolerance()) const;
  DiscreteMeasure<S> law(std::size_t coordinate) const;
  template <class F>
  S expect(F&& f) const {
    S v(0);
    for (const auto& n : support) v += S(f(n.xt, n.x1, n.x2)) * n.mass;
    return v;
  }
};

/// Random model with Law(X_1) = μ and Law(X_2) = ν. X_t comes from cutting
/// μ's atoms into chunks and merging random groups of chunks to their
/// barycenter; X_1 -> X_2 is a vertex of M(μ, ν) for a random cost.
template <class S>
ThreeStepModel<S> sample_three_step(const DiscreteMeasure<S>& mu, const DiscreteMeasure<S>& nu,
                                    std::mt19937_64& rng, const MotOptions& options = {});

template <class S>
struct ConjectureViolation {
  std::size_t trial;
  S lhs;
  S slack;
};

template <class S>
struct ConjectureReport {
  S pi_value{0};
  std::size_t trials = 0;
  S min_slack{0};
  std::vector<ConjectureViolation<S>> violations;
};

/// With the maximizer π of ∫φ(a x + b y) over M(μ, ν), checks
/// E_β[φ(a X_t + b X_2)] <= ∫φ(a x + b y) dπ + tol on sampled models β.
template <class S>
ConjectureReport<S> conjecture_harness(const DiscreteMeasure<S>& mu, const DiscreteMeasure<S>& nu,
                                       const PiecewiseLinear<S>& phi, const S& a, const S& b, std::size_t trials,
                                       std::uint64_t seed, const S& tol = ScalarTraits<S>::tolerance());

/// Call payoff (x + y - K)_+; a violation here points at a solver or sampler bug.
template <class S>
ConjectureReport<S> conjecture_harness(const DiscreteMeasure<S>& mu, const DiscreteMeasure<S>& nu, const S& K,
                                       std::size_t trials, std::uint64_t seed,
                                       const S& tol = ScalarTraits<S>::tolerance());

#define ROBUST_ASIAN_EXTERN(S)                                                                                   \
  extern template struct DiscretePath<S>;                                                                        \
  extern template struct ThreeStepModel<S>;                                                                      \
  extern template OneMarginalBounds<S> one_marginal_bounds(const DiscreteMeasure<S>&, const PiecewiseLinear<S>&); \
  extern template MotProblem<S> one_marginal_problem(const DiscreteMeasure<S>&, const PiecewiseLinear<S>&,       \
                                                     std::size_t);                                               \
  extern template HedgeAudit<S> superhedge_plan(const PiecewiseLinear<S>&, const DiscretePath<S>&);              \
  extern template JumpApproximation<S> approx_jump_model(const Coupling<S>&, const S&, const S&, long);          \
  extern template S two_step_average_expectation(const Coupling<S>&, const S&, const S&,                         \
                                                 const PiecewiseLinear<S>&);                                     \
  extern template CounterexampleReport<S> counterexample_4128();                                                 \
  extern template TwoMarginalCandidates<S> two_marginal_candidate_bounds(                                        \
      const DiscreteMeasure<S>&, const DiscreteMeasure<S>&, const S&, const S&, const PiecewiseLinear<S>&,       \
      const MotOptions&);                                                                                        \
  extern template ThreeStepModel<S> sample_three_step(const DiscreteMeasure<S>&, const DiscreteMeasure<S>&,      \
                                                      std::mt19937_64&, const MotOptions&);                      \
  extern template ConjectureReport<S> conjecture_harness(const DiscreteMeasure<S>&, const DiscreteMeasure<S>&,   \
                                                         const PiecewiseLinear<S>&, const S&, const S&,          \
                                                         std::size_t, std::uint64_t, const S&);                  \
  extern template ConjectureReport<S> conjecture_harness(const DiscreteMeasure<S>&, const DiscreteMeasure<S>&,   \
                                                         const S&, std::size_t, std::uint64_t, const S&);
ROBUST_ASIAN_EXTERN(double)
ROBUST_ASIAN_EXTERN(Rational)
#undef ROBUST_ASIAN_EXTERN

}  // namespace robust
