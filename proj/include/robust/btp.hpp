#pragma once

#include <optional>
#include <string>
#include <vector>

#include "robust/mot.hpp"

namespace robust {

/// Binomial transport plan: x splits to x⁻ ≤ x ≤ x⁺, each of which splits to
/// y⁻⁻ ≤ x⁻ ≤ y⁻⁺ and y⁺⁻ ≤ x⁺ ≤ y⁺⁺. Degenerate splits put all mass on the
/// upper branch (λ⁺ = 1, λ⁻⁺ = 1, λ⁺⁺ = 1).
template <class S>
struct Btp {
  S x, x_minus, x_plus;
  S y_mm, y_mp, y_pm, y_pp;
  S lambda_plus, lambda_minus;
  S lambda_mp, lambda_mm;
  S lambda_pp, lambda_pm;

  /// Nodes in constructor order, for messages and serialization.
  std::vector<S> nodes() const { return {x, x_minus, x_plus, y_mm, y_mp, y_pm, y_pp}; }
  std::string describe() const;
  bool operator==(const Btp&) const = default;
};

template <class S>
Btp<S> make_btp(const S& x, const S& x_minus, const S& x_plus, const S& y_mm, const S& y_mp, const S& y_pm,
                const S& y_pp);

template <class S>
Btp<S> make_btp(const std::vector<S>& nodes);

/// (x⁻, y) and (x⁺, y) pieces of the plan; duplicates merged, zero masses dropped.
template <class S>
Coupling<S> right_part(const Btp<S>& b);

/// Same masses with the first coordinate replaced by x.
template <class S>
Coupling<S> left_part(const Btp<S>& b);

/// ∫|x+y| dπ for a two-step coupling.
template <class S>
S abs_cost(const Coupling<S>& c);

/// The plan of (-X, -X⁻/⁺, -Y): branches trade places, so ± labels swap.
/// When x⁻ = x⁺ only the loaded upper branch is carried over as upper.
template <class S>
Btp<S> mirror(const Btp<S>& b);

enum class LCase { L1, L2, L3, L4, L5, L6, L7, L8, L9 };

std::string to_string(LCase c);

/// The case a hypothesis set maps to under mirror (L2↔L3, L4↔L5; L1, L9 fixed).
/// L6–L8 have no partner in the list.
std::optional<LCase> mirror_partner(LCase c);

/// Every case whose hypotheses hold. Comparisons are `a <= b + tol` (exact for
/// tol = 0); a case whose auxiliary interpolation weight has a zero denominator
/// is not matched.
template <class S>
std::vector<LCase> classify_cases(const Btp<S>& b, const S& tol = ScalarTraits<S>::tolerance());

template <class S>
struct Suboptimality {
  bool suboptimal = false;
  S cost{0};     // ∫|x+y| dπ_r
  S optimum{0};  // max over martingale couplings with π_r's marginals
  std::optional<Coupling<S>> competitor;
};

/// Solves the small martingale transport problem on π_r's marginals and
/// reports whether some competitor beats π_r by more than tol.
template <class S>
Suboptimality<S> right_part_suboptimal(const Btp<S>& b, const S& tol = ScalarTraits<S>::tolerance());

enum class Verdict { RightSuboptimal, LeftDominated, Both };

std::string to_string(Verdict v);

template <class S>
struct DominanceResult {
  Verdict verdict = Verdict::LeftDominated;
  std::vector<LCase> matched_cases;
  std::optional<Coupling<S>> improving_competitor;
  S cost_left{0};
  S cost_right{0};
};

/// Throws FalsificationError (with the nodes) if neither π_r is suboptimal nor
/// cost(π_l) <= cost(π_r) + tol.
template <class S>
DominanceResult<S> dominance_check(const Btp<S>& b, const S& tol = ScalarTraits<S>::tolerance());

#define ROBUST_BTP_EXTERN(S)                                                                          \
  extern template struct Btp<S>;                                                                      \
  extern template Btp<S> make_btp(const S&, const S&, const S&, const S&, const S&, const S&, const S&); \
  extern template Btp<S> make_btp(const std::vector<S>&);                                             \
  extern template Coupling<S> right_part(const Btp<S>&);                                              \
  extern template Coupling<S> left_part(const Btp<S>&);                                               \
  extern template S abs_cost(const Coupling<S>&);                                                     \
  extern template Btp<S> mirror(const Btp<S>&);                                                       \
  extern template std::vector<LCase> classify_cases(const Btp<S>&, const S&);                         \
  extern template Suboptimality<S> right_part_suboptimal(const Btp<S>&, const S&);                    \
  extern template DominanceResult<S> dominance_check(const Btp<S>&, const S&);
ROBUST_BTP_EXTERN(double)
ROBUST_BTP_EXTERN(Rational)
#undef ROBUST_BTP_EXTERN

}  // namespace robust
