#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "robust/mot.hpp"

namespace robust {

enum class Branch { Upper, Lower, Diagonal, Residual };
enum class StructureMode { Min, Max };

std::string to_string(Branch b);
std::string to_string(StructureMode m);

template <class S>
struct ClassifiedPoint {
  S x;
  S y;
  S mass;
  Branch branch;
};

/// Decomposition of one x-atom's conditional support.
template <class S>
struct XStructure {
  S x;
  S mass{0};
  std::optional<S> upper_target;  // mass-weighted centre of the highest cluster
  S upper_mass{0};
  std::optional<S> lower_target;  // mass-weighted centre of the lowest cluster
  S lower_mass{0};
  S diagonal_mass{0};
  S residual_mass{0};
};

template <class S>
struct SupportStructure {
  S diag_tol{0};
  std::vector<XStructure<S>> rows;        // increasing x
  std::vector<ClassifiedPoint<S>> points;  // every support point with its branch
  S total_mass() const;
  S residual_mass() const;
  std::vector<ClassifiedPoint<S>> residual() const;
};

/// Clusters each x's targets (consecutive gaps <= diag_tol). A cluster holding
/// a point with |x+y| <= diag_tol is diagonal; of the others the highest is
/// upper, the lowest lower (a single one counts as upper), the rest residual.
/// Points of mass <= noise_mass join the cluster of the nearest heavier point.
template <class S>
SupportStructure<S> extract_support(const Coupling<S>& coupling, const S& diag_tol, const S& noise_mass = S(0));

template <class S>
struct MonotonicityBreach {
  S x;
  S x_prime;
  S target;
  S target_prime;
};

/// Min mode: pairs x < x' with upper(x) > upper(x') + tol. Max mode: upper(x) < upper(x') - tol,
/// comparing only upper targets beyond x + tol (mass sent to the right of x).
template <class S>
std::vector<MonotonicityBreach<S>> check_structure(const SupportStructure<S>& s, StructureMode mode, const S& tol);

/// Soft diagnostic: pairs x < x' whose lower targets both lie below the
/// secondary diagonal but do not decrease.
template <class S>
std::vector<MonotonicityBreach<S>> lower_graph_diagnostic(const SupportStructure<S>& s, const S& tol);

enum class Constellation { MincorI, MincorII, Mincorb, MaxcorI, MaxcorII, Maxcorb, I1, I2, I3, I4 };

std::string to_string(Constellation c);

template <class S>
struct ConstellationViolation {
  Constellation rule;
  S x;
  S y_minus;
  S y_plus;
  S x_prime;
  S y_prime;
  /// Smallest margin among the strict inequalities of the rule.
  S slack;
};

struct ConstellationOptions {
  /// Refuse scans with more (pair, point) combinations than this.
  std::size_t max_combinations = 10000000;
  /// Stop after this many reported violations (0 = no limit).
  std::size_t max_reports = 0;
  /// Support points of mass <= min_mass are ignored (solver noise).
  double min_mass = 0;
};

/// Scans every (x; y⁻ < y⁺) pair at a common x against every other support point
/// (x', y') with y⁻ < y' < y⁺. A rule is reported only when each of its strict
/// inequalities holds with margin greater than tol; non-strict ones are exact.
template <class S>
std::vector<ConstellationViolation<S>> forbidden_constellations(const Coupling<S>& coupling, StructureMode mode,
                                                                const S& tol, const ConstellationOptions& options = {});

/// Evaluators of the wedge functions for y⁻ < y < y⁺ with y = (1-λ)y⁻ + λy⁺.
template <class S>
struct Wedge {
  S y_minus;
  S y;
  S y_plus;
  S lambda;
  S f(const S& t) const;
  S g(const S& t) const;
};

template <class S>
Wedge<S> wedge_functions(const S& y_minus, const S& y, const S& y_plus);

template <class S>
struct HalfplaneSplit {
  Coupling<S> right;  // x >= 0, unchanged
  Coupling<S> left;   // x < 0, rotated by 180 degrees
};

template <class S>
HalfplaneSplit<S> halfplane_split(const Coupling<S>& coupling);

/// Inverse of halfplane_split.
template <class S>
Coupling<S> halfplane_merge(const HalfplaneSplit<S>& split);

#define ROBUST_STRUCTURE_EXTERN(S)                                                                             \
  extern template struct SupportStructure<S>;                                                                  \
  extern template struct Wedge<S>;                                                                             \
  extern template SupportStructure<S> extract_support(const Coupling<S>&, const S&, const S&);                           \
  extern template std::vector<MonotonicityBreach<S>> check_structure(const SupportStructure<S>&, StructureMode, \
                                                                     const S&);                                \
  extern template std::vector<MonotonicityBreach<S>> lower_graph_diagnostic(const SupportStructure<S>&,         \
                                                                            const S&);                         \
  extern template std::vector<ConstellationViolation<S>> forbidden_constellations(                             \
      const Coupling<S>&, StructureMode, const S&, const ConstellationOptions&);                               \
  extern template Wedge<S> wedge_functions(const S&, const S&, const S&);                                      \
  extern template HalfplaneSplit<S> halfplane_split(const Coupling<S>&);                                       \
  extern template Coupling<S> halfplane_merge(const HalfplaneSplit<S>&);
ROBUST_STRUCTURE_EXTERN(double)
ROBUST_STRUCTURE_EXTERN(Rational)
#undef ROBUST_STRUCTURE_EXTERN

}  // namespace robust
