#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "robust/errors.hpp"
#include "robust/scalar.hpp"

namespace robust {

/// Finite atomic probability measure on the real line.
template <class S>
class DiscreteMeasure {
 public:
  DiscreteMeasure() = default;

  /// Strict constructor: atoms strictly increasing and finite, weights positive,
  /// total mass one (exactly for rationals, within tolerance for doubles).
  DiscreteMeasure(std::vector<S> atoms, std::vector<S> weights)
      : atoms_(std::move(atoms)), weights_(std::move(weights)) {
    validate();
  }

  /// Sorts, merges atoms closer than the merge distance and drops zero weights.
  static DiscreteMeasure from_points(std::vector<std::pair<S, S>> points) {
    std::sort(points.begin(), points.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<S> atoms;
    std::vector<S> weights;
    for (auto& [x, w] : points) {
      if (w < S(0)) throw ValidationError("measure has a negative weight");
      if (w == S(0)) continue;
      if (!atoms.empty() && abs_value(S(x - atoms.back())) <= ScalarTraits<S>::merge_distance()) {
        weights.back() += w;
      } else {
        atoms.push_back(x);
        weights.push_back(w);
      }
    }
    return DiscreteMeasure(std::move(atoms), std::move(weights));
  }

  static DiscreteMeasure dirac(S x) { return DiscreteMeasure({std::move(x)}, {S(1)}); }

  /// Equal weights on the given (not necessarily sorted or distinct) points.
  static DiscreteMeasure uniform(const std::vector<S>& points) {
    if (points.empty()) throw ValidationError("uniform measure needs at least one point");
    std::vector<std::pair<S, S>> pts;
    const S w = S(1) / S(static_cast<long>(points.size()));
    for (const auto& p : points) pts.emplace_back(p, w);
    return from_points(std::move(pts));
  }

  std::size_t size() const { return atoms_.size(); }
  const std::vector<S>& atoms() const { return atoms_; }
  const std::vector<S>& weights() const { return weights_; }
  const S& atom(std::size_t i) const { return atoms_[i]; }
  const S& weight(std::size_t i) const { return weights_[i]; }

  S mean() const {
    S m(0);
    for (std::size_t i = 0; i < atoms_.size(); ++i) m += atoms_[i] * weights_[i];
    return m;
  }

  /// ∫ (x - K)_+ dμ
  S call(const S& strike) const {
    S c(0);
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      if (atoms_[i] > strike) c += (atoms_[i] - strike) * weights_[i];
    }
    return c;
  }

  template <class F>
  S integrate(F&& f) const {
    S v(0);
    for (std::size_t i = 0; i < atoms_.size(); ++i) v += S(f(atoms_[i])) * weights_[i];
    return v;
  }

  /// Index of an atom equal to x (within merge distance), if any.
  std::optional<std::size_t> find(const S& x) const {
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), S(x - ScalarTraits<S>::merge_distance()));
    if (it != atoms_.end() && abs_value(S(*it - x)) <= ScalarTraits<S>::merge_distance()) {
      return static_cast<std::size_t>(it - atoms_.begin());
    }
    return std::nullopt;
  }

  bool operator==(const DiscreteMeasure& other) const {
    return atoms_ == other.atoms_ && weights_ == other.weights_;
  }

 private:
  void validate() const {
    if (atoms_.empty()) throw ValidationError("measure has no atoms");
    if (atoms_.size() != weights_.size()) throw ValidationError("measure atoms and weights differ in length");
    S total(0);
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      if (!ScalarTraits<S>::is_finite(atoms_[i]) || !ScalarTraits<S>::is_finite(weights_[i])) {
        throw ValidationError("measure has a non-finite entry");
      }
      if (!(weights_[i] > S(0))) throw ValidationError("measure weights must be positive");
      if (i > 0 && !(atoms_[i - 1] < atoms_[i])) {
        throw ValidationError("measure atoms must be strictly increasing");
      }
      total += weights_[i];
    }
    if (!near(total, S(1), ScalarTraits<S>::tolerance())) {
      throw ValidationError("measure weights sum to " + ScalarTraits<S>::format(total) + ", not 1");
    }
  }

  std::vector<S> atoms_;
  std::vector<S> weights_;
};

/// Call prices C(K) sampled at increasing strikes.
template <class S>
struct CallCurve {
  std::vector<S> strikes;
  std::vector<S> prices;
};

template <class S>
struct ConvexOrderResult {
  bool ordered = true;
  std::optional<S> witness;  // violating strike
  S violation{0};            // C_mu(K) - C_nu(K) at the witness, or the mean gap
  std::string reason;
};

/// μ ⪯ ν test: equal means and C_μ(K) ≤ C_ν(K) + tol at every atom of either measure.
template <class S>
ConvexOrderResult<S> convex_order(const DiscreteMeasure<S>& mu, const DiscreteMeasure<S>& nu, const S& tol) {
  ConvexOrderResult<S> r;
  const S gap = mu.mean() - nu.mean();
  if (abs_value(gap) > tol) {
    r.ordered = false;
    r.witness = min_value(mu.atom(0), nu.atom(0));
    r.violation = gap;
    r.reason = "means differ";
    return r;
  }
  std::vector<S> strikes = mu.atoms();
  strikes.insert(strikes.end(), nu.atoms().begin(), nu.atoms().end());
  std::sort(strikes.begin(), strikes.end());
  strikes.erase(std::unique(strikes.begin(), strikes.end()), strikes.end());
  for (const auto& k : strikes) {
    const S d = mu.call(k) - nu.call(k);
    if (d > tol && (!r.witness || d > r.violation)) {
      r.ordered = false;
      r.witness = k;
      r.violation = d;
      r.reason = "call price of the first marginal exceeds the second";
    }
  }
  return r;
}

template <class S>
void require_convex_order(const DiscreteMeasure<S>& mu, const DiscreteMeasure<S>& nu, const S& tol,
                          std::optional<std::size_t> step = std::nullopt) {
  auto r = convex_order(mu, nu, tol);
  if (r.ordered) return;
  std::string where = step ? " at step " + std::to_string(*step) : std::string();
  throw ConvexOrderError("marginals not in convex order" + where + ": " + r.reason + " (strike " +
                             ScalarTraits<S>::format(*r.witness) + ")",
                         ScalarTraits<S>::format(*r.witness), to_double(*r.witness), step);
}

/// Exact call curve of a measure at the given strikes.
template <class S>
CallCurve<S> call_curve(const DiscreteMeasure<S>& mu, std::vector<S> strikes) {
  CallCurve<S> c;
  c.prices.reserve(strikes.size());
  for (const auto& k : strikes) c.prices.push_back(mu.call(k));
  c.strikes = std::move(strikes);
  return c;
}

/// Strikes covering all atoms with one padding strike on each side.
template <class S>
std::vector<S> padded_strikes(const DiscreteMeasure<S>& mu) {
  std::vector<S> k;
  k.push_back(mu.atoms().front() - S(1));
  k.insert(k.end(), mu.atoms().begin(), mu.atoms().end());
  k.push_back(mu.atoms().back() + S(1));
  return k;
}

/// Discrete Breeden-Litzenberger inversion: mass at each interior strike is the
/// jump in the slope of C. The curve must start left of the support (slope -1)
/// and end right of it (slope 0, price 0).
template <class S>
DiscreteMeasure<S> calls_to_measure(const CallCurve<S>& curve, const S& tol = ScalarTraits<S>::tolerance()) {
  const auto& k = curve.strikes;
  const auto& c = curve.prices;
  if (k.size() != c.size()) throw ValidationError("call curve strikes and prices differ in length");
  if (k.size() < 3) throw ValidationError("call curve needs at least three strikes");
  for (std::size_t i = 0; i < k.size(); ++i) {
    if (!ScalarTraits<S>::is_finite(k[i]) || !ScalarTraits<S>::is_finite(c[i])) {
      throw ValidationError("call curve has a non-finite entry");
    }
    if (i > 0 && !(k[i - 1] < k[i])) throw ValidationError("call curve strikes must be strictly increasing");
    if (c[i] < -tol) throw ValidationError("not arbitrage-free curve: negative price");
  }
  std::vector<S> slope;
  for (std::size_t i = 0; i + 1 < k.size(); ++i) slope.push_back(S((c[i + 1] - c[i]) / (k[i + 1] - k[i])));
  for (std::size_t i = 0; i < slope.size(); ++i) {
    if (slope[i] > tol) throw ValidationError("not arbitrage-free curve: price increases in strike");
    if (slope[i] < S(-1) - tol) throw ValidationError("not arbitrage-free curve: slope below -1");
    if (i > 0 && slope[i] < slope[i - 1] - tol) {
      throw ValidationError("not arbitrage-free curve: convexity violated at strike " +
                            ScalarTraits<S>::format(k[i]));
    }
  }
  if (!near(slope.front(), S(-1), tol)) {
    throw ValidationError("call curve does not start left of the support (first slope is not -1)");
  }
  if (!near(slope.back(), S(0), tol) || !near(c.back(), S(0), tol)) {
    throw ValidationError("call curve does not end right of the support (last price or slope is not 0)");
  }
  std::vector<std::pair<S, S>> pts;
  for (std::size_t i = 1; i + 1 < k.size(); ++i) {
    S w = slope[i] - slope[i - 1];
    if (w > tol) pts.emplace_back(k[i], w);
  }
  if constexpr (!ScalarTraits<S>::exact) {
    S total(0);
    for (auto& p : pts) total += p.second;
    for (auto& p : pts) p.second /= total;
  }
  return DiscreteMeasure<S>::from_points(std::move(pts));
}

/// Image measure under x -> a x + b.
template <class S>
DiscreteMeasure<S> affine_pushforward(const DiscreteMeasure<S>& mu, const S& a, const S& b) {
  if (a == S(0)) throw ValidationError("affine_pushforward: scale must be nonzero");
  std::vector<std::pair<S, S>> pts;
  pts.reserve(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) pts.emplace_back(S(a * mu.atom(i) + b), mu.weight(i));
  return DiscreteMeasure<S>::from_points(std::move(pts));
}

template <class S>
struct AbsReduction {
  DiscreteMeasure<S> mu;
  DiscreteMeasure<S> nu;
  S linear_offset;
};

/// Rewrites ((x+y)/2 - K)_+ over M(μ,ν) as ½|x̃+ỹ| over M(μ̃,ν̃) plus a constant,
/// with x̃ = (x-K)/2.
template <class S>
AbsReduction<S> reduce_to_abs(const DiscreteMeasure<S>& mu, const DiscreteMeasure<S>& nu, const S& strike) {
  const S half = S(1) / S(2);
  const S shift = S(-strike / S(2));
  return {affine_pushforward(mu, half, shift), affine_pushforward(nu, half, shift),
          S((mu.mean() + nu.mean()) / S(4) - strike / S(2))};
}

/// ∫|x|^k dμ
template <class S>
S moment(const DiscreteMeasure<S>& mu, int k) {
  if (k < 0) throw ValidationError("moment order must be nonnegative");
  return mu.integrate([k](const S& x) {
    S a = abs_value(x);
    S p(1);
    for (int i = 0; i < k; ++i) p *= a;
    return p;
  });
}

template <class S>
struct UniformPiece {
  S lo;
  S hi;
  S mass;
};

/// Midpoint quantization of a mixture of uniform densities. Atoms are shared
/// between pieces in proportion to their mass, at least one per piece.
template <class S>
DiscreteMeasure<S> discretize_uniform(const std::vector<UniformPiece<S>>& pieces, std::size_t grid) {
  if (pieces.empty()) throw ValidationError("uniform mixture has no pieces");
  if (grid < pieces.size()) throw ValidationError("grid smaller than the number of uniform pieces");
  S total(0);
  for (const auto& p : pieces) {
    if (!(p.lo < p.hi)) throw ValidationError("uniform piece needs lo < hi");
    if (!(p.mass > S(0))) throw ValidationError("uniform piece needs positive mass");
    total += p.mass;
  }
  if (!near(total, S(1), ScalarTraits<S>::tolerance())) throw ValidationError("uniform piece masses must sum to 1");
  std::vector<std::size_t> counts;
  std::size_t used = 0;
  for (const auto& p : pieces) {
    auto n = static_cast<std::size_t>(to_double(p.mass) * static_cast<double>(grid) + 0.5);
    n = std::max<std::size_t>(n, 1);
    counts.push_back(n);
    used += n;
  }
  // fix rounding on the heaviest piece
  std::size_t heavy = 0;
  for (std::size_t i = 1; i < counts.size(); ++i) {
    if (counts[i] > counts[heavy]) heavy = i;
  }
  if (used > grid && counts[heavy] > used - grid) counts[heavy] -= used - grid;
  if (used < grid) counts[heavy] += grid - used;
  std::vector<std::pair<S, S>> pts;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const auto& p = pieces[i];
    const S n(static_cast<long>(counts[i]));
    const S step = S((p.hi - p.lo) / n);
    for (std::size_t j = 0; j < counts[i]; ++j) {
      S x = p.lo + step * (S(static_cast<long>(j)) + S(1) / S(2));
      pts.emplace_back(x, S(p.mass / n));
    }
  }
  return DiscreteMeasure<S>::from_points(std::move(pts));
}

}  // namespace robust
