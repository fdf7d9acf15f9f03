#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "robust/errors.hpp"
#include "robust/scalar.hpp"

namespace robust {

/// Continuous piecewise-linear function on the real line: values at strictly
/// increasing breakpoints, extended linearly with the given slopes outside.
/// Payoffs such as (x - K)_+ and |x - a| are the common instances.
template <class S>
class PiecewiseLinear {
 public:
  PiecewiseLinear() : breakpoints_{S(0)}, values_{S(0)}, left_slope_(0), right_slope_(0) {}

  PiecewiseLinear(std::vector<S> breakpoints, std::vector<S> values, S left_slope, S right_slope)
      : breakpoints_(std::move(breakpoints)),
        values_(std::move(values)),
        left_slope_(std::move(left_slope)),
        right_slope_(std::move(right_slope)) {
    if (breakpoints_.empty()) throw ValidationError("piecewise-linear function needs a breakpoint");
    if (breakpoints_.size() != values_.size()) {
      throw ValidationError("piecewise-linear breakpoints and values differ in length");
    }
    for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
      if (!ScalarTraits<S>::is_finite(breakpoints_[i]) || !ScalarTraits<S>::is_finite(values_[i])) {
        throw ValidationError("piecewise-linear function has a non-finite entry");
      }
      if (i > 0 && !(breakpoints_[i - 1] < breakpoints_[i])) {
        throw ValidationError("piecewise-linear breakpoints must be strictly increasing");
      }
    }
  }

  /// (x - strike)_+
  static PiecewiseLinear call(S strike) { return PiecewiseLinear({strike}, {S(0)}, S(0), S(1)); }
  /// (strike - x)_+
  static PiecewiseLinear put(S strike) { return PiecewiseLinear({strike}, {S(0)}, S(-1), S(0)); }
  /// |x - center|
  static PiecewiseLinear abs(S center = S(0)) {
    return PiecewiseLinear({center}, {S(0)}, S(-1), S(1));
  }
  static PiecewiseLinear identity() { return PiecewiseLinear({S(0)}, {S(0)}, S(1), S(1)); }

  S operator()(const S& x) const {
    if (x <= breakpoints_.front()) return S(values_.front() + left_slope_ * (x - breakpoints_.front()));
    if (x >= breakpoints_.back()) return S(values_.back() + right_slope_ * (x - breakpoints_.back()));
    auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
    std::size_t hi = static_cast<std::size_t>(it - breakpoints_.begin());
    std::size_t lo = hi - 1;
    const S slope = segment_slope(lo);
    return S(values_[lo] + slope * (x - breakpoints_[lo]));
  }

  /// Left derivative; at a kink this is the slope of the segment to its left.
  S left_derivative(const S& x) const {
    if (x <= breakpoints_.front()) return left_slope_;
    if (x > breakpoints_.back()) return right_slope_;
    auto it = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), x);
    std::size_t hi = static_cast<std::size_t>(it - breakpoints_.begin());
    return segment_slope(hi - 1);
  }

  /// Slopes of all linear pieces from left to right (size = breakpoints + 1).
  std::vector<S> slopes() const {
    std::vector<S> out;
    out.reserve(breakpoints_.size() + 1);
    out.push_back(left_slope_);
    for (std::size_t i = 0; i + 1 < breakpoints_.size(); ++i) out.push_back(segment_slope(i));
    out.push_back(right_slope_);
    return out;
  }

  bool is_convex(const S& tol = ScalarTraits<S>::tolerance()) const {
    const auto s = slopes();
    for (std::size_t i = 1; i < s.size(); ++i) {
      if (s[i] < s[i - 1] - tol) return false;
    }
    return true;
  }

  void require_convex(const std::string& what) const {
    if (!is_convex()) throw ValidationError(what + ": payoff function is not convex");
  }

  /// x -> this(scale * x + shift)
  PiecewiseLinear compose_affine(const S& scale, const S& shift) const {
    if (scale == S(0)) throw ValidationError("compose_affine: zero scale");
    std::vector<S> bps;
    std::vector<S> vals = values_;
    for (const auto& b : breakpoints_) bps.push_back(S((b - shift) / scale));
    S left = left_slope_ * scale;
    S right = right_slope_ * scale;
    if (scale < S(0)) {
      std::reverse(bps.begin(), bps.end());
      std::reverse(vals.begin(), vals.end());
      std::swap(left, right);
    }
    return PiecewiseLinear(std::move(bps), std::move(vals), left, right);
  }

  const std::vector<S>& breakpoints() const { return breakpoints_; }
  const std::vector<S>& values() const { return values_; }
  const S& left_slope() const { return left_slope_; }
  const S& right_slope() const { return right_slope_; }

 private:
  S segment_slope(std::size_t i) const {
    return S((values_[i + 1] - values_[i]) / (breakpoints_[i + 1] - breakpoints_[i]));
  }

  std::vector<S> breakpoints_;
  std::vector<S> values_;
  S left_slope_;
  S right_slope_;
};

}  // namespace robust
