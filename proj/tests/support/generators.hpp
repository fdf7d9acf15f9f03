#pragma once

// Seeded random instances for property tests.

#include <algorithm>
#include <random>
#include <utility>
#include <vector>

#include "robust/measures.hpp"
#include "robust/piecewise.hpp"

namespace gen {

template <class S>
S frac(long num, long den) {
  return S(num) / S(den);
}

template <class S>
struct Instance {
  robust::DiscreteMeasure<S> mu;
  robust::DiscreteMeasure<S> nu;
};

// `n` distinct atoms on the grid {k/den : |k| <= lim*den} with integer weights 1..6.
template <class S>
robust::DiscreteMeasure<S> random_measure(std::mt19937_64& rng, std::size_t n, long lim, long den) {
  std::vector<long> ks;
  for (long k = -lim * den; k <= lim * den; ++k) ks.push_back(k);
  std::shuffle(ks.begin(), ks.end(), rng);
  n = std::min(n, ks.size());
  std::uniform_int_distribution<long> w(1, 6);
  std::vector<long> ws(n);
  long total = 0;
  for (auto& v : ws) total += (v = w(rng));
  std::vector<std::pair<S, S>> pts;
  for (std::size_t i = 0; i < n; ++i) pts.emplace_back(frac<S>(ks[i], den), frac<S>(ws[i], total));
  return robust::DiscreteMeasure<S>::from_points(std::move(pts));
}

// ν obtained from μ by splitting every atom x into two grid points a < x < b
// (or keeping it with probability `keep`), so μ ⪯ ν by construction.
template <class S>
robust::DiscreteMeasure<S> spread(std::mt19937_64& rng, const robust::DiscreteMeasure<S>& mu, long max_step,
                                  long den, double keep = 0.0) {
  std::uniform_int_distribution<long> step(1, max_step);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<std::pair<S, S>> pts;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const S& x = mu.atom(i);
    const S& w = mu.weight(i);
    if (u(rng) < keep) {
      pts.emplace_back(x, w);
      continue;
    }
    S a = x - frac<S>(step(rng), den);
    S b = x + frac<S>(step(rng), den);
    S pb = (x - a) / (b - a);
    pts.emplace_back(a, S(w * (S(1) - pb)));
    pts.emplace_back(b, S(w * pb));
  }
  return robust::DiscreteMeasure<S>::from_points(std::move(pts));
}

template <class S>
Instance<S> random_instance(std::mt19937_64& rng, std::size_t n_mu, long lim, long den, long max_step,
                            double keep = 0.0) {
  auto mu = random_measure<S>(rng, n_mu, lim, den);
  auto nu = spread<S>(rng, mu, max_step, den, keep);
  return {std::move(mu), std::move(nu)};
}

// Structure-suite family: μ has `atoms` distinct atoms on {k/den : 1 <= k <= span}
// (so μ lives on ℝ⁺); each atom x is spread uniformly over the 2s cell midpoints
// x + (j + 1/2)/den, j = -s..s-1, with s drawn from [s_lo, s_hi]. Every spread
// has mean x, so μ ⪯ ν, and ν is a grid law of spacing 1/den.
template <class S>
Instance<S> structure_instance(std::mt19937_64& rng, std::size_t atoms, long span, long s_lo, long s_hi, long den) {
  std::vector<long> ks;
  for (long k = 1; k <= span; ++k) ks.push_back(k);
  std::shuffle(ks.begin(), ks.end(), rng);
  atoms = std::min(atoms, ks.size());
  std::uniform_int_distribution<long> w(1, 6), st(s_lo, s_hi);
  std::vector<long> ws(atoms);
  long total = 0;
  for (auto& v : ws) total += (v = w(rng));
  std::vector<std::pair<S, S>> pm, pn;
  for (std::size_t i = 0; i < atoms; ++i) {
    const S x = frac<S>(ks[i], den);
    const S wt = frac<S>(ws[i], total);
    pm.emplace_back(x, wt);
    const long s = st(rng);
    for (long j = -s; j < s; ++j) pn.emplace_back(S(x + frac<S>(2 * j + 1, 2 * den)), S(wt / S(2 * s)));
  }
  return {robust::DiscreteMeasure<S>::from_points(std::move(pm)), robust::DiscreteMeasure<S>::from_points(std::move(pn))};
}

// Seven nodes on the grid {k/den : |k| <= R*den}: three sorted draws give
// x⁻ <= x <= x⁺, then each child pair is drawn, sorted and rejected unless it
// brackets its parent.
template <class S>
std::vector<S> random_btp_nodes(std::mt19937_64& rng, long R = 3, long den = 4) {
  std::uniform_int_distribution<long> k(-R * den, R * den);
  long a[3] = {k(rng), k(rng), k(rng)};
  std::sort(a, a + 3);
  auto bracket = [&](long parent) {
    for (;;) {
      long lo = k(rng), hi = k(rng);
      if (lo > hi) std::swap(lo, hi);
      if (lo <= parent && parent <= hi) return std::pair<long, long>{lo, hi};
    }
  };
  auto [mm, mp] = bracket(a[0]);
  auto [pm, pp] = bracket(a[2]);
  return {frac<S>(a[1], den), frac<S>(a[0], den), frac<S>(a[2], den), frac<S>(mm, den),
          frac<S>(mp, den),   frac<S>(pm, den),   frac<S>(pp, den)};
}

// Convex piecewise-linear function with `kinks` breakpoints on the grid
// {k/den : |k| <= lim*den} and integer slopes increasing from a random start.
template <class S>
robust::PiecewiseLinear<S> random_convex(std::mt19937_64& rng, std::size_t kinks, long lim, long den) {
  std::vector<long> ks;
  for (long k = -lim * den; k <= lim * den; ++k) ks.push_back(k);
  std::shuffle(ks.begin(), ks.end(), rng);
  ks.resize(std::min(kinks, ks.size()));
  std::sort(ks.begin(), ks.end());
  std::uniform_int_distribution<long> start(-3, 1), inc(0, 2), value(-2, 2);
  long slope = start(rng);
  const long left = slope;
  std::vector<S> xs, ys;
  S y = frac<S>(value(rng), 1);
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (i > 0) y += S(slope) * frac<S>(ks[i] - ks[i - 1], den);
    xs.push_back(frac<S>(ks[i], den));
    ys.push_back(y);
    slope += inc(rng);
  }
  return robust::PiecewiseLinear<S>(std::move(xs), std::move(ys), S(left), S(slope));
}

}  // namespace gen
