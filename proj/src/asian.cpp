#include "robust/asian.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

namespace robust {

namespace {

template <class S>
S ratio(long a, long b) {
  return S(S(a) / S(b));
}

template <class S>
void require_probability(const Coupling<S>& c, const char* what) {
  if (c.dims != 2) throw ValidationError(std::string(what) + ": need a two-step coupling");
  if (c.points.empty()) throw ValidationError(std::string(what) + ": empty coupling");
  for (const auto& p : c.points) {
    if (p.x.size() != 2) throw ValidationError(std::string(what) + ": point of wrong dimension");
    if (p.mass < S(0)) throw ValidationError(std::string(what) + ": negative mass");
  }
  if (!near(c.total_mass(), S(1), ScalarTraits<S>::tolerance())) {
    throw ValidationError(std::string(what) + ": coupling mass is " + ScalarTraits<S>::format(c.total_mass()));
  }
}

template <class S>
void require_horizon(const S& t1, const S& T) {
  if (!(S(0) < t1) || !(t1 < T)) throw ValidationError("need 0 < t1 < T");
}

}  // namespace

template <class S>
void DiscretePath<S>::validate() const {
  if (times.size() < 2) throw ValidationError("path needs at least two grid times");
  if (times.size() != values.size()) throw ValidationError("path times and values differ in length");
  if (times.front() != S(0)) throw ValidationError("path grid must start at 0");
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (!(times[k - 1] < times[k])) throw ValidationError("path times must be strictly increasing");
  }
}

template <class S>
S DiscretePath<S>::average() const {
  validate();
  S a(0);
  for (std::size_t k = 0; k + 1 < times.size(); ++k) a += values[k] * (times[k + 1] - times[k]);
  return S(a / horizon());
}

template <class S>
OneMarginalBounds<S> one_marginal_bounds(const DiscreteMeasure<S>& nu, const PiecewiseLinear<S>& phi) {
  phi.require_convex("one-marginal bounds");
  return {phi(nu.mean()), nu.integrate([&](const S& x) { return phi(x); })};
}

template <class S>
MotProblem<S> one_marginal_problem(const DiscreteMeasure<S>& nu, const PiecewiseLinear<S>& phi, std::size_t steps) {
  if (steps == 0) throw ValidationError("one-marginal problem needs at least one free period");
  std::vector<S> grid = nu.atoms();
  const S m = nu.mean();
  if (!nu.find(m)) {
    grid.push_back(m);
    std::sort(grid.begin(), grid.end());
  }
  MotProblem<S> p;
  for (std::size_t k = 0; k < steps; ++k) p.periods.push_back(Period<S>::free(grid));
  p.periods.push_back(Period<S>::constrained(nu));
  std::vector<S> w(steps, S(S(1) / S(static_cast<long>(steps))));
  w.push_back(S(0));
  p.cost = CostSpec<S>::convex_of_weighted_avg(std::move(w), phi);
  return p;
}

template <class S>
HedgeAudit<S> superhedge_plan(const PiecewiseLinear<S>& phi, const DiscretePath<S>& path) {
  phi.require_convex("superhedge");
  path.validate();
  const std::size_t M = path.times.size() - 1;
  const S& T = path.horizon();
  HedgeAudit<S> out;
  out.plan.static_payoff = phi;
  auto& H = out.plan.trading_integrand;
  H.assign(M + 1, S(0));
  for (std::size_t k = 0; k < M; ++k) {
    H[k + 1] = S(H[k] + phi.left_derivative(path.values[k]) * (path.times[k + 1] - path.times[k]) / T);
  }
  for (std::size_t k = 0; k < M; ++k) out.gains += H[k + 1] * (path.values[k + 1] - path.values[k]);
  out.average = path.average();
  out.slack = S(phi(path.values[M]) - out.gains - phi(out.average));
  return out;
}

template <class S>
S two_step_average_expectation(const Coupling<S>& law_xy, const S& t1, const S& T, const PiecewiseLinear<S>& phi) {
  require_horizon(t1, T);
  return law_xy.integrate([&](const std::vector<S>& p) { return phi(S((t1 * p[0] + (T - t1) * p[1]) / T)); });
}

template <class S>
JumpApproximation<S> approx_jump_model(const Coupling<S>& law_xy, const S& t1, const S& T, long n) {
  require_probability(law_xy, "jump model");
  require_horizon(t1, T);
  if (n < 1) throw ValidationError("jump model needs n >= 1");
  const S early = t1 - ratio<S>(1, n);
  if (!(early > S(0))) throw ValidationError("jump model: t1 - 1/n must be positive (n too small)");

  JumpApproximation<S> out;
  out.law.times = {S(0), early, t1, T};
  S e_abs_y(0);
  for (const auto& p : law_xy.points) {
    const S& x = p.x[0];
    const S& y = p.x[1];
    const S half = p.mass / S(2);
    out.law.paths.push_back({{x, y, y, y}, half});
    out.law.paths.push_back({{x, x, y, y}, half});
    e_abs_y += abs_value(y) * p.mass;
  }
  for (std::size_t i = 0; i < out.law.paths.size(); ++i) {
    const auto& v = out.law.paths[i].values;
    const S target = (t1 * v[0] + (T - t1) * v[3]) / T;
    out.l1_gap += abs_value(S(out.law.path(i).average() - target)) * out.law.paths[i].mass;
  }
  out.bound = S(e_abs_y / (S(n) * T));
  if (out.l1_gap > out.bound + ScalarTraits<S>::tolerance()) {
    throw FalsificationError("jump model: L1 gap " + ScalarTraits<S>::format(out.l1_gap) + " exceeds E|Y|/(nT) = " +
                             ScalarTraits<S>::format(out.bound));
  }
  return out;
}

template <class S>
CounterexampleReport<S> counterexample_4128() {
  CounterexampleReport<S> r;
  const S q = ratio<S>(1, 4);
  r.law_yz = Coupling<S>{2,
                         {{{q, S(-1)}, ratio<S>(1, 4)},
                          {{S(-q), S(1)}, ratio<S>(1, 4)},
                          {{q, S(2)}, ratio<S>(5, 28)},
                          {{S(-q), S(-2)}, ratio<S>(5, 28)},
                          {{S(0), S(2)}, ratio<S>(1, 14)},
                          {{S(0), S(-2)}, ratio<S>(1, 14)}}};
  r.mu1 = DiscreteMeasure<S>({S(-2), S(-1), S(1), S(2)}, {q, q, q, q});
  const S tol = ScalarTraits<S>::tolerance();

  // ∫₀² X_t dt = Y + Z for X = Y on (0, 1) and X = Z on [1, 2]
  r.price_candidate = r.law_yz.integrate([](const std::vector<S>& p) { return abs_value(S(p[0] + p[1])); });
  r.price_constancy = r.mu1.integrate([](const S& x) { return abs_value(x); });
  r.normalized_candidate = r.price_candidate / S(2);
  r.normalized_constancy = r.price_constancy / S(2);
  r.strict = r.price_candidate + tol < r.price_constancy;

  auto same = [&](const DiscreteMeasure<S>& a, const DiscreteMeasure<S>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (!near(a.atom(i), b.atom(i), tol) || !near(a.weight(i), b.weight(i), tol)) return false;
    }
    return true;
  };
  r.z_law_is_mu2 = same(r.law_yz.marginal(1), r.mu1);
  r.y_law_is_mu1 = same(r.law_yz.marginal(0), r.mu1);

  std::map<S, std::pair<S, S>> rows;
  for (const auto& p : r.law_yz.points) {
    rows[p.x[0]].first += p.mass;
    rows[p.x[0]].second += p.mass * p.x[1];
  }
  r.martingale = true;
  for (const auto& [y, mm] : rows) r.martingale = r.martingale && near(mm.second, S(mm.first * y), tol);
  return r;
}

template <class S>
TwoMarginalCandidates<S> two_marginal_candidate_bounds(const DiscreteMeasure<S>& mu1, const DiscreteMeasure<S>& mu2,
                                                       const S& t1, const S& T, const PiecewiseLinear<S>& phi,
                                                       const MotOptions& options) {
  require_horizon(t1, T);
  phi.require_convex("two-marginal bounds");
  TwoMarginalCandidates<S> out;
  const S a = t1 / T;
  const S b = (T - t1) / T;
  auto res = solve_mot(mu1, mu2, CostSpec<S>::convex_of_weighted_avg({a, b}, phi), Direction::Max, std::nullopt,
                       options);
  out.max_candidate = res.value;
  out.maximizer = std::move(res.coupling);

  const S m = mu1.mean();
  out.min_note.heuristic_min = mu1.integrate([&](const S& x) { return phi(S(a * m + b * x)); });
  out.min_note.jensen_floor = phi(m);
  out.min_note.note =
      "heuristic_min (constant until t1, then constant at X_t1) is not a valid lower bound in general: "
      "the 41/28 two-marginal counterexample beats it; jensen_floor = phi(mean) holds for every model";
  return out;
}

template <class S>
void ThreeStepModel<S>::validate(const S& tol) const {
  if (support.empty()) throw InternalConsistencyError("three-step model has no support");
  S total(0);
  std::map<S, std::pair<S, S>> by_t;
  std::map<std::pair<S, S>, std::pair<S, S>> by_t1;
  for (const auto& n : support) {
    if (n.mass < S(0)) throw InternalConsistencyError("three-step model has a negative mass");
    total += n.mass;
    by_t[n.xt].first += n.mass;
    by_t[n.xt].second += n.mass * n.x1;
    auto& e = by_t1[{n.xt, n.x1}];
    e.first += n.mass;
    e.second += n.mass * n.x2;
  }
  if (!near(total, S(1), tol)) throw InternalConsistencyError("three-step model mass is not one");
  for (const auto& [x, mm] : by_t) {
    if (!near(mm.second, S(mm.first * x), tol)) {
      throw InternalConsistencyError("three-step model: E[X_1 | X_t] != X_t at " + ScalarTraits<S>::format(x));
    }
  }
  for (const auto& [k, mm] : by_t1) {
    if (!near(mm.second, S(mm.first * k.second), tol)) {
      throw InternalConsistencyError("three-step model: E[X_2 | X_t, X_1] != X_1 at " +
                                     ScalarTraits<S>::format(k.second));
    }
  }
}

template <class S>
DiscreteMeasure<S> ThreeStepModel<S>::law(std::size_t coordinate) const {
  if (coordinate > 2) throw ValidationError("three-step model has coordinates 0..2");
  std::vector<std::pair<S, S>> pts;
  for (const auto& n : support) pts.emplace_back(coordinate == 0 ? n.xt : coordinate == 1 ? n.x1 : n.x2, n.mass);
  return DiscreteMeasure<S>::from_points(std::move(pts));
}

template <class S>
ThreeStepModel<S> sample_three_step(const DiscreteMeasure<S>& mu, const DiscreteMeasure<S>& nu,
                                    std::mt19937_64& rng, const MotOptions& options) {
  auto uniform = [&](long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng); };

  struct Chunk {
    std::size_t atom;
    S mass;
  };
  std::vector<Chunk> chunks;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (uniform(0, 1) == 0) {
      chunks.push_back({i, mu.weight(i)});
    } else {
      const S f = ratio<S>(uniform(1, 3), 4);
      chunks.push_back({i, S(mu.weight(i) * f)});
      chunks.push_back({i, S(mu.weight(i) * (S(1) - f))});
    }
  }
  std::shuffle(chunks.begin(), chunks.end(), rng);

  std::vector<std::size_t> group(chunks.size());
  const long mode = uniform(0, 9);
  if (mode == 0) {
    std::fill(group.begin(), group.end(), 0);
  } else if (mode == 1) {
    std::iota(group.begin(), group.end(), 0);
  } else {
    std::size_t g = 0;
    for (std::size_t c = 0; c < chunks.size();) {
      const auto len = static_cast<std::size_t>(uniform(1, 3));
      for (std::size_t k = 0; k < len && c < chunks.size(); ++k) group[c++] = g;
      ++g;
    }
  }
  std::map<std::size_t, std::pair<S, S>> bary;
  for (std::size_t c = 0; c < chunks.size(); ++c) {
    bary[group[c]].first += chunks[c].mass;
    bary[group[c]].second += chunks[c].mass * mu.atom(chunks[c].atom);
  }

  std::vector<S> table(mu.size() * nu.size());
  for (auto& v : table) v = S(uniform(0, 99));
  auto fwd = solve_mot(mu, nu, CostSpec<S>::custom_table(std::move(table)), Direction::Max, std::nullopt, options);
  std::vector<std::vector<std::pair<S, S>>> rows(mu.size());  // atom -> (y, conditional mass)
  for (const auto& p : fwd.coupling.points) {
    auto i = mu.find(p.x[0]);
    if (!i) throw InternalConsistencyError("forward coupling leaves the grid of mu");
    rows[*i].emplace_back(p.x[1], S(p.mass / mu.weight(*i)));
  }

  ThreeStepModel<S> out;
  out.times = {ratio<S>(uniform(0, 4), 4), S(1), S(2)};
  for (std::size_t c = 0; c < chunks.size(); ++c) {
    const auto& [gm, gs] = bary[group[c]];
    const S root = gs / gm;
    for (const auto& [y, q] : rows[chunks[c].atom]) {
      out.support.push_back({root, mu.atom(chunks[c].atom), y, S(chunks[c].mass * q)});
    }
  }
  out.validate(std::is_same_v<S, double> ? S(1e-9) : S(0));
  return out;
}

template <class S>
ConjectureReport<S> conjecture_harness(const DiscreteMeasure<S>& mu, const DiscreteMeasure<S>& nu,
                                       const PiecewiseLinear<S>& phi, const S& a, const S& b, std::size_t trials,
                                       std::uint64_t seed, const S& tol) {
  ConjectureReport<S> out;
  out.pi_value = solve_mot(mu, nu, CostSpec<S>::convex_of_weighted_avg({a, b}, phi), Direction::Max).value;
  out.trials = trials;
  std::mt19937_64 rng(seed);
  bool first = true;
  for (std::size_t t = 0; t < trials; ++t) {
    auto model = sample_three_step(mu, nu, rng);
    const S lhs = model.expect([&](const S& xt, const S&, const S& x2) { return phi(S(a * xt + b * x2)); });
    const S slack = out.pi_value - lhs;
    if (first || slack < out.min_slack) out.min_slack = slack;
    first = false;
    if (slack < -tol) out.violations.push_back({t, lhs, slack});
  }
  return out;
}

template <class S>
ConjectureReport<S> conjecture_harness(const DiscreteMeasure<S>& mu, const DiscreteMeasure<S>& nu, const S& K,
                                       std::size_t trials, std::uint64_t seed, const S& tol) {
  return conjecture_harness(mu, nu, PiecewiseLinear<S>::call(K), S(1), S(1), trials, seed, tol);
}

#define ROBUST_ASIAN_INSTANTIATE(S)                                                                             \
  template struct DiscretePath<S>;                                                                              \
  template struct ThreeStepModel<S>;                                                                            \
  template OneMarginalBounds<S> one_marginal_bounds(const DiscreteMeasure<S>&, const PiecewiseLinear<S>&);      \
  template MotProblem<S> one_marginal_problem(const DiscreteMeasure<S>&, const PiecewiseLinear<S>&, std::size_t); \
  template HedgeAudit<S> superhedge_plan(const PiecewiseLinear<S>&, const DiscretePath<S>&);                   \
  template JumpApproximation<S> approx_jump_model(const Coupling<S>&, const S&, const S&, long);               \
  template S two_step_average_expectation(const Coupling<S>&, const S&, const S&, const PiecewiseLinear<S>&);   \
  template CounterexampleReport<S> counterexample_4128();                                                       \
  template TwoMarginalCandidates<S> two_marginal_candidate_bounds(const DiscreteMeasure<S>&,                    \
                                                                  const DiscreteMeasure<S>&, const S&, const S&, \
                                                                  const PiecewiseLinear<S>&, const MotOptions&); \
  template ThreeStepModel<S> sample_three_step(const DiscreteMeasure<S>&, const DiscreteMeasure<S>&,           \
                                               std::mt19937_64&, const MotOptions&);                            \
  template ConjectureReport<S> conjecture_harness(const DiscreteMeasure<S>&, const DiscreteMeasure<S>&,        \
                                                  const PiecewiseLinear<S>&, const S&, const S&, std::size_t,   \
                                                  std::uint64_t, const S&);                                     \
  template ConjectureReport<S> conjecture_harness(const DiscreteMeasure<S>&, const DiscreteMeasure<S>&,        \
                                                  const S&, std::size_t, std::uint64_t, const S&);

ROBUST_ASIAN_INSTANTIATE(double)
ROBUST_ASIAN_INSTANTIATE(Rational)

}  // namespace robust
