#include "robust/mot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace robust {

std::string to_string(Direction d) { return d == Direction::Max ? "max" : "min"; }

// ---------------------------------------------------------------------------
// CostSpec

template <class S>
S CostSpec<S>::operator()(const std::vector<S>& x, std::size_t cell) const {
  switch (kind) {
    case Kind::AbsSum: {
      S s(0);
      for (const auto& v : x) s += v;
      return abs_value(s);
    }
    case Kind::CallOnSum: {
      S s(0);
      for (const auto& v : x) s += v;
      return positive_part(S(s - strike));
    }
    case Kind::Straddle: return abs_value(S(x.back() - x.front()));
    case Kind::ConvexOfWeightedAvg: {
      S s(0);
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (weights[i] != S(0)) s += weights[i] * x[i];
      }
      return phi(s);
    }
    case Kind::CustomTable: return table.at(cell);
  }
  return S(0);
}

template <class S>
void CostSpec<S>::validate(std::size_t dims, std::size_t cells) const {
  if (kind == Kind::ConvexOfWeightedAvg) {
    if (weights.size() != dims) {
      throw ValidationError("payoff weights: expected " + std::to_string(dims) + " entries, got " +
                            std::to_string(weights.size()));
    }
    phi.require_convex("payoff");
  }
  if (kind == Kind::CustomTable && table.size() != cells) {
    throw ValidationError("payoff table: expected " + std::to_string(cells) + " entries, got " +
                          std::to_string(table.size()));
  }
  if (kind == Kind::CallOnSum && !ScalarTraits<S>::is_finite(strike)) {
    throw ValidationError("payoff strike is not finite");
  }
}

// ---------------------------------------------------------------------------
// MotProblem

template <class S>
std::size_t MotProblem<S>::cells() const {
  std::size_t n = 1;
  for (const auto& p : periods) {
    if (p.grid.empty()) return 0;
    if (n > std::numeric_limits<std::size_t>::max() / p.grid.size()) return std::numeric_limits<std::size_t>::max();
    n *= p.grid.size();
  }
  return n;
}

template <class S>
std::vector<std::size_t> MotProblem<S>::unravel(std::size_t cell) const {
  std::vector<std::size_t> idx(periods.size());
  for (std::size_t k = periods.size(); k-- > 0;) {
    idx[k] = cell % periods[k].grid.size();
    cell /= periods[k].grid.size();
  }
  return idx;
}

template <class S>
std::vector<S> MotProblem<S>::point(std::size_t cell) const {
  auto idx = unravel(cell);
  std::vector<S> x(periods.size());
  for (std::size_t k = 0; k < periods.size(); ++k) x[k] = periods[k].grid[idx[k]];
  return x;
}

template <class S>
void MotProblem<S>::validate(const S& tol) const {
  if (periods.size() < 2) throw ValidationError("a transport problem needs at least two periods");
  std::optional<DiscreteMeasure<S>> prev;
  std::size_t prev_index = 0;
  for (std::size_t k = 0; k < periods.size(); ++k) {
    const auto& p = periods[k];
    if (p.grid.empty()) throw ValidationError("period " + std::to_string(k) + " has an empty grid");
    for (std::size_t i = 0; i < p.grid.size(); ++i) {
      if (!ScalarTraits<S>::is_finite(p.grid[i])) throw ValidationError("period grid has a non-finite value");
      if (i > 0 && !(p.grid[i - 1] < p.grid[i])) {
        throw ValidationError("period " + std::to_string(k) + " grid must be strictly increasing");
      }
    }
    if (p.is_free()) continue;
    DiscreteMeasure<S> m(p.grid, *p.weights);
    if (prev) require_convex_order(*prev, m, tol, prev_index);
    prev = std::move(m);
    prev_index = k;
  }
  cost.validate(periods.size(), cells());
}

// ---------------------------------------------------------------------------
// Coupling

template <class S>
S Coupling<S>::total_mass() const {
  S t(0);
  for (const auto& p : points) t += p.mass;
  return t;
}

template <class S>
DiscreteMeasure<S> Coupling<S>::marginal(std::size_t k) const {
  const S total = total_mass();
  std::vector<std::pair<S, S>> pts;
  for (const auto& p : points) pts.emplace_back(p.x.at(k), S(p.mass / total));
  if constexpr (ScalarTraits<S>::exact) {
    return DiscreteMeasure<S>::from_points(std::move(pts));
  } else {
    // renormalize after merging so rounding does not trip validation
    std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    S sum(0);
    for (const auto& q : pts) sum += q.second;
    for (auto& q : pts) q.second /= sum;
    return DiscreteMeasure<S>::from_points(std::move(pts));
  }
}

template <class S>
CouplingResiduals coupling_residuals(const Coupling<S>& c, const MotProblem<S>& problem) {
  CouplingResiduals r;
  S mass_err = abs_value(S(c.total_mass() - S(1)));
  S marg_err(0);
  S mart_err(0);
  const std::size_t n = problem.dims();
  for (std::size_t k = 0; k < n; ++k) {
    const auto& per = problem.periods[k];
    if (per.is_free()) continue;
    std::vector<S> got(per.grid.size(), S(0));
    for (const auto& p : c.points) {
      auto it = std::lower_bound(per.grid.begin(), per.grid.end(), p.x[k]);
      if (it == per.grid.end() || *it != p.x[k]) {
        marg_err = max_value(marg_err, abs_value(p.mass));
        continue;
      }
      got[static_cast<std::size_t>(it - per.grid.begin())] += p.mass;
    }
    for (std::size_t a = 0; a < got.size(); ++a) {
      marg_err = max_value(marg_err, abs_value(S(got[a] - (*per.weights)[a])));
    }
  }
  for (std::size_t j = 0; j + 1 < n; ++j) {
    std::map<std::vector<S>, S> drift;
    for (const auto& p : c.points) {
      std::vector<S> prefix(p.x.begin(), p.x.begin() + static_cast<long>(j + 1));
      drift[prefix] += p.mass * (p.x[j + 1] - p.x[j]);
    }
    for (const auto& [k, v] : drift) mart_err = max_value(mart_err, abs_value(v));
  }
  r.mass = to_double(mass_err);
  r.marginal = to_double(marg_err);
  r.martingale = to_double(mart_err);
  r.exact_ok = mass_err == S(0) && marg_err == S(0) && mart_err == S(0);
  return r;
}

// ---------------------------------------------------------------------------
// LP encoding

namespace {

template <class S>
struct Layout {
  std::vector<std::vector<long>> marginal_row;  // per period, per grid point; -1 if absent
  long cash_row = -1;
  std::vector<std::size_t> mart_start;  // first row of each step's martingale block
  std::vector<std::size_t> prefix_count;
  std::vector<std::size_t> stride;  // cells per prefix of length k+1
};

template <class S>
Layout<S> make_layout(const MotProblem<S>& problem) {
  Layout<S> L;
  const std::size_t n = problem.dims();
  L.stride.assign(n, 1);
  for (std::size_t k = n - 1; k-- > 0;) L.stride[k] = L.stride[k + 1] * problem.periods[k + 1].grid.size();
  L.prefix_count.assign(n, 1);
  for (std::size_t k = 0; k < n; ++k) {
    L.prefix_count[k] = (k == 0 ? 1 : L.prefix_count[k - 1]) * problem.periods[k].grid.size();
  }
  std::size_t row = 0;
  bool first_constrained = true;
  L.marginal_row.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& p = problem.periods[k];
    L.marginal_row[k].assign(p.grid.size(), -1);
    if (p.is_free()) continue;
    // one row of each later prescribed law is implied by total mass
    std::size_t count = first_constrained ? p.grid.size() : p.grid.size() - 1;
    for (std::size_t a = 0; a < count; ++a) L.marginal_row[k][a] = static_cast<long>(row++);
    first_constrained = false;
  }
  if (first_constrained) L.cash_row = static_cast<long>(row++);
  for (std::size_t j = 0; j + 1 < n; ++j) {
    L.mart_start.push_back(row);
    row += L.prefix_count[j];
  }
  return L;
}

template <class S>
LinearProgram<S> build_lp(const MotProblem<S>& problem, const Layout<S>& L, const std::vector<S>& objective) {
  const std::size_t n = problem.dims();
  const std::size_t cells = problem.cells();
  std::size_t rows = L.mart_start.empty() ? 0 : L.mart_start.back() + L.prefix_count[n - 2];
  if (L.mart_start.empty()) {
    for (const auto& v : L.marginal_row) {
      for (long r : v) rows = std::max<std::size_t>(rows, r >= 0 ? static_cast<std::size_t>(r) + 1 : 0);
    }
    if (L.cash_row >= 0) rows = std::max<std::size_t>(rows, static_cast<std::size_t>(L.cash_row) + 1);
  }
  std::vector<std::vector<std::pair<std::size_t, S>>> entries(rows);
  std::vector<S> rhs(rows, S(0));
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t a = 0; a < L.marginal_row[k].size(); ++a) {
      if (L.marginal_row[k][a] >= 0) rhs[static_cast<std::size_t>(L.marginal_row[k][a])] = (*problem.periods[k].weights)[a];
    }
  }
  if (L.cash_row >= 0) rhs[static_cast<std::size_t>(L.cash_row)] = S(1);
  for (std::size_t cell = 0; cell < cells; ++cell) {
    auto idx = problem.unravel(cell);
    for (std::size_t k = 0; k < n; ++k) {
      long r = L.marginal_row[k][idx[k]];
      if (r >= 0) entries[static_cast<std::size_t>(r)].emplace_back(cell, S(1));
    }
    if (L.cash_row >= 0) entries[static_cast<std::size_t>(L.cash_row)].emplace_back(cell, S(1));
    for (std::size_t j = 0; j + 1 < n; ++j) {
      S d = problem.periods[j + 1].grid[idx[j + 1]] - problem.periods[j].grid[idx[j]];
      if (d == S(0)) continue;
      std::size_t prefix = cell / L.stride[j];
      entries[L.mart_start[j] + prefix].emplace_back(cell, d);
    }
  }
  LinearProgram<S> lp(cells);
  lp.set_objective(objective);
  for (std::size_t r = 0; r < rows; ++r) lp.add_row(std::move(entries[r]), RowKind::Equal, rhs[r]);
  return lp;
}

template <class S>
std::vector<S> cost_vector(const MotProblem<S>& problem) {
  const std::size_t cells = problem.cells();
  std::vector<S> c(cells);
  for (std::size_t cell = 0; cell < cells; ++cell) c[cell] = problem.cost(problem.point(cell), cell);
  return c;
}

}  // namespace

template <class S>
MotResult<S> solve_problem(const MotProblem<S>& problem, Direction direction, std::optional<Direction> secondary,
                           const MotOptions& options) {
  const std::size_t cells = problem.cells();
  if (cells > options.max_cells) {
    throw RefusalError("transport problem has " + std::to_string(cells) + " cells, above the limit of " +
                       std::to_string(options.max_cells) + "; use a coarser grid");
  }
  problem.validate(ScalarTraits<S>::tolerance());
  const auto L = make_layout(problem);
  const auto cost = cost_vector(problem);
  std::vector<S> obj = cost;
  if (direction == Direction::Min) {
    for (auto& v : obj) v = -v;
  }
  const auto lp = build_lp(problem, L, obj);
  LpSolution<S> sol = solve(lp, options.solver);
  if (sol.status == LpStatus::Infeasible) {
    throw ValidationError("transport problem is infeasible (prescribed laws admit no martingale coupling)");
  }
  if (!sol.optimal()) throw InternalConsistencyError("transport LP ended with status " + to_string(sol.status));
  if (secondary) {
    std::vector<S> sec(cells);
    const std::size_t last = problem.dims() - 1;
    for (std::size_t cell = 0; cell < cells; ++cell) {
      const S& y = problem.periods[last].grid[cell % problem.periods[last].grid.size()];
      sec[cell] = cost[cell] * y * y;
      if (*secondary == Direction::Min) sec[cell] = -sec[cell];
    }
    S eps(0);
    if constexpr (!ScalarTraits<S>::exact) eps = options.lexicographic_epsilon * (1 + std::abs(sol.value));
    sol = solve_lexicographic_from(lp, std::move(sol), sec, eps, options.solver);
  }
  MotResult<S> out;
  out.direction = direction;
  out.value = direction == Direction::Max ? sol.value : S(-sol.value);
  if (sol.secondary_value) {
    out.secondary_value = *secondary == Direction::Max ? *sol.secondary_value : S(-*sol.secondary_value);
  }
  out.coupling.dims = problem.dims();
  S floor(0);
  if constexpr (!ScalarTraits<S>::exact) floor = 1e-13;
  for (std::size_t cell = 0; cell < cells; ++cell) {
    if (sol.primal[cell] > floor) out.coupling.points.push_back({problem.point(cell), sol.primal[cell]});
  }
  out.lp = std::move(sol);
  return out;
}

template <class S>
S hedge_value(const MotProblem<S>& problem, const DualCertificate<S>& cert, std::size_t cell) {
  const std::size_t n = problem.dims();
  auto idx = problem.unravel(cell);
  S v = cert.cash;
  for (std::size_t k = 0; k < n; ++k) {
    if (!cert.phi[k].empty()) v += cert.phi[k][idx[k]];
  }
  std::size_t prefix = 0;
  for (std::size_t j = 0; j + 1 < n; ++j) {
    prefix = prefix * problem.periods[j].grid.size() + idx[j];
    const S& h = cert.h[j][prefix];
    if (h != S(0)) v += h * (problem.periods[j + 1].grid[idx[j + 1]] - problem.periods[j].grid[idx[j]]);
  }
  return v;
}

template <class S>
DualCertificate<S> dual_certificate(const MotProblem<S>& problem, const MotResult<S>& result) {
  if (!result.lp.optimal()) throw ValidationError("dual certificate needs an optimal solution");
  const auto L = make_layout(problem);
  const std::size_t n = problem.dims();
  const bool sub = result.direction == Direction::Min;
  auto dual = [&](long row) -> S {
    if (row < 0) return S(0);
    const S& y = result.lp.dual.at(static_cast<std::size_t>(row));
    return sub ? S(-y) : y;
  };
  DualCertificate<S> cert;
  cert.kind = sub ? HedgeKind::Sub : HedgeKind::Super;
  cert.phi.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& p = problem.periods[k];
    cert.phi[k].assign(p.grid.size(), S(0));
    for (std::size_t a = 0; a < p.grid.size(); ++a) cert.phi[k][a] = dual(L.marginal_row[k][a]);
  }
  cert.cash = dual(L.cash_row);
  cert.h.resize(n - 1);
  for (std::size_t j = 0; j + 1 < n; ++j) {
    cert.h[j].resize(L.prefix_count[j]);
    for (std::size_t pfx = 0; pfx < L.prefix_count[j]; ++pfx) {
      cert.h[j][pfx] = dual(static_cast<long>(L.mart_start[j] + pfx));
    }
  }
  S price = cert.cash;
  for (std::size_t k = 0; k < n; ++k) {
    const auto& p = problem.periods[k];
    if (p.is_free()) continue;
    for (std::size_t a = 0; a < p.grid.size(); ++a) price += cert.phi[k][a] * (*p.weights)[a];
  }
  cert.price = price;
  S worst(0);
  S scale(1);
  const std::size_t cells = problem.cells();
  for (std::size_t cell = 0; cell < cells; ++cell) {
    S c = problem.cost(problem.point(cell), cell);
    scale = max_value(scale, abs_value(c));
    S hv = hedge_value(problem, cert, cell);
    S viol = sub ? S(hv - c) : S(c - hv);
    worst = max_value(worst, viol);
  }
  cert.max_violation = to_double(worst);
  cert.duality_gap = to_double(abs_value(S(price - result.value)));
  S limit(0);
  if constexpr (!ScalarTraits<S>::exact) limit = 1e-8 * scale;
  if (worst > limit) {
    throw InternalConsistencyError("dual certificate violates the hedge inequality by " +
                                   ScalarTraits<S>::format(worst));
  }
  return cert;
}

template <class S>
S jensen_lower_bound(const DiscreteMeasure<S>& mu1, const PiecewiseLinear<S>& phi) {
  phi.require_convex("jensen_lower_bound");
  return mu1.integrate(phi);
}

template <class S>
BoundsReport<S> compute_bounds(const MotProblem<S>& problem, bool secondary, const MotOptions& options) {
  BoundsReport<S> r;
  r.minimizer = solve_problem(problem, Direction::Min,
                              secondary ? std::optional<Direction>(Direction::Max) : std::nullopt, options);
  r.maximizer = solve_problem(problem, Direction::Max,
                              secondary ? std::optional<Direction>(Direction::Min) : std::nullopt, options);
  r.lower = r.minimizer.value;
  r.upper = r.maximizer.value;
  r.sub_certificate = dual_certificate(problem, r.minimizer);
  r.super_certificate = dual_certificate(problem, r.maximizer);
  r.gap_lower = abs_value(S(r.sub_certificate.price - r.lower));
  r.gap_upper = abs_value(S(r.super_certificate.price - r.upper));
  return r;
}

#define ROBUST_MOT_INSTANTIATE(S)                                                                              \
  template struct CostSpec<S>;                                                                                 \
  template struct MotProblem<S>;                                                                               \
  template struct Coupling<S>;                                                                                 \
  template CouplingResiduals coupling_residuals(const Coupling<S>&, const MotProblem<S>&);                     \
  template MotResult<S> solve_problem(const MotProblem<S>&, Direction, std::optional<Direction>,               \
                                      const MotOptions&);                                                      \
  template S hedge_value(const MotProblem<S>&, const DualCertificate<S>&, std::size_t);                        \
  template DualCertificate<S> dual_certificate(const MotProblem<S>&, const MotResult<S>&);                     \
  template S jensen_lower_bound(const DiscreteMeasure<S>&, const PiecewiseLinear<S>&);                         \
  template BoundsReport<S> compute_bounds(const MotProblem<S>&, bool, const MotOptions&);

ROBUST_MOT_INSTANTIATE(double)
ROBUST_MOT_INSTANTIATE(Rational)

}  // namespace robust
