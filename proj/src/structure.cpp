#include "robust/structure.hpp"

#include <algorithm>
#include <map>

namespace robust {

std::string to_string(Branch b) {
  switch (b) {
    case Branch::Upper: return "upper";
    case Branch::Lower: return "lower";
    case Branch::Diagonal: return "diagonal";
    case Branch::Residual: return "residual";
  }
  return "unknown";
}

std::string to_string(StructureMode m) { return m == StructureMode::Min ? "min" : "max"; }

std::string to_string(Constellation c) {
  switch (c) {
    case Constellation::MincorI: return "mincor_i";
    case Constellation::MincorII: return "mincor_ii";
    case Constellation::Mincorb: return "mincorb";
    case Constellation::MaxcorI: return "maxcor_i";
    case Constellation::MaxcorII: return "maxcor_ii";
    case Constellation::Maxcorb: return "maxcorb";
    case Constellation::I1: return "I1";
    case Constellation::I2: return "I2";
    case Constellation::I3: return "I3";
    case Constellation::I4: return "I4";
  }
  return "unknown";
}

template <class S>
S SupportStructure<S>::total_mass() const {
  S t(0);
  for (const auto& r : rows) t += r.mass;
  return t;
}

template <class S>
S SupportStructure<S>::residual_mass() const {
  S t(0);
  for (const auto& r : rows) t += r.residual_mass;
  return t;
}

template <class S>
std::vector<ClassifiedPoint<S>> SupportStructure<S>::residual() const {
  std::vector<ClassifiedPoint<S>> out;
  for (const auto& p : points) {
    if (p.branch == Branch::Residual) out.push_back(p);
  }
  return out;
}

namespace {

template <class S>
void require_two_step(const Coupling<S>& c, const char* what) {
  if (c.dims != 2) throw ValidationError(std::string(what) + " needs a two-step coupling");
  for (const auto& p : c.points) {
    if (p.x.size() != 2) throw ValidationError(std::string(what) + ": support point is not two-dimensional");
  }
}

// Support grouped by x; each group's (y, mass) pairs sorted by y.
template <class S>
std::map<S, std::vector<std::pair<S, S>>> group_by_x(const Coupling<S>& c) {
  std::map<S, std::vector<std::pair<S, S>>> g;
  for (const auto& p : c.points) g[p.x[0]].emplace_back(p.x[1], p.mass);
  for (auto& [x, ys] : g) {
    std::sort(ys.begin(), ys.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  }
  return g;
}

}  // namespace

template <class S>
SupportStructure<S> extract_support(const Coupling<S>& coupling, const S& diag_tol, const S& noise_mass) {
  require_two_step(coupling, "extract_support");
  if (diag_tol < S(0)) throw ValidationError("diag_tol must be nonnegative");
  if (noise_mass < S(0)) throw ValidationError("noise_mass must be nonnegative");
  SupportStructure<S> out;
  out.diag_tol = diag_tol;
  for (const auto& [x, ys] : group_by_x(coupling)) {
    XStructure<S> row;
    row.x = x;
    std::vector<std::pair<S, S>> heavy, light;
    for (const auto& [y, m] : ys) {
      row.mass += m;
      (m > noise_mass ? heavy : light).push_back({y, m});
    }
    if (heavy.empty()) std::swap(heavy, light);
    // clusters of consecutive targets
    std::vector<std::pair<std::size_t, std::size_t>> clusters;
    for (std::size_t i = 0; i < heavy.size(); ++i) {
      if (i == 0 || heavy[i].first - heavy[i - 1].first > diag_tol) clusters.push_back({i, i + 1});
      else clusters.back().second = i + 1;
    }
    std::vector<Branch> branch(clusters.size(), Branch::Residual);
    std::vector<std::size_t> off;
    for (std::size_t c = 0; c < clusters.size(); ++c) {
      bool diag = false;
      for (std::size_t i = clusters[c].first; i < clusters[c].second; ++i) {
        diag = diag || abs_value(S(x + heavy[i].first)) <= diag_tol;
      }
      if (diag) branch[c] = Branch::Diagonal;
      else off.push_back(c);
    }
    if (!off.empty()) branch[off.back()] = Branch::Upper;
    if (off.size() > 1) branch[off.front()] = Branch::Lower;
    std::vector<S> weight(clusters.size(), S(0)), moment(clusters.size(), S(0));
    auto add = [&](std::size_t c, const S& y, const S& m) {
      out.points.push_back({x, y, m, branch[c]});
      weight[c] += m;
      moment[c] += m * y;
      if (branch[c] == Branch::Residual) row.residual_mass += m;
      if (branch[c] == Branch::Diagonal) row.diagonal_mass += m;
    };
    for (std::size_t c = 0; c < clusters.size(); ++c) {
      for (std::size_t i = clusters[c].first; i < clusters[c].second; ++i) add(c, heavy[i].first, heavy[i].second);
    }
    // Light points join the cluster of the nearest heavy target.
    for (const auto& [y, m] : light) {
      std::size_t best = 0;
      S best_d = abs_value(S(heavy[0].first - y));
      for (std::size_t i = 1; i < heavy.size(); ++i) {
        S d = abs_value(S(heavy[i].first - y));
        if (d < best_d) {
          best_d = d;
          best = i;
        }
      }
      std::size_t c = 0;
      while (clusters[c].second <= best) ++c;
      add(c, y, m);
    }
    for (std::size_t c = 0; c < clusters.size(); ++c) {
      if (branch[c] == Branch::Upper) {
        row.upper_mass = weight[c];
        row.upper_target = S(moment[c] / weight[c]);
      } else if (branch[c] == Branch::Lower) {
        row.lower_mass = weight[c];
        row.lower_target = S(moment[c] / weight[c]);
      }
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

template <class S>
std::vector<MonotonicityBreach<S>> check_structure(const SupportStructure<S>& s, StructureMode mode, const S& tol) {
  std::vector<MonotonicityBreach<S>> out;
  // In max mode only mass sent strictly to the right of x enters the comparison;
  // stay-put and near-stay targets are unconstrained there.
  auto counts = [&](const XStructure<S>& r) {
    if (!r.upper_target) return false;
    return mode == StructureMode::Min || *r.upper_target > r.x + tol;
  };
  for (std::size_t i = 0; i < s.rows.size(); ++i) {
    if (!counts(s.rows[i])) continue;
    for (std::size_t j = i + 1; j < s.rows.size(); ++j) {
      if (!counts(s.rows[j])) continue;
      const S& u = *s.rows[i].upper_target;
      const S& v = *s.rows[j].upper_target;
      bool bad = mode == StructureMode::Min ? u > v + tol : u < v - tol;
      if (bad) out.push_back({s.rows[i].x, s.rows[j].x, u, v});
    }
  }
  return out;
}

template <class S>
std::vector<MonotonicityBreach<S>> lower_graph_diagnostic(const SupportStructure<S>& s, const S& tol) {
  std::vector<MonotonicityBreach<S>> out;
  for (std::size_t i = 0; i < s.rows.size(); ++i) {
    const auto& a = s.rows[i];
    if (!a.lower_target || !(*a.lower_target < -a.x)) continue;
    for (std::size_t j = i + 1; j < s.rows.size(); ++j) {
      const auto& b = s.rows[j];
      if (!b.lower_target || !(*b.lower_target < -b.x)) continue;
      if (*a.lower_target < *b.lower_target - tol) out.push_back({a.x, b.x, *a.lower_target, *b.lower_target});
    }
  }
  return out;
}

namespace {

// Accumulates a rule's inequalities: strict ones must hold with margin > tol,
// non-strict ones exactly.
template <class S>
struct RuleCheck {
  const S& tol;
  bool ok = true;
  std::optional<S> slack;

  void lt(const S& a, const S& b) {
    if (!ok) return;
    S m = b - a;
    if (!(m > tol)) {
      ok = false;
      return;
    }
    if (!slack || m < *slack) slack = m;
  }
  void le(const S& a, const S& b) {
    if (ok && !(a <= b)) ok = false;
  }
};

}  // namespace

template <class S>
std::vector<ConstellationViolation<S>> forbidden_constellations(const Coupling<S>& full, StructureMode mode,
                                                                const S& tol, const ConstellationOptions& options) {
  require_two_step(full, "forbidden_constellations");
  Coupling<S> coupling{full.dims, {}};
  for (const auto& p : full.points) {
    if (p.mass > S(options.min_mass)) coupling.points.push_back(p);
  }
  auto groups = group_by_x(coupling);
  std::size_t pairs = 0;
  for (const auto& [x, ys] : groups) pairs += ys.size() * (ys.size() - 1) / 2;
  const std::size_t n = coupling.points.size();
  if (pairs > 0 && n > options.max_combinations / pairs) {
    throw RefusalError("constellation scan needs " + std::to_string(pairs) + " x " + std::to_string(n) +
                       " combinations, above the limit of " + std::to_string(options.max_combinations) +
                       "; use a coarser grid");
  }
  std::vector<ConstellationViolation<S>> out;
  auto report = [&](Constellation rule, const S& x, const S& ym, const S& yp, const S& xp, const S& yq,
                    RuleCheck<S>& rc) {
    if (!rc.ok) return;
    out.push_back({rule, x, ym, yp, xp, yq, rc.slack ? *rc.slack : S(0)});
  };
  for (const auto& [x, ys] : groups) {
    const S mx = -x;
    for (std::size_t a = 0; a < ys.size(); ++a) {
      for (std::size_t b = a + 1; b < ys.size(); ++b) {
        const S& ym = ys[a].first;
        const S& yp = ys[b].first;
        for (const auto& p : coupling.points) {
          const S& xp = p.x[0];
          const S& yq = p.x[1];
          if (xp == x) continue;
          const S mxp = -xp;
          auto base = [&]() {
            RuleCheck<S> rc{tol, true, std::nullopt};
            rc.lt(ym, yq);
            rc.lt(yq, yp);
            return rc;
          };
          if (mode == StructureMode::Min) {
            {
              auto rc = base();
              rc.lt(ym, mx), rc.lt(mx, yp), rc.lt(mx, yq), rc.lt(x, xp);
              report(Constellation::MincorI, x, ym, yp, xp, yq, rc);
            }
            {
              auto rc = base();
              rc.lt(ym, mx), rc.lt(mx, yp), rc.lt(yq, mx), rc.lt(xp, x);
              report(Constellation::MincorII, x, ym, yp, xp, yq, rc);
            }
            {
              auto rc = base();
              rc.lt(mxp, mx), rc.le(mx, ym);
              report(Constellation::Mincorb, x, ym, yp, xp, yq, rc);
            }
          } else {
            {
              auto rc = base();
              rc.lt(ym, mxp), rc.lt(mxp, yp), rc.le(yq, mxp), rc.lt(x, xp);
              report(Constellation::MaxcorI, x, ym, yp, xp, yq, rc);
            }
            {
              auto rc = base();
              rc.lt(ym, mxp), rc.lt(mxp, yp), rc.le(mxp, yq), rc.lt(xp, x);
              report(Constellation::MaxcorII, x, ym, yp, xp, yq, rc);
            }
            {
              auto rc = base();
              rc.lt(xp, x), rc.le(mx, ym);
              report(Constellation::Maxcorb, x, ym, yp, xp, yq, rc);
            }
            {
              auto rc = base();
              rc.lt(xp, x), rc.lt(ym, mxp), rc.le(mxp, yq);
              report(Constellation::I1, x, ym, yp, xp, yq, rc);
            }
            {
              auto rc = base();
              rc.lt(x, xp), rc.le(yq, mxp), rc.lt(mxp, yp);
              report(Constellation::I2, x, ym, yp, xp, yq, rc);
            }
            {
              auto rc = base();
              rc.lt(xp, x), rc.le(mx, ym), rc.lt(ym, mxp), rc.lt(mxp, yp);
              report(Constellation::I3, x, ym, yp, xp, yq, rc);
            }
            {
              auto rc = base();
              rc.lt(x, xp), rc.lt(ym, mxp), rc.lt(mxp, yp), rc.le(yp, mx);
              report(Constellation::I4, x, ym, yp, xp, yq, rc);
            }
          }
          if (options.max_reports && out.size() >= options.max_reports) return out;
        }
      }
    }
  }
  return out;
}

template <class S>
S Wedge<S>::f(const S& t) const {
  return (S(1) - lambda) * abs_value(S(t + y_minus)) + lambda * abs_value(S(t + y_plus)) - abs_value(S(t + y));
}

template <class S>
S Wedge<S>::g(const S& t) const {
  return (S(1) - lambda) * abs_value(S(t + y_minus)) * y_minus * y_minus +
         lambda * abs_value(S(t + y_plus)) * y_plus * y_plus - abs_value(S(t + y)) * y * y;
}

template <class S>
Wedge<S> wedge_functions(const S& y_minus, const S& y, const S& y_plus) {
  if (!(y_minus < y && y < y_plus)) throw ValidationError("wedge_functions needs y- < y < y+");
  return {y_minus, y, y_plus, S((y - y_minus) / (y_plus - y_minus))};
}

template <class S>
HalfplaneSplit<S> halfplane_split(const Coupling<S>& coupling) {
  require_two_step(coupling, "halfplane_split");
  HalfplaneSplit<S> out;
  out.right.dims = out.left.dims = 2;
  for (const auto& p : coupling.points) {
    if (p.x[0] < S(0)) out.left.points.push_back({{S(-p.x[0]), S(-p.x[1])}, p.mass});
    else out.right.points.push_back(p);
  }
  return out;
}

template <class S>
Coupling<S> halfplane_merge(const HalfplaneSplit<S>& split) {
  Coupling<S> out;
  out.dims = 2;
  out.points = split.right.points;
  for (const auto& p : split.left.points) out.points.push_back({{S(-p.x[0]), S(-p.x[1])}, p.mass});
  return out;
}

#define ROBUST_STRUCTURE_INSTANTIATE(S)                                                                         \
  template struct SupportStructure<S>;                                                                          \
  template struct Wedge<S>;                                                                                     \
  template SupportStructure<S> extract_support(const Coupling<S>&, const S&, const S&);                                   \
  template std::vector<MonotonicityBreach<S>> check_structure(const SupportStructure<S>&, StructureMode,        \
                                                              const S&);                                        \
  template std::vector<MonotonicityBreach<S>> lower_graph_diagnostic(const SupportStructure<S>&, const S&);     \
  template std::vector<ConstellationViolation<S>> forbidden_constellations(const Coupling<S>&, StructureMode,   \
                                                                           const S&, const ConstellationOptions&); \
  template Wedge<S> wedge_functions(const S&, const S&, const S&);                                              \
  template HalfplaneSplit<S> halfplane_split(const Coupling<S>&);                                               \
  template Coupling<S> halfplane_merge(const HalfplaneSplit<S>&);

ROBUST_STRUCTURE_INSTANTIATE(double)
ROBUST_STRUCTURE_INSTANTIATE(Rational)

}  // namespace robust
