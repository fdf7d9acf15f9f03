#include "robust/btp.hpp"

#include <map>
#include <sstream>

namespace robust {

namespace {

template <class S>
S split_weight(const S& lo, const S& mid, const S& hi) {
  if (!(lo < hi)) return S(1);
  return S((mid - lo) / (hi - lo));
}

template <class S>
Coupling<S> from_masses(const std::vector<std::pair<std::pair<S, S>, S>>& pieces) {
  std::map<std::pair<S, S>, S> merged;
  for (const auto& [xy, m] : pieces) {
    if (m == S(0)) continue;
    merged[xy] += m;
  }
  Coupling<S> c{2, {}};
  for (const auto& [xy, m] : merged) c.points.push_back({{xy.first, xy.second}, m});
  return c;
}

}  // namespace

template <class S>
std::string Btp<S>::describe() const {
  std::ostringstream os;
  os << "BTP(x=" << ScalarTraits<S>::format(x) << ", x-=" << ScalarTraits<S>::format(x_minus)
     << ", x+=" << ScalarTraits<S>::format(x_plus) << ", y--=" << ScalarTraits<S>::format(y_mm)
     << ", y-+=" << ScalarTraits<S>::format(y_mp) << ", y+-=" << ScalarTraits<S>::format(y_pm)
     << ", y++=" << ScalarTraits<S>::format(y_pp) << ")";
  return os.str();
}

template <class S>
Btp<S> make_btp(const S& x, const S& x_minus, const S& x_plus, const S& y_mm, const S& y_mp, const S& y_pm,
                const S& y_pp) {
  Btp<S> b{x, x_minus, x_plus, y_mm, y_mp, y_pm, y_pp, S(0), S(0), S(0), S(0), S(0), S(0)};
  auto fail = [&](const char* what) { throw ValidationError(std::string("invalid BTP: ") + what + " in " + b.describe()); };
  if (x_minus > x || x > x_plus) fail("need x- <= x <= x+");
  if (y_mm > x_minus || x_minus > y_mp) fail("need y-- <= x- <= y-+");
  if (y_pm > x_plus || x_plus > y_pp) fail("need y+- <= x+ <= y++");
  b.lambda_plus = split_weight(x_minus, x, x_plus);
  b.lambda_minus = S(1) - b.lambda_plus;
  b.lambda_mp = split_weight(y_mm, x_minus, y_mp);
  b.lambda_mm = S(1) - b.lambda_mp;
  b.lambda_pp = split_weight(y_pm, x_plus, y_pp);
  b.lambda_pm = S(1) - b.lambda_pp;
  return b;
}

template <class S>
Btp<S> make_btp(const std::vector<S>& n) {
  if (n.size() != 7) throw ValidationError("a BTP needs 7 nodes, got " + std::to_string(n.size()));
  return make_btp(n[0], n[1], n[2], n[3], n[4], n[5], n[6]);
}

template <class S>
Coupling<S> right_part(const Btp<S>& b) {
  return from_masses<S>({{{b.x_minus, b.y_mm}, S(b.lambda_minus * b.lambda_mm)},
                         {{b.x_minus, b.y_mp}, S(b.lambda_minus * b.lambda_mp)},
                         {{b.x_plus, b.y_pm}, S(b.lambda_plus * b.lambda_pm)},
                         {{b.x_plus, b.y_pp}, S(b.lambda_plus * b.lambda_pp)}});
}

template <class S>
Coupling<S> left_part(const Btp<S>& b) {
  return from_masses<S>({{{b.x, b.y_mm}, S(b.lambda_minus * b.lambda_mm)},
                         {{b.x, b.y_mp}, S(b.lambda_minus * b.lambda_mp)},
                         {{b.x, b.y_pm}, S(b.lambda_plus * b.lambda_pm)},
                         {{b.x, b.y_pp}, S(b.lambda_plus * b.lambda_pp)}});
}

template <class S>
S abs_cost(const Coupling<S>& c) {
  return c.integrate([](const std::vector<S>& p) { return abs_value(S(p[0] + p[1])); });
}

template <class S>
Btp<S> mirror(const Btp<S>& b) {
  if (b.x_minus == b.x_plus) {
    return make_btp<S>(-b.x, -b.x_plus, -b.x_minus, -b.y_mp, -b.y_mm, -b.y_pp, -b.y_pm);
  }
  return make_btp<S>(-b.x, -b.x_plus, -b.x_minus, -b.y_pp, -b.y_pm, -b.y_mp, -b.y_mm);
}

std::string to_string(LCase c) { return "L" + std::to_string(static_cast<int>(c) + 1); }

std::optional<LCase> mirror_partner(LCase c) {
  switch (c) {
    case LCase::L1: return LCase::L1;
    case LCase::L2: return LCase::L3;
    case LCase::L3: return LCase::L2;
    case LCase::L4: return LCase::L5;
    case LCase::L5: return LCase::L4;
    case LCase::L9: return LCase::L9;
    default: return std::nullopt;
  }
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::RightSuboptimal: return "right_suboptimal";
    case Verdict::LeftDominated: return "left_dominated";
    case Verdict::Both: return "both";
  }
  return "unknown";
}

template <class S>
std::vector<LCase> classify_cases(const Btp<S>& b, const S& tol) {
  auto le = [&](const S& a, const S& c) { return a <= c + tol; };
  auto eq = [&](const S& a, const S& c) { return near(a, c, tol); };
  const S& xm = b.x_minus;
  const S& xp = b.x_plus;
  const S& ymm = b.y_mm;
  const S& ymp = b.y_mp;
  const S& ypm = b.y_pm;
  const S& ypp = b.y_pp;
  const S zero(0);
  const S width = xp - xm;
  // λ with λ·a + (1-λ)·c = target; none when a = c
  auto interp = [](const S& a, const S& c, const S& target) -> std::optional<S> {
    if (a == c) return std::nullopt;
    return S((c - target) / (c - a));
  };
  std::vector<LCase> out;
  if (le(ymp, ypm)) out.push_back(LCase::L1);
  if (le(zero, xm + ypm) && le(zero, xm + ymm)) out.push_back(LCase::L2);
  if (le(xp + ypp, zero) && le(xp + ymp, zero)) out.push_back(LCase::L3);
  if (le(xp + ymp, zero) && le(xp + ypm, zero) && le(zero, xp + ypp)) out.push_back(LCase::L4);
  if (le(zero, xm + ypm) && le(zero, xm + ymp) && le(xm + ymm, zero)) out.push_back(LCase::L5);
  if (le(zero, xm + ymp) && le(xm + ymm, zero) && le(zero, xp + ypm) && le(ymm, ypm) && le(ypm, ypp) &&
      le(ypp, ymp)) {
    auto lm = interp(ymm, ymp, ypm);
    auto lp = interp(ymm, ymp, ypp);
    if (lm && lp && le(S((S(1) - *lm) * width), xp + ypm) && le(S((S(1) - *lp) * width), xp + ypp)) {
      out.push_back(LCase::L6);
    }
  }
  if (le(zero, xm + ymp) && le(xm + ymm, zero) && le(zero, xm + ypp) && le(xp + ypm, zero) && le(ypm, ymm) &&
      le(ymm, ypp) && le(ypp, ymp)) {
    auto l = interp(ypm, ypp, ymm);
    if (l && le(S(*l * width), S(-(xm + ymm)))) out.push_back(LCase::L7);
  }
  if (eq(ymm, ypm) && le(xp + ymm, zero) && le(zero, xm + ymp) && le(zero, xp + ypp) && le(ypp, ymp)) {
    auto l = interp(ymm, ymp, ypp);
    if (l && le(S((S(1) - *l) * width), xp + ypp)) out.push_back(LCase::L8);
  }
  if (eq(ymp, ypp) && eq(ymm, ypm)) out.push_back(LCase::L9);
  return out;
}

template <class S>
Suboptimality<S> right_part_suboptimal(const Btp<S>& b, const S& tol) {
  Suboptimality<S> out;
  const auto pr = right_part(b);
  out.cost = abs_cost(pr);
  out.optimum = out.cost;
  auto mu = pr.marginal(0);
  if (mu.size() < 2) return out;  // single source row: the coupling is forced
  auto nu = pr.marginal(1);
  auto res = solve_mot(mu, nu, CostSpec<S>::abs_sum(), Direction::Max);
  out.optimum = res.value;
  if (res.value > out.cost + tol) {
    out.suboptimal = true;
    out.competitor = std::move(res.coupling);
  }
  return out;
}

template <class S>
DominanceResult<S> dominance_check(const Btp<S>& b, const S& tol) {
  DominanceResult<S> out;
  out.cost_left = abs_cost(left_part(b));
  out.cost_right = abs_cost(right_part(b));
  out.matched_cases = classify_cases(b, tol);
  auto sub = right_part_suboptimal(b, tol);
  const bool dominated = out.cost_left <= out.cost_right + tol;
  if (!sub.suboptimal && !dominated) {
    throw FalsificationError("dominance falsification: right part optimal yet cheaper than left part (" +
                             ScalarTraits<S>::format(out.cost_right) + " < " +
                             ScalarTraits<S>::format(out.cost_left) + ") for " + b.describe());
  }
  out.verdict = sub.suboptimal && dominated ? Verdict::Both
                : sub.suboptimal            ? Verdict::RightSuboptimal
                                            : Verdict::LeftDominated;
  out.improving_competitor = std::move(sub.competitor);
  return out;
}

#define ROBUST_BTP_INSTANTIATE(S)                                                                    \
  template struct Btp<S>;                                                                            \
  template Btp<S> make_btp(const S&, const S&, const S&, const S&, const S&, const S&, const S&);    \
  template Btp<S> make_btp(const std::vector<S>&);                                                   \
  template Coupling<S> right_part(const Btp<S>&);                                                    \
  template Coupling<S> left_part(const Btp<S>&);                                                     \
  template S abs_cost(const Coupling<S>&);                                                           \
  template Btp<S> mirror(const Btp<S>&);                                                             \
  template std::vector<LCase> classify_cases(const Btp<S>&, const S&);                               \
  template Suboptimality<S> right_part_suboptimal(const Btp<S>&, const S&);                          \
  template DominanceResult<S> dominance_check(const Btp<S>&, const S&);

ROBUST_BTP_INSTANTIATE(double)
ROBUST_BTP_INSTANTIATE(Rational)

}  // namespace robust
