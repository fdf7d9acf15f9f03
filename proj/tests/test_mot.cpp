#include <gtest/gtest.h>

#include <chrono>
#include <random>

#include "robust/mot.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace robust;
using Q = Rational;
using MQ = DiscreteMeasure<Q>;

namespace {

MQ half_half(Q a, Q b) { return MQ({a, b}, {Q(1, 2), Q(1, 2)}); }

template <class S>
CostSpec<S> avg_call(std::vector<S> w, S k) {
  return CostSpec<S>::convex_of_weighted_avg(std::move(w), PiecewiseLinear<S>::call(k));
}

// Extremum of Φ over the vertices of M(μ,ν), via the naive dense encoding.
std::pair<Q, Q> vertex_extrema(const MQ& mu, const MQ& nu, const CostSpec<Q>& cost) {
  auto lp = oracle::martingale_polytope(mu, nu);
  auto verts = enumerate_vertices(lp, 24);
  EXPECT_FALSE(verts.empty());
  Q lo, hi;
  bool first = true;
  for (const auto& v : verts) {
    Q val(0);
    for (std::size_t i = 0; i < mu.size(); ++i) {
      for (std::size_t j = 0; j < nu.size(); ++j) {
        val += v[i * nu.size() + j] * cost({mu.atom(i), nu.atom(j)});
      }
    }
    if (first || val < lo) lo = val;
    if (first || val > hi) hi = val;
    first = false;
  }
  return {lo, hi};
}

}  // namespace

TEST(SolveMot, IdenticalMarginalsForceIdentity) {
  auto r = solve_mot(MQ::dirac(Q(1)), MQ::dirac(Q(1)), CostSpec<Q>::abs_sum(), Direction::Max);
  EXPECT_EQ(r.value, Q(2));
  ASSERT_EQ(r.coupling.points.size(), 1u);
  EXPECT_EQ(r.coupling.points[0].x, (std::vector<Q>{Q(1), Q(1)}));
  MQ mu({Q(-1), Q(0), Q(2)}, {Q(1, 4), Q(1, 2), Q(1, 4)});
  auto id = solve_mot(mu, mu, CostSpec<Q>::straddle(), Direction::Max);
  EXPECT_EQ(id.value, Q(0));
  EXPECT_EQ(id.coupling.points.size(), 3u);
}

TEST(SolveMot, ForwardStartExample) {
  auto cost = avg_call<Q>({Q(1, 2), Q(1, 2)}, Q(1));
  for (auto dir : {Direction::Max, Direction::Min}) {
    auto r = solve_mot(MQ::dirac(Q(1)), half_half(Q(0), Q(2)), cost, dir);
    EXPECT_EQ(r.value, Q(1, 4));
    auto cert = dual_certificate(MotProblem<Q>::two_step(MQ::dirac(Q(1)), half_half(Q(0), Q(2)), cost), r);
    EXPECT_EQ(cert.price, Q(1, 4));
    EXPECT_EQ(cert.max_violation, 0.0);
  }
}

TEST(SolveMot, RejectsConvexOrderFailure) {
  try {
    solve_mot(half_half(Q(0), Q(2)), MQ::dirac(Q(1)), CostSpec<Q>::abs_sum(), Direction::Max);
    FAIL();
  } catch (const ConvexOrderError& e) {
    EXPECT_EQ(e.witness(), "1");
    EXPECT_EQ(*e.step(), 0u);
  }
}

TEST(SolveMot, RefusesHugeProblems) {
  std::vector<Q> pts;
  for (int i = 0; i < 500; ++i) pts.push_back(Q(i, 500));
  auto mu = MQ::uniform(pts);
  MotOptions o;
  EXPECT_THROW(solve_mot(mu, mu, CostSpec<Q>::abs_sum(), Direction::Max, std::nullopt, o), RefusalError);
}

TEST(SolveMot, MatchesVertexEnumeration) {
  std::mt19937_64 rng(2024);
  for (int t = 0; t < 40; ++t) {
    auto inst = gen::random_instance<Q>(rng, 1 + t % 3, 2, 2, 3, 0.2);
    if (inst.nu.size() > 4) continue;
    for (const auto& cost : {CostSpec<Q>::abs_sum(), CostSpec<Q>::straddle(), CostSpec<Q>::call_on_sum(Q(1, 2))}) {
      auto [lo, hi] = vertex_extrema(inst.mu, inst.nu, cost);
      EXPECT_EQ(solve_mot(inst.mu, inst.nu, cost, Direction::Max).value, hi);
      EXPECT_EQ(solve_mot(inst.mu, inst.nu, cost, Direction::Min).value, lo);
    }
  }
}

TEST(SolveMot, CouplingInvariantsAndDirections) {
  std::mt19937_64 rng(77);
  for (int t = 0; t < 30; ++t) {
    auto inst = gen::random_instance<Q>(rng, 2 + t % 4, 3, 4, 6);
    auto p = MotProblem<Q>::two_step(inst.mu, inst.nu, CostSpec<Q>::abs_sum());
    auto hi = solve_problem(p, Direction::Max);
    auto lo = solve_problem(p, Direction::Min);
    EXPECT_TRUE(coupling_residuals(hi.coupling, p).exact_ok);
    EXPECT_TRUE(coupling_residuals(lo.coupling, p).exact_ok);
    EXPECT_LE(lo.value, hi.value);
    EXPECT_EQ(hi.coupling.integrate([](const std::vector<Q>& x) { return abs_value(Q(x[0] + x[1])); }), hi.value);
  }
  std::mt19937_64 rng2(78);
  for (int t = 0; t < 30; ++t) {
    auto inst = gen::random_instance<double>(rng2, 3 + t % 8, 3, 8, 10);
    auto p = MotProblem<double>::two_step(inst.mu, inst.nu, CostSpec<double>::abs_sum());
    auto hi = solve_problem(p, Direction::Max);
    auto res = coupling_residuals(hi.coupling, p);
    EXPECT_LE(res.marginal, 1e-9);
    EXPECT_LE(res.martingale, 1e-9);
  }
}

TEST(SolveMot, StrikeReductionConsistency) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 30; ++t) {
    auto inst = gen::random_instance<Q>(rng, 1 + t % 4, 2, 2, 4);
    Q k(static_cast<long>(rng() % 9) - 4, 2);
    auto red = reduce_to_abs(inst.mu, inst.nu, k);
    auto direct_cost = avg_call<Q>({Q(1, 2), Q(1, 2)}, k);
    for (auto dir : {Direction::Max, Direction::Min}) {
      Q direct = solve_mot(inst.mu, inst.nu, direct_cost, dir).value;
      Q reduced = solve_mot(red.mu, red.nu, CostSpec<Q>::abs_sum(), dir).value;
      EXPECT_EQ(direct, reduced / 2 + red.linear_offset);
    }
  }
}

TEST(SolveMot, LexicographicIsPrimaryOptimal) {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 25; ++t) {
    auto inst = gen::random_instance<Q>(rng, 3 + t % 3, 2, 4, 5);
    for (auto dir : {Direction::Max, Direction::Min}) {
      auto sec = dir == Direction::Max ? Direction::Min : Direction::Max;
      auto plain = solve_mot(inst.mu, inst.nu, CostSpec<Q>::abs_sum(), dir);
      auto lex = solve_mot(inst.mu, inst.nu, CostSpec<Q>::abs_sum(), dir, sec);
      EXPECT_EQ(plain.value, lex.value);
      ASSERT_TRUE(lex.secondary_value.has_value());
      Q c2 = lex.coupling.integrate([](const std::vector<Q>& x) { return abs_value(Q(x[0] + x[1])) * x[1] * x[1]; });
      EXPECT_EQ(c2, *lex.secondary_value);
      Q plain2 =
          plain.coupling.integrate([](const std::vector<Q>& x) { return abs_value(Q(x[0] + x[1])) * x[1] * x[1]; });
      if (sec == Direction::Max) EXPECT_GE(c2, plain2);
      else EXPECT_LE(c2, plain2);
    }
  }
}

TEST(SolveMotMulti, ForwardStartThreeMarginals) {
  std::vector<MQ> ms{MQ::dirac(Q(1)), MQ::dirac(Q(1)), half_half(Q(0), Q(2))};
  auto cost = avg_call<Q>({Q(0), Q(1, 2), Q(1, 2)}, Q(1));
  EXPECT_EQ(solve_mot_multi(ms, cost, Direction::Max).value, Q(1, 4));
  EXPECT_EQ(solve_mot_multi(ms, cost, Direction::Min).value, Q(1, 4));
}

TEST(SolveMotMulti, TwoPeriodsMatchTwoStep) {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 15; ++t) {
    auto inst = gen::random_instance<Q>(rng, 2 + t % 3, 2, 4, 4);
    for (auto dir : {Direction::Max, Direction::Min}) {
      EXPECT_EQ(solve_mot_multi<Q>({inst.mu, inst.nu}, CostSpec<Q>::abs_sum(), dir).value,
                solve_mot(inst.mu, inst.nu, CostSpec<Q>::abs_sum(), dir).value);
    }
  }
}

// Three-period polytope enumerated with an independent naive encoding.
TEST(SolveMotMulti, ThreePeriodsMatchVertexEnumeration) {
  std::mt19937_64 rng(41);
  int checked = 0;
  for (int t = 0; t < 40 && checked < 12; ++t) {
    auto m1 = gen::random_measure<Q>(rng, 1 + t % 2, 1, 2);
    auto m2 = gen::spread<Q>(rng, m1, 2, 2, 0.3);
    auto m3 = gen::spread<Q>(rng, m2, 2, 2, 0.5);
    std::size_t a = m1.size(), b = m2.size(), c = m3.size();
    if (a * b * c > 16) continue;
    LinearProgram<Q> lp(a * b * c);
    auto var = [&](std::size_t i, std::size_t j, std::size_t k) { return (i * b + j) * c + k; };
    for (std::size_t i = 0; i < a; ++i) {
      std::vector<std::pair<std::size_t, Q>> row;
      for (std::size_t j = 0; j < b; ++j)
        for (std::size_t k = 0; k < c; ++k) row.emplace_back(var(i, j, k), Q(1));
      lp.add_row(row, RowKind::Equal, m1.weight(i));
    }
    for (std::size_t j = 0; j < b; ++j) {
      std::vector<std::pair<std::size_t, Q>> row;
      for (std::size_t i = 0; i < a; ++i)
        for (std::size_t k = 0; k < c; ++k) row.emplace_back(var(i, j, k), Q(1));
      lp.add_row(row, RowKind::Equal, m2.weight(j));
    }
    for (std::size_t k = 0; k < c; ++k) {
      std::vector<std::pair<std::size_t, Q>> row;
      for (std::size_t i = 0; i < a; ++i)
        for (std::size_t j = 0; j < b; ++j) row.emplace_back(var(i, j, k), Q(1));
      lp.add_row(row, RowKind::Equal, m3.weight(k));
    }
    for (std::size_t i = 0; i < a; ++i) {
      std::vector<std::pair<std::size_t, Q>> row;
      for (std::size_t j = 0; j < b; ++j)
        for (std::size_t k = 0; k < c; ++k) row.emplace_back(var(i, j, k), m2.atom(j) - m1.atom(i));
      lp.add_row(row, RowKind::Equal, Q(0));
      for (std::size_t j = 0; j < b; ++j) {
        std::vector<std::pair<std::size_t, Q>> r2;
        for (std::size_t k = 0; k < c; ++k) r2.emplace_back(var(i, j, k), m3.atom(k) - m2.atom(j));
        lp.add_row(r2, RowKind::Equal, Q(0));
      }
    }
    auto cost = avg_call<Q>({Q(1, 3), Q(1, 3), Q(1, 3)}, Q(0));
    auto verts = enumerate_vertices(lp, 24);
    ASSERT_FALSE(verts.empty());
    Q lo, hi;
    for (std::size_t v = 0; v < verts.size(); ++v) {
      Q val(0);
      for (std::size_t i = 0; i < a; ++i)
        for (std::size_t j = 0; j < b; ++j)
          for (std::size_t k = 0; k < c; ++k)
            val += verts[v][var(i, j, k)] * cost({m1.atom(i), m2.atom(j), m3.atom(k)});
      if (v == 0 || val < lo) lo = val;
      if (v == 0 || val > hi) hi = val;
    }
    EXPECT_EQ(solve_mot_multi<Q>({m1, m2, m3}, cost, Direction::Max).value, hi);
    EXPECT_EQ(solve_mot_multi<Q>({m1, m2, m3}, cost, Direction::Min).value, lo);
    ++checked;
  }
  EXPECT_GE(checked, 5);
}

TEST(SolveMotMulti, ErrorNamesTheFailingStep) {
  std::vector<MQ> ms{MQ::dirac(Q(1)), half_half(Q(0), Q(2)), MQ::dirac(Q(1))};
  try {
    solve_mot_multi(ms, CostSpec<Q>::abs_sum(), Direction::Max);
    FAIL();
  } catch (const ConvexOrderError& e) {
    EXPECT_EQ(*e.step(), 1u);
    EXPECT_NE(std::string(e.what()).find("step 1"), std::string::npos);
  }
}

TEST(SolveMotMulti, FreePeriodsNeedOnlyTheFinalLaw) {
  // final law (δ0+δ2)/2, one free period on {0,1,2}: max |x1 - x2| is 1
  MotProblem<Q> p;
  p.periods = {Period<Q>::free({Q(0), Q(1), Q(2)}), Period<Q>::constrained(half_half(Q(0), Q(2)))};
  p.cost = CostSpec<Q>::straddle();
  EXPECT_EQ(solve_problem(p, Direction::Max).value, Q(1));
  EXPECT_EQ(solve_problem(p, Direction::Min).value, Q(0));
  auto r = solve_problem(p, Direction::Max);
  auto cert = dual_certificate(p, r);
  EXPECT_EQ(cert.price, Q(1));
}

TEST(DualCertificate, TrivialIdentity) {
  auto p = MotProblem<Q>::two_step(MQ::dirac(Q(1)), MQ::dirac(Q(1)), CostSpec<Q>::abs_sum());
  auto r = solve_problem(p, Direction::Max);
  auto cert = dual_certificate(p, r);
  EXPECT_EQ(cert.price, Q(2));
  EXPECT_EQ(cert.phi[0][0] + cert.phi[1][0], Q(2));
  EXPECT_EQ(cert.kind, HedgeKind::Super);
}

TEST(DualCertificate, StrongDualityRandom) {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 15; ++t) {
    auto inst = gen::random_instance<Q>(rng, 3 + t % 5, 3, 4, 6);
    auto p = MotProblem<Q>::two_step(inst.mu, inst.nu, CostSpec<Q>::abs_sum());
    auto rep = compute_bounds(p);
    EXPECT_EQ(rep.gap_lower, Q(0));
    EXPECT_EQ(rep.gap_upper, Q(0));
    EXPECT_EQ(rep.super_certificate.max_violation, 0.0);
    EXPECT_EQ(rep.sub_certificate.max_violation, 0.0);
    EXPECT_EQ(rep.sub_certificate.kind, HedgeKind::Sub);
  }
  std::mt19937_64 rng2(18);
  for (int t = 0; t < 20; ++t) {
    auto inst = gen::random_instance<double>(rng2, 5 + t, 3, 8, 10);
    auto p = MotProblem<double>::two_step(inst.mu, inst.nu, CostSpec<double>::abs_sum());
    auto rep = compute_bounds(p);
    EXPECT_LE(rep.gap_lower, 1e-9 * (1 + std::abs(rep.lower)));
    EXPECT_LE(rep.gap_upper, 1e-9 * (1 + std::abs(rep.upper)));
  }
}

TEST(DualCertificate, HedgeValueMatchesPointwise) {
  auto p = MotProblem<Q>::two_step(MQ::dirac(Q(1)), half_half(Q(0), Q(2)), avg_call<Q>({Q(1, 2), Q(1, 2)}, Q(1)));
  auto r = solve_problem(p, Direction::Max);
  auto cert = dual_certificate(p, r);
  for (std::size_t cell = 0; cell < p.cells(); ++cell) {
    EXPECT_GE(hedge_value(p, cert, cell), p.cost(p.point(cell), cell));
  }
}

TEST(JensenLowerBound, Examples) {
  EXPECT_EQ(jensen_lower_bound(MQ::dirac(Q(1)), PiecewiseLinear<Q>::call(Q(1))), Q(0));
  EXPECT_EQ(jensen_lower_bound(MQ::dirac(Q(3)), PiecewiseLinear<Q>::abs(Q(1))), Q(2));
  PiecewiseLinear<Q> concave({Q(0)}, {Q(0)}, Q(1), Q(-1));
  EXPECT_THROW(jensen_lower_bound(MQ::dirac(Q(0)), concave), ValidationError);
}

TEST(JensenLowerBound, BelowMultiPeriodMinimum) {
  std::mt19937_64 rng(51);
  for (int t = 0; t < 10; ++t) {
    auto m1 = gen::random_measure<Q>(rng, 2, 2, 2);
    auto m2 = gen::spread<Q>(rng, m1, 2, 2);
    auto phi = PiecewiseLinear<Q>::abs(Q(static_cast<long>(rng() % 3) - 1, 2));
    auto cost = CostSpec<Q>::convex_of_weighted_avg({Q(1, 2), Q(1, 2)}, phi);
    EXPECT_LE(jensen_lower_bound(m1, phi), solve_mot_multi<Q>({m1, m2}, cost, Direction::Min).value);
  }
}

TEST(CostSpec, Validation) {
  auto p = MotProblem<Q>::two_step(MQ::dirac(Q(0)), MQ::dirac(Q(0)), avg_call<Q>({Q(1)}, Q(0)));
  EXPECT_THROW(solve_problem(p, Direction::Max), ValidationError);
  auto t = MotProblem<Q>::two_step(MQ::dirac(Q(0)), MQ::dirac(Q(0)), CostSpec<Q>::custom_table({Q(1), Q(2)}));
  EXPECT_THROW(solve_problem(t, Direction::Max), ValidationError);
  auto ok = MotProblem<Q>::two_step(MQ::dirac(Q(0)), MQ::dirac(Q(0)), CostSpec<Q>::custom_table({Q(5)}));
  EXPECT_EQ(solve_problem(ok, Direction::Max).value, Q(5));
}
