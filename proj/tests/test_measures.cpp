#include <gtest/gtest.h>

#include <random>

#include "robust/measures.hpp"

using namespace robust;
using Q = Rational;
using MQ = DiscreteMeasure<Q>;

namespace {

MQ half_half(Q a, Q b) { return MQ({a, b}, {Q(1, 2), Q(1, 2)}); }

// Random rational measure with `n` atoms on a 1/4 grid in [-lim, lim].
MQ random_measure(std::mt19937_64& rng, int n, int lim) {
  std::uniform_int_distribution<int> pos(-4 * lim, 4 * lim);
  std::uniform_int_distribution<int> w(1, 6);
  std::vector<std::pair<Q, Q>> pts;
  Q total(0);
  std::vector<int> ws;
  for (int i = 0; i < n; ++i) ws.push_back(w(rng));
  int sum = 0;
  for (int v : ws) sum += v;
  for (int i = 0; i < n; ++i) pts.emplace_back(Q(pos(rng), 4), Q(ws[i], sum));
  return MQ::from_points(pts);
}

}  // namespace

TEST(DiscreteMeasure, RejectsInvalid) {
  EXPECT_THROW(MQ({}, {}), ValidationError);
  EXPECT_THROW(MQ({Q(0), Q(1)}, {Q(1, 2)}), ValidationError);
  EXPECT_THROW(MQ({Q(0), Q(1)}, {Q(1, 2), Q(1, 3)}), ValidationError);
  EXPECT_THROW(MQ({Q(1), Q(0)}, {Q(1, 2), Q(1, 2)}), ValidationError);
  EXPECT_THROW(MQ({Q(0), Q(1)}, {Q(0), Q(1)}), ValidationError);
  EXPECT_THROW(DiscreteMeasure<double>({0.0, 1.0}, {0.5, 0.6}), ValidationError);
  EXPECT_THROW(DiscreteMeasure<double>({0.0, std::nan("")}, {0.5, 0.5}), ValidationError);
}

TEST(DiscreteMeasure, FromPointsMergesAndSorts) {
  auto m = MQ::from_points({{Q(2), Q(1, 4)}, {Q(0), Q(1, 4)}, {Q(2), Q(1, 2)}, {Q(5), Q(0)}});
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m.atom(0), Q(0));
  EXPECT_EQ(m.weight(1), Q(3, 4));
  auto d = DiscreteMeasure<double>::from_points({{1.0, 0.5}, {1.0 + 1e-13, 0.5}});
  EXPECT_EQ(d.size(), 1u);
}

TEST(ConvexOrder, SpecExamples) {
  EXPECT_TRUE(convex_order(MQ::dirac(Q(1)), MQ::dirac(Q(1)), Q(0)).ordered);
  EXPECT_TRUE(convex_order(MQ::dirac(Q(1)), half_half(Q(0), Q(2)), Q(0)).ordered);
  auto r = convex_order(half_half(Q(0), Q(2)), MQ::dirac(Q(1)), Q(0));
  EXPECT_FALSE(r.ordered);
  ASSERT_TRUE(r.witness.has_value());
  EXPECT_EQ(*r.witness, Q(1));
  EXPECT_EQ(r.violation, Q(1, 2));
}

TEST(ConvexOrder, MeanMismatch) {
  auto r = convex_order(MQ::dirac(Q(0)), MQ::dirac(Q(1)), Q(0));
  EXPECT_FALSE(r.ordered);
  EXPECT_TRUE(r.witness.has_value());
  EXPECT_THROW(require_convex_order(MQ::dirac(Q(0)), MQ::dirac(Q(1)), Q(0)), ConvexOrderError);
}

// Brute-force oracle: compare call prices on a fine rational grid of strikes.
TEST(ConvexOrder, MatchesDenseStrikeOracle) {
  std::mt19937_64 rng(7);
  int agree = 0;
  for (int t = 0; t < 300; ++t) {
    MQ a = random_measure(rng, 3, 2);
    MQ b = random_measure(rng, 4, 3);
    // recentre b on a's mean so that means agree half the time
    if (t % 2 == 0) b = affine_pushforward(b, Q(1), Q(a.mean() - b.mean()));
    bool oracle = a.mean() == b.mean();
    for (int k = -80; k <= 80 && oracle; ++k) {
      Q strike(k, 16);
      if (a.call(strike) > b.call(strike)) oracle = false;
    }
    for (const auto& x : a.atoms()) oracle = oracle && a.call(x) <= b.call(x);
    for (const auto& x : b.atoms()) oracle = oracle && a.call(x) <= b.call(x);
    EXPECT_EQ(convex_order(a, b, Q(0)).ordered, oracle);
    agree += oracle;
  }
  EXPECT_GT(agree, 10);
}

TEST(ConvexOrder, ReflexiveAndTransitive) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 50; ++t) {
    MQ a = random_measure(rng, 4, 2);
    EXPECT_TRUE(convex_order(a, a, Q(0)).ordered);
    // spread each atom symmetrically twice: a ⪯ b ⪯ c
    std::vector<std::pair<Q, Q>> pb, pc;
    for (std::size_t i = 0; i < a.size(); ++i) {
      pb.emplace_back(a.atom(i) - Q(1, 2), a.weight(i) / 2);
      pb.emplace_back(a.atom(i) + Q(1, 2), a.weight(i) / 2);
    }
    MQ b = MQ::from_points(pb);
    for (std::size_t i = 0; i < b.size(); ++i) {
      pc.emplace_back(b.atom(i) - Q(1), b.weight(i) / 2);
      pc.emplace_back(b.atom(i) + Q(1), b.weight(i) / 2);
    }
    MQ c = MQ::from_points(pc);
    ASSERT_TRUE(convex_order(a, b, Q(0)).ordered);
    ASSERT_TRUE(convex_order(b, c, Q(0)).ordered);
    EXPECT_TRUE(convex_order(a, c, Q(0)).ordered);
    EXPECT_EQ(a.mean(), c.mean());
  }
}

TEST(CallsToMeasure, SpecExamples) {
  CallCurve<Q> point{{Q(0), Q(1, 2), Q(1), Q(3, 2), Q(2)}, {Q(1), Q(1, 2), Q(0), Q(0), Q(0)}};
  EXPECT_EQ(calls_to_measure(point), MQ::dirac(Q(1)));

  CallCurve<Q> two{{Q(-1), Q(0), Q(1), Q(2), Q(3)}, {}};
  for (const auto& k : two.strikes) {
    two.prices.push_back(positive_part(Q(-k)) / 2 + positive_part(Q(Q(2) - k)) / 2);
  }
  EXPECT_EQ(calls_to_measure(two), half_half(Q(0), Q(2)));

  CallCurve<double> bad{{0.0, 1.0, 2.0, 3.0}, {1.0, 0.2, 0.0, 0.3}};
  try {
    calls_to_measure(bad);
    FAIL() << "expected a validation error";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("not arbitrage-free curve"), std::string::npos);
  }
}

TEST(CallsToMeasure, RejectsNonConvexAndTruncated) {
  CallCurve<Q> concave{{Q(0), Q(1), Q(2), Q(3)}, {Q(2), Q(1), Q(1, 2), Q(0)}};
  EXPECT_THROW(calls_to_measure(concave), ValidationError);
  CallCurve<Q> truncated{{Q(0), Q(1), Q(2)}, {Q(1, 2), Q(0), Q(0)}};
  EXPECT_THROW(calls_to_measure(truncated), ValidationError);
}

TEST(CallsToMeasure, RoundTripIsIdentity) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 100; ++t) {
    MQ a = random_measure(rng, 1 + t % 6, 3);
    EXPECT_EQ(calls_to_measure(call_curve(a, padded_strikes(a))), a);
  }
  std::mt19937_64 rng2(5);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> pts;
    for (int i = 0; i < 5; ++i) pts.push_back(u(rng2));
    auto a = DiscreteMeasure<double>::uniform(pts);
    auto back = calls_to_measure(call_curve(a, padded_strikes(a)));
    ASSERT_EQ(back.size(), a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_NEAR(back.atom(i), a.atom(i), 1e-12);
      EXPECT_NEAR(back.weight(i), a.weight(i), 1e-9);
    }
  }
}

TEST(AffinePushforward, SpecExamples) {
  EXPECT_EQ(affine_pushforward(MQ::dirac(Q(1)), Q(2), Q(1)), MQ::dirac(Q(3)));
  EXPECT_EQ(affine_pushforward(half_half(Q(0), Q(2)), Q(-1), Q(0)), half_half(Q(-2), Q(0)));
  EXPECT_EQ(affine_pushforward(half_half(Q(0), Q(2)), Q(1, 2), Q(-1, 2)), half_half(Q(-1, 2), Q(1, 2)));
  EXPECT_THROW(affine_pushforward(MQ::dirac(Q(1)), Q(0), Q(1)), ValidationError);
}

TEST(AffinePushforward, IdentityAndInverse) {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 50; ++t) {
    MQ a = random_measure(rng, 5, 3);
    EXPECT_EQ(affine_pushforward(a, Q(1), Q(0)), a);
    Q s(static_cast<int>(rng() % 7) - 3, 1 + static_cast<int>(rng() % 3));
    if (s == 0) s = Q(-2);
    Q sh(static_cast<int>(rng() % 9) - 4, 3);
    auto img = affine_pushforward(a, s, sh);
    EXPECT_EQ(affine_pushforward(img, Q(1) / s, Q(-sh / s)), a);
  }
}

TEST(ReduceToAbs, SpecExamples) {
  auto r0 = reduce_to_abs(MQ::dirac(Q(0)), MQ::dirac(Q(0)), Q(0));
  EXPECT_EQ(r0.mu, MQ::dirac(Q(0)));
  EXPECT_EQ(r0.nu, MQ::dirac(Q(0)));
  EXPECT_EQ(r0.linear_offset, Q(0));

  // forced coupling δ1 -> (δ0+δ2)/2 with strike 1: ((x+y)/2-1)_+ has value 1/4
  auto r1 = reduce_to_abs(MQ::dirac(Q(1)), half_half(Q(0), Q(2)), Q(1));
  EXPECT_EQ(r1.mu, MQ::dirac(Q(0)));
  EXPECT_EQ(r1.nu, half_half(Q(-1, 2), Q(1, 2)));
  Q abs_value_forced = (abs_value(Q(Q(0) + Q(-1, 2))) + abs_value(Q(Q(0) + Q(1, 2)))) / 2;
  EXPECT_EQ(abs_value_forced / 2 + r1.linear_offset, Q(1, 4));

  auto r2 = reduce_to_abs(MQ::dirac(Q(1)), MQ::dirac(Q(1)), Q(1));
  EXPECT_EQ(r2.mu, MQ::dirac(Q(0)));
  EXPECT_EQ(r2.nu, MQ::dirac(Q(0)));
  // ((1+1)/2 - 1)_+ = 0 on the only coupling, and |0+0| = 0
  EXPECT_EQ(r2.linear_offset, Q(0));
}

// Pointwise: ((x+y)/2-K)_+ = ½|x̃+ỹ| + ½(x̃+ỹ), so the identity holds for every
// coupling with the right marginals, martingale or not.
TEST(ReduceToAbs, PointwiseIdentityOnProductCouplings) {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 60; ++t) {
    MQ a = random_measure(rng, 1 + t % 4, 2);
    MQ b = random_measure(rng, 1 + (t / 4) % 4, 2);
    Q k(static_cast<int>(rng() % 9) - 4, 2);
    auto red = reduce_to_abs(a, b, k);
    Q lhs(0), rhs(0);
    for (std::size_t i = 0; i < a.size(); ++i) {
      for (std::size_t j = 0; j < b.size(); ++j) {
        Q w = a.weight(i) * b.weight(j);
        lhs += w * positive_part(Q((a.atom(i) + b.atom(j)) / 2 - k));
        Q xt = (a.atom(i) - k) / 2, yt = (b.atom(j) - k) / 2;
        rhs += w * abs_value(Q(xt + yt)) / 2;
      }
    }
    EXPECT_EQ(lhs, rhs + red.linear_offset);
  }
}

TEST(Moment, SpecExamples) {
  EXPECT_EQ(moment(MQ::dirac(Q(1)), 1), Q(1));
  MQ four({Q(-2), Q(-1), Q(1), Q(2)}, {Q(1, 4), Q(1, 4), Q(1, 4), Q(1, 4)});
  EXPECT_EQ(moment(four, 1), Q(3, 2));
  EXPECT_EQ(moment(half_half(Q(0), Q(2)), 3), Q(4));
  EXPECT_EQ(moment(half_half(Q(0), Q(2)), 0), Q(1));
  EXPECT_THROW(moment(four, -1), ValidationError);
}

TEST(DiscretizeUniform, MidpointsAndSplit) {
  auto mu = discretize_uniform<Q>({{Q(0), Q(1), Q(1)}}, 4);
  EXPECT_EQ(mu, MQ({Q(1, 8), Q(3, 8), Q(5, 8), Q(7, 8)}, {Q(1, 4), Q(1, 4), Q(1, 4), Q(1, 4)}));
  auto nu = discretize_uniform<Q>({{Q(-2), Q(0), Q(1, 2)}, {Q(1), Q(3), Q(1, 2)}}, 200);
  EXPECT_EQ(nu.size(), 200u);
  EXPECT_EQ(nu.mean(), Q(1, 2));
  auto mu200 = discretize_uniform<Q>({{Q(0), Q(1), Q(1)}}, 200);
  EXPECT_TRUE(convex_order(mu200, nu, Q(0)).ordered);
  EXPECT_THROW(discretize_uniform<Q>({{Q(1), Q(0), Q(1)}}, 4), ValidationError);
}
