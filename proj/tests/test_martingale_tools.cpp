#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "sociallearn/martingale_tools.hpp"
#include "sociallearn/rng.hpp"
#include "support.hpp"

using namespace sociallearn;
using sltest::expect_error;

namespace {

const BeliefPair& pair_03_05() {
  static const BeliefPair p = construct_informative_pair({0.3, 0.5});
  return p;
}

BeliefPair identical_pair() {
  return BeliefPair::from_masses({0.25, 0.5, 0.25}, {0.25, 0.5, 0.25}, true);
}

TransitionKernel constant_kernel(OneStepLaw law) {
  return {[law](double, int) { return law; }, true};
}

}  // namespace

TEST(ActivitySpec, Domain) {
  EXPECT_EQ(expect_error([] { ActivitySpec::make(0.0, 0.5); }), "invalid-domain");
  EXPECT_EQ(expect_error([] { ActivitySpec::make(0.3, 1.0); }), "invalid-domain");
  EXPECT_EQ(expect_error([] { ActivitySpec::make(0.3, 0.5, 1); }), "invalid-domain");
  EXPECT_NO_THROW(ActivitySpec::make(0.3, 0.0));
  EXPECT_DOUBLE_EQ(ActivitySpec::make(0.3, 0.5).rate(3), 0.15);
}

TEST(WeakActivity, InformativePairPassesAtDepth10) {
  const auto tree = enumerate(pair_03_05(), 10);
  const auto rep = weak_activity_check(tree, ActivitySpec::make(0.15, 0.5));
  EXPECT_TRUE(rep.pass);
  EXPECT_GT(rep.min_slack, 0.0);
  EXPECT_EQ(rep.per_node_worst.size(), 10u);
  // Full activity 0.3 also holds here.
  EXPECT_TRUE(weak_activity_check(tree, ActivitySpec::make(0.3, 0.5)).pass);
}

TEST(WeakActivity, MatchesBruteForceSlack) {
  const auto tree = enumerate(pair_03_05(), 6);
  const auto spec = ActivitySpec::make(0.15, 0.5);
  double min_slack = INFINITY;
  for (std::size_t i = 0; i < tree.law.size(); ++i) {
    const double l = tree.l(i);
    if (!(l > 0.0) || std::isinf(l) || tree.prob_H[i] == 0.0) continue;
    const int k = EnumeratedTree::depth_of(i);
    const double r = 0.15 / std::pow(k + 1.0, 0.5);
    double p = 0.0;
    for (Action a : {Action::one, Action::two}) {
      const std::size_t c = EnumeratedTree::child(i, a);
      if (tree.prob_H[c] > 0.0 && std::fabs(tree.l(c) / l - 1.0) > r) p += tree.prob_H[c] / tree.prob_H[i];
    }
    min_slack = std::min(min_slack, p - r);
  }
  EXPECT_NEAR(weak_activity_check(tree, spec).min_slack, min_slack, 1e-12);
}

TEST(WeakActivity, IdenticalMassesFailAtRoot) {
  const auto rep = weak_activity_check(enumerate(identical_pair(), 3), ActivitySpec::make(0.3, 0.5));
  EXPECT_FALSE(rep.pass);
  ASSERT_FALSE(rep.per_node_worst.empty());
  EXPECT_EQ(rep.per_node_worst.front().depth, 0);
  EXPECT_LT(rep.per_node_worst.front().slack, 0.0);
}

TEST(WeakActivity, ConstantActivityFailsAtFiniteDepth) {
  // With nu = 0 the demanded jump never shrinks while transitions flatten.
  const auto spec = ActivitySpec::make(0.2, 0.0);
  int first_fail = 0;
  for (int d = 1; d <= 20 && first_fail == 0; ++d) {
    if (!weak_activity_check(enumerate(pair_03_05(), d), spec).pass) first_fail = d;
  }
  EXPECT_GT(first_fail, 1);
  EXPECT_EQ(first_fail, 16);
  // Same psi with a decaying rate survives those depths.
  EXPECT_TRUE(weak_activity_check(enumerate(pair_03_05(), 16), ActivitySpec::make(0.2, 0.5)).pass);
}

TEST(WeakActivity, NuZeroReducesToActivity) {
  sltest::Gen g(31);
  for (int trial = 0; trial < 50; ++trial) {
    const double h1 = g.uniform(0.05, 0.95), l1 = g.uniform(0.05, 0.95);
    const OneStepLaw law{h1, l1, 1.0 - h1, 1.0 - l1};
    const double psi = g.uniform(0.01, 0.9);
    const auto tree = enumerate(constant_kernel(law), 3);
    // Definition: P(|l'/l - 1| > psi) > psi at every node, same law everywhere.
    double p = 0.0;
    if (std::fabs(l1 / h1 - 1.0) > psi) p += h1;
    if (std::fabs((1.0 - l1) / (1.0 - h1) - 1.0) > psi) p += 1.0 - h1;
    EXPECT_EQ(weak_activity_check(tree, ActivitySpec::make(psi, 0.0)).pass, p > psi)
        << "h1=" << h1 << " l1=" << l1 << " psi=" << psi;
  }
}

TEST(JumpCount, Examples) {
  const auto spec = ActivitySpec::make(0.3, 0.0);
  const std::vector<double> flat{1.0, 1.0, 1.0, 1.0};
  EXPECT_EQ(jump_count(flat, spec, 4), 0);
  const std::vector<double> drop{1.0, 0.5, 0.5};
  EXPECT_EQ(jump_count(drop, spec, 3), 1);
  EXPECT_EQ(expect_error([&] { jump_count(drop, spec, 4); }), "invalid-params");
}

TEST(JumpCount, NonDecreasingInK) {
  sltest::Gen g(8);
  const auto spec = ActivitySpec::make(0.2, 0.5);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> v{1.0};
    for (int i = 0; i < 40; ++i) v.push_back(v.back() * g.uniform(0.3, 1.7));
    long prev = 0;
    for (long K = 0; K <= static_cast<long>(v.size()); ++K) {
      const long j = jump_count(v, spec, K);
      EXPECT_GE(j, prev);
      prev = j;
    }
  }
}

TEST(Upcrossings, Examples) {
  const std::vector<double> down{2.0, 1.5, 1.0, 0.5};
  EXPECT_EQ(upcrossings(down, 0.6, 1.4, 4), 0);
  const std::vector<double> zig{0.5, 1.5, 0.4, 1.6};
  EXPECT_EQ(upcrossings(zig, 0.6, 1.4, 4), 2);
  EXPECT_EQ(upcrossings(zig, 0.6, 1.4, 3), 1);
  EXPECT_EQ(expect_error([&] { upcrossings(zig, 1.4, 0.6, 4); }), "invalid-interval");
  EXPECT_EQ(expect_error([&] { upcrossings(zig, 0.0, 0.6, 4); }), "invalid-interval");
}

TEST(Upcrossings, NonDecreasingInK) {
  sltest::Gen g(9);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> v;
    for (int i = 0; i < 50; ++i) v.push_back(g.uniform(0.0, 2.0));
    long prev = 0;
    for (long K = 0; K <= 50; ++K) {
      const long u = upcrossings(v, 0.5, 1.2, K);
      EXPECT_GE(u, prev);
      prev = u;
    }
  }
}

TEST(Bounds, Substitution) {
  EXPECT_EQ(maximal_inequality_bound(1.0, 4.0), 0.25);
  EXPECT_EQ(maximal_inequality_bound(1.0, 0.5), 1.0);
  EXPECT_DOUBLE_EQ(dubins_bound(0.25, 0.75, 3, 1.0), 1.0 / 27.0);
  EXPECT_DOUBLE_EQ(dubins_bound(0.5, 1.0, 2, 0.25), 0.125);
}

TEST(BoundConstants, WorkedSubstitution) {
  const auto c = lemma5_constants(0.1, 0.3, 1.0, 0.5);
  EXPECT_DOUBLE_EQ(c.c_lower, 0.0125);
  EXPECT_DOUBLE_EQ(c.c_upper, 40.0);
  EXPECT_EQ(c.I, 21336);
  EXPECT_EQ(c.J, 2 * c.I * (c.N + 1) + c.I + 1);
  EXPECT_FALSE(c.K_estimate.has_value());
  EXPECT_TRUE(constants_consistent(c));
  // Defining inequality for N, re-checked after the ceiling.
  const double lhs = static_cast<double>(c.N) * std::log(1.0 - (c.c_upper - c.c_lower) /
                                                                 (static_cast<double>(c.I) * c.c_upper));
  const double rhs = std::log(0.1 / 4.0 / static_cast<double>(c.I) * c.c_lower / 1.0);
  EXPECT_LE(lhs, rhs);
  const double lhs_prev = static_cast<double>(c.N - 1) *
                          std::log(1.0 - (c.c_upper - c.c_lower) / (static_cast<double>(c.I) * c.c_upper));
  EXPECT_GT(lhs_prev, rhs);
}

TEST(BoundConstants, AlternateJRule) {
  const auto c = lemma5_constants(0.1, 0.3, 1.0, 0.5, JRule::footnote);
  EXPECT_GT(c.J, 2 * c.N * (c.I + 1) + 2);
  EXPECT_TRUE(constants_consistent(c));
}

TEST(BoundConstants, RandomInputsStayConsistent) {
  sltest::Gen g(4);
  for (int trial = 0; trial < 40; ++trial) {
    const double eps = g.uniform(0.01, 0.9), psi = g.uniform(0.05, 0.9);
    const double l0 = g.uniform(0.5, 3.0), L = g.uniform(0.01, 0.99) * l0;
    const auto c = lemma5_constants(eps, psi, l0, L);
    EXPECT_LT(c.c_lower, c.c_upper);
    EXPECT_EQ(c.I, static_cast<std::int64_t>(std::ceil(2.0 * c.c_upper / (c.c_lower * psi))) + 2);
    EXPECT_TRUE(constants_consistent(c));
  }
}

TEST(BoundConstants, Domain) {
  EXPECT_EQ(expect_error([] { lemma5_constants(0.1, 0.3, 1.0, 1.5); }), "invalid-domain");
  EXPECT_EQ(expect_error([] { lemma5_constants(1.1, 0.3, 1.0, 0.5); }), "invalid-domain");
}

TEST(UniformK, MatchesOrderStatisticOracle) {
  const auto& pair = pair_03_05();
  const MonteCarlo mc{5000, 300, 17, 1};
  const BeliefPair* ptr = &pair;
  const auto rep = uniform_K_estimate({&ptr, 1}, {0.3, 0.5}, 0.1, 0.5, mc);
  // Same per-pair stream, recomputed from full paths.
  const auto paths =
      simulate_batch(pair, State::H, {mc.paths, mc.horizon, stream_seed(mc.seed, 0x51a7e000ULL), 1});
  std::vector<long> last;
  for (const auto& p : paths) {
    long s = 0;
    for (std::size_t k = 1; k < p.l_values.size(); ++k) {
      if (p.l_values[k] > 0.5) s = static_cast<long>(k);
    }
    last.push_back(s);
  }
  std::sort(last.begin(), last.end());
  const long oracle = last[static_cast<std::size_t>(std::ceil(0.9 * 5000)) - 1];
  EXPECT_EQ(rep.max_K_hat, oracle);
  const auto covered = std::count_if(last.begin(), last.end(), [&](long s) { return s <= oracle; });
  EXPECT_GE(static_cast<double>(covered) / 5000.0, 0.9);
  EXPECT_LE(rep.per_pair[0].ci_low, rep.per_pair[0].K_hat);
  EXPECT_GE(rep.per_pair[0].ci_high, rep.per_pair[0].K_hat);
}

TEST(UniformK, MonotoneInEpsilonAndLevel) {
  const auto& pair = pair_03_05();
  const BeliefPair* ptr = &pair;
  const MonteCarlo mc{20000, 300, 5, 0};
  long prev = std::numeric_limits<long>::max();
  for (double eps : {0.02, 0.05, 0.1, 0.3, 0.6}) {
    const long k = uniform_K_estimate({&ptr, 1}, {0.3, 0.5}, eps, 0.5, mc).max_K_hat;
    EXPECT_LE(k, prev) << "eps " << eps;
    prev = k;
  }
  prev = 0;
  for (double L : {0.9, 0.5, 0.2, 0.05}) {
    const long k = uniform_K_estimate({&ptr, 1}, {0.3, 0.5}, 0.1, L, mc).max_K_hat;
    EXPECT_GE(k, prev) << "L " << L;
    prev = k;
  }
}

TEST(UniformK, VacuousCoverage) {
  const auto& pair = pair_03_05();
  const BeliefPair* ptr = &pair;
  EXPECT_LE(uniform_K_estimate({&ptr, 1}, {0.3, 0.5}, 0.999, 0.5, {20000, 300, 5, 0}).max_K_hat, 1);
}

TEST(UniformK, Errors) {
  const auto& pair = pair_03_05();
  const BeliefPair* ptr = &pair;
  EXPECT_EQ(expect_error([&] { uniform_K_estimate({&ptr, 1}, {0.9, 0.05}, 0.1, 0.5, {100, 50, 1, 1}); }),
            "not-informative");
  EXPECT_EQ(expect_error([&] { uniform_K_estimate({&ptr, 1}, {0.3, 0.5}, 0.1, 1e-9, {2000, 5, 1, 1}); }),
            "horizon-too-short");
}

TEST(EmpiricalK, ReachesJumpTarget) {
  const auto& pair = pair_03_05();
  const auto spec = ActivitySpec::make(0.15, 0.5);
  const MonteCarlo mc{4000, 400, 23, 1};
  const long J = 5;
  const auto est = lemma4_empirical_K(pair, spec, J, 0.1, mc);
  const auto paths = simulate_batch(pair, State::H, mc);
  long ok = 0;
  for (const auto& p : paths) {
    const bool absorbed = p.l_values[static_cast<std::size_t>(est.K_hat)] == 0.0;
    if (absorbed || jump_count(p.l_values, spec, est.K_hat) >= J) ++ok;
  }
  EXPECT_GE(static_cast<double>(ok) / static_cast<double>(mc.paths), 0.9);
}

TEST(Dichotomy, IdenticalPairNeverCounts) {
  const BeliefPair pair = identical_pair();
  const auto path = simulate(pair, State::H, 30, 3);
  for (long n : {1L, 10L, 29L}) EXPECT_EQ(dichotomy_audit(path, pair, 0.3, 0.5, 0.1, n).scenario_1_count, 0);
}

TEST(Dichotomy, CountGrowsAndCoverageMonotoneInEpsilon) {
  const auto& pair = pair_03_05();
  const auto paths = simulate_batch(pair, State::H, {2000, 200, 41, 1});
  long hold_small = 0, hold_large = 0;
  for (const auto& p : paths) {
    long prev = 0;
    for (long n : {5L, 20L, 80L}) {
      const long c = dichotomy_audit(p, pair, 0.3, 0.5, 0.1, n).scenario_1_count;
      EXPECT_GE(c, prev);
      prev = c;
    }
    const bool small = dichotomy_audit(p, pair, 0.3, 0.5, 0.1, 20).scenario_2_holds;
    const bool large = dichotomy_audit(p, pair, 0.3, 0.5, 0.9, 20).scenario_2_holds;
    EXPECT_TRUE(!small || large);
    hold_small += small;
    hold_large += large;
  }
  EXPECT_GE(hold_large, hold_small);
  EXPECT_GE(static_cast<double>(hold_small) / 2000.0, 0.9);
}

TEST(InequalityAudit, ConstructedPairWithinBounds) {
  const double cs[] = {2.0, 4.0, 8.0};
  const DubinsConfig dubins[] = {{0.25, 0.75, 3}, {0.5, 1.0, 1}};
  const auto checks = inequality_audit(pair_03_05(), cs, dubins, {20000, 200, 3, 0});
  ASSERT_EQ(checks.size(), 5u);
  for (const auto& c : checks) {
    EXPECT_TRUE(c.pass) << c.name << " freq " << c.frequency << " bound " << c.bound;
    EXPECT_NEAR(c.sigma, std::sqrt(c.bound * (1.0 - c.bound) / 20000.0), 1e-15);
  }
  EXPECT_DOUBLE_EQ(checks[3].bound, 1.0 / 27.0);
}
