#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "sqlrl/policy_sim.hpp"
#include "test_support.hpp"

using namespace sqlrl;
using namespace sqlrl::sim;
using sqlrl::testing::fixture;

namespace {

std::vector<PoolTask> fixture_pools() {
  return load_pool_fixture(fixture("sim/tasks.jsonl"), fixture("sim/pools.jsonl"));
}

class PolicySim : public ::testing::Test {
 protected:
  Executor executor{sqlrl::testing::fixture_registry(), 2};
  RewardEngine engine{executor};
};

std::vector<StepMetrics> run(RewardEngine& engine, SimConfig config, std::size_t steps) {
  Simulator s(fixture_pools(), engine, config);
  std::vector<StepMetrics> out;
  for (std::size_t i = 0; i < steps; ++i) out.push_back(s.train_step());
  return out;
}

}  // namespace

TEST(ToyPolicy, SoftmaxSumsToOne) {
  ToyPolicy p({{0.0, 1.0, -2.0}, {5.0, 5.0}});
  for (std::size_t t = 0; t < p.task_count(); ++t) {
    const auto probs = p.probabilities(t);
    EXPECT_NEAR(std::accumulate(probs.begin(), probs.end(), 0.0), 1.0, 1e-15);
    for (std::size_t a = 0; a < probs.size(); ++a) EXPECT_NEAR(std::log(probs[a]), p.log_prob(t, a), 1e-12);
  }
}

TEST(Rollout, OneHotPolicyRepeatsAction) {
  ToyPolicy p({{-1e9, 0.0, -1e9, -1e9}});
  std::mt19937_64 rng(1);
  for (const auto& s : rollout(p, 0, 8, rng)) {
    EXPECT_EQ(s.action, 1u);
    EXPECT_EQ(s.logp, 0.0);
  }
}

TEST(Rollout, SeedDeterminesDraws) {
  const auto p = ToyPolicy::uniform({6});
  std::mt19937_64 a(42), b(42);
  const auto x = rollout(p, 0, 8, a), y = rollout(p, 0, 8, b);
  ASSERT_EQ(x.size(), 8u);
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_EQ(x[i].action, y[i].action);
    EXPECT_EQ(x[i].logp, y[i].logp);
  }
}

TEST(Rollout, FrequenciesFollowProbabilities) {
  ToyPolicy p({{0.0, std::log(3.0)}});
  std::mt19937_64 rng(5);
  std::size_t ones = 0;
  const std::size_t n = 40000;
  for (const auto& s : rollout(p, 0, n, rng)) ones += s.action;
  EXPECT_NEAR(static_cast<double>(ones) / n, 0.75, 0.01);
}

TEST(Uniform01, InUnitInterval) {
  std::mt19937_64 rng(0);
  for (int i = 0; i < 100000; ++i) {
    const double u = uniform01(rng);
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Classify, Bands) {
  RewardBands b;
  b = classify(-1.0, b);
  b = classify(0.0, b);
  b = classify(6.5, b);
  EXPECT_EQ(b.invalid, 1u);
  EXPECT_EQ(b.wrong, 1u);
  EXPECT_EQ(b.correct, 1u);
}

TEST_F(PolicySim, PoolRewardsScoredByEngine) {
  Simulator s(fixture_pools(), engine, {});
  ASSERT_EQ(s.tasks().size(), 5u);
  for (std::size_t k = 0; k < s.tasks().size(); ++k) {
    const auto& r = s.pool_rewards()[k];
    ASSERT_EQ(r.size(), 6u);
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i == s.tasks()[k].correct_index) {
        EXPECT_GT(r[i], 6.0);
      } else {
        EXPECT_LE(r[i], 0.0);
      }
    }
  }
}

TEST_F(PolicySim, IdenticalPoolLeavesLogitsUnchanged) {
  auto pools = fixture_pools();
  pools.resize(1);
  const auto same = pools[0].pool[pools[0].correct_index];
  for (auto& c : pools[0].pool) c = same;
  Simulator s(pools, engine, {});
  const auto before = s.policy().logits(0);
  for (int i = 0; i < 5; ++i) s.train_step();
  EXPECT_EQ(s.policy().logits(0), before);
}

TEST_F(PolicySim, DeterministicUnderSeed) {
  SimConfig c;
  c.seed = 123;
  const auto a = run(engine, c, 30), b = run(engine, c, 30);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].mean_reward, b[i].mean_reward);
    EXPECT_EQ(a[i].logit_drift, b[i].logit_drift);
  }
}

TEST_F(PolicySim, RewardImprovesOnEverySeed) {
  for (std::uint64_t seed : {1, 7, 19, 2024}) {
    SimConfig c;
    c.seed = seed;
    const auto m = run(engine, c, 500);
    double first = 0, last = 0;
    for (std::size_t i = 0; i < 50; ++i) {
      first += m[i].mean_reward;
      last += m[m.size() - 50 + i].mean_reward;
    }
    EXPECT_GT(last / 50, first / 50) << "seed " << seed;
    EXPECT_GE(m.back().min_correct_prob, 0.9) << "seed " << seed;
  }
}

TEST_F(PolicySim, LargerBetaShrinksDrift) {
  double previous = INFINITY;
  for (double beta : {0.0, 0.5, 2.0, 4.0}) {
    SimConfig c;
    c.beta = beta;
    const auto m = run(engine, c, 300);
    const double drift = m.back().logit_drift;
    EXPECT_LT(drift, previous) << "beta " << beta;
    previous = drift;
  }
}

TEST_F(PolicySim, BandsCountEverySample) {
  SimConfig c;
  const auto m = run(engine, c, 3);
  for (const auto& s : m) EXPECT_EQ(s.bands.invalid + s.bands.wrong + s.bands.correct, 5u * c.group_size);
}
