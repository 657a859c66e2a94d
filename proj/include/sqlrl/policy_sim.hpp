#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "sqlrl/corpus.hpp"
#include "sqlrl/grpo.hpp"
#include "sqlrl/reward.hpp"

namespace sqlrl::sim {

/// One task with a fixed pool of authored responses the toy policy picks from.
struct PoolTask {
  Task task;
  std::vector<std::string> pool;
  std::size_t correct_index = 0;
};

/// Loads tasks.jsonl + pools.jsonl ({task_id, candidates, correct_index}).
std::vector<PoolTask> load_pool_fixture(const std::filesystem::path& tasks_path,
                                        const std::filesystem::path& pools_path);

/// Tabular softmax policy: one logit per pool entry per task.
class ToyPolicy {
 public:
  ToyPolicy() = default;
  explicit ToyPolicy(std::vector<std::vector<double>> logits) : logits_(std::move(logits)) {}

  static ToyPolicy uniform(const std::vector<std::size_t>& pool_sizes);

  std::size_t task_count() const { return logits_.size(); }
  const std::vector<double>& logits(std::size_t task) const { return logits_.at(task); }
  std::vector<double>& logits(std::size_t task) { return logits_.at(task); }

  std::vector<double> probabilities(std::size_t task) const;
  double log_prob(std::size_t task, std::size_t action) const;

 private:
  std::vector<std::vector<double>> logits_;
};

struct Sample {
  std::size_t action = 0;
  double logp = 0.0;
};

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
double uniform01(std::mt19937_64& rng);

/// G independent draws with their exact log-probabilities.
std::vector<Sample> rollout(const ToyPolicy& policy, std::size_t task, std::size_t group_size,
                            std::mt19937_64& rng);

/// Builds the single-token GRPO batch for a group sampled from `sampler`
/// and evaluated under `current` (and `reference`).
grpo::Batch make_batch(const ToyPolicy& current, const ToyPolicy& sampler, const ToyPolicy& reference,
                       std::size_t task, const std::vector<Sample>& samples,
                       const std::vector<double>& rewards, double epsilon, double beta);

/// d objective / d logits for one task, chaining the per-token GRPO
/// gradient through log-softmax.
std::vector<double> logit_gradient(const ToyPolicy& current, std::size_t task,
                                   const std::vector<Sample>& samples, const grpo::Batch& batch);

struct SimConfig {
  std::size_t group_size = 8;
  double learning_rate = 1.0;
  double epsilon = grpo::kDefaultEpsilon;
  double beta = 0.0;
  /// Gradient steps per rollout; the first always sees ratios of 1.
  std::size_t inner_epochs = 1;
  std::uint64_t seed = 7;
};

struct RewardBands {
  std::size_t invalid = 0;  ///< total == -1: malformed or unexecutable
  std::size_t wrong = 0;    ///< total == 0: executable, wrong result
  std::size_t correct = 0;  ///< total in (6, 7.5]
};

struct StepMetrics {
  std::size_t step = 0;
  double mean_reward = 0.0;      ///< over all sampled responses this step
  double expected_reward = 0.0;  ///< under the updated policy, averaged over tasks
  double objective = 0.0;        ///< mean GRPO objective at the first inner epoch
  double min_correct_prob = 0.0;
  double mean_correct_prob = 0.0;
  double logit_drift = 0.0;  ///< L2 distance of all logits from the reference
  RewardBands bands;
};

class Simulator {
 public:
  /// Scores every pool entry once with the real reward engine.
  Simulator(std::vector<PoolTask> tasks, RewardEngine& engine, SimConfig config);

  StepMetrics train_step();

  const ToyPolicy& policy() const { return policy_; }
  const ToyPolicy& reference() const { return reference_; }
  const std::vector<PoolTask>& tasks() const { return tasks_; }
  /// pool_rewards()[task][entry] is the composite total of that response.
  const std::vector<std::vector<double>>& pool_rewards() const { return pool_rewards_; }
  void set_policy(ToyPolicy policy) { policy_ = std::move(policy); }

 private:
  std::vector<PoolTask> tasks_;
  SimConfig config_;
  ToyPolicy policy_;
  ToyPolicy reference_;
  std::vector<std::vector<double>> pool_rewards_;
  std::mt19937_64 rng_;
  std::size_t step_ = 0;
};

RewardBands classify(double total, RewardBands bands);

}  // namespace sqlrl::sim
