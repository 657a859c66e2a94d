#include "sqlrl/policy_sim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_map>

#include <json.hpp>

#include "sqlrl/errors.hpp"

namespace sqlrl::sim {

std::vector<PoolTask> load_pool_fixture(const std::filesystem::path& tasks_path,
                                        const std::filesystem::path& pools_path) {
  const auto tasks = load_tasks(tasks_path);
  std::unordered_map<std::string, const Task*> by_id;
  for (const auto& t : tasks) by_id.emplace(t.id, &t);

  std::ifstream in(pools_path);
  if (!in) throw InvalidInput("cannot open pool file " + pools_path.string());
  std::vector<PoolTask> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto j = nlohmann::json::parse(line);
    const auto id = j.at("task_id").get<std::string>();
    auto it = by_id.find(id);
    if (it == by_id.end()) throw InvalidInput("pool references unknown task '" + id + "'");
    PoolTask p{*it->second, j.at("candidates").get<std::vector<std::string>>(),
               j.value("correct_index", std::size_t{0})};
    if (p.pool.empty()) throw InvalidInput("empty pool for task '" + id + "'");
    if (p.correct_index >= p.pool.size()) throw InvalidInput("correct_index out of range for '" + id + "'");
    out.push_back(std::move(p));
  }
  return out;
}

ToyPolicy ToyPolicy::uniform(const std::vector<std::size_t>& pool_sizes) {
  std::vector<std::vector<double>> logits;
  for (auto n : pool_sizes) logits.emplace_back(n, 0.0);
  return ToyPolicy(std::move(logits));
}

std::vector<double> ToyPolicy::probabilities(std::size_t task) const {
  const auto& z = logits(task);
  const double m = *std::max_element(z.begin(), z.end());
  std::vector<double> p(z.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) sum += (p[i] = std::exp(z[i] - m));
  for (auto& v : p) v /= sum;
  return p;
}

double ToyPolicy::log_prob(std::size_t task, std::size_t action) const {
  const auto& z = logits(task);
  const double m = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double v : z) sum += std::exp(v - m);
  return z.at(action) - m - std::log(sum);
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::vector<Sample> rollout(const ToyPolicy& policy, std::size_t task, std::size_t group_size,
                            std::mt19937_64& rng) {
  if (group_size == 0) throw InvalidInput("rollout: group size must be at least 1");
  const auto p = policy.probabilities(task);
  std::vector<Sample> out;
  out.reserve(group_size);
  for (std::size_t g = 0; g < group_size; ++g) {
    const double u = uniform01(rng);
    double cdf = 0.0;
    std::size_t a = p.size() - 1;
    for (std::size_t i = 0; i < p.size(); ++i) {
      cdf += p[i];
      if (u < cdf) {
        a = i;
        break;
      }
    }
    // guard against rounding in the cdf tail landing on a zero-probability entry
    while (p[a] == 0.0 && a > 0) --a;
    out.push_back({a, policy.log_prob(task, a)});
  }
  return out;
}

grpo::Batch make_batch(const ToyPolicy& current, const ToyPolicy& sampler, const ToyPolicy& reference,
                       std::size_t task, const std::vector<Sample>& samples,
                       const std::vector<double>& rewards, double epsilon, double beta) {
  grpo::Batch batch;
  batch.epsilon = epsilon;
  batch.beta = beta;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto a = samples[i].action;
    batch.candidates.push_back({rewards.at(i),
                                {current.log_prob(task, a)},
                                {sampler.log_prob(task, a)},
                                {reference.log_prob(task, a)}});
  }
  return batch;
}

std::vector<double> logit_gradient(const ToyPolicy& current, std::size_t task,
                                   const std::vector<Sample>& samples, const grpo::Batch& batch) {
  const auto dlogp = grpo::objective_grad_logp(batch);
  const auto p = current.probabilities(task);
  std::vector<double> grad(p.size(), 0.0);
  // d log softmax(z)[a] / dz_k = [k == a] - p_k
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double w = dlogp[i][0];
    for (std::size_t k = 0; k < p.size(); ++k) grad[k] -= w * p[k];
    grad[samples[i].action] += w;
  }
  return grad;
}

RewardBands classify(double total, RewardBands bands) {
  if (total > 6.0) {
    ++bands.correct;
  } else if (total == 0.0) {
    ++bands.wrong;
  } else {
    ++bands.invalid;
  }
  return bands;
}

Simulator::Simulator(std::vector<PoolTask> tasks, RewardEngine& engine, SimConfig config)
    : tasks_(std::move(tasks)), config_(config), rng_(config.seed) {
  if (config_.group_size == 0) throw InvalidInput("simulator: group size must be at least 1");
  std::vector<std::size_t> sizes;
  for (const auto& t : tasks_) {
    sizes.push_back(t.pool.size());
    std::vector<double> totals;
    for (const auto& s : engine.score_group(t.pool, t.task)) totals.push_back(s.reward.total);
    pool_rewards_.push_back(std::move(totals));
  }
  policy_ = ToyPolicy::uniform(sizes);
  reference_ = policy_;
}

StepMetrics Simulator::train_step() {
  StepMetrics m;
  m.step = ++step_;
  double reward_sum = 0.0;
  std::size_t sampled = 0;
  double objective_sum = 0.0;

  for (std::size_t k = 0; k < tasks_.size(); ++k) {
    const auto samples = rollout(policy_, k, config_.group_size, rng_);
    std::vector<double> rewards;
    for (const auto& s : samples) {
      const double r = pool_rewards_[k][s.action];
      rewards.push_back(r);
      reward_sum += r;
      ++sampled;
      m.bands = classify(r, m.bands);
    }
    const ToyPolicy sampler = policy_;
    for (std::size_t epoch = 0; epoch < std::max<std::size_t>(1, config_.inner_epochs); ++epoch) {
      const auto batch = make_batch(policy_, sampler, reference_, k, samples, rewards, config_.epsilon, config_.beta);
      if (epoch == 0) objective_sum += grpo::objective(batch).objective;
      const auto grad = logit_gradient(policy_, k, samples, batch);
      auto& z = policy_.logits(k);
      for (std::size_t i = 0; i < z.size(); ++i) z[i] += config_.learning_rate * grad[i];
    }
  }

  m.mean_reward = sampled ? reward_sum / static_cast<double>(sampled) : 0.0;
  m.objective = tasks_.empty() ? 0.0 : objective_sum / static_cast<double>(tasks_.size());
  m.min_correct_prob = tasks_.empty() ? 0.0 : 1.0;
  double drift2 = 0.0;
  for (std::size_t k = 0; k < tasks_.size(); ++k) {
    const auto p = policy_.probabilities(k);
    double expected = 0.0;
    for (std::size_t a = 0; a < p.size(); ++a) expected += p[a] * pool_rewards_[k][a];
    m.expected_reward += expected;
    const double pc = p[tasks_[k].correct_index];
    m.mean_correct_prob += pc;
    m.min_correct_prob = std::min(m.min_correct_prob, pc);
    const auto& z = policy_.logits(k);
    const auto& z0 = reference_.logits(k);
    for (std::size_t a = 0; a < z.size(); ++a) drift2 += (z[a] - z0[a]) * (z[a] - z0[a]);
  }
  if (!tasks_.empty()) {
    m.expected_reward /= static_cast<double>(tasks_.size());
    m.mean_correct_prob /= static_cast<double>(tasks_.size());
  }
  m.logit_drift = std::sqrt(drift2);
  return m;
}

}  // namespace sqlrl::sim
