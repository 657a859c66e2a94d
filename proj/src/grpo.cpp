#include "sqlrl/grpo.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sqlrl/errors.hpp"

namespace sqlrl::grpo {

std::vector<double> group_advantages(std::span<const double> rewards) {
  if (rewards.empty()) throw InvalidInput("group_advantages: empty reward group");
  const double n = static_cast<double>(rewards.size());
  double mean = 0.0;
  for (double r : rewards) mean += r;
  mean /= n;
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  const double sd = std::sqrt(var / n);

  std::vector<double> adv(rewards.size(), 0.0);
  if (!(sd >= kStdFloor)) return adv;
  for (std::size_t i = 0; i < rewards.size(); ++i) adv[i] = (rewards[i] - mean) / sd;
  return adv;
}

Ratio importance_ratio(double logp_new, double logp_old, double ceiling) {
  if (!std::isfinite(logp_new) || !std::isfinite(logp_old)) {
    throw InvalidInput("importance_ratio: non-finite log-probability");
  }
  const double r = std::exp(logp_new - logp_old);
  if (r > ceiling) return {ceiling, true};
  return {r, false};
}

double clipped_surrogate(double ratio, double advantage, double epsilon) {
  const double clipped = std::clamp(ratio, 1.0 - epsilon, 1.0 + epsilon);
  return std::min(ratio * advantage, clipped * advantage);
}

double kl_penalty(double logp_new, double logp_ref) {
  const double d = logp_ref - logp_new;
  return std::exp(d) - d - 1.0;
}

namespace {

void validate(const Batch& batch) {
  if (batch.candidates.empty()) throw InvalidInput("grpo batch: empty group");
  if (!(batch.epsilon > 0.0 && batch.epsilon < 1.0)) throw InvalidInput("grpo batch: epsilon must lie in (0, 1)");
  if (!(batch.beta >= 0.0) || !std::isfinite(batch.beta)) throw InvalidInput("grpo batch: beta must be >= 0");
  if (!(batch.ratio_ceiling > 1.0 + batch.epsilon) || !std::isfinite(batch.ratio_ceiling)) {
    throw InvalidInput("grpo batch: ratio ceiling must be finite and above 1 + epsilon");
  }
  for (std::size_t i = 0; i < batch.candidates.size(); ++i) {
    const auto& c = batch.candidates[i];
    const auto where = "grpo batch: candidate " + std::to_string(i);
    if (!std::isfinite(c.reward)) throw InvalidInput(where + " has a non-finite reward");
    if (c.logp_new.size() != c.logp_old.size() || c.logp_new.size() != c.logp_ref.size()) {
      throw InvalidInput(where + " has log-probability sequences of unequal length");
    }
    if (c.logp_new.empty()) throw InvalidInput(where + " has no tokens");
    for (std::size_t t = 0; t < c.logp_new.size(); ++t) {
      if (!std::isfinite(c.logp_new[t]) || !std::isfinite(c.logp_old[t]) || !std::isfinite(c.logp_ref[t])) {
        throw InvalidInput(where + " token " + std::to_string(t) + " has a non-finite log-probability");
      }
    }
  }
}

std::vector<double> rewards_of(const Batch& batch) {
  std::vector<double> r;
  r.reserve(batch.candidates.size());
  for (const auto& c : batch.candidates) r.push_back(c.reward);
  return r;
}

}  // namespace

Terms objective(const Batch& batch, simd::KernelIsa isa) {
  validate(batch);
  Terms t;
  t.advantages = group_advantages(rewards_of(batch));
  const std::size_t g = batch.candidates.size();
  t.surrogate.resize(g);
  t.kl.resize(g);
  double acc = 0.0;
  for (std::size_t i = 0; i < g; ++i) {
    const auto& c = batch.candidates[i];
    const simd::TokenParams params{t.advantages[i], batch.epsilon, batch.ratio_ceiling};
    const auto sums = simd::token_sums(c.logp_new, c.logp_old, c.logp_ref, params, isa);
    const double n = static_cast<double>(c.logp_new.size());
    t.surrogate[i] = sums.surrogate / n;
    t.kl[i] = sums.kl / n;
    t.clamped_tokens += sums.clamped;
    acc += t.surrogate[i] - batch.beta * t.kl[i];
  }
  t.objective = acc / static_cast<double>(g);
  return t;
}

std::vector<std::vector<double>> objective_grad_logp(const Batch& batch) {
  validate(batch);
  const auto adv = group_advantages(rewards_of(batch));
  const double g = static_cast<double>(batch.candidates.size());
  std::vector<std::vector<double>> grad;
  grad.reserve(batch.candidates.size());
  for (std::size_t i = 0; i < batch.candidates.size(); ++i) {
    const auto& c = batch.candidates[i];
    const double n = static_cast<double>(c.logp_new.size());
    std::vector<double> gi(c.logp_new.size());
    for (std::size_t t = 0; t < gi.size(); ++t) {
      const auto ratio = importance_ratio(c.logp_new[t], c.logp_old[t], batch.ratio_ceiling);
      // d/d ratio of min(ratio*A, clip(ratio)*A): A on the unclipped branch
      // (always taken inside the trust region), zero once clipping binds.
      double dsurr = 0.0;
      if (!ratio.clamped) {
        const bool inside = ratio.value >= 1.0 - batch.epsilon && ratio.value <= 1.0 + batch.epsilon;
        const double clipped = std::clamp(ratio.value, 1.0 - batch.epsilon, 1.0 + batch.epsilon);
        if (inside || ratio.value * adv[i] < clipped * adv[i]) dsurr = adv[i] * ratio.value;
      }
      const double dkl = 1.0 - std::exp(c.logp_ref[t] - c.logp_new[t]);
      gi[t] = (dsurr - batch.beta * dkl) / (n * g);
    }
    grad.push_back(std::move(gi));
  }
  return grad;
}

}  // namespace sqlrl::grpo
