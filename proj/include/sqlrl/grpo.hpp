#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sqlrl/simd/token_kernels.hpp"

namespace sqlrl::grpo {

inline constexpr double kDefaultEpsilon = 0.2;
inline constexpr double kDefaultBeta = 0.001;
inline constexpr double kDefaultRatioCeiling = 1.0e4;
/// Groups whose reward spread falls below this get zero advantages.
inline constexpr double kStdFloor = 1.0e-8;

struct Candidate {
  double reward = 0.0;
  /// Per-token log-probabilities under the current, sampling-time and
  /// reference policies. All three have the same length.
  std::vector<double> logp_new;
  std::vector<double> logp_old;
  std::vector<double> logp_ref;
};

struct Batch {
  std::vector<Candidate> candidates;
  double epsilon = kDefaultEpsilon;
  double beta = kDefaultBeta;
  double ratio_ceiling = kDefaultRatioCeiling;

  std::size_t group_size() const { return candidates.size(); }
};

struct Terms {
  std::vector<double> advantages;
  /// Token-mean clipped surrogate per candidate.
  std::vector<double> surrogate;
  /// Token-mean KL estimate per candidate.
  std::vector<double> kl;
  /// Tokens whose importance ratio hit the ceiling, summed over the batch.
  std::size_t clamped_tokens = 0;
  double objective = 0.0;
};

/// (r - mean) / std with population std; all zeros when std < kStdFloor.
/// Throws InvalidInput on an empty group.
std::vector<double> group_advantages(std::span<const double> rewards);

struct Ratio {
  double value = 1.0;
  bool clamped = false;
};

/// exp(logp_new - logp_old), capped at `ceiling`. Throws InvalidInput on
/// non-finite input.
Ratio importance_ratio(double logp_new, double logp_old, double ceiling = kDefaultRatioCeiling);

/// min(ratio * A, clip(ratio, 1 - eps, 1 + eps) * A)
double clipped_surrogate(double ratio, double advantage, double epsilon);

/// Non-negative per-token estimator exp(d) - d - 1 with d = logp_ref - logp_new.
double kl_penalty(double logp_new, double logp_ref);

/// Validates the batch (errors name the candidate index), computes
/// advantages, token-mean surrogate and KL per candidate, and
/// objective = mean_i(surrogate_i - beta * kl_i). Summation runs over
/// candidates in index order; token sums use the given kernel.
Terms objective(const Batch& batch, simd::KernelIsa isa = simd::active_isa());

/// d objective / d logp_new[i][t] for every token, holding advantages,
/// logp_old and logp_ref fixed. Zero where the clipped branch or the ratio
/// ceiling is active.
std::vector<std::vector<double>> objective_grad_logp(const Batch& batch);

}  // namespace sqlrl::grpo
