#pragma once

#include <chrono>
#include <cstddef>
#include <exception>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "sqlrl/corpus.hpp"
#include "sqlrl/response_parser.hpp"
#include "sqlrl/result_compare.hpp"
#include "sqlrl/sql_exec.hpp"

namespace sqlrl {

/// How the length reward treats a correct response longer than max_length.
enum class OverlongMode {
  kAsPrinted,      ///< 0.5 + s_al
  kStrictPenalty,  ///< 0.5 * s_al, always below the within-limit value
};

struct RewardConfig {
  std::size_t max_length = 2048;
  std::chrono::milliseconds execution_limit = kRewardExecLimit;
  OverlongMode overlong = OverlongMode::kAsPrinted;
  RowSemantics semantics = RowSemantics::kSet;
  ParseOptions parse;

  void validate() const;
};

struct RewardBreakdown {
  int s_f = 0;
  int s_e = 0;
  int s_r = 0;
  double s_l = 0.0;
  double s_tl = 0.0;
  double s_al = 0.0;
  double total = 0.0;
};

struct LengthReward {
  double s_l = 0.0;
  double s_tl = 0.0;
  double s_al = 0.0;
};

int format_reward(const ParsedResponse& parsed);

/// `outcome` is the execution of parsed.sql; ignored when the format is
/// invalid. Throws InfrastructureError when the outcome is kUnavailable.
int execution_reward(const ParsedResponse& parsed, const ExecutionOutcome* outcome);

/// Throws CorpusError if gold_outcome is not a success.
int result_reward(const ParsedResponse& parsed, const ExecutionOutcome* outcome,
                  const ExecutionOutcome& gold_outcome, RowSemantics semantics = RowSemantics::kSet);

LengthReward length_reward(const LengthStats& lengths, const RewardConfig& config,
                           bool result_correct);

/// Sums the sub-rewards in a fixed order.
RewardBreakdown combine(int s_f, int s_e, int s_r, const LengthReward& length);

/// Full composite score of one response plus how its SQL fared.
struct ScoredResponse {
  RewardBreakdown reward;
  ParsedResponse parsed;
  /// "format_error" when no SQL was executed, otherwise the execution status.
  std::string status;
};

struct ScoreRequest {
  std::string_view response;
  const Task* task = nullptr;
  std::optional<LengthStats> lengths;
};

/// A scored item, or the exception its scoring raised.
using ScoreSlot = std::variant<ScoredResponse, std::exception_ptr>;

/// Composes parse, execute, compare and the four sub-rewards. Gold results
/// are executed once per task and cached.
class RewardEngine {
 public:
  RewardEngine(Executor& executor, RewardConfig config = {});

  const RewardConfig& config() const { return config_; }

  /// Throws InfrastructureError (retryable) or CorpusError; never turns
  /// either into a negative reward. lengths_override replaces the measured
  /// LengthStats (the trainer's token counts).
  ScoredResponse score(std::string_view raw_response, const Task& task,
                       const std::optional<LengthStats>& lengths_override = std::nullopt,
                       const std::optional<RewardConfig>& config_override = std::nullopt);

  /// Scores several responses for the same task, executing in parallel.
  std::vector<ScoredResponse> score_group(std::span<const std::string> responses, const Task& task);

  /// Independent items executed together through the pool. Each slot
  /// equals score() on the same arguments; a failing item holds its
  /// exception and leaves the others untouched.
  std::vector<ScoreSlot> score_batch(std::span<const ScoreRequest> requests,
                                     const std::optional<RewardConfig>& config_override = std::nullopt);

  const ExecutionOutcome& gold_outcome(const Task& task);

 private:
  ScoredResponse finish(ParsedResponse parsed, const ExecutionOutcome* outcome, const Task& task,
                        const RewardConfig& config);

  Executor& executor_;
  RewardConfig config_;
  std::mutex gold_mu_;
  std::unordered_map<std::string, std::shared_ptr<const ExecutionOutcome>> gold_cache_;
};

RewardBreakdown compute_reward(std::string_view raw_response, const Task& task, Executor& executor,
                               const RewardConfig& config = {});

}  // namespace sqlrl
