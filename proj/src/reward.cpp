#include "sqlrl/reward.hpp"

#include <cstdint>
#include <future>

#include "sqlrl/errors.hpp"

namespace sqlrl {

void RewardConfig::validate() const {
  if (max_length == 0) throw InvalidInput("max_length must be positive");
  if (execution_limit.count() <= 0) throw InvalidInput("execution_limit must be positive");
}

int format_reward(const ParsedResponse& parsed) { return parsed.format_ok ? 1 : -1; }

int execution_reward(const ParsedResponse& parsed, const ExecutionOutcome* outcome) {
  if (!parsed.format_ok) return 0;
  if (!outcome) throw InvalidInput("execution outcome required for a well-formed response");
  switch (outcome->status) {
    case ExecStatus::kSuccess: return 2;
    case ExecStatus::kSqlError:
    case ExecStatus::kTimeout: return -2;
    case ExecStatus::kUnavailable: break;
  }
  throw InfrastructureError("candidate execution unavailable: " + outcome->message);
}

int result_reward(const ParsedResponse& parsed, const ExecutionOutcome* outcome,
                  const ExecutionOutcome& gold_outcome, RowSemantics semantics) {
  if (!gold_outcome.ok()) {
    if (gold_outcome.status == ExecStatus::kUnavailable) {
      throw InfrastructureError("gold execution unavailable: " + gold_outcome.message);
    }
    throw CorpusError("gold SQL failed (" + std::string(to_string(gold_outcome.status)) +
                      "): " + gold_outcome.message);
  }
  if (execution_reward(parsed, outcome) != 2) return 0;
  const bool match = results_match(normalize(outcome->result, semantics), normalize(gold_outcome.result, semantics));
  return match ? 3 : -3;
}

LengthReward length_reward(const LengthStats& lengths, const RewardConfig& config, bool result_correct) {
  if (!result_correct) return {};
  LengthReward r;
  const double max_len = static_cast<double>(config.max_length);
  r.s_tl = static_cast<double>(lengths.think + lengths.answer) / max_len;
  r.s_al = lengths.answer == 0 ? 0.0 : static_cast<double>(lengths.sql) / static_cast<double>(lengths.answer);
  if (lengths.response <= config.max_length) {
    r.s_l = 0.5 * r.s_tl + r.s_al;
  } else if (config.overlong == OverlongMode::kAsPrinted) {
    r.s_l = 0.5 + r.s_al;
  } else {
    r.s_l = 0.5 * r.s_al;
  }
  return r;
}

RewardBreakdown combine(int s_f, int s_e, int s_r, const LengthReward& length) {
  RewardBreakdown b;
  b.s_f = s_f;
  b.s_e = s_e;
  b.s_r = s_r;
  b.s_l = length.s_l;
  b.s_tl = length.s_tl;
  b.s_al = length.s_al;
  b.total = static_cast<double>(s_f + s_e + s_r) + length.s_l;
  return b;
}

RewardEngine::RewardEngine(Executor& executor, RewardConfig config)
    : executor_(executor), config_(std::move(config)) {
  config_.validate();
}

const ExecutionOutcome& RewardEngine::gold_outcome(const Task& task) {
  {
    std::lock_guard lock(gold_mu_);
    if (auto it = gold_cache_.find(task.id); it != gold_cache_.end()) return *it->second;
  }
  // Gold queries are trusted; they get the evaluation limit.
  auto outcome = std::make_shared<const ExecutionOutcome>(executor_.execute(task.db_ref, task.gold_sql, kEvalExecLimit));
  if (outcome->status == ExecStatus::kUnavailable) {
    throw InfrastructureError("gold execution unavailable for task '" + task.id + "': " + outcome->message);
  }
  std::lock_guard lock(gold_mu_);
  auto [it, inserted] = gold_cache_.emplace(task.id, std::move(outcome));
  return *it->second;
}

ScoredResponse RewardEngine::finish(ParsedResponse parsed, const ExecutionOutcome* outcome, const Task& task,
                                    const RewardConfig& config) {
  const auto& gold = gold_outcome(task);
  const int s_f = format_reward(parsed);
  const int s_e = execution_reward(parsed, outcome);
  const int s_r = result_reward(parsed, outcome, gold, config.semantics);
  const auto length = length_reward(parsed.lengths, config, s_r == 3);

  ScoredResponse out;
  out.reward = combine(s_f, s_e, s_r, length);
  out.status = parsed.format_ok && outcome ? std::string(to_string(outcome->status)) : "format_error";
  out.parsed = std::move(parsed);
  return out;
}

ScoredResponse RewardEngine::score(std::string_view raw_response, const Task& task,
                                   const std::optional<LengthStats>& lengths_override,
                                   const std::optional<RewardConfig>& config_override) {
  const RewardConfig& config = config_override ? *config_override : config_;
  config.validate();
  auto parsed = parse_response(raw_response, count_characters, config.parse);
  if (lengths_override) {
    if (!lengths_override->consistent()) {
      throw InvalidInput("lengths must satisfy think + answer <= response and sql <= answer");
    }
    parsed.lengths = *lengths_override;
  }
  std::optional<ExecutionOutcome> outcome;
  if (parsed.format_ok) outcome = executor_.execute(task.db_ref, *parsed.sql, config.execution_limit);
  return finish(std::move(parsed), outcome ? &*outcome : nullptr, task, config);
}

std::vector<ScoredResponse> RewardEngine::score_group(std::span<const std::string> responses, const Task& task) {
  std::vector<ParsedResponse> parsed;
  std::vector<std::string> sqls;
  std::vector<std::size_t> slot(responses.size(), SIZE_MAX);
  for (std::size_t i = 0; i < responses.size(); ++i) {
    parsed.push_back(parse_response(responses[i], count_characters, config_.parse));
    if (parsed.back().format_ok) {
      slot[i] = sqls.size();
      sqls.push_back(*parsed.back().sql);
    }
  }
  auto outcomes = executor_.execute_group(task.db_ref, sqls, config_.execution_limit);
  std::vector<ScoredResponse> out;
  out.reserve(responses.size());
  for (std::size_t i = 0; i < responses.size(); ++i) {
    const ExecutionOutcome* o = slot[i] == SIZE_MAX ? nullptr : &outcomes[slot[i]];
    out.push_back(finish(std::move(parsed[i]), o, task, config_));
  }
  return out;
}

std::vector<ScoreSlot> RewardEngine::score_batch(std::span<const ScoreRequest> requests,
                                                 const std::optional<RewardConfig>& config_override) {
  const RewardConfig& config = config_override ? *config_override : config_;
  config.validate();
  std::vector<ScoreSlot> out(requests.size());
  std::vector<ParsedResponse> parsed(requests.size());
  std::vector<ExecRequest> exec;
  std::vector<std::size_t> slot(requests.size(), SIZE_MAX);
  for (std::size_t i = 0; i < requests.size(); ++i) {
    const auto& r = requests[i];
    try {
      if (r.task == nullptr) throw InvalidInput("score_batch: missing task");
      if (r.lengths && !r.lengths->consistent()) {
        throw InvalidInput("lengths must satisfy think + answer <= response and sql <= answer");
      }
      parsed[i] = parse_response(r.response, count_characters, config.parse);
      if (r.lengths) parsed[i].lengths = *r.lengths;
      if (parsed[i].format_ok) {
        slot[i] = exec.size();
        exec.push_back({r.task->db_ref, *parsed[i].sql});
      }
    } catch (...) {
      out[i] = std::current_exception();
    }
  }
  auto outcomes = executor_.execute_batch(exec, config.execution_limit);
  for (std::size_t i = 0; i < requests.size(); ++i) {
    if (std::holds_alternative<std::exception_ptr>(out[i]) && std::get<std::exception_ptr>(out[i])) continue;
    try {
      const ExecutionOutcome* o = slot[i] == SIZE_MAX ? nullptr : &outcomes[slot[i]];
      out[i] = finish(std::move(parsed[i]), o, *requests[i].task, config);
    } catch (...) {
      out[i] = std::current_exception();
    }
  }
  return out;
}

RewardBreakdown compute_reward(std::string_view raw_response, const Task& task, Executor& executor,
                               const RewardConfig& config) {
  RewardEngine engine(executor, config);
  return engine.score(raw_response, task).reward;
}

}  // namespace sqlrl
