#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sqlrl/corpus.hpp"
#include "sqlrl/result_compare.hpp"
#include "sqlrl/selector.hpp"
#include "sqlrl/sql_exec.hpp"

namespace sqlrl {

struct ItemResult {
  std::string task_id;
  Difficulty difficulty = Difficulty::kUnknown;
  bool match = false;
  /// Gold failed to execute; the item is left out of every count.
  bool excluded = false;
  ExecStatus status = ExecStatus::kSqlError;
  std::string message;
  std::chrono::nanoseconds elapsed{0};
  std::optional<std::size_t> tokens;
  std::optional<SelectionResult> selection;
};

struct LevelStats {
  std::size_t count = 0;
  std::size_t correct = 0;
  double ex = 0.0;
};

struct EvaluationReport {
  std::size_t total = 0;
  std::size_t correct = 0;
  double ex_overall = 0.0;
  std::size_t excluded = 0;
  std::map<Difficulty, LevelStats> per_difficulty;
  /// Sorted by task id.
  std::vector<ItemResult> per_item;
  std::vector<std::string> warnings;
  std::chrono::nanoseconds wall_time{0};
};

struct EvalOptions {
  std::chrono::milliseconds limit = kEvalExecLimit;
  RowSemantics semantics = RowSemantics::kSet;
  MatchOptions match;
};

/// Predictions aligned by index with tasks. Throws InvalidInput on a size
/// mismatch.
EvaluationReport evaluate(const std::vector<Task>& tasks, const std::vector<std::string>& predictions,
                          Executor& executor, const EvalOptions& options = {},
                          const std::vector<std::optional<std::size_t>>& tokens = {});

/// Self-consistency selection per task, then EX on the chosen SQL.
EvaluationReport evaluate_with_selection(const std::vector<Task>& tasks,
                                         const std::vector<std::vector<std::string>>& groups,
                                         Executor& executor, const EvalOptions& options = {});

/// Table with Simple / Moderate / Challenging / All columns (plus any other
/// level that occurs), counts and EX to one decimal.
std::string format_table(const EvaluationReport& report);

struct PredictionRecord {
  std::optional<std::string> task_id;
  std::vector<std::string> candidates;
  /// True for {candidates: [...]}, false for {sql: ...}.
  bool grouped = false;
  std::optional<std::size_t> tokens;
};

std::vector<PredictionRecord> load_predictions(const std::filesystem::path& path);

/// Orders records to match tasks: by task_id when every record carries
/// one, otherwise by position. Throws InvalidInput on unknown, duplicate
/// or missing ids, or a count mismatch.
std::vector<PredictionRecord> align_predictions(const std::vector<Task>& tasks,
                                                std::vector<PredictionRecord> records);

}  // namespace sqlrl
