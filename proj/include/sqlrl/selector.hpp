#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sqlrl/response_parser.hpp"
#include "sqlrl/result_compare.hpp"
#include "sqlrl/sql_exec.hpp"

namespace sqlrl {

inline constexpr std::size_t kDefaultCandidateCount = 8;
/// Sampling temperature the candidates are expected to come from; the
/// caller's concern, recorded here for reference.
inline constexpr double kDefaultSamplingTemperature = 0.8;

struct SelectionCandidate {
  std::string sql;
  /// Absent when the candidate produced no SQL to run.
  std::optional<ExecutionOutcome> outcome;
};

struct SelectionResult {
  std::size_t chosen_index = 0;
  std::string chosen_sql;
  std::size_t vote_score = 0;
  std::size_t executable_count = 0;
  bool fallback = false;
};

/// Self-consistency vote. Each successfully executed candidate scores the
/// number of executed candidates with an identical canonical result
/// (itself included); the highest score wins, lowest index on ties. With
/// nothing executable, index 0 is returned with fallback set. Throws
/// InvalidInput on an empty list.
SelectionResult select(std::span<const SelectionCandidate> candidates,
                       RowSemantics semantics = RowSemantics::kSet);

SelectionResult select(std::span<const std::pair<ParsedResponse, ExecutionOutcome>> candidates,
                       RowSemantics semantics = RowSemantics::kSet);

/// Runs every SQL text against db_ref and votes.
SelectionResult select_sql(std::span<const std::string> sqls, std::string_view db_ref,
                           Executor& executor, std::chrono::milliseconds limit,
                           RowSemantics semantics = RowSemantics::kSet);

/// Parses raw responses, runs the ones with SQL, and votes.
SelectionResult select_responses(std::span<const std::string> responses, std::string_view db_ref,
                                 Executor& executor, std::chrono::milliseconds limit,
                                 RowSemantics semantics = RowSemantics::kSet);

}  // namespace sqlrl
