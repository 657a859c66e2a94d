#include "sqlrl/selector.hpp"

#include "sqlrl/errors.hpp"

namespace sqlrl {

SelectionResult select(std::span<const SelectionCandidate> candidates, RowSemantics semantics) {
  if (candidates.empty()) throw InvalidInput("select: no candidates");

  std::vector<std::size_t> executed;
  std::vector<CanonicalResult> canon;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& o = candidates[i].outcome;
    if (o && o->ok()) {
      executed.push_back(i);
      canon.push_back(normalize(o->result, semantics));
    }
  }

  SelectionResult r;
  r.executable_count = executed.size();
  if (executed.empty()) {
    r.chosen_index = 0;
    r.chosen_sql = candidates[0].sql;
    r.fallback = true;
    return r;
  }
  // Votes compare whole canonical forms (truncation flag included) so a
  // candidate always agrees with itself.
  for (std::size_t a = 0; a < executed.size(); ++a) {
    std::size_t votes = 0;
    for (std::size_t b = 0; b < executed.size(); ++b) {
      if (canon[a] == canon[b]) ++votes;
    }
    if (votes > r.vote_score) {
      r.vote_score = votes;
      r.chosen_index = executed[a];
    }
  }
  r.chosen_sql = candidates[r.chosen_index].sql;
  return r;
}

SelectionResult select(std::span<const std::pair<ParsedResponse, ExecutionOutcome>> candidates,
                       RowSemantics semantics) {
  std::vector<SelectionCandidate> c;
  c.reserve(candidates.size());
  for (const auto& [parsed, outcome] : candidates) {
    if (parsed.format_ok && parsed.sql) {
      c.push_back({*parsed.sql, outcome});
    } else {
      c.push_back({parsed.sql.value_or(std::string()), std::nullopt});
    }
  }
  return select(c, semantics);
}

SelectionResult select_sql(std::span<const std::string> sqls, std::string_view db_ref, Executor& executor,
                           std::chrono::milliseconds limit, RowSemantics semantics) {
  auto outcomes = executor.execute_group(db_ref, sqls, limit);
  std::vector<SelectionCandidate> c;
  c.reserve(sqls.size());
  for (std::size_t i = 0; i < sqls.size(); ++i) {
    if (outcomes[i].status == ExecStatus::kUnavailable) {
      throw InfrastructureError("candidate execution unavailable: " + outcomes[i].message);
    }
    c.push_back({sqls[i], std::move(outcomes[i])});
  }
  return select(c, semantics);
}

SelectionResult select_responses(std::span<const std::string> responses, std::string_view db_ref,
                                 Executor& executor, std::chrono::milliseconds limit, RowSemantics semantics) {
  std::vector<ParsedResponse> parsed;
  std::vector<std::string> sqls;
  for (const auto& r : responses) {
    parsed.push_back(parse_response(r));
    if (parsed.back().format_ok) sqls.push_back(*parsed.back().sql);
  }
  auto outcomes = executor.execute_group(db_ref, sqls, limit);
  std::vector<SelectionCandidate> c;
  std::size_t next = 0;
  for (const auto& p : parsed) {
    if (!p.format_ok) {
      c.push_back({p.sql.value_or(std::string()), std::nullopt});
      continue;
    }
    auto& o = outcomes[next++];
    if (o.status == ExecStatus::kUnavailable) {
      throw InfrastructureError("candidate execution unavailable: " + o.message);
    }
    c.push_back({*p.sql, std::move(o)});
  }
  return select(c, semantics);
}

}  // namespace sqlrl
