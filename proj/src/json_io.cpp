#include "sqlrl/json_io.hpp"

#include <cmath>

#include "sqlrl/errors.hpp"

namespace sqlrl {

namespace {

double millis(std::chrono::nanoseconds d) { return std::chrono::duration<double, std::milli>(d).count(); }

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

Json to_json(const RewardBreakdown& r) {
  return Json{{"s_f", r.s_f},   {"s_e", r.s_e},   {"s_r", r.s_r},          {"s_l", number(r.s_l)},
              {"s_tl", number(r.s_tl)}, {"s_al", number(r.s_al)}, {"total", number(r.total)}};
}

Json to_json(const LengthStats& l) {
  return Json{{"response", l.response}, {"think", l.think}, {"answer", l.answer}, {"sql", l.sql}};
}

Json to_json(const ScoredResponse& s) {
  Json j = to_json(s.reward);
  j["status"] = s.status;
  j["format_ok"] = s.parsed.format_ok;
  j["sql"] = s.parsed.sql ? Json(*s.parsed.sql) : Json(nullptr);
  j["lengths"] = to_json(s.parsed.lengths);
  return j;
}

Json to_json(const SelectionResult& s) {
  return Json{{"chosen_index", s.chosen_index},
              {"chosen_sql", s.chosen_sql},
              {"vote_score", s.vote_score},
              {"executable_count", s.executable_count},
              {"fallback", s.fallback}};
}

Json to_json(const EvaluationReport& report) {
  Json levels = Json::object();
  for (const auto& [level, stats] : report.per_difficulty) {
    levels[std::string(to_string(level))] = {{"count", stats.count}, {"correct", stats.correct}, {"ex", stats.ex}};
  }
  Json items = Json::array();
  for (const auto& item : report.per_item) {
    Json j{{"task_id", item.task_id},
           {"difficulty", std::string(to_string(item.difficulty))},
           {"match", item.match},
           {"excluded", item.excluded},
           {"status", std::string(to_string(item.status))},
           {"elapsed_ms", millis(item.elapsed)}};
    if (!item.message.empty()) j["message"] = item.message;
    if (item.tokens) j["tokens"] = *item.tokens;
    if (item.selection) j["selection"] = to_json(*item.selection);
    items.push_back(std::move(j));
  }
  return Json{{"total", report.total},
              {"correct", report.correct},
              {"ex", report.ex_overall},
              {"excluded", report.excluded},
              {"per_difficulty", std::move(levels)},
              {"items", std::move(items)},
              {"warnings", report.warnings},
              {"wall_time_ms", millis(report.wall_time)}};
}

Json to_json(const sim::StepMetrics& m) {
  return Json{{"step", m.step},
              {"mean_reward", number(m.mean_reward)},
              {"expected_reward", number(m.expected_reward)},
              {"objective", number(m.objective)},
              {"min_correct_prob", number(m.min_correct_prob)},
              {"mean_correct_prob", number(m.mean_correct_prob)},
              {"logit_drift", number(m.logit_drift)},
              {"bands", {{"invalid", m.bands.invalid}, {"wrong", m.bands.wrong}, {"correct", m.bands.correct}}}};
}

Json to_json(const PoolStats& p) {
  return Json{{"workers", p.workers}, {"busy", p.busy}, {"queued", p.queued}, {"completed", p.completed}};
}

LengthStats length_stats_from_json(const Json& j) {
  if (!j.is_object()) throw InvalidInput("lengths must be an object");
  LengthStats l;
  const auto read = [&](const char* key, std::size_t& out) {
    if (!j.contains(key)) throw InvalidInput(std::string("missing '") + key + "'");
    const auto& v = j.at(key);
    if (!v.is_number_unsigned()) throw InvalidInput(std::string("'") + key + "' must be a non-negative integer");
    out = v.get<std::size_t>();
  };
  read("response", l.response);
  read("think", l.think);
  read("answer", l.answer);
  read("sql", l.sql);
  return l;
}

Json cell_to_json(const Cell& cell) {
  return std::visit(
      [](const auto& v) -> Json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return nullptr;
        } else if constexpr (std::is_same_v<T, Blob>) {
          static constexpr char kHex[] = "0123456789abcdef";
          std::string hex;
          for (auto b : v) {
            hex.push_back(kHex[b >> 4]);
            hex.push_back(kHex[b & 0xF]);
          }
          return Json{{"blob", hex}};
        } else if constexpr (std::is_same_v<T, double>) {
          return number(v);
        } else {
          return v;
        }
      },
      cell);
}

}  // namespace sqlrl
