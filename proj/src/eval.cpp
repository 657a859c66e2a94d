#include "sqlrl/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "sqlrl/errors.hpp"

namespace sqlrl {

namespace {

using Clock = std::chrono::steady_clock;

double percent(std::size_t correct, std::size_t total) {
  return total == 0 ? 0.0 : 100.0 * static_cast<double>(correct) / static_cast<double>(total);
}

EvaluationReport assemble(std::vector<ItemResult> items, Clock::time_point start) {
  EvaluationReport r;
  for (const auto& item : items) {
    if (item.excluded) {
      ++r.excluded;
      r.warnings.push_back("task '" + item.task_id + "' excluded: gold failed (" + item.message + ")");
      continue;
    }
    ++r.total;
    auto& level = r.per_difficulty[item.difficulty];
    ++level.count;
    if (item.match) {
      ++r.correct;
      ++level.correct;
    }
  }
  r.ex_overall = percent(r.correct, r.total);
  for (auto& [level, stats] : r.per_difficulty) stats.ex = percent(stats.correct, stats.count);
  std::stable_sort(items.begin(), items.end(),
                   [](const ItemResult& a, const ItemResult& b) { return a.task_id < b.task_id; });
  r.per_item = std::move(items);
  r.wall_time = Clock::now() - start;
  return r;
}

// Gold and candidate run as two requests each through the pool.
std::vector<ItemResult> score_items(const std::vector<Task>& tasks, const std::vector<std::string>& predictions,
                                    Executor& executor, const EvalOptions& options) {
  std::vector<ExecRequest> requests;
  requests.reserve(tasks.size() * 2);
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    requests.push_back({tasks[i].db_ref, tasks[i].gold_sql});
    requests.push_back({tasks[i].db_ref, predictions[i]});
  }
  const auto outcomes = executor.execute_batch(requests, options.limit);

  std::vector<ItemResult> items;
  items.reserve(tasks.size());
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const auto& gold = outcomes[2 * i];
    const auto& pred = outcomes[2 * i + 1];
    ItemResult item;
    item.task_id = tasks[i].id;
    item.difficulty = tasks[i].difficulty;
    item.status = pred.status;
    item.message = pred.message;
    item.elapsed = pred.elapsed;
    if (!gold.ok()) {
      item.excluded = true;
      item.message = std::string(to_string(gold.status)) + ": " + gold.message;
    } else if (pred.ok()) {
      item.match = results_match(normalize(pred.result, options.semantics),
                                 normalize(gold.result, options.semantics), options.match);
    }
    items.push_back(std::move(item));
  }
  return items;
}

}  // namespace

EvaluationReport evaluate(const std::vector<Task>& tasks, const std::vector<std::string>& predictions,
                          Executor& executor, const EvalOptions& options,
                          const std::vector<std::optional<std::size_t>>& tokens) {
  if (tasks.size() != predictions.size()) {
    throw InvalidInput("evaluate: " + std::to_string(tasks.size()) + " tasks but " +
                       std::to_string(predictions.size()) + " predictions");
  }
  const auto start = Clock::now();
  auto items = score_items(tasks, predictions, executor, options);
  for (std::size_t i = 0; i < items.size() && i < tokens.size(); ++i) items[i].tokens = tokens[i];
  return assemble(std::move(items), start);
}

EvaluationReport evaluate_with_selection(const std::vector<Task>& tasks,
                                         const std::vector<std::vector<std::string>>& groups,
                                         Executor& executor, const EvalOptions& options) {
  if (tasks.size() != groups.size()) throw InvalidInput("evaluate_with_selection: task/group count mismatch");
  const auto start = Clock::now();
  std::vector<SelectionResult> chosen;
  std::vector<std::string> predictions;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (groups[i].empty()) throw InvalidInput("evaluate_with_selection: empty group for '" + tasks[i].id + "'");
    chosen.push_back(select_sql(groups[i], tasks[i].db_ref, executor, options.limit, options.semantics));
    predictions.push_back(chosen.back().chosen_sql);
  }
  auto items = score_items(tasks, predictions, executor, options);
  for (std::size_t i = 0; i < items.size(); ++i) items[i].selection = chosen[i];
  return assemble(std::move(items), start);
}

std::string format_table(const EvaluationReport& report) {
  std::vector<Difficulty> columns = {Difficulty::kSimple, Difficulty::kModerate, Difficulty::kChallenging};
  for (auto level : {Difficulty::kComplex, Difficulty::kUnknown}) {
    if (report.per_difficulty.count(level)) columns.push_back(level);
  }
  const auto cell = [](const std::string& s) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%12s", s.c_str());
    return std::string(buf);
  };
  const auto ex = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", v);
    return std::string(buf);
  };

  std::ostringstream os;
  os << cell("");
  for (auto level : columns) {
    std::string name(to_string(level));
    name[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(name[0])));
    os << cell(name);
  }
  os << cell("All") << '\n' << cell("count");
  for (auto level : columns) {
    auto it = report.per_difficulty.find(level);
    os << cell(std::to_string(it == report.per_difficulty.end() ? 0 : it->second.count));
  }
  os << cell(std::to_string(report.total)) << '\n' << cell("EX (%)");
  for (auto level : columns) {
    auto it = report.per_difficulty.find(level);
    os << cell(it == report.per_difficulty.end() || it->second.count == 0 ? "-" : ex(it->second.ex));
  }
  os << cell(ex(report.ex_overall)) << '\n';
  if (report.excluded) os << "excluded (gold failed): " << report.excluded << '\n';
  return os.str();
}

std::vector<PredictionRecord> load_predictions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open prediction file " + path.string());
  std::vector<PredictionRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto where = path.string() + ":" + std::to_string(lineno) + ": ";
    try {
      const auto j = nlohmann::json::parse(line);
      PredictionRecord r;
      if (j.contains("task_id") && !j["task_id"].is_null()) r.task_id = j["task_id"].get<std::string>();
      if (j.contains("candidates")) {
        r.grouped = true;
        r.candidates = j["candidates"].get<std::vector<std::string>>();
        if (r.candidates.empty()) throw InvalidInput("empty candidate list");
      } else if (j.contains("sql")) {
        r.candidates.push_back(j["sql"].get<std::string>());
      } else {
        throw InvalidInput("record needs 'sql' or 'candidates'");
      }
      if (j.contains("tokens") && j["tokens"].is_number_unsigned()) r.tokens = j["tokens"].get<std::size_t>();
      out.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw InvalidInput(where + e.what());
    } catch (const InvalidInput& e) {
      throw InvalidInput(where + e.what());
    }
  }
  return out;
}

std::vector<PredictionRecord> align_predictions(const std::vector<Task>& tasks,
                                                std::vector<PredictionRecord> records) {
  const bool by_id = !records.empty() && std::all_of(records.begin(), records.end(),
                                                     [](const PredictionRecord& r) { return r.task_id.has_value(); });
  if (!by_id) {
    if (records.size() != tasks.size()) {
      throw InvalidInput("prediction count " + std::to_string(records.size()) + " does not match task count " +
                         std::to_string(tasks.size()));
    }
    return records;
  }
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!index.emplace(*records[i].task_id, i).second) {
      throw InvalidInput("duplicate prediction for task '" + *records[i].task_id + "'");
    }
  }
  std::set<std::string> known;
  std::vector<PredictionRecord> out;
  out.reserve(tasks.size());
  for (const auto& t : tasks) {
    known.insert(t.id);
    auto it = index.find(t.id);
    if (it == index.end()) throw InvalidInput("no prediction for task '" + t.id + "'");
    out.push_back(std::move(records[it->second]));
  }
  for (const auto& [id, i] : index) {
    if (!known.count(id)) throw InvalidInput("prediction for unknown task '" + id + "'");
  }
  return out;
}

}  // namespace sqlrl
