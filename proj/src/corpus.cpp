#include "sqlrl/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <string>

#include <json.hpp>

#include "sqlrl/errors.hpp"
#include "sqlrl/sql_exec.hpp"

namespace sqlrl {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::optional<std::string> optional_string(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw InvalidInput(std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

std::string required_string(const nlohmann::json& j, const char* key) {
  auto v = optional_string(j, key);
  if (!v || v->empty()) throw InvalidInput(std::string("field '") + key + "' is required and non-empty");
  return *v;
}

// Unbiased draw in [0, bound) from the raw 64-bit engine output, so the
// sample does not depend on the standard library's distributions.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

}  // namespace

std::string_view to_string(Difficulty d) {
  switch (d) {
    case Difficulty::kSimple: return "simple";
    case Difficulty::kModerate: return "moderate";
    case Difficulty::kChallenging: return "challenging";
    case Difficulty::kComplex: return "complex";
    case Difficulty::kUnknown: break;
  }
  return "unknown";
}

Difficulty parse_difficulty(std::string_view label) {
  const std::string l = lower(label);
  if (l == "simple") return Difficulty::kSimple;
  if (l == "moderate") return Difficulty::kModerate;
  if (l == "challenging") return Difficulty::kChallenging;
  if (l == "complex") return Difficulty::kComplex;
  return Difficulty::kUnknown;
}

const std::vector<Difficulty>& all_difficulties() {
  static const std::vector<Difficulty> levels = {Difficulty::kSimple, Difficulty::kModerate,
                                                 Difficulty::kChallenging, Difficulty::kComplex,
                                                 Difficulty::kUnknown};
  return levels;
}

std::vector<TrainingSample> load_samples(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open task file " + path.string());
  std::vector<TrainingSample> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      if (!j.is_object()) throw InvalidInput("record must be an object");
      TrainingSample s;
      s.task.id = required_string(j, "id");
      s.task.question = required_string(j, "question");
      s.task.db_ref = required_string(j, "db_ref");
      s.task.gold_sql = required_string(j, "gold_sql");
      s.task.external_knowledge = optional_string(j, "external_knowledge");
      if (auto d = optional_string(j, "difficulty")) s.task.difficulty = parse_difficulty(*d);
      s.think_trace = optional_string(j, "think_trace");
      out.push_back(std::move(s));
    } catch (const nlohmann::json::exception& e) {
      throw InvalidInput(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    } catch (const InvalidInput& e) {
      throw InvalidInput(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::vector<Task> load_tasks(const std::filesystem::path& path) {
  std::vector<Task> tasks;
  for (auto& s : load_samples(path)) tasks.push_back(std::move(s.task));
  return tasks;
}

std::vector<TrainingSample> stratified_sample(const std::vector<TrainingSample>& samples,
                                              std::size_t per_level, std::uint64_t seed) {
  if (per_level == 0) return {};
  std::map<Difficulty, std::vector<std::size_t>> by_level;
  for (std::size_t i = 0; i < samples.size(); ++i) by_level[samples[i].task.difficulty].push_back(i);

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> chosen;
  for (auto& [level, idx] : by_level) {
    const std::size_t take = std::min(per_level, idx.size());
    // partial Fisher-Yates: the first `take` slots end up a uniform sample
    for (std::size_t i = 0; i < take; ++i) {
      const std::size_t j = i + bounded(rng, idx.size() - i);
      std::swap(idx[i], idx[j]);
    }
    chosen.insert(chosen.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(take));
  }
  std::sort(chosen.begin(), chosen.end());
  std::vector<TrainingSample> out;
  out.reserve(chosen.size());
  for (auto i : chosen) out.push_back(samples[i]);
  return out;
}

std::vector<TrainingSample> filter_complexity(const std::vector<TrainingSample>& samples,
                                              Difficulty level) {
  std::vector<TrainingSample> out;
  std::copy_if(samples.begin(), samples.end(), std::back_inserter(out),
               [level](const TrainingSample& s) { return s.task.difficulty == level; });
  return out;
}

GoldFilterResult filter_nonempty_gold(const std::vector<TrainingSample>& samples, Executor& executor,
                                      NonNullRule rule) {
  std::vector<ExecRequest> requests;
  requests.reserve(samples.size());
  for (const auto& s : samples) requests.push_back({s.task.db_ref, s.task.gold_sql});
  const auto outcomes = executor.execute_batch(requests, kEvalExecLimit);

  GoldFilterResult out;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& o = outcomes[i];
    const auto& id = samples[i].task.id;
    switch (o.status) {
      case ExecStatus::kSqlError: out.rejected.push_back({id, "execution failure"}); continue;
      case ExecStatus::kTimeout: out.rejected.push_back({id, "timeout"}); continue;
      case ExecStatus::kUnavailable:
        out.rejected.push_back({id, "database unavailable: " + o.message});
        continue;
      case ExecStatus::kSuccess: break;
    }
    if (o.result.rows.empty()) {
      out.rejected.push_back({id, "empty result"});
      continue;
    }
    std::size_t nulls = 0, cells = 0;
    for (const auto& row : o.result.rows) {
      for (const auto& c : row) {
        ++cells;
        if (std::holds_alternative<std::monostate>(c)) ++nulls;
      }
    }
    if (nulls == cells) {
      out.rejected.push_back({id, "all cells null"});
      continue;
    }
    if (rule == NonNullRule::kAllCells && nulls > 0) {
      out.rejected.push_back({id, "contains null cells"});
      continue;
    }
    out.kept.push_back(samples[i]);
  }
  return out;
}

}  // namespace sqlrl
