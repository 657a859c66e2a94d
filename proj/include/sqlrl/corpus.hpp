#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sqlrl {

class Executor;

enum class Difficulty { kSimple, kModerate, kChallenging, kComplex, kUnknown };

std::string_view to_string(Difficulty d);
/// Case-insensitive; unrecognized labels map to kUnknown.
Difficulty parse_difficulty(std::string_view label);
/// All levels in report order.
const std::vector<Difficulty>& all_difficulties();

struct Task {
  std::string id;
  std::string question;
  std::optional<std::string> external_knowledge;
  std::string db_ref;
  std::string gold_sql;
  Difficulty difficulty = Difficulty::kUnknown;
};

struct TrainingSample {
  Task task;
  /// Chain-of-thought solution; only present for cold-start SFT export.
  std::optional<std::string> think_trace;
};

/// Loads a JSON Lines task file. Throws InvalidInput naming the line on
/// malformed records (empty question or gold, missing id, bad JSON).
std::vector<TrainingSample> load_samples(const std::filesystem::path& path);
std::vector<Task> load_tasks(const std::filesystem::path& path);

/// Chooses min(per_level, available) samples from each difficulty level.
/// Output is a subset of the input in input order; fixed seed gives
/// identical output on every platform.
std::vector<TrainingSample> stratified_sample(const std::vector<TrainingSample>& samples,
                                              std::size_t per_level, std::uint64_t seed);

std::vector<TrainingSample> filter_complexity(const std::vector<TrainingSample>& samples,
                                              Difficulty level);

enum class NonNullRule {
  kAnyCell,   ///< at least one row and at least one non-NULL cell
  kAllCells,  ///< at least one row and no NULL cell anywhere
};

struct Rejection {
  std::string task_id;
  std::string reason;
};

struct GoldFilterResult {
  std::vector<TrainingSample> kept;
  std::vector<Rejection> rejected;
};

/// Keeps samples whose gold SQL executes and returns a non-null result.
/// Database failures reject the individual sample; nothing aborts the pass.
GoldFilterResult filter_nonempty_gold(const std::vector<TrainingSample>& samples,
                                      Executor& executor,
                                      NonNullRule rule = NonNullRule::kAnyCell);

}  // namespace sqlrl
