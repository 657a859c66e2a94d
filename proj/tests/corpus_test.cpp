#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>

#include "sqlrl/corpus.hpp"
#include "sqlrl/errors.hpp"
#include "test_support.hpp"

using namespace sqlrl;
using sqlrl::testing::fixture;

namespace {

std::vector<TrainingSample> synthetic(std::size_t per_level) {
  std::vector<TrainingSample> out;
  std::size_t n = 0;
  for (std::size_t i = 0; i < per_level; ++i) {
    for (auto level : {Difficulty::kSimple, Difficulty::kModerate, Difficulty::kChallenging}) {
      TrainingSample s;
      s.task = sqlrl::testing::make_task("s" + std::to_string(n++), "school", "SELECT 1", level);
      out.push_back(s);
    }
  }
  return out;
}

std::vector<std::string> ids(const std::vector<TrainingSample>& v) {
  std::vector<std::string> out;
  for (const auto& s : v) out.push_back(s.task.id);
  return out;
}

}  // namespace

TEST(Difficulty, ParsesCaseInsensitively) {
  EXPECT_EQ(parse_difficulty("Simple"), Difficulty::kSimple);
  EXPECT_EQ(parse_difficulty("MODERATE"), Difficulty::kModerate);
  EXPECT_EQ(parse_difficulty("challenging"), Difficulty::kChallenging);
  EXPECT_EQ(parse_difficulty("complex"), Difficulty::kComplex);
  EXPECT_EQ(to_string(Difficulty::kChallenging), "challenging");
}

TEST(LoadSamples, ReadsFixtureCorpus) {
  const auto samples = load_samples(fixture("corpus/tasks.jsonl"));
  ASSERT_EQ(samples.size(), 8u);
  EXPECT_EQ(samples[0].task.id, "prep-01");
  EXPECT_EQ(samples[0].task.db_ref, "school");
  EXPECT_TRUE(samples[0].think_trace.has_value());
  EXPECT_FALSE(samples[0].task.external_knowledge.has_value());
  EXPECT_TRUE(samples[2].task.external_knowledge.has_value());
}

TEST(LoadSamples, ReportsLineOfBadRecord) {
  const auto path = std::filesystem::temp_directory_path() / "sqlrl_bad_corpus.jsonl";
  {
    std::ofstream out(path);
    out << R"({"id":"a","question":"q","db_ref":"school","gold_sql":"SELECT 1","difficulty":"simple"})" << '\n';
    out << R"({"id":"b","question":"q"})" << '\n';
  }
  try {
    load_samples(path);
    FAIL() << "expected an error";
  } catch (const std::exception& e) {
    EXPECT_NE(std::string(e.what()).find(":2"), std::string::npos) << e.what();
  }
  std::filesystem::remove(path);
}

TEST(StratifiedSample, TakesPerLevelDeterministically) {
  const auto samples = synthetic(10);
  const auto a = stratified_sample(samples, 5, 42);
  const auto b = stratified_sample(samples, 5, 42);
  EXPECT_EQ(ids(a), ids(b));
  std::map<Difficulty, int> counts;
  for (const auto& s : a) ++counts[s.task.difficulty];
  EXPECT_EQ(counts[Difficulty::kSimple], 5);
  EXPECT_EQ(counts[Difficulty::kModerate], 5);
  EXPECT_EQ(counts[Difficulty::kChallenging], 5);
}

TEST(StratifiedSample, ZeroGivesEmpty) { EXPECT_TRUE(stratified_sample(synthetic(4), 0, 1).empty()); }

TEST(StratifiedSample, ClampsToAvailability) {
  const auto out = stratified_sample(synthetic(3), 5, 9);
  EXPECT_EQ(out.size(), 9u);
}

TEST(StratifiedSample, SubsetWithoutDuplicatesInInputOrder) {
  const auto samples = synthetic(20);
  const auto all = ids(samples);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto out = ids(stratified_sample(samples, 7, seed));
    std::set<std::string> uniq(out.begin(), out.end());
    EXPECT_EQ(uniq.size(), out.size());
    // Input order means positions in the original are strictly increasing.
    std::size_t last = 0;
    bool first = true;
    for (const auto& id : out) {
      const auto pos = static_cast<std::size_t>(std::find(all.begin(), all.end(), id) - all.begin());
      ASSERT_LT(pos, all.size());
      if (!first) {
        EXPECT_GT(pos, last);
      }
      last = pos;
      first = false;
    }
  }
}

TEST(StratifiedSample, DifferentSeedsUsuallyDiffer) {
  const auto samples = synthetic(20);
  EXPECT_NE(ids(stratified_sample(samples, 5, 1)), ids(stratified_sample(samples, 5, 2)));
}

TEST(FilterComplexity, KeepsLevelInOrder) {
  const auto samples = load_samples(fixture("corpus/tasks.jsonl"));
  EXPECT_EQ(ids(filter_complexity(samples, Difficulty::kComplex)),
            (std::vector<std::string>{"prep-04", "prep-08"}));
  EXPECT_TRUE(filter_complexity(synthetic(2), Difficulty::kComplex).empty());
  std::vector<TrainingSample> simple;
  for (const auto& s : synthetic(3)) {
    if (s.task.difficulty == Difficulty::kSimple) simple.push_back(s);
  }
  EXPECT_EQ(ids(filter_complexity(simple, Difficulty::kSimple)), ids(simple));
}

class GoldFilter : public ::testing::Test {
 protected:
  Executor executor{sqlrl::testing::fixture_registry(), 2};
};

TEST_F(GoldFilter, RejectsEmptyNullAndBrokenGold) {
  const auto samples = load_samples(fixture("corpus/tasks.jsonl"));
  const auto r = filter_nonempty_gold(samples, executor);
  EXPECT_EQ(ids(r.kept), (std::vector<std::string>{"prep-01", "prep-02", "prep-03", "prep-04", "prep-08"}));
  std::map<std::string, std::string> reasons;
  for (const auto& rej : r.rejected) reasons[rej.task_id] = rej.reason;
  EXPECT_EQ(reasons.at("prep-05"), "empty result");
  EXPECT_EQ(reasons.at("prep-06"), "all cells null");
  EXPECT_EQ(reasons.at("prep-07"), "execution failure");
}

TEST_F(GoldFilter, SelectOneRetained) {
  TrainingSample s;
  s.task = sqlrl::testing::make_task("one", "school", "SELECT 1");
  EXPECT_EQ(filter_nonempty_gold({s}, executor).kept.size(), 1u);
}

TEST_F(GoldFilter, MissingDatabaseRejectsOnlyThatSample) {
  TrainingSample good, bad;
  good.task = sqlrl::testing::make_task("good", "school", "SELECT 1");
  bad.task = sqlrl::testing::make_task("bad", "no_such_db", "SELECT 1");
  const auto r = filter_nonempty_gold({bad, good}, executor);
  ASSERT_EQ(r.kept.size(), 1u);
  EXPECT_EQ(r.kept[0].task.id, "good");
  ASSERT_EQ(r.rejected.size(), 1u);
  EXPECT_EQ(r.rejected[0].reason.rfind("database unavailable", 0), 0u) << r.rejected[0].reason;
}

TEST_F(GoldFilter, IsAFixedPoint) {
  const auto samples = load_samples(fixture("corpus/tasks.jsonl"));
  for (auto rule : {NonNullRule::kAnyCell, NonNullRule::kAllCells}) {
    const auto once = filter_nonempty_gold(samples, executor, rule).kept;
    const auto twice = filter_nonempty_gold(once, executor, rule);
    EXPECT_EQ(ids(twice.kept), ids(once));
    EXPECT_TRUE(twice.rejected.empty());
  }
}

TEST_F(GoldFilter, AllCellsRuleRejectsPartialNulls) {
  TrainingSample s;
  s.task = sqlrl::testing::make_task("partial", "school", "SELECT name, nickname FROM students WHERE id IN (1, 2)");
  EXPECT_EQ(filter_nonempty_gold({s}, executor, NonNullRule::kAnyCell).kept.size(), 1u);
  const auto strict = filter_nonempty_gold({s}, executor, NonNullRule::kAllCells);
  EXPECT_TRUE(strict.kept.empty());
  ASSERT_EQ(strict.rejected.size(), 1u);
  EXPECT_EQ(strict.rejected[0].reason, "contains null cells");
}
