#include <gtest/gtest.h>

#include <random>

#include "sqlrl/errors.hpp"
#include "sqlrl/reward.hpp"
#include "test_support.hpp"

using namespace sqlrl;
using namespace std::chrono_literals;
using sqlrl::testing::make_task;
using sqlrl::testing::response;

namespace {

ParsedResponse well_formed() { return parse_response(response("t", "SELECT 1")); }
ParsedResponse malformed() { return parse_response("no tags here"); }

ExecutionOutcome outcome(ExecStatus status, std::vector<Row> rows = {}) {
  ExecutionOutcome o;
  o.status = status;
  o.result.columns = 1;
  o.result.rows = std::move(rows);
  return o;
}

// Reference evaluation of the length term straight from its definition.
double oracle_length(std::size_t response, std::size_t think, std::size_t answer, std::size_t sql,
                     std::size_t max_length, bool correct, bool strict_overlong = false) {
  if (!correct) return 0.0;
  const double tl = static_cast<double>(think + answer) / static_cast<double>(max_length);
  const double al = answer == 0 ? 0.0 : static_cast<double>(sql) / static_cast<double>(answer);
  if (response <= max_length) return 0.5 * tl + al;
  return strict_overlong ? 0.5 * al : 0.5 + al;
}

bool in_partition(double total) { return total == -1.0 || total == 0.0 || (total > 6.0 && total <= 7.5); }

class RewardEngineTest : public ::testing::Test {
 protected:
  Executor executor{sqlrl::testing::fixture_registry(), 4};
  Task task = make_task("t1", "school", "SELECT name FROM students WHERE grade = 10");
};

}  // namespace

TEST(FormatReward, Cases) {
  EXPECT_EQ(format_reward(well_formed()), 1);
  EXPECT_EQ(format_reward(parse_response("<think>t</think><answer>```sql\nSELECT 1\n```")), -1);
  EXPECT_EQ(format_reward(parse_response("<think>t</think><answer>SELECT 1</answer>")), -1);
}

TEST(ExecutionReward, Cases) {
  const auto ok = outcome(ExecStatus::kSuccess);
  EXPECT_EQ(execution_reward(well_formed(), &ok), 2);
  const auto err = outcome(ExecStatus::kSqlError);
  EXPECT_EQ(execution_reward(well_formed(), &err), -2);
  const auto slow = outcome(ExecStatus::kTimeout);
  EXPECT_EQ(execution_reward(well_formed(), &slow), -2);
  EXPECT_EQ(execution_reward(malformed(), nullptr), 0);
  const auto down = outcome(ExecStatus::kUnavailable);
  EXPECT_THROW(execution_reward(well_formed(), &down), InfrastructureError);
}

TEST(ResultReward, Cases) {
  const auto gold = outcome(ExecStatus::kSuccess, {{Cell(std::int64_t{1})}});
  const auto same = outcome(ExecStatus::kSuccess, {{Cell(1.0)}});
  const auto other = outcome(ExecStatus::kSuccess, {{Cell(std::int64_t{2})}});
  const auto err = outcome(ExecStatus::kSqlError);
  EXPECT_EQ(result_reward(well_formed(), &same, gold), 3);
  EXPECT_EQ(result_reward(well_formed(), &other, gold), -3);
  EXPECT_EQ(result_reward(well_formed(), &err, gold), 0);
  EXPECT_EQ(result_reward(malformed(), nullptr, gold), 0);
  const auto bad_gold = outcome(ExecStatus::kSqlError);
  EXPECT_THROW(result_reward(well_formed(), &same, bad_gold), CorpusError);
}

TEST(LengthReward, WorkedExample) {
  RewardConfig c;
  c.max_length = 2048;
  const auto l = length_reward({1000, 800, 200, 150}, c, true);
  EXPECT_DOUBLE_EQ(l.s_tl, 1000.0 / 2048.0);
  EXPECT_DOUBLE_EQ(l.s_al, 0.75);
  EXPECT_NEAR(l.s_l, 0.99414, 1e-5);
  EXPECT_NEAR(l.s_l, 0.994140625, 1e-12);
}

TEST(LengthReward, IncorrectIsZero) {
  const auto l = length_reward({1000, 800, 200, 150}, {}, false);
  EXPECT_EQ(l.s_l, 0.0);
}

TEST(LengthReward, OverlongAsPrinted) {
  const auto l = length_reward({3000, 800, 200, 100}, {}, true);
  EXPECT_DOUBLE_EQ(l.s_l, 1.0);
}

TEST(LengthReward, OverlongStrictPenaltyNeverBeatsWithinLimit) {
  RewardConfig c;
  c.overlong = OverlongMode::kStrictPenalty;
  const auto l = length_reward({3000, 800, 200, 100}, c, true);
  EXPECT_DOUBLE_EQ(l.s_l, 0.25);
}

TEST(LengthReward, ZeroAnswerGuard) {
  const auto l = length_reward({10, 5, 0, 0}, {}, true);
  EXPECT_EQ(l.s_al, 0.0);
}

TEST(LengthRewardProperty, MatchesOracle) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20000; ++i) {
    RewardConfig c;
    c.max_length = 1 + rng() % 3000;
    c.overlong = rng() % 2 ? OverlongMode::kAsPrinted : OverlongMode::kStrictPenalty;
    const std::size_t answer = rng() % 1500;
    const std::size_t sql = answer == 0 ? 0 : rng() % (answer + 1);
    const std::size_t think = rng() % 2000;
    const std::size_t response = think + answer + rng() % 500;
    const bool correct = rng() % 4 != 0;
    const auto l = length_reward({response, think, answer, sql}, c, correct);
    EXPECT_DOUBLE_EQ(l.s_l, oracle_length(response, think, answer, sql, c.max_length, correct,
                                          c.overlong == OverlongMode::kStrictPenalty));
  }
}

TEST(Combine, TotalIsExactSum) {
  const auto r = combine(1, 2, 3, {0.994140625, 0.48828125, 0.75});
  EXPECT_EQ(r.total, 1.0 + 2.0 + 3.0 + 0.994140625);
  const auto bad = combine(-1, 0, 0, {});
  EXPECT_EQ(bad.total, -1.0);
}

TEST_F(RewardEngineTest, CorrectResponse) {
  RewardEngine engine(executor);
  const auto s = engine.score(response("Filter students by grade.", "SELECT name FROM students WHERE grade = 10"), task);
  EXPECT_EQ(s.status, "success");
  EXPECT_EQ(s.reward.s_f, 1);
  EXPECT_EQ(s.reward.s_e, 2);
  EXPECT_EQ(s.reward.s_r, 3);
  const auto& L = s.parsed.lengths;
  EXPECT_DOUBLE_EQ(s.reward.s_l, oracle_length(L.response, L.think, L.answer, L.sql, 2048, true));
  EXPECT_EQ(s.reward.total, 6.0 + s.reward.s_l);
}

TEST_F(RewardEngineTest, GatingCases) {
  RewardEngine engine(executor);
  const auto wrong = engine.score(response("t", "SELECT name FROM students WHERE grade = 11"), task).reward;
  EXPECT_EQ(wrong.s_e, 2);
  EXPECT_EQ(wrong.s_r, -3);
  EXPECT_EQ(wrong.s_l, 0.0);
  EXPECT_EQ(wrong.total, 0.0);

  const auto broken = engine.score(response("t", "SELEC name FRM students"), task);
  EXPECT_EQ(broken.status, "sql_error");
  EXPECT_EQ(broken.reward.s_e, -2);
  EXPECT_EQ(broken.reward.s_r, 0);
  EXPECT_EQ(broken.reward.total, -1.0);

  const auto junk = engine.score("just words", task);
  EXPECT_EQ(junk.status, "format_error");
  EXPECT_EQ(junk.reward.s_f, -1);
  EXPECT_EQ(junk.reward.s_e, 0);
  EXPECT_EQ(junk.reward.s_r, 0);
  EXPECT_EQ(junk.reward.s_l, 0.0);
  EXPECT_EQ(junk.reward.total, -1.0);
}

TEST_F(RewardEngineTest, TimeoutIsCandidateFault) {
  RewardConfig c;
  c.execution_limit = 200ms;
  RewardEngine engine(executor, c);
  const auto s = engine.score(
      response("t", "WITH RECURSIVE c(x) AS (SELECT 1 UNION ALL SELECT x + 1 FROM c) SELECT MAX(x) FROM c"), task);
  EXPECT_EQ(s.status, "timeout");
  EXPECT_EQ(s.reward.s_e, -2);
  EXPECT_EQ(s.reward.total, -1.0);
}

TEST_F(RewardEngineTest, InfrastructureAndCorpusErrorsPropagate) {
  RewardEngine engine(executor);
  EXPECT_THROW(engine.score(response("t", "SELECT 1"), make_task("x", "missing_db", "SELECT 1")),
               InfrastructureError);
  EXPECT_THROW(engine.score(response("t", "SELECT 1"), make_task("y", "school", "SELEC 1")), CorpusError);
}

TEST_F(RewardEngineTest, WorkedExampleThroughLengthOverride) {
  RewardEngine engine(executor);
  const auto s = engine.score(response("t", "SELECT name FROM students WHERE grade = 10"), task,
                              LengthStats{1000, 800, 200, 150});
  EXPECT_NEAR(s.reward.total, 6.994140625, 1e-9);
  EXPECT_NEAR(s.reward.total, 6.99414, 1e-5);
  EXPECT_THROW(engine.score("x", task, LengthStats{10, 8, 5, 1}), InvalidInput);
}

TEST_F(RewardEngineTest, GroupAndBatchEqualSingleCalls) {
  RewardEngine engine(executor);
  const std::vector<std::string> rs = {response("a", "SELECT name FROM students WHERE grade = 10"),
                                       response("b", "SELECT name FROM students"), "junk",
                                       response("c", "SELEC"), response("d", "SELECT name FROM students WHERE grade=10")};
  const auto group = engine.score_group(rs, task);
  std::vector<ScoreRequest> reqs;
  for (const auto& r : rs) reqs.push_back({r, &task, std::nullopt});
  const auto batch = engine.score_batch(reqs);
  for (std::size_t i = 0; i < rs.size(); ++i) {
    const auto one = engine.score(rs[i], task);
    EXPECT_EQ(group[i].reward.total, one.reward.total);
    EXPECT_EQ(group[i].status, one.status);
    const auto& b = std::get<ScoredResponse>(batch[i]);
    EXPECT_EQ(b.reward.total, one.reward.total);
    EXPECT_EQ(b.reward.s_l, one.reward.s_l);
  }
}

TEST_F(RewardEngineTest, BatchIsolatesFailingItems) {
  RewardEngine engine(executor);
  const auto missing = make_task("m", "missing_db", "SELECT 1");
  const std::string good = response("a", "SELECT name FROM students WHERE grade = 10");
  std::vector<ScoreRequest> reqs = {{good, &task, std::nullopt},
                                    {good, &missing, std::nullopt},
                                    {good, &task, LengthStats{1, 5, 5, 5}},
                                    {good, &task, std::nullopt}};
  const auto out = engine.score_batch(reqs);
  EXPECT_TRUE(std::holds_alternative<ScoredResponse>(out[0]));
  EXPECT_TRUE(std::holds_alternative<std::exception_ptr>(out[1]));
  EXPECT_TRUE(std::holds_alternative<std::exception_ptr>(out[2]));
  EXPECT_EQ(std::get<ScoredResponse>(out[3]).reward.total, std::get<ScoredResponse>(out[0]).reward.total);
}

TEST_F(RewardEngineTest, PartitionAndOrderingOverRandomLengths) {
  RewardEngine engine(executor);
  std::mt19937_64 rng(99);
  const std::vector<std::string> pool = {response("a", "SELECT name FROM students WHERE grade = 10"),
                                         response("b", "SELECT name FROM students"), "junk",
                                         response("c", "SELEC")};
  double worst_correct = 1e9, best_wrong = -1e9, best_bad = -1e9;
  for (int i = 0; i < 400; ++i) {
    const auto& r = pool[rng() % pool.size()];
    const std::size_t answer = 1 + rng() % 1000;
    const std::size_t sql = rng() % (answer + 1);
    const std::size_t think = rng() % 3000;
    const LengthStats l{think + answer + rng() % 100, think, answer, sql};
    const auto s = engine.score(r, task, l).reward;
    ASSERT_TRUE(in_partition(s.total)) << s.total;
    if (s.s_r != 0) {
      EXPECT_EQ(s.s_e, 2);
    }
    if (s.s_l != 0.0) {
      EXPECT_EQ(s.s_r, 3);
    }
    if (s.s_r == 3) worst_correct = std::min(worst_correct, s.total);
    else if (s.s_r == -3) best_wrong = std::max(best_wrong, s.total);
    else best_bad = std::max(best_bad, s.total);
  }
  EXPECT_GT(worst_correct, best_wrong);
  EXPECT_GT(best_wrong, best_bad);
}

TEST(ComputeReward, MatchesEngine) {
  Executor executor(sqlrl::testing::fixture_registry(), 1);
  const auto task = make_task("t", "shop", "SELECT name FROM products WHERE price = 20");
  const auto raw = response("Gadget costs 20.", "SELECT name FROM products WHERE price = 20.0");
  const auto r = compute_reward(raw, task, executor);
  EXPECT_EQ(r.s_r, 3);
  RewardEngine engine(executor);
  EXPECT_EQ(r.total, engine.score(raw, task).reward.total);
}
