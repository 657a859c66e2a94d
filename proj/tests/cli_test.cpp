#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sys/wait.h>

#include <json.hpp>

#include "test_support.hpp"

using nlohmann::json;
using sqlrl::testing::fixture;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args, const std::string& env = {}) {
  const std::string cmd = (env.empty() ? "" : env + " ") + std::string(SQLRL_CLI_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::vector<json> lines(const std::string& text) {
  std::vector<json> out;
  std::size_t start = 0;
  while (start < text.size()) {
    const auto end = text.find('\n', start);
    const auto line = text.substr(start, end - start);
    if (!line.empty()) out.push_back(json::parse(line));
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return out;
}

std::string tmp(const std::string& name) { return (std::filesystem::temp_directory_path() / name).string(); }

}  // namespace

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("eval --bogus").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("eval --corpus /does/not/exist --pred x").code, 2);
}

TEST(Cli, EvalReport) {
  const auto r = run("eval --corpus " + fixture("ex/tasks.jsonl").string() + " --pred " +
                     fixture("ex/predictions.jsonl").string());
  EXPECT_EQ(r.code, 0);
  const auto report = json::parse(r.out);
  EXPECT_EQ(report["total"], 20);
  EXPECT_EQ(report["correct"], 10);
  EXPECT_EQ(report["items"].size(), 20u);
}

TEST(Cli, EvalTable) {
  const auto r = run("eval --table --corpus " + fixture("selfconsistency/tasks.jsonl").string() + " --pred " +
                     fixture("selfconsistency/candidates.jsonl").string());
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("Challenging"), std::string::npos);
  EXPECT_NE(r.out.find("85.0"), std::string::npos) << r.out;
}

TEST(Cli, RewardPerItemAndExitCode) {
  const auto path = tmp("sqlrl_cli_responses.jsonl");
  {
    std::ofstream out(path);
    out << json{{"task_id", "ex-02"}, {"response_text", sqlrl::testing::response("t", "SELECT id FROM rooms")}}.dump()
        << '\n';
    out << json{{"task_id", "ex-02"}, {"response_text", "junk"}}.dump() << '\n';
  }
  auto r = run("reward --corpus " + fixture("ex/tasks.jsonl").string() + " --responses " + path);
  EXPECT_EQ(r.code, 0);
  auto items = lines(r.out);
  ASSERT_EQ(items.size(), 2u);
  EXPECT_GT(items[0]["total"].get<double>(), 6.0);
  EXPECT_EQ(items[1]["total"], -1.0);

  {
    std::ofstream out(path, std::ios::app);
    out << json{{"task_id", "missing"}, {"response_text", "x"}}.dump() << '\n';
  }
  r = run("reward --corpus " + fixture("ex/tasks.jsonl").string() + " --responses " + path);
  EXPECT_EQ(r.code, 1);
  items = lines(r.out);
  ASSERT_EQ(items.size(), 3u);
  EXPECT_TRUE(items[2].contains("error"));
  std::filesystem::remove(path);
}

TEST(Cli, SimulateIsDeterministic) {
  const auto a = run("simulate --steps 40 --seed 3");
  const auto b = run("simulate --steps 40 --seed 3");
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(lines(a.out).size(), 40u);
  EXPECT_NE(a.out, run("simulate --steps 40 --seed 4").out);
}

TEST(Cli, PrepareData) {
  const auto r = run("prepare-data --filter-gold --corpus " + fixture("corpus/tasks.jsonl").string());
  EXPECT_EQ(r.code, 0);
  const auto recs = lines(r.out);
  ASSERT_EQ(recs.size(), 5u);
  EXPECT_NE(recs[0]["prompt"].get<std::string>().find("CREATE TABLE"), std::string::npos);
  const auto sft = lines(run("prepare-data --template sft --level complex --corpus " +
                             fixture("corpus/tasks.jsonl").string()).out);
  ASSERT_EQ(sft.size(), 2u);
  EXPECT_EQ(sft[0]["target"].get<std::string>().rfind("<think>", 0), 0u);
}

TEST(Cli, SelectWritesToOutFile) {
  const auto out = tmp("sqlrl_cli_select.jsonl");
  const auto r = run("select --raw-sql --corpus " + fixture("selfconsistency/tasks.jsonl").string() +
                     " --candidates " + fixture("selfconsistency/candidates.jsonl").string() + " --out " + out);
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  const auto recs = lines(sqlrl::testing::read_bytes(out));
  ASSERT_EQ(recs.size(), 20u);
  EXPECT_EQ(recs[0]["task_id"], "sc-01");
  EXPECT_TRUE(recs[0].contains("vote_score"));
  std::filesystem::remove(out);
}

TEST(Cli, FlagsOverrideEnvironment) {
  const auto path = tmp("sqlrl_cli_len.jsonl");
  std::ofstream(path) << json{{"task_id", "ex-02"},
                              {"response_text", sqlrl::testing::response("t", "SELECT id FROM rooms")}}.dump()
                      << '\n';
  const std::string args = "reward --corpus " + fixture("ex/tasks.jsonl").string() + " --responses " + path;
  const auto plain = lines(run(args).out).at(0);
  const auto env = lines(run(args, "SQLRL_MAX_LENGTH=5").out).at(0);
  const auto flag = lines(run(args + " --max-length 100000", "SQLRL_MAX_LENGTH=5").out).at(0);
  EXPECT_NE(plain["s_l"], env["s_l"]);
  EXPECT_NE(env["s_l"], flag["s_l"]);
  EXPECT_LT(flag["s_tl"].get<double>(), plain["s_tl"].get<double>());
  std::filesystem::remove(path);
}
