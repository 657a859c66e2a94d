// Command-line entry point: prepare-data, reward, select, eval, simulate, serve.

#include <algorithm>
#include <csignal>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <CLI11.hpp>

#include "sqlrl/corpus.hpp"
#include "sqlrl/errors.hpp"
#include "sqlrl/eval.hpp"
#include "sqlrl/json_io.hpp"
#include "sqlrl/policy_sim.hpp"
#include "sqlrl/prompt.hpp"
#include "sqlrl/reward.hpp"
#include "sqlrl/schema.hpp"
#include "sqlrl/selector.hpp"
#include "sqlrl/service.hpp"
#include "sqlrl/settings.hpp"

namespace fs = std::filesystem;
using namespace sqlrl;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitItemFailures = 1;
constexpr int kExitUsage = 2;

struct Common {
  std::string config;
  std::string out;
  std::string db_root;
  std::optional<std::size_t> jobs;
  std::optional<std::size_t> max_length;
  std::optional<std::size_t> row_cap;
  std::optional<std::int64_t> reward_limit_ms;
  std::optional<std::int64_t> eval_limit_ms;
  std::optional<std::string> overlong;
  std::optional<std::string> semantics;
  bool strict_format = false;
};

Settings resolve_settings(const Common& c) {
  std::optional<fs::path> file;
  if (!c.config.empty()) file = c.config;
  Settings s = load_settings(file);
  if (c.jobs) s.jobs = *c.jobs;
  if (c.max_length) s.max_length = *c.max_length;
  if (c.row_cap) s.row_cap = *c.row_cap;
  if (c.reward_limit_ms) s.reward_limit = std::chrono::milliseconds(*c.reward_limit_ms);
  if (c.eval_limit_ms) s.eval_limit = std::chrono::milliseconds(*c.eval_limit_ms);
  if (c.overlong) s.overlong = parse_overlong(*c.overlong);
  if (c.semantics) s.semantics = parse_semantics(*c.semantics);
  if (c.strict_format) s.strict_format = true;
  s.reward_config().validate();
  return s;
}

fs::path db_root(const Common& c) {
  if (!c.db_root.empty()) return c.db_root;
  if (auto env = process_env("SQLRL_DB_ROOT")) return *env;
  return fs::path(SQLRL_FIXTURE_DIR) / "db";
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw InvalidInput("cannot write " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }
  void line(const Json& j) { stream() << j.dump() << '\n'; }

 private:
  std::ofstream file_;
};

std::vector<Json> read_jsonl(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path.string());
  std::vector<Json> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(Json::parse(line));
    } catch (const Json::exception& e) {
      throw InvalidInput(path.string() + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

std::unordered_map<std::string, const Task*> index_tasks(const std::vector<Task>& tasks) {
  std::unordered_map<std::string, const Task*> m;
  for (const auto& t : tasks) m.emplace(t.id, &t);
  return m;
}

void add_common(CLI::App* sub, Common& c, bool with_out = true) {
  sub->add_option("--config", c.config, "JSON config file")->check(CLI::ExistingFile);
  if (with_out) sub->add_option("--out", c.out, "Write output here instead of stdout");
  sub->add_option("--db-root", c.db_root, "Directory holding <db_ref>.sqlite files");
  sub->add_option("--jobs", c.jobs, "Executor worker threads (0 = all cores)");
  sub->add_option("--max-length", c.max_length, "Length budget for the length reward");
  sub->add_option("--row-cap", c.row_cap, "Maximum rows kept per result");
  sub->add_option("--reward-limit-ms", c.reward_limit_ms, "Candidate execution limit during scoring");
  sub->add_option("--eval-limit-ms", c.eval_limit_ms, "Execution limit during evaluation");
  sub->add_option("--overlong", c.overlong, "as_printed | strict_penalty");
  sub->add_option("--semantics", c.semantics, "set | bag");
  sub->add_flag("--strict-format", c.strict_format, "Reject text outside the think/answer blocks");
}

// ---- prepare-data ----------------------------------------------------------

struct PrepareArgs {
  std::string corpus;
  std::optional<std::size_t> per_level;
  std::uint64_t seed = 0;
  std::string level;
  bool filter_gold = false;
  std::string non_null = "any";
  std::string template_name = "rl";
  bool no_values = false;
};

int run_prepare(const Common& c, const PrepareArgs& a) {
  const auto settings = resolve_settings(c);
  auto samples = load_samples(a.corpus);
  if (!a.level.empty()) samples = filter_complexity(samples, parse_difficulty(a.level));
  if (a.per_level) samples = stratified_sample(samples, *a.per_level, a.seed);

  Executor executor(DatabaseRegistry(db_root(c)), settings.worker_count(), settings.row_cap);
  std::vector<Rejection> rejected;
  if (a.filter_gold) {
    if (a.non_null != "any" && a.non_null != "all") throw InvalidInput("--non-null must be 'any' or 'all'");
    auto r = filter_nonempty_gold(samples, executor, a.non_null == "all" ? NonNullRule::kAllCells : NonNullRule::kAnyCell);
    samples = std::move(r.kept);
    rejected = std::move(r.rejected);
  }

  PromptTemplate which;
  if (a.template_name == "rl") {
    which = PromptTemplate::kRl;
  } else if (a.template_name == "sft") {
    which = PromptTemplate::kSft;
  } else {
    throw InvalidInput("--template must be 'rl' or 'sft'");
  }

  std::unordered_map<std::string, std::string> schemas;
  Output out(c.out);
  for (const auto& s : samples) {
    auto it = schemas.find(s.task.db_ref);
    if (it == schemas.end()) {
      auto path = executor.registry().resolve(s.task.db_ref);
      if (!path) throw InvalidInput("database '" + s.task.db_ref + "' not found under " + db_root(c).string());
      it = schemas.emplace(s.task.db_ref, serialize_schema(introspect_schema(*path, !a.no_values), !a.no_values)).first;
    }
    Json rec{{"task_id", s.task.id},
             {"difficulty", std::string(to_string(s.task.difficulty))},
             {"db_ref", s.task.db_ref},
             {"prompt", build_prompt(s.task, it->second, which)}};
    if (which == PromptTemplate::kSft) {
      if (!s.think_trace) throw InvalidInput("task '" + s.task.id + "' has no think_trace for SFT export");
      rec["target"] = sft_target(*s.think_trace, s.task.gold_sql);
    } else {
      rec["gold_sql"] = s.task.gold_sql;
    }
    out.line(rec);
  }
  for (const auto& r : rejected) {
    std::cerr << Json{{"rejected", r.task_id}, {"reason", r.reason}}.dump() << '\n';
  }
  return kExitOk;
}

// ---- reward ----------------------------------------------------------------

int run_reward(const Common& c, const std::string& corpus, const std::string& responses) {
  const auto settings = resolve_settings(c);
  const auto tasks = load_tasks(corpus);
  const auto by_id = index_tasks(tasks);
  const auto records = read_jsonl(responses);

  Executor executor(DatabaseRegistry(db_root(c)), settings.worker_count(), settings.row_cap);
  RewardEngine engine(executor, settings.reward_config());

  std::vector<Json> replies(records.size());
  std::vector<std::string> texts;
  std::vector<ScoreRequest> requests;
  std::vector<std::size_t> owner;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    const auto id = r.value("task_id", std::string());
    replies[i] = Json{{"task_id", id}};
    auto it = by_id.find(id);
    if (it == by_id.end()) {
      replies[i]["error"] = "unknown task_id '" + id + "'";
      continue;
    }
    if (!r.contains("response_text") || !r["response_text"].is_string()) {
      replies[i]["error"] = "missing response_text";
      continue;
    }
    std::optional<LengthStats> lengths;
    if (r.contains("lengths")) {
      try {
        lengths = length_stats_from_json(r["lengths"]);
      } catch (const InvalidInput& e) {
        replies[i]["error"] = std::string("lengths: ") + e.what();
        continue;
      }
    }
    texts.push_back(r["response_text"].get<std::string>());
    requests.push_back({{}, it->second, lengths});
    owner.push_back(i);
  }
  for (std::size_t k = 0; k < requests.size(); ++k) requests[k].response = texts[k];

  const auto slots = engine.score_batch(requests);
  for (std::size_t k = 0; k < slots.size(); ++k) {
    auto& reply = replies[owner[k]];
    if (const auto* s = std::get_if<ScoredResponse>(&slots[k])) {
      reply.update(to_json(*s));
    } else {
      try {
        std::rethrow_exception(std::get<std::exception_ptr>(slots[k]));
      } catch (const std::exception& e) {
        reply["error"] = e.what();
      }
    }
  }

  Output out(c.out);
  bool failures = false;
  for (const auto& r : replies) {
    failures = failures || r.contains("error");
    out.line(r);
  }
  return failures ? kExitItemFailures : kExitOk;
}

// ---- select ----------------------------------------------------------------

int run_select(const Common& c, const std::string& corpus, const std::string& candidates, bool raw_sql) {
  const auto settings = resolve_settings(c);
  const auto tasks = load_tasks(corpus);
  const auto by_id = index_tasks(tasks);
  Executor executor(DatabaseRegistry(db_root(c)), settings.worker_count(), settings.row_cap);

  Output out(c.out);
  bool failures = false;
  for (const auto& r : read_jsonl(candidates)) {
    const auto id = r.value("task_id", std::string());
    Json reply{{"task_id", id}};
    try {
      auto it = by_id.find(id);
      if (it == by_id.end()) throw InvalidInput("unknown task_id '" + id + "'");
      const auto texts = r.at("candidates").get<std::vector<std::string>>();
      const auto& task = *it->second;
      auto result = raw_sql ? select_sql(texts, task.db_ref, executor, settings.reward_limit, settings.semantics)
                            : select_responses(texts, task.db_ref, executor, settings.reward_limit, settings.semantics);
      reply.update(to_json(result));
    } catch (const std::exception& e) {
      reply["error"] = e.what();
      failures = true;
    }
    out.line(reply);
  }
  return failures ? kExitItemFailures : kExitOk;
}

// ---- eval ------------------------------------------------------------------

int run_eval(const Common& c, const std::string& corpus, const std::string& pred, bool table,
             std::optional<double> epsilon) {
  const auto settings = resolve_settings(c);
  const auto tasks = load_tasks(corpus);
  auto records = align_predictions(tasks, load_predictions(pred));
  Executor executor(DatabaseRegistry(db_root(c)), settings.worker_count(), settings.row_cap);

  EvalOptions options;
  options.limit = settings.eval_limit;
  options.semantics = settings.semantics;
  if (epsilon) options.match.epsilon = *epsilon;

  const bool grouped = std::any_of(records.begin(), records.end(), [](const auto& r) { return r.grouped; });
  EvaluationReport report;
  if (grouped) {
    std::vector<std::vector<std::string>> groups;
    for (auto& r : records) groups.push_back(std::move(r.candidates));
    report = evaluate_with_selection(tasks, groups, executor, options);
  } else {
    std::vector<std::string> sqls;
    std::vector<std::optional<std::size_t>> tokens;
    for (auto& r : records) {
      sqls.push_back(std::move(r.candidates.front()));
      tokens.push_back(r.tokens);
    }
    report = evaluate(tasks, sqls, executor, options, tokens);
  }

  Output out(c.out);
  if (table) {
    out.stream() << format_table(report);
  } else {
    out.line(to_json(report));
  }
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
  return report.excluded > 0 ? kExitItemFailures : kExitOk;
}

// ---- simulate --------------------------------------------------------------

struct SimulateArgs {
  std::string tasks = std::string(SQLRL_FIXTURE_DIR) + "/sim/tasks.jsonl";
  std::string pools = std::string(SQLRL_FIXTURE_DIR) + "/sim/pools.jsonl";
  std::size_t steps = 500;
  sim::SimConfig config;
};

int run_simulate(const Common& c, const SimulateArgs& a) {
  const auto settings = resolve_settings(c);
  auto pools = sim::load_pool_fixture(a.tasks, a.pools);
  Executor executor(DatabaseRegistry(db_root(c)), settings.worker_count(), settings.row_cap);
  RewardEngine engine(executor, settings.reward_config());
  sim::Simulator simulator(std::move(pools), engine, a.config);
  Output out(c.out);
  for (std::size_t i = 0; i < a.steps; ++i) out.line(to_json(simulator.train_step()));
  return kExitOk;
}

// ---- serve -----------------------------------------------------------------

RewardService* g_service = nullptr;

extern "C" void on_signal(int) {
  if (g_service) g_service->stop();
}

int run_serve(const Common& c, const std::string& corpus, const std::string& host, int port) {
  const auto settings = resolve_settings(c);
  auto tasks = load_tasks(corpus);
  Executor executor(DatabaseRegistry(db_root(c)), settings.worker_count(), settings.row_cap);
  RewardService service(std::move(tasks), executor, settings.reward_config(), &std::cerr);
  g_service = &service;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cerr << Json{{"event", "listening"}, {"host", host}, {"port", port}, {"corpus_size", service.corpus_size()}}.dump()
            << '\n';
  const bool ok = service.listen(host, port);
  g_service = nullptr;
  if (!ok) {
    std::cerr << "error: cannot listen on " << host << ":" << port << '\n';
    return kExitUsage;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reward, evaluation and GRPO tooling for text-to-SQL"};
  app.require_subcommand(1);

  Common common;

  PrepareArgs prep;
  auto* prepare = app.add_subcommand("prepare-data", "Filter, sample and export prompts");
  add_common(prepare, common);
  prepare->add_option("--corpus", prep.corpus, "Training samples (JSONL)")->required()->check(CLI::ExistingFile);
  prepare->add_option("--per-level", prep.per_level, "Stratified sample size per difficulty");
  prepare->add_option("--seed", prep.seed, "Sampling seed");
  prepare->add_option("--level", prep.level, "Keep only this difficulty");
  prepare->add_flag("--filter-gold", prep.filter_gold, "Drop samples whose gold SQL fails or returns nothing");
  prepare->add_option("--non-null", prep.non_null, "any | all");
  prepare->add_option("--template", prep.template_name, "rl | sft");
  prepare->add_flag("--no-values", prep.no_values, "Omit representative column values from schemas");

  std::string corpus, responses, candidates, pred, host = "127.0.0.1";
  bool raw_sql = false, table = false;
  std::optional<double> epsilon;
  int port = 8080;

  auto* reward = app.add_subcommand("reward", "Score responses against a corpus");
  add_common(reward, common);
  reward->add_option("--corpus", corpus, "Tasks (JSONL)")->required()->check(CLI::ExistingFile);
  reward->add_option("--responses", responses, "{task_id, response_text, lengths?} per line")
      ->required()
      ->check(CLI::ExistingFile);

  auto* select_cmd = app.add_subcommand("select", "Self-consistency selection over candidate groups");
  add_common(select_cmd, common);
  select_cmd->add_option("--corpus", corpus, "Tasks (JSONL)")->required()->check(CLI::ExistingFile);
  select_cmd->add_option("--candidates", candidates, "{task_id, candidates: [...]} per line")
      ->required()
      ->check(CLI::ExistingFile);
  select_cmd->add_flag("--raw-sql", raw_sql, "Candidates are SQL text rather than full responses");

  auto* eval_cmd = app.add_subcommand("eval", "Execution accuracy report");
  add_common(eval_cmd, common);
  eval_cmd->add_option("--corpus", corpus, "Tasks (JSONL)")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--pred", pred, "{task_id?, sql} or {task_id?, candidates} per line")
      ->required()
      ->check(CLI::ExistingFile);
  eval_cmd->add_flag("--table", table, "Print a difficulty table instead of JSON");
  eval_cmd->add_option("--epsilon", epsilon, "Compare reals within this absolute tolerance");

  SimulateArgs sim_args;
  auto* simulate = app.add_subcommand("simulate", "Toy GRPO loop over fixed candidate pools");
  add_common(simulate, common);
  simulate->add_option("--tasks", sim_args.tasks, "Pool tasks (JSONL)")->check(CLI::ExistingFile);
  simulate->add_option("--pools", sim_args.pools, "Candidate pools (JSONL)")->check(CLI::ExistingFile);
  simulate->add_option("--steps", sim_args.steps, "Training steps");
  simulate->add_option("--seed", sim_args.config.seed, "Rollout seed");
  simulate->add_option("--group-size", sim_args.config.group_size, "Samples per task per step");
  simulate->add_option("--lr", sim_args.config.learning_rate, "Learning rate");
  simulate->add_option("--epsilon", sim_args.config.epsilon, "Clip range");
  simulate->add_option("--beta", sim_args.config.beta, "KL coefficient");
  simulate->add_option("--inner-epochs", sim_args.config.inner_epochs, "Gradient steps per rollout");

  auto* serve = app.add_subcommand("serve", "Run the reward service");
  add_common(serve, common, false);
  serve->add_option("--corpus", corpus, "Tasks (JSONL)")->required()->check(CLI::ExistingFile);
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--port", port, "Port")->check(CLI::Range(0, 65535));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*prepare) return run_prepare(common, prep);
    if (*reward) return run_reward(common, corpus, responses);
    if (*select_cmd) return run_select(common, corpus, candidates, raw_sql);
    if (*eval_cmd) return run_eval(common, corpus, pred, table, epsilon);
    if (*simulate) return run_simulate(common, sim_args);
    if (*serve) return run_serve(common, corpus, host, port);
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const CorpusError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitItemFailures;
  }
  return kExitUsage;
}
