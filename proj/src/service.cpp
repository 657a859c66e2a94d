#include "sqlrl/service.hpp"

#include <chrono>
#include <cmath>

#include <httplib.h>

#include "sqlrl/errors.hpp"
#include "sqlrl/grpo.hpp"
#include "sqlrl/settings.hpp"
#include "sqlrl/selector.hpp"

namespace sqlrl {

namespace {

using Clock = std::chrono::steady_clock;

const Json& require(const Json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) throw BadRequest(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw BadRequest(path + "/" + key, "missing field '" + key + "'");
  return *it;
}

const Json& require_array(const Json& obj, const std::string& key, const std::string& path) {
  const auto& v = require(obj, key, path);
  if (!v.is_array()) throw BadRequest(path + "/" + key, "'" + key + "' must be an array");
  return v;
}

std::string require_string(const Json& obj, const std::string& key, const std::string& path) {
  const auto& v = require(obj, key, path);
  if (!v.is_string()) throw BadRequest(path + "/" + key, "'" + key + "' must be a string");
  return v.get<std::string>();
}

Json item_error(const std::string& code, const std::string& message, const std::string& path = {}) {
  Json e{{"code", code}, {"message", message}};
  if (!path.empty()) e["path"] = path;
  return Json{{"error", std::move(e)}};
}

Json error_from(std::exception_ptr ep) {
  try {
    std::rethrow_exception(ep);
  } catch (const BadRequest& e) {
    return item_error("invalid_item", e.what(), e.path());
  } catch (const InfrastructureError& e) {
    return item_error("unavailable", e.what());
  } catch (const CorpusError& e) {
    return item_error("corpus_error", e.what());
  } catch (const InvalidInput& e) {
    return item_error("invalid_item", e.what());
  } catch (const std::exception& e) {
    return item_error("internal", e.what());
  }
}

double double_field(const Json& body, const char* key, double fallback) {
  auto it = body.find(key);
  if (it == body.end()) return fallback;
  if (!it->is_number()) throw BadRequest(std::string("/") + key, std::string("'") + key + "' must be a number");
  return it->get<double>();
}

}  // namespace

RewardConfig apply_overrides(const RewardConfig& base, const Json& overrides, const std::string& path) {
  if (!overrides.is_object()) throw BadRequest(path, "config must be an object");
  RewardConfig c = base;
  for (const auto& [key, value] : overrides.items()) {
    const auto at = path + "/" + key;
    if (key == "max_length") {
      if (!value.is_number_unsigned() || value.get<std::size_t>() == 0) {
        throw BadRequest(at, "max_length must be a positive integer");
      }
      c.max_length = value.get<std::size_t>();
    } else if (key == "execution_limit_ms") {
      if (!value.is_number_unsigned() || value.get<std::int64_t>() <= 0) {
        throw BadRequest(at, "execution_limit_ms must be a positive integer");
      }
      c.execution_limit = std::chrono::milliseconds(value.get<std::int64_t>());
    } else if (key == "overlong") {
      if (!value.is_string()) throw BadRequest(at, "overlong must be a string");
      try {
        c.overlong = parse_overlong(value.get<std::string>());
      } catch (const InvalidInput& e) {
        throw BadRequest(at, e.what());
      }
    } else {
      throw BadRequest(at, "unknown config key '" + key + "'");
    }
  }
  return c;
}

RewardService::RewardService(std::vector<Task> corpus, Executor& executor, RewardConfig config,
                             std::ostream* request_log)
    : tasks_(std::move(corpus)), executor_(executor), engine_(executor, std::move(config)), log_(request_log) {
  for (std::size_t i = 0; i < tasks_.size(); ++i) {
    if (!index_.emplace(tasks_[i].id, i).second) {
      throw CorpusError("duplicate task id '" + tasks_[i].id + "' in service corpus");
    }
  }
}

RewardService::~RewardService() { stop(); }

const Task* RewardService::find_task(const std::string& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &tasks_[it->second];
}

Json RewardService::handle_rewards(const Json& body) {
  const auto start = Clock::now();
  const auto& items = require_array(body, "items", "");
  std::optional<RewardConfig> config;
  if (body.contains("config")) config = apply_overrides(engine_.config(), body["config"], "/config");

  std::vector<Json> replies(items.size());
  std::vector<std::string> texts;
  std::vector<ScoreRequest> requests;
  std::vector<std::size_t> owner;
  texts.reserve(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto path = "/items/" + std::to_string(i);
    try {
      const auto& item = items[i];
      const auto id = require_string(item, "task_id", path);
      auto text = require_string(item, "response_text", path);
      std::optional<LengthStats> lengths;
      if (auto it = item.find("lengths"); it != item.end()) {
        try {
          lengths = length_stats_from_json(*it);
        } catch (const InvalidInput& e) {
          throw BadRequest(path + "/lengths", e.what());
        }
        if (!lengths->consistent()) {
          throw BadRequest(path + "/lengths", "lengths must satisfy think + answer <= response and sql <= answer");
        }
      }
      const Task* task = find_task(id);
      if (task == nullptr) {
        replies[i] = item_error("unknown_task", "unknown task_id '" + id + "'", path + "/task_id");
        continue;
      }
      texts.push_back(std::move(text));
      requests.push_back({{}, task, lengths});
      owner.push_back(i);
    } catch (const BadRequest& e) {
      replies[i] = item_error("invalid_item", e.what(), e.path());
    }
  }
  // texts no longer grows, so views into it stay valid.
  for (std::size_t k = 0; k < requests.size(); ++k) requests[k].response = texts[k];

  auto slots = engine_.score_batch(requests, config);
  for (std::size_t k = 0; k < slots.size(); ++k) {
    if (auto* scored = std::get_if<ScoredResponse>(&slots[k])) {
      replies[owner[k]] = to_json(*scored);
    } else {
      replies[owner[k]] = error_from(std::get<std::exception_ptr>(slots[k]));
    }
  }
  return Json{{"items", std::move(replies)},
              {"latency_ms", std::chrono::duration<double, std::milli>(Clock::now() - start).count()}};
}

Json RewardService::handle_advantages(const Json& body) {
  const auto& groups = require_array(body, "groups", "");
  const double epsilon = double_field(body, "epsilon", grpo::kDefaultEpsilon);
  const double beta = double_field(body, "beta", grpo::kDefaultBeta);
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw BadRequest("/epsilon", "epsilon must lie in (0, 1)");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw BadRequest("/beta", "beta must be a finite non-negative number");

  Json out = Json::array();
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto path = "/groups/" + std::to_string(g);
    try {
      const auto& rewards = require_array(groups[g], "rewards", path);
      std::vector<double> values;
      for (std::size_t i = 0; i < rewards.size(); ++i) {
        if (!rewards[i].is_number()) {
          throw BadRequest(path + "/rewards/" + std::to_string(i), "reward must be a number");
        }
        values.push_back(rewards[i].get<double>());
      }
      out.push_back(Json{{"advantages", grpo::group_advantages(values)}});
    } catch (const BadRequest& e) {
      out.push_back(item_error("invalid_group", e.what(), e.path()));
    } catch (const InvalidInput& e) {
      out.push_back(item_error("invalid_group", e.what(), path));
    }
  }
  return Json{{"groups", std::move(out)}, {"epsilon", epsilon}, {"beta", beta}};
}

Json RewardService::handle_select(const Json& body) {
  const auto id = require_string(body, "task_id", "");
  const auto& candidates = require_array(body, "candidates", "");
  if (candidates.empty()) throw BadRequest("/candidates", "candidates must not be empty");
  std::vector<std::string> texts;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (!candidates[i].is_string()) {
      throw BadRequest("/candidates/" + std::to_string(i), "candidate must be a string");
    }
    texts.push_back(candidates[i].get<std::string>());
  }
  const Task* task = find_task(id);
  if (task == nullptr) throw BadRequest("/task_id", "unknown task_id '" + id + "'");
  const auto& config = engine_.config();
  return to_json(select_responses(texts, task->db_ref, executor_, config.execution_limit, config.semantics));
}

Json RewardService::health() const {
  return Json{{"status", tasks_.empty() ? "degraded" : "ok"},
              {"corpus_size", tasks_.size()},
              {"db_pool_stats", to_json(executor_.pool_stats())}};
}

HttpReply RewardService::dispatch(const std::string& method, const std::string& path, const std::string& body) {
  const auto start = Clock::now();
  HttpReply reply;
  try {
    if (path == "/health") {
      if (method != "GET") {
        reply = {405, Json{{"error", "method not allowed"}}};
      } else {
        reply.body = health();
      }
    } else if (path == "/v1/rewards" || path == "/v1/advantages" || path == "/v1/select") {
      if (method != "POST") {
        reply = {405, Json{{"error", "method not allowed"}}};
      } else {
        Json parsed;
        try {
          parsed = Json::parse(body);
        } catch (const Json::parse_error& e) {
          throw BadRequest("", std::string("invalid JSON: ") + e.what());
        }
        if (!parsed.is_object()) throw BadRequest("", "request body must be a JSON object");
        if (path == "/v1/rewards") {
          reply.body = handle_rewards(parsed);
        } else if (path == "/v1/advantages") {
          reply.body = handle_advantages(parsed);
        } else {
          reply.body = handle_select(parsed);
        }
      }
    } else {
      reply = {404, Json{{"error", "no route for " + path}}};
    }
  } catch (const BadRequest& e) {
    reply = {400, Json{{"error", e.what()}, {"path", e.path()}}};
  } catch (const InfrastructureError& e) {
    reply = {503, Json{{"error", e.what()}}};
  } catch (const std::exception& e) {
    reply = {500, Json{{"error", e.what()}}};
  }
  log_request(method, path, reply.status, std::chrono::duration<double, std::milli>(Clock::now() - start).count());
  return reply;
}

void RewardService::log_request(const std::string& method, const std::string& path, int status, double ms) {
  if (log_ == nullptr) return;
  const auto now = std::chrono::system_clock::now().time_since_epoch();
  Json line{{"ts_ms", std::chrono::duration_cast<std::chrono::milliseconds>(now).count()},
            {"method", method},
            {"path", path},
            {"status", status},
            {"duration_ms", ms}};
  std::lock_guard lock(log_mu_);
  *log_ << line.dump() << '\n' << std::flush;
}

void RewardService::install_routes() {
  if (server_) return;
  server_ = std::make_unique<httplib::Server>();
  const auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    auto reply = dispatch(req.method, req.path, req.body);
    res.status = reply.status;
    res.set_content(reply.body.dump(), "application/json");
  };
  server_->Get("/health", handler);
  server_->Post("/v1/rewards", handler);
  server_->Post("/v1/advantages", handler);
  server_->Post("/v1/select", handler);
}

bool RewardService::listen(const std::string& host, int port) {
  install_routes();
  return server_->listen(host, port);
}

int RewardService::bind_any(const std::string& host) {
  install_routes();
  return server_->bind_to_any_port(host);
}

void RewardService::serve_bound() {
  install_routes();
  server_->listen_after_bind();
}

void RewardService::stop() {
  if (server_) server_->stop();
}

}  // namespace sqlrl
