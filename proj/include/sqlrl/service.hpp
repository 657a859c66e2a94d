#pragma once

#include <atomic>
#include <memory>
#include <mutex>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "sqlrl/json_io.hpp"
#include "sqlrl/reward.hpp"

namespace httplib {
class Server;
}

namespace sqlrl {

/// Malformed request body; `path` is a JSON pointer to the offending field.
class BadRequest : public std::runtime_error {
 public:
  BadRequest(std::string path, const std::string& what)
      : std::runtime_error(what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct HttpReply {
  int status = 200;
  Json body;
};

/// Batch reward / advantage / selection endpoints over JSON.
///
///   POST /v1/rewards     {items: [{task_id, response_text, lengths?}], config?}
///   POST /v1/advantages  {groups: [{rewards: [...]}], epsilon?, beta?}
///   POST /v1/select      {task_id, candidates: [response_text...]}
///   GET  /health
///
/// Per-item failures come back as {"error": {...}} in place of the item;
/// a malformed body is a 400 with {"error", "path"}.
class RewardService {
 public:
  RewardService(std::vector<Task> corpus, Executor& executor, RewardConfig config,
                std::ostream* request_log = nullptr);
  ~RewardService();

  Json handle_rewards(const Json& body);
  Json handle_advantages(const Json& body);
  Json handle_select(const Json& body);
  Json health() const;

  /// Routes one request; never throws.
  HttpReply dispatch(const std::string& method, const std::string& path, const std::string& body);

  /// Binds and serves on the calling thread until stop().
  bool listen(const std::string& host, int port);
  /// Binds to an ephemeral port and returns it without serving.
  int bind_any(const std::string& host);
  void serve_bound();
  void stop();

  std::size_t corpus_size() const { return tasks_.size(); }

 private:
  const Task* find_task(const std::string& id) const;
  void log_request(const std::string& method, const std::string& path, int status, double ms);
  void install_routes();

  std::vector<Task> tasks_;
  std::unordered_map<std::string, std::size_t> index_;
  Executor& executor_;
  RewardEngine engine_;
  std::ostream* log_;
  std::mutex log_mu_;
  std::unique_ptr<httplib::Server> server_;
};

/// Applies {max_length, execution_limit_ms, overlong} overrides to base.
RewardConfig apply_overrides(const RewardConfig& base, const Json& overrides, const std::string& path);

}  // namespace sqlrl
