#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sqlrl/executor_pool.hpp"

namespace sqlrl {

using Blob = std::vector<std::uint8_t>;
/// monostate is SQL NULL.
using Cell = std::variant<std::monostate, std::int64_t, double, std::string, Blob>;
using Row = std::vector<Cell>;

struct ResultTable {
  std::size_t columns = 0;
  std::vector<Row> rows;
  /// Set when the row cap stopped materialization early.
  bool truncated = false;

  bool well_formed() const;
};

enum class ExecStatus {
  kSuccess,
  kSqlError,  ///< the statement's fault: syntax, missing object, write attempt
  kTimeout,
  kUnavailable,  ///< infrastructure: database missing, unreadable, busy
};

std::string_view to_string(ExecStatus s);

struct ExecutionOutcome {
  ExecStatus status = ExecStatus::kSqlError;
  ResultTable result;  ///< meaningful only on kSuccess
  std::string message;
  std::chrono::nanoseconds elapsed{0};

  bool ok() const { return status == ExecStatus::kSuccess; }
};

inline constexpr std::chrono::milliseconds kRewardExecLimit{5000};
inline constexpr std::chrono::milliseconds kEvalExecLimit{30000};
inline constexpr std::size_t kDefaultRowCap = 10000;

/// Maps a db_ref to a SQLite file under a root directory. Tried in order:
/// `<root>/<ref>`, `<root>/<ref>.sqlite`, `<root>/<ref>.db`,
/// `<root>/<ref>/<ref>.sqlite`.
class DatabaseRegistry {
 public:
  DatabaseRegistry() = default;
  explicit DatabaseRegistry(std::filesystem::path root) : root_(std::move(root)) {}

  std::optional<std::filesystem::path> resolve(std::string_view db_ref) const;
  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path root_;
};

/// Runs one statement against a database file on the calling thread.
/// The file is opened read-only and immutable; non-read-only statements,
/// ATTACH and state-changing PRAGMAs are rejected as kSqlError. Only a
/// single statement is accepted. The limit interrupts the running
/// statement through SQLite's progress handler.
ExecutionOutcome execute_file(const std::filesystem::path& db_path, std::string_view sql,
                              std::chrono::milliseconds limit, std::size_t row_cap = kDefaultRowCap);

struct ExecRequest {
  std::string db_ref;
  std::string sql;
};

/// Executes statements for db_refs through a bounded worker pool. Each
/// execution opens its own connection on the worker that runs it.
class Executor {
 public:
  Executor(DatabaseRegistry registry, std::size_t workers, std::size_t row_cap = kDefaultRowCap);

  ExecutionOutcome execute(std::string_view db_ref, std::string_view sql,
                           std::chrono::milliseconds limit) const;

  /// Element-wise equal to sequential execute; order preserved.
  std::vector<ExecutionOutcome> execute_group(std::string_view db_ref,
                                              std::span<const std::string> sqls,
                                              std::chrono::milliseconds limit);

  std::vector<ExecutionOutcome> execute_batch(std::span<const ExecRequest> requests,
                                              std::chrono::milliseconds limit);

  const DatabaseRegistry& registry() const { return registry_; }
  std::size_t row_cap() const { return row_cap_; }
  PoolStats pool_stats() const { return pool_->stats(); }

 private:
  DatabaseRegistry registry_;
  std::size_t row_cap_;
  std::unique_ptr<ExecutorPool> pool_;
};

}  // namespace sqlrl
