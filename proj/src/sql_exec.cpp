#include "sqlrl/sql_exec.hpp"

#include <array>
#include <cstring>
#include <future>

#include "sqlite_handle.hpp"

namespace sqlrl {

bool ResultTable::well_formed() const {
  for (const auto& r : rows) {
    if (r.size() != columns) return false;
  }
  return true;
}

std::string_view to_string(ExecStatus s) {
  switch (s) {
    case ExecStatus::kSuccess: return "success";
    case ExecStatus::kSqlError: return "sql_error";
    case ExecStatus::kTimeout: return "timeout";
    case ExecStatus::kUnavailable: break;
  }
  return "unavailable";
}

std::optional<std::filesystem::path> DatabaseRegistry::resolve(std::string_view db_ref) const {
  if (db_ref.empty()) return std::nullopt;
  const std::string ref(db_ref);
  const std::array<std::filesystem::path, 4> candidates = {
      root_ / ref, root_ / (ref + ".sqlite"), root_ / (ref + ".db"), root_ / ref / (ref + ".sqlite")};
  std::error_code ec;
  for (const auto& c : candidates) {
    if (std::filesystem::is_regular_file(c, ec)) return c;
  }
  return std::nullopt;
}

namespace {

using Clock = std::chrono::steady_clock;

struct Watchdog {
  Clock::time_point deadline;
  bool fired = false;
};

constexpr int kProgressOps = 1000;

int on_progress(void* ctx) {
  auto* w = static_cast<Watchdog*>(ctx);
  if (Clock::now() >= w->deadline) {
    w->fired = true;
    return 1;
  }
  return 0;
}

bool readonly_pragma(const char* name) {
  static constexpr std::array<const char*, 8> kAllowed = {
      "table_info", "table_xinfo", "table_list", "index_list",
      "index_info", "index_xinfo", "foreign_key_list", "collation_list"};
  if (!name) return false;
  for (const char* a : kAllowed) {
    if (std::strcmp(a, name) == 0) return true;
  }
  return false;
}

int authorize(void*, int action, const char* arg1, const char*, const char*, const char*) {
  switch (action) {
    case SQLITE_SELECT:
    case SQLITE_READ:
    case SQLITE_FUNCTION:
    case SQLITE_RECURSIVE:
      return SQLITE_OK;
    case SQLITE_PRAGMA:
      return readonly_pragma(arg1) ? SQLITE_OK : SQLITE_DENY;
    default:
      return SQLITE_DENY;
  }
}

bool infrastructure_code(int rc) {
  switch (rc & 0xff) {
    case SQLITE_BUSY:
    case SQLITE_LOCKED:
    case SQLITE_NOMEM:
    case SQLITE_IOERR:
    case SQLITE_CORRUPT:
    case SQLITE_NOTADB:
    case SQLITE_CANTOPEN:
    case SQLITE_FULL:
    case SQLITE_PROTOCOL:
      return true;
    default:
      return false;
  }
}

Cell read_cell(sqlite3_stmt* st, int i) {
  switch (sqlite3_column_type(st, i)) {
    case SQLITE_INTEGER: return sqlite3_column_int64(st, i);
    case SQLITE_FLOAT: return sqlite3_column_double(st, i);
    case SQLITE_TEXT: {
      const auto* p = reinterpret_cast<const char*>(sqlite3_column_text(st, i));
      return std::string(p, static_cast<std::size_t>(sqlite3_column_bytes(st, i)));
    }
    case SQLITE_BLOB: {
      const auto* p = static_cast<const std::uint8_t*>(sqlite3_column_blob(st, i));
      return Blob(p, p + sqlite3_column_bytes(st, i));
    }
    default: return std::monostate{};
  }
}

class OutcomeBuilder {
 public:
  explicit OutcomeBuilder(Clock::time_point start) : start_(start) {}

  ExecutionOutcome done(ExecStatus status, std::string message = {}, ResultTable result = {}) const {
    ExecutionOutcome o;
    o.status = status;
    o.message = std::move(message);
    o.result = std::move(result);
    o.elapsed = Clock::now() - start_;
    return o;
  }

 private:
  Clock::time_point start_;
};

}  // namespace

ExecutionOutcome execute_file(const std::filesystem::path& db_path, std::string_view sql,
                              std::chrono::milliseconds limit, std::size_t row_cap) {
  const auto start = Clock::now();
  const OutcomeBuilder out(start);
  if (limit.count() <= 0) return out.done(ExecStatus::kUnavailable, "execution limit must be positive");

  std::string error;
  auto db = detail::open_readonly(db_path, &error);
  if (!db) return out.done(ExecStatus::kUnavailable, error);

  Watchdog watchdog{start + limit};
  sqlite3_progress_handler(db.get(), kProgressOps, on_progress, &watchdog);
  sqlite3_set_authorizer(db.get(), authorize, nullptr);

  const auto fail = [&](int rc, const char* what) {
    if (watchdog.fired || (rc & 0xff) == SQLITE_INTERRUPT) {
      return out.done(ExecStatus::kTimeout, "execution limit exceeded");
    }
    std::string msg = what ? what : sqlite3_errmsg(db.get());
    return out.done(infrastructure_code(rc) ? ExecStatus::kUnavailable : ExecStatus::kSqlError, std::move(msg));
  };

  const std::string text(sql);
  sqlite3_stmt* raw = nullptr;
  const char* tail = nullptr;
  int rc = sqlite3_prepare_v2(db.get(), text.c_str(), static_cast<int>(text.size()), &raw, &tail);
  detail::StmtHandle stmt(raw);
  if (rc != SQLITE_OK) return fail(rc, nullptr);
  if (!stmt) return out.done(ExecStatus::kSqlError, "empty statement");

  // Anything after the first statement must compile to nothing
  // (whitespace, comments, stray semicolons).
  while (tail && *tail) {
    sqlite3_stmt* extra = nullptr;
    const char* next = nullptr;
    rc = sqlite3_prepare_v2(db.get(), tail, -1, &extra, &next);
    detail::StmtHandle guard(extra);
    if (rc != SQLITE_OK) return fail(rc, nullptr);
    if (extra) return out.done(ExecStatus::kSqlError, "only a single statement is allowed");
    if (next == tail) break;
    tail = next;
  }

  if (!sqlite3_stmt_readonly(stmt.get())) {
    return out.done(ExecStatus::kSqlError, "statement is not read-only");
  }

  ResultTable table;
  table.columns = static_cast<std::size_t>(sqlite3_column_count(stmt.get()));
  while (true) {
    rc = sqlite3_step(stmt.get());
    if (rc == SQLITE_DONE) break;
    if (rc != SQLITE_ROW) return fail(rc, nullptr);
    if (table.rows.size() >= row_cap) {
      table.truncated = true;
      break;
    }
    Row row;
    row.reserve(table.columns);
    for (int i = 0; i < static_cast<int>(table.columns); ++i) row.push_back(read_cell(stmt.get(), i));
    table.rows.push_back(std::move(row));
    if (Clock::now() >= watchdog.deadline) {
      watchdog.fired = true;
      return fail(SQLITE_INTERRUPT, nullptr);
    }
  }
  return out.done(ExecStatus::kSuccess, {}, std::move(table));
}

Executor::Executor(DatabaseRegistry registry, std::size_t workers, std::size_t row_cap)
    : registry_(std::move(registry)), row_cap_(row_cap), pool_(std::make_unique<ExecutorPool>(workers)) {}

ExecutionOutcome Executor::execute(std::string_view db_ref, std::string_view sql,
                                   std::chrono::milliseconds limit) const {
  const auto path = registry_.resolve(db_ref);
  if (!path) {
    ExecutionOutcome o;
    o.status = ExecStatus::kUnavailable;
    o.message = "unknown database '" + std::string(db_ref) + "'";
    return o;
  }
  return execute_file(*path, sql, limit, row_cap_);
}

std::vector<ExecutionOutcome> Executor::execute_group(std::string_view db_ref,
                                                      std::span<const std::string> sqls,
                                                      std::chrono::milliseconds limit) {
  std::vector<ExecRequest> requests;
  requests.reserve(sqls.size());
  for (const auto& s : sqls) requests.push_back({std::string(db_ref), s});
  return execute_batch(requests, limit);
}

std::vector<ExecutionOutcome> Executor::execute_batch(std::span<const ExecRequest> requests,
                                                      std::chrono::milliseconds limit) {
  std::vector<std::future<ExecutionOutcome>> pending;
  pending.reserve(requests.size());
  for (const auto& r : requests) {
    pending.push_back(pool_->submit([this, &r, limit] { return execute(r.db_ref, r.sql, limit); }));
  }
  std::vector<ExecutionOutcome> outcomes;
  outcomes.reserve(requests.size());
  for (auto& f : pending) outcomes.push_back(f.get());
  return outcomes;
}

}  // namespace sqlrl
