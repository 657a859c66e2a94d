#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include <sqlite3.h>

namespace sqlrl::detail {

struct DbCloser {
  void operator()(sqlite3* db) const { sqlite3_close_v2(db); }
};
struct StmtFinalizer {
  void operator()(sqlite3_stmt* stmt) const { sqlite3_finalize(stmt); }
};

using DbHandle = std::unique_ptr<sqlite3, DbCloser>;
using StmtHandle = std::unique_ptr<sqlite3_stmt, StmtFinalizer>;

/// `file:` URI opening the path read-only and immutable (no locks, no
/// journal, no WAL files are created next to the database).
std::string readonly_uri(const std::filesystem::path& path);

/// Opens read-only. On failure returns null and fills *error.
DbHandle open_readonly(const std::filesystem::path& path, std::string* error);

std::string quote_identifier(std::string_view name);

}  // namespace sqlrl::detail
