#include "sqlite_handle.hpp"

#include <cstdio>

namespace sqlrl::detail {

std::string readonly_uri(const std::filesystem::path& path) {
  std::string uri = "file:";
  for (unsigned char c : std::filesystem::absolute(path).string()) {
    if (c == '?' || c == '#' || c == '%' || c < 0x20 || c >= 0x7f) {
      char buf[4];
      std::snprintf(buf, sizeof buf, "%%%02X", c);
      uri += buf;
    } else {
      uri += static_cast<char>(c);
    }
  }
  uri += "?mode=ro&immutable=1";
  return uri;
}

DbHandle open_readonly(const std::filesystem::path& path, std::string* error) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    if (error) *error = "database file not found: " + path.string();
    return nullptr;
  }
  sqlite3* raw = nullptr;
  const int rc = sqlite3_open_v2(readonly_uri(path).c_str(), &raw,
                                 SQLITE_OPEN_READONLY | SQLITE_OPEN_URI | SQLITE_OPEN_NOMUTEX, nullptr);
  DbHandle db(raw);
  if (rc != SQLITE_OK) {
    if (error) *error = std::string("cannot open database: ") + (raw ? sqlite3_errmsg(raw) : sqlite3_errstr(rc));
    return nullptr;
  }
  // Opening is lazy; read the schema now so a damaged file is reported here.
  char* msg = nullptr;
  if (sqlite3_exec(raw, "PRAGMA schema_version", nullptr, nullptr, &msg) != SQLITE_OK) {
    if (error) *error = std::string("cannot read database: ") + (msg ? msg : sqlite3_errmsg(raw));
    sqlite3_free(msg);
    return nullptr;
  }
  return db;
}

std::string quote_identifier(std::string_view name) {
  bool simple = !name.empty() && !(name[0] >= '0' && name[0] <= '9');
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
    if (!ok) simple = false;
  }
  if (simple && !sqlite3_keyword_check(name.data(), static_cast<int>(name.size()))) {
    return std::string(name);
  }
  std::string out = "\"";
  for (char c : name) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace sqlrl::detail
