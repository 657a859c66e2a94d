#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "sqlrl/corpus.hpp"
#include "sqlrl/sql_exec.hpp"

namespace sqlrl::testing {

inline std::filesystem::path fixture(const std::string& rel) {
  return std::filesystem::path(SQLRL_FIXTURE_DIR) / rel;
}

inline DatabaseRegistry fixture_registry() { return DatabaseRegistry(fixture("db")); }

inline std::string read_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string response(const std::string& think, const std::string& sql) {
  return "<think>\n" + think + "\n</think>\n<answer>\n```sql\n" + sql + "\n```\n</answer>";
}

inline Task make_task(std::string id, std::string db, std::string gold,
                      Difficulty level = Difficulty::kSimple) {
  Task t;
  t.id = std::move(id);
  t.question = "q";
  t.db_ref = std::move(db);
  t.gold_sql = std::move(gold);
  t.difficulty = level;
  return t;
}

}  // namespace sqlrl::testing
