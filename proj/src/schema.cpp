#include "sqlrl/schema.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sqlite_handle.hpp"
#include "sqlrl/errors.hpp"

namespace sqlrl {

const ColumnSpec* TableSpec::find_column(std::string_view column) const {
  for (const auto& c : columns) {
    if (c.name == column) return &c;
  }
  return nullptr;
}

const TableSpec* SchemaSpec::find_table(std::string_view name) const {
  for (const auto& t : tables_) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

SchemaSpec make_schema(std::vector<TableSpec> tables) {
  std::set<std::string> table_names;
  for (const auto& t : tables) {
    if (t.name.empty()) throw InvalidInput("table with empty name");
    if (!table_names.insert(t.name).second) throw InvalidInput("duplicate table '" + t.name + "'");
    std::set<std::string> cols;
    for (const auto& c : t.columns) {
      if (c.name.empty()) throw InvalidInput("table '" + t.name + "' has a column with empty name");
      if (!cols.insert(c.name).second) {
        throw InvalidInput("duplicate column '" + c.name + "' in table '" + t.name + "'");
      }
    }
    for (const auto& pk : t.primary_key) {
      if (!cols.count(pk)) throw InvalidInput("primary key column '" + pk + "' missing in '" + t.name + "'");
    }
  }
  SchemaSpec schema;
  schema.tables_ = std::move(tables);
  for (const auto& t : schema.tables_) {
    for (const auto& fk : t.foreign_keys) {
      if (!t.find_column(fk.column)) {
        throw InvalidInput("foreign key column '" + fk.column + "' missing in '" + t.name + "'");
      }
      const auto* target = schema.find_table(fk.ref_table);
      if (!target || !target->find_column(fk.ref_column)) {
        throw InvalidInput("foreign key " + t.name + "." + fk.column + " references missing " +
                           fk.ref_table + "." + fk.ref_column);
      }
    }
  }
  return schema;
}

namespace {

std::string render_literal(const Literal& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&v)) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, *d);
    return ec == std::errc{} ? std::string(buf, end) : std::string("NULL");
  }
  std::string out = "'";
  for (char c : std::get<std::string>(v)) {
    if (c == '\'') out += '\'';
    out += (c == '\n' || c == '\r') ? ' ' : c;
  }
  out += '\'';
  return out;
}

std::string one_line(std::string_view text) {
  std::string out(text);
  for (auto& c : out) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return out;
}

std::string join_identifiers(const std::vector<std::string>& names) {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out += ", ";
    out += detail::quote_identifier(names[i]);
  }
  return out;
}

}  // namespace

std::string serialize_schema(const SchemaSpec& schema, bool include_values) {
  std::ostringstream os;
  bool first_table = true;
  for (const auto& t : schema.tables()) {
    if (!first_table) os << '\n';
    first_table = false;

    std::vector<std::string> lines;
    std::vector<std::string> comments;
    for (const auto& c : t.columns) {
      std::string line = "  " + detail::quote_identifier(c.name);
      if (!c.declared_type.empty()) line += " " + c.declared_type;
      lines.push_back(std::move(line));

      std::string comment = c.comment ? one_line(*c.comment) : std::string();
      if (include_values && !c.representative_values.empty()) {
        std::string values = "example values: ";
        const auto n = std::min(c.representative_values.size(), kMaxRepresentativeValues);
        for (std::size_t i = 0; i < n; ++i) {
          if (i) values += ", ";
          values += render_literal(c.representative_values[i]);
        }
        comment = comment.empty() ? values : comment + "; " + values;
      }
      comments.push_back(std::move(comment));
    }
    if (!t.primary_key.empty()) {
      lines.push_back("  PRIMARY KEY (" + join_identifiers(t.primary_key) + ")");
      comments.emplace_back();
    }
    for (const auto& fk : t.foreign_keys) {
      lines.push_back("  FOREIGN KEY (" + detail::quote_identifier(fk.column) + ") REFERENCES " +
                      detail::quote_identifier(fk.ref_table) + "(" + detail::quote_identifier(fk.ref_column) + ")");
      comments.emplace_back();
    }

    os << "CREATE TABLE " << detail::quote_identifier(t.name) << " (\n";
    for (std::size_t i = 0; i < lines.size(); ++i) {
      os << lines[i];
      if (i + 1 < lines.size()) os << ',';
      if (!comments[i].empty()) os << " -- " << comments[i];
      os << '\n';
    }
    os << ");\n";
  }
  return os.str();
}

SchemaSpec load_schema_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open schema file " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(path.string() + ": " + e.what());
  }
  std::vector<TableSpec> tables;
  try {
    for (const auto& jt : j.at("tables")) {
      TableSpec t;
      t.name = jt.at("name").get<std::string>();
      for (const auto& jc : jt.at("columns")) {
        ColumnSpec c;
        c.name = jc.at("name").get<std::string>();
        c.declared_type = jc.value("type", std::string());
        if (jc.contains("comment") && !jc["comment"].is_null()) c.comment = jc["comment"].get<std::string>();
        for (const auto& v : jc.value("values", nlohmann::json::array())) {
          if (v.is_number_integer()) {
            c.representative_values.emplace_back(v.get<std::int64_t>());
          } else if (v.is_number()) {
            c.representative_values.emplace_back(v.get<double>());
          } else if (v.is_string()) {
            c.representative_values.emplace_back(v.get<std::string>());
          }
        }
        t.columns.push_back(std::move(c));
      }
      t.primary_key = jt.value("primary_key", std::vector<std::string>{});
      for (const auto& jf : jt.value("foreign_keys", nlohmann::json::array())) {
        t.foreign_keys.push_back({jf.at("column").get<std::string>(), jf.at("ref_table").get<std::string>(),
                                  jf.at("ref_column").get<std::string>()});
      }
      tables.push_back(std::move(t));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(path.string() + ": " + e.what());
  }
  return make_schema(std::move(tables));
}

namespace {

detail::StmtHandle prepare(sqlite3* db, const std::string& sql) {
  sqlite3_stmt* raw = nullptr;
  if (sqlite3_prepare_v2(db, sql.c_str(), -1, &raw, nullptr) != SQLITE_OK) {
    throw InvalidInput(std::string("introspection failed: ") + sqlite3_errmsg(db));
  }
  return detail::StmtHandle(raw);
}

std::string column_text(sqlite3_stmt* st, int i) {
  const auto* p = sqlite3_column_text(st, i);
  return p ? reinterpret_cast<const char*>(p) : std::string();
}

}  // namespace

SchemaSpec introspect_schema(const std::filesystem::path& db_path, bool collect_values) {
  std::string error;
  auto db = detail::open_readonly(db_path, &error);
  if (!db) throw InvalidInput(error);

  std::vector<TableSpec> tables;
  {
    auto st = prepare(db.get(),
                      "SELECT name FROM sqlite_master WHERE type = 'table' AND name NOT LIKE 'sqlite_%' "
                      "ORDER BY rowid");
    while (sqlite3_step(st.get()) == SQLITE_ROW) tables.push_back({column_text(st.get(), 0), {}, {}, {}});
  }

  for (auto& t : tables) {
    const std::string quoted = detail::quote_identifier(t.name);
    std::vector<std::pair<int, std::string>> pk;
    {
      auto st = prepare(db.get(), "PRAGMA table_info(" + quoted + ")");
      while (sqlite3_step(st.get()) == SQLITE_ROW) {
        ColumnSpec c;
        c.name = column_text(st.get(), 1);
        c.declared_type = column_text(st.get(), 2);
        if (int k = sqlite3_column_int(st.get(), 5); k > 0) pk.emplace_back(k, c.name);
        t.columns.push_back(std::move(c));
      }
    }
    std::sort(pk.begin(), pk.end());
    for (auto& [k, name] : pk) t.primary_key.push_back(name);

    if (collect_values) {
      for (auto& c : t.columns) {
        const std::string col = detail::quote_identifier(c.name);
        auto st = prepare(db.get(), "SELECT DISTINCT " + col + " FROM " + quoted + " WHERE " + col +
                                        " IS NOT NULL LIMIT " + std::to_string(kMaxRepresentativeValues));
        while (sqlite3_step(st.get()) == SQLITE_ROW) {
          switch (sqlite3_column_type(st.get(), 0)) {
            case SQLITE_INTEGER: c.representative_values.emplace_back(sqlite3_column_int64(st.get(), 0)); break;
            case SQLITE_FLOAT: c.representative_values.emplace_back(sqlite3_column_double(st.get(), 0)); break;
            case SQLITE_TEXT: c.representative_values.emplace_back(column_text(st.get(), 0)); break;
            default: break;  // blobs are not useful in a prompt
          }
        }
      }
    }
  }

  // Foreign keys need every table's columns first; dangling references
  // (legal in SQLite) are dropped.
  for (auto& t : tables) {
    auto st = prepare(db.get(), "PRAGMA foreign_key_list(" + detail::quote_identifier(t.name) + ")");
    while (sqlite3_step(st.get()) == SQLITE_ROW) {
      ForeignKey fk{column_text(st.get(), 3), column_text(st.get(), 2), column_text(st.get(), 4)};
      const TableSpec* target = nullptr;
      for (const auto& other : tables) {
        if (other.name == fk.ref_table) target = &other;
      }
      if (!target) continue;
      if (fk.ref_column.empty()) {
        if (target->primary_key.size() != 1) continue;
        fk.ref_column = target->primary_key.front();
      }
      if (!target->find_column(fk.ref_column) || !t.find_column(fk.column)) continue;
      t.foreign_keys.push_back(std::move(fk));
    }
  }
  return make_schema(std::move(tables));
}

}  // namespace sqlrl
