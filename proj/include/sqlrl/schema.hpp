#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace sqlrl {

/// A literal shown as a representative column value in prompts.
using Literal = std::variant<std::int64_t, double, std::string>;

struct ColumnSpec {
  std::string name;
  std::string declared_type;
  std::optional<std::string> comment;
  std::vector<Literal> representative_values;
};

struct ForeignKey {
  std::string column;
  std::string ref_table;
  std::string ref_column;
};

struct TableSpec {
  std::string name;
  std::vector<ColumnSpec> columns;
  std::vector<std::string> primary_key;
  std::vector<ForeignKey> foreign_keys;

  const ColumnSpec* find_column(std::string_view column) const;
};

/// Ordered tables of one database. Construct through make_schema (or the
/// loaders) so the invariants below always hold:
///   - table names unique, column names unique within a table
///   - primary key and foreign key columns exist
///   - every foreign key targets an existing table.column
class SchemaSpec {
 public:
  SchemaSpec() = default;

  const std::vector<TableSpec>& tables() const { return tables_; }
  const TableSpec* find_table(std::string_view name) const;

  friend SchemaSpec make_schema(std::vector<TableSpec> tables);

 private:
  std::vector<TableSpec> tables_;
};

/// Validates and wraps. Throws InvalidInput describing the first violation.
SchemaSpec make_schema(std::vector<TableSpec> tables);

inline constexpr std::size_t kMaxRepresentativeValues = 3;

/// Renders one CREATE TABLE statement per table, in order. Column comments
/// become trailing `--` comments; with include_values, up to three
/// representative values are appended to that comment.
std::string serialize_schema(const SchemaSpec& schema, bool include_values);

SchemaSpec load_schema_json(const std::filesystem::path& path);

/// Reads tables, columns, keys and (optionally) up to three distinct
/// non-NULL values per column from a SQLite file, opened read-only.
SchemaSpec introspect_schema(const std::filesystem::path& db_path, bool collect_values = true);

}  // namespace sqlrl
