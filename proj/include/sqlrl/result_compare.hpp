#pragma once

#include <optional>

#include "sqlrl/sql_exec.hpp"

namespace sqlrl {

enum class RowSemantics { kSet, kBag };

/// Rows in a canonical, sorted order. Cells are normalized so that a real
/// with an integral value is stored as an integer (1.0 -> 1); NULL stays
/// distinct from empty text; text and blobs compare byte-exact.
struct CanonicalResult {
  std::size_t columns = 0;
  std::vector<Row> rows;
  bool truncated = false;
  RowSemantics semantics = RowSemantics::kSet;

  friend bool operator==(const CanonicalResult&, const CanonicalResult&) = default;
};

Cell normalize_cell(const Cell& cell);

CanonicalResult normalize(const ResultTable& result, RowSemantics semantics = RowSemantics::kSet);

/// Inverse view for round-trip checks: the canonical rows as a table.
ResultTable to_table(const CanonicalResult& canonical);

struct MatchOptions {
  /// Numeric cells within this absolute tolerance compare equal. Applied
  /// after sorting, row by row, so it is only meaningful when the
  /// tolerance is small relative to the spacing between distinct values.
  std::optional<double> epsilon;
};

/// Column counts equal and row collections equal. Truncated results never
/// match anything.
bool results_match(const CanonicalResult& a, const CanonicalResult& b, MatchOptions options = {});

}  // namespace sqlrl
