#include "sqlrl/result_compare.hpp"

#include <algorithm>
#include <cmath>

namespace sqlrl {

namespace {

// 2^63 as a double; integral reals in [-2^63, 2^63) convert exactly.
constexpr double kInt64Bound = 9223372036854775808.0;

std::optional<double> numeric(const Cell& c) {
  if (const auto* i = std::get_if<std::int64_t>(&c)) return static_cast<double>(*i);
  if (const auto* d = std::get_if<double>(&c)) return *d;
  return std::nullopt;
}

bool cells_close(const Cell& a, const Cell& b, double eps) {
  const auto x = numeric(a);
  const auto y = numeric(b);
  if (x && y) return std::fabs(*x - *y) <= eps;
  return a == b;
}

}  // namespace

Cell normalize_cell(const Cell& cell) {
  if (const auto* d = std::get_if<double>(&cell)) {
    if (std::isfinite(*d) && std::trunc(*d) == *d && *d >= -kInt64Bound && *d < kInt64Bound) {
      return static_cast<std::int64_t>(*d);
    }
  }
  return cell;
}

CanonicalResult normalize(const ResultTable& result, RowSemantics semantics) {
  CanonicalResult c;
  c.columns = result.columns;
  c.truncated = result.truncated;
  c.semantics = semantics;
  c.rows.reserve(result.rows.size());
  for (const auto& row : result.rows) {
    Row r;
    r.reserve(row.size());
    for (const auto& cell : row) r.push_back(normalize_cell(cell));
    c.rows.push_back(std::move(r));
  }
  std::sort(c.rows.begin(), c.rows.end());
  if (semantics == RowSemantics::kSet) c.rows.erase(std::unique(c.rows.begin(), c.rows.end()), c.rows.end());
  return c;
}

ResultTable to_table(const CanonicalResult& canonical) {
  ResultTable t;
  t.columns = canonical.columns;
  t.rows = canonical.rows;
  t.truncated = canonical.truncated;
  return t;
}

bool results_match(const CanonicalResult& a, const CanonicalResult& b, MatchOptions options) {
  if (a.truncated || b.truncated) return false;
  if (a.columns != b.columns) return false;
  if (a.rows.size() != b.rows.size()) return false;
  if (!options.epsilon) return a.rows == b.rows;
  const double eps = *options.epsilon;
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    const auto& x = a.rows[i];
    const auto& y = b.rows[i];
    if (x.size() != y.size()) return false;
    for (std::size_t k = 0; k < x.size(); ++k) {
      if (!cells_close(x[k], y[k], eps)) return false;
    }
  }
  return true;
}

}  // namespace sqlrl
