#pragma once

#include <stdexcept>
#include <string>

namespace sqlrl {

/// The database layer failed for reasons unrelated to the candidate SQL
/// (missing file, locked database, out of memory). Retrying may succeed.
class InfrastructureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The corpus itself is defective, e.g. a gold query that does not execute.
class CorpusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller supplied structurally invalid input (bad schema, bad batch,
/// mismatched lengths). The message names the offending field or index.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace sqlrl
