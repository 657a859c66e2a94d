#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace sqlrl {

/// Maps text to a non-negative length. Must be additive (monotone) under
/// concatenation, e.g. a character count or a tokenizer's token count.
using LengthFn = std::function<std::size_t(std::string_view)>;

/// Counts UTF-8 code points (bytes that are not continuation bytes).
std::size_t count_characters(std::string_view text);

struct LengthStats {
  std::size_t response = 0;
  std::size_t think = 0;
  std::size_t answer = 0;
  std::size_t sql = 0;

  bool consistent() const { return think + answer <= response && sql <= answer; }
  friend bool operator==(const LengthStats&, const LengthStats&) = default;
};

struct ParsedResponse {
  std::string raw;
  std::optional<std::string> think;
  std::optional<std::string> answer;
  std::optional<std::string> sql;
  bool format_ok = false;
  LengthStats lengths;
};

struct ParseOptions {
  /// When set, only whitespace may appear outside the think/answer blocks.
  bool strict = false;
};

/// Total: never throws on any input.
///
/// format_ok holds iff exactly one <think>...</think> block is followed by
/// exactly one <answer>...</answer> block, both non-empty, and the answer
/// contains a complete ```sql fenced block with non-empty content. The SQL
/// is the last such block. Lengths are measured on whatever spans exist.
ParsedResponse parse_response(std::string_view raw, const LengthFn& length_fn = count_characters,
                              ParseOptions options = {});

/// Last complete ```sql ... ``` block, trimmed. Absent if none is complete.
std::optional<std::string> extract_sql(std::string_view answer);

}  // namespace sqlrl
