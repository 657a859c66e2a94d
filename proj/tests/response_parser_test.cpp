#include <gtest/gtest.h>

#include <random>

#include "sqlrl/response_parser.hpp"
#include "test_support.hpp"

using namespace sqlrl;

TEST(ParseResponse, WellFormed) {
  const auto p = parse_response("<think>T</think><answer>```sql\nSELECT 1;\n```</answer>");
  EXPECT_TRUE(p.format_ok);
  EXPECT_EQ(p.sql, "SELECT 1;");
  EXPECT_EQ(p.think, "T");
}

TEST(ParseResponse, MissingFenceIsMalformed) {
  const auto p = parse_response("<think>T</think><answer>SELECT 1</answer>");
  EXPECT_FALSE(p.format_ok);
  EXPECT_FALSE(p.sql.has_value());
}

TEST(ParseResponse, LastFenceWins) {
  const auto p = parse_response("<think>T</think><answer>```sql\nSELECT 1\n```\nthen\n```sql\nSELECT 2\n```</answer>");
  EXPECT_TRUE(p.format_ok);
  EXPECT_EQ(p.sql, "SELECT 2");
}

TEST(ParseResponse, MissingClosingAnswerTag) {
  EXPECT_FALSE(parse_response("<think>T</think><answer>```sql\nSELECT 1\n```").format_ok);
}

TEST(ParseResponse, TagsOutOfOrderOrRepeated) {
  EXPECT_FALSE(parse_response("<answer>```sql\nSELECT 1\n```</answer><think>T</think>").format_ok);
  EXPECT_FALSE(parse_response("<think>T</think><think>U</think><answer>```sql\nSELECT 1\n```</answer>").format_ok);
  EXPECT_FALSE(
      parse_response("<think>T</think><answer>```sql\nSELECT 1\n```</answer><answer>```sql\nSELECT 2\n```</answer>")
          .format_ok);
}

TEST(ParseResponse, BlankBlocksAreMalformed) {
  EXPECT_FALSE(parse_response("<think>  </think><answer>```sql\nSELECT 1\n```</answer>").format_ok);
  EXPECT_FALSE(parse_response("<think>T</think><answer>```sql\n\n```</answer>").format_ok);
}

TEST(ParseResponse, TrailingProseAllowedUnlessStrict) {
  const std::string raw = "Sure.\n<think>T</think><answer>```sql\nSELECT 1\n```</answer>\nDone.";
  const auto lax = parse_response(raw);
  EXPECT_TRUE(lax.format_ok);
  EXPECT_EQ(lax.lengths.response, raw.size());
  EXPECT_FALSE(parse_response(raw, count_characters, {.strict = true}).format_ok);
  EXPECT_TRUE(parse_response("  <think>T</think>\n<answer>```sql\nSELECT 1\n```</answer>\n", count_characters,
                             {.strict = true})
                  .format_ok);
}

TEST(ParseResponse, LengthsFollowInjectedMeasure) {
  const std::string raw = sqlrl::testing::response("abc", "SELECT 1");
  const auto p = parse_response(raw);
  ASSERT_TRUE(p.format_ok);
  EXPECT_EQ(p.lengths.response, raw.size());
  EXPECT_EQ(p.lengths.think, p.think->size());
  EXPECT_EQ(p.lengths.answer, p.answer->size());
  EXPECT_EQ(p.lengths.sql, std::string("SELECT 1").size());

  const LengthFn words = [](std::string_view s) {
    std::size_t n = 0;
    bool in = false;
    for (char c : s) {
      const bool space = c == ' ' || c == '\n';
      if (!space && !in) ++n;
      in = !space;
    }
    return n;
  };
  const auto w = parse_response(raw, words);
  EXPECT_EQ(w.lengths.sql, 2u);
  EXPECT_TRUE(w.lengths.consistent());
}

TEST(CountCharacters, CountsCodePoints) {
  EXPECT_EQ(count_characters(""), 0u);
  EXPECT_EQ(count_characters("abc"), 3u);
  EXPECT_EQ(count_characters("\xC3\xA9t\xC3\xA9"), 3u);  // été
  EXPECT_EQ(count_characters("\xE6\x97\xA5\xE6\x9C\xAC"), 2u);
}

TEST(ExtractSql, Basics) {
  EXPECT_EQ(extract_sql("```sql\nSELECT 1\n```"), "SELECT 1");
  EXPECT_FALSE(extract_sql("SELECT 1").has_value());
  EXPECT_FALSE(extract_sql("```sql\nSELECT 1").has_value());
  EXPECT_EQ(extract_sql("```python\nx = 1\n```\n```sql\nSELECT 2\n```"), "SELECT 2");
  EXPECT_EQ(extract_sql("```sql\nSELECT 1\n```\n```sql\nSELECT 3"), "SELECT 1");
}

namespace {

std::string random_text(std::mt19937_64& rng) {
  static const std::vector<std::string> pieces = {
      "<think>", "</think>", "<answer>", "</answer>", "```sql", "```", "\n", " ", "SELECT 1", "x",
      "<", ">", "```sq", "sql", "\xC3\xA9", "\xE6\x97", "\0", "</", "<think", "answer>"};
  std::string out;
  const auto n = rng() % 24;
  for (std::size_t i = 0; i < n; ++i) {
    if (rng() % 5 == 0) {
      out.push_back(static_cast<char>(rng() % 256));
    } else {
      out += pieces[rng() % pieces.size()];
    }
  }
  return out;
}

}  // namespace

TEST(ParseResponseProperty, TotalAndIdempotent) {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 20000; ++i) {
    const auto raw = random_text(rng);
    for (bool strict : {false, true}) {
      ParsedResponse a, b;
      ASSERT_NO_THROW(a = parse_response(raw, count_characters, {.strict = strict})) << raw;
      b = parse_response(raw, count_characters, {.strict = strict});
      EXPECT_EQ(a.lengths, b.lengths);
      EXPECT_EQ(a.format_ok, b.format_ok);
      EXPECT_TRUE(a.lengths.consistent()) << raw;
      if (a.format_ok) {
        ASSERT_TRUE(a.sql.has_value());
        EXPECT_FALSE(a.sql->empty());
      }
      if (strict && a.format_ok) {
        EXPECT_TRUE(parse_response(raw).format_ok);
      }
    }
  }
}
