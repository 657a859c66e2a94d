#include "sqlrl/response_parser.hpp"

#include <cctype>

namespace sqlrl {

namespace {

constexpr std::string_view kThinkOpen = "<think>";
constexpr std::string_view kThinkClose = "</think>";
constexpr std::string_view kAnswerOpen = "<answer>";
constexpr std::string_view kAnswerClose = "</answer>";
constexpr std::string_view kFence = "```";

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

bool blank(std::string_view s) { return trim(s).empty(); }

std::size_t count_of(std::string_view hay, std::string_view needle) {
  std::size_t n = 0;
  for (auto p = hay.find(needle); p != std::string_view::npos; p = hay.find(needle, p + needle.size())) ++n;
  return n;
}

struct Span {
  std::size_t open = std::string_view::npos;   // index of the opening tag
  std::size_t close = std::string_view::npos;  // index of the closing tag
  std::size_t body_begin = 0;

  bool found() const { return close != std::string_view::npos; }
  std::size_t end(std::string_view close_tag) const { return close + close_tag.size(); }
};

Span find_block(std::string_view raw, std::string_view open, std::string_view close, std::size_t from) {
  Span s;
  const auto o = raw.find(open, from);
  if (o == std::string_view::npos) return s;
  const auto c = raw.find(close, o + open.size());
  if (c == std::string_view::npos) return s;
  s.open = o;
  s.close = c;
  s.body_begin = o + open.size();
  return s;
}

// "```sql" followed by whitespace or end of text.
bool is_sql_fence(std::string_view text, std::size_t at) {
  const auto tag = text.substr(at + kFence.size(), 3);
  if (tag.size() != 3) return false;
  for (std::size_t i = 0; i < 3; ++i) {
    if (std::tolower(static_cast<unsigned char>(tag[i])) != "sql"[i]) return false;
  }
  const auto after = at + kFence.size() + 3;
  return after == text.size() || is_space(text[after]);
}

}  // namespace

std::size_t count_characters(std::string_view text) {
  std::size_t n = 0;
  for (unsigned char c : text) {
    if ((c & 0xC0) != 0x80) ++n;
  }
  return n;
}

std::optional<std::string> extract_sql(std::string_view answer) {
  std::optional<std::string> last;
  std::size_t pos = 0;
  while (true) {
    const auto open = answer.find(kFence, pos);
    if (open == std::string_view::npos) break;
    const bool sql = is_sql_fence(answer, open);
    const auto body = open + kFence.size() + (sql ? 3 : 0);
    const auto close = answer.find(kFence, body);
    if (close == std::string_view::npos) break;  // unterminated
    if (sql) last = std::string(trim(answer.substr(body, close - body)));
    pos = close + kFence.size();
  }
  return last;
}

ParsedResponse parse_response(std::string_view raw, const LengthFn& length_fn, ParseOptions options) {
  ParsedResponse p;
  p.raw = std::string(raw);

  const Span think = find_block(raw, kThinkOpen, kThinkClose, 0);
  // The answer block is searched after the think block so the two spans
  // never overlap and their lengths stay additive.
  const Span answer =
      find_block(raw, kAnswerOpen, kAnswerClose, think.found() ? think.end(kThinkClose) : 0);

  if (think.found()) p.think = std::string(raw.substr(think.body_begin, think.close - think.body_begin));
  if (answer.found()) {
    p.answer = std::string(raw.substr(answer.body_begin, answer.close - answer.body_begin));
    p.sql = extract_sql(*p.answer);
  }

  bool ok = think.found() && answer.found() && count_of(raw, kThinkOpen) == 1 &&
            count_of(raw, kThinkClose) == 1 && count_of(raw, kAnswerOpen) == 1 &&
            count_of(raw, kAnswerClose) == 1;
  ok = ok && !blank(*p.think) && !blank(*p.answer) && p.sql && !p.sql->empty();
  if (ok && options.strict) {
    ok = blank(raw.substr(0, think.open)) &&
         blank(raw.substr(think.end(kThinkClose), answer.open - think.end(kThinkClose))) &&
         blank(raw.substr(answer.end(kAnswerClose)));
  }
  p.format_ok = ok;

  p.lengths.response = length_fn(raw);
  if (p.think) p.lengths.think = length_fn(*p.think);
  if (p.answer) p.lengths.answer = length_fn(*p.answer);
  if (p.sql) p.lengths.sql = length_fn(*p.sql);
  return p;
}

}  // namespace sqlrl
