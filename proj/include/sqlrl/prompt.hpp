#pragma once

#include <map>
#include <string>
#include <string_view>

#include "sqlrl/corpus.hpp"

namespace sqlrl {

enum class PromptTemplate { kRl, kSft };

std::string_view template_text(PromptTemplate which);

/// Substitutes {schema}, {external_knowledge} and {question} into the
/// template. Missing knowledge renders as "None".
std::string build_prompt(const Task& task, std::string_view schema_text, PromptTemplate which);

/// Single-pass `{name}` substitution; substituted text is never rescanned.
/// Throws InvalidInput naming any placeholder without a value.
std::string render_template(std::string_view text,
                            const std::map<std::string, std::string, std::less<>>& values);

/// Target text for cold-start SFT: the think trace and gold SQL wrapped in
/// the response tags the format reward checks for.
std::string sft_target(std::string_view think_trace, std::string_view gold_sql);

}  // namespace sqlrl
