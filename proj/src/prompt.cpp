#include "sqlrl/prompt.hpp"

#include "sqlrl/errors.hpp"

namespace sqlrl {

namespace {

constexpr std::string_view kRlTemplate =
    R"(You are a helpful SQL expert assistant.
The assistant first thinks about how to write the SQL query by analyzing the question, database schema and external knowledge, then provides the final SQL query.
The reasoning process and SQL query are enclosed within <think> </think> and <answer> </answer> tags respectively.
The answer must contain the SQL query within ```sql...``` tags.

Database Schema: {schema}

External Knowledge: {external_knowledge}

For example:
<think>
To translate the given natural language question into an executable SQLite query, we need to follow these detailed steps:
1. **Identify Key Elements**: The question queries for code snippets that are both complicated (complexity score > 5) and public (`is_public` = 1). We need to retrieve their descriptions and complexity scores.
2. **Focus on Relevant Tables**: The `code_snippets` table contains the necessary fields (`description`, `complexity`, `is_public`).
3. **Construct the Query**: We should select the required fields (`description` and `complexity`) from the `code_snippets` table. We also apply the conditions specified in the question to filter the results.
4. **Ordering**: The reference solution includes an `ORDER BY` clause to sort results by complexity in descending order, which is a reasonable way to present the data to highlight the most complex snippets first.
5. **Final Query Construction**: Putting all this together into a SQL query.
</think>
<answer>
Here's how the query can be written:
```sql
SELECT description, complexity FROM code_snippets WHERE complexity > 5 AND is_public = 1 ORDER BY complexity DESC;
```
This query retrieves the descriptions and complexity scores of code snippets that are both complicated (complexity > 5) and publicly available (`is_public` = 1), sorted by complexity in descending order.
This solution is straightforward and precisely matches the requirements of the question. It avoids unnecessary complexities, such as joining or selecting columns not relevant to the query itself.
</answer>

Question: {question})";

constexpr std::string_view kSftTemplate =
    R"(The user asks a question about a database, and the Assistant helps convert it to SQL.The assistant first thinks about how to write the SQL query by analyzing the question, database schema and external knowledge, then provides the final SQL query.
The reasoning process and SQL query are enclosed within <think> </think> and <answer> </answer> tags respectively. The answer must contain the SQL query within ```sql ``` tags.

Database Schema:
{schema}

External Knowledge: {external_knowledge}

User: {question})";

bool is_placeholder_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

}  // namespace

std::string_view template_text(PromptTemplate which) {
  return which == PromptTemplate::kRl ? kRlTemplate : kSftTemplate;
}

std::string render_template(std::string_view text,
                            const std::map<std::string, std::string, std::less<>>& values) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '{') {
      std::size_t j = i + 1;
      while (j < text.size() && is_placeholder_char(text[j])) ++j;
      if (j < text.size() && text[j] == '}' && j > i + 1) {
        const auto name = text.substr(i + 1, j - i - 1);
        auto it = values.find(name);
        if (it == values.end()) throw InvalidInput("unresolved placeholder {" + std::string(name) + "}");
        out += it->second;
        i = j + 1;
        continue;
      }
    }
    out += text[i++];
  }
  return out;
}

std::string build_prompt(const Task& task, std::string_view schema_text, PromptTemplate which) {
  const std::string knowledge =
      task.external_knowledge && !task.external_knowledge->empty() ? *task.external_knowledge : "None";
  return render_template(template_text(which), {{"schema", std::string(schema_text)},
                                                {"external_knowledge", knowledge},
                                                {"question", task.question}});
}

std::string sft_target(std::string_view think_trace, std::string_view gold_sql) {
  std::string out = "<think>\n";
  out += think_trace;
  out += "\n</think>\n<answer>\n```sql\n";
  out += gold_sql;
  out += "\n```\n</answer>";
  return out;
}

}  // namespace sqlrl
