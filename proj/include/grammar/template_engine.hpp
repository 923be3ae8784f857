#pragma once

#include <optional>
#include <string>
#include <vector>

#include "grammar/backend.hpp"
#include "grammar/schema.hpp"

namespace grammar {

// A `[Table.Column]` slot, with its character span in the source template.
struct Placeholder {
    std::string table;
    std::string column;
    size_t begin = 0;  // index of '['
    size_t end = 0;    // one past ']'

    std::string surface() const { return "[" + table + "." + column + "]"; }
    bool operator==(const Placeholder& other) const {
        return table == other.table && column == other.column;
    }
};

struct ParsedPlaceholders {
    std::vector<Placeholder> placeholders;  // in source order
    std::vector<std::string> malformed;     // offending bracket expressions
};

// Scans for bracket expressions; malformed ones are reported, not dropped.
ParsedPlaceholders parse_placeholders(const std::string& template_text);

// Throws MalformedPlaceholder when any bracket expression is malformed.
std::vector<Placeholder> parse_placeholders_strict(const std::string& template_text);

struct SqlTemplate {
    std::string text;
    std::vector<Placeholder> placeholders;
    std::string source_schema_key;  // stringified table tuple, e.g. "('client',)"
};

struct TextTemplate {
    std::string text;
    std::string parent_sql;  // parent SqlTemplate text
    std::string linguistic_attr;
    std::vector<Placeholder> placeholders;
};

struct GenerationCriteria {
    enum class Kind { Sql, Text };
    Kind kind = Kind::Sql;
    std::string instruction_text;
    std::optional<int> required_placeholder_count;
    int num_generations = 1;
    std::string linguistic_attr;  // tag carried onto text templates
};

struct ValidationResult {
    std::optional<SqlTemplate> accepted;
    std::vector<std::string> violations;
    bool ok() const { return accepted.has_value(); }
};

// Machine-checkable criteria: single SELECT, no star projection, projected
// attribute absent from the predicate, >= 1 placeholder and all of them in
// the WHERE clause, every placeholder resolving against the schema.
ValidationResult validate_sql_template(const std::string& candidate, const DatabaseSchema& schema,
                                       const GenerationCriteria& criteria,
                                       const std::string& schema_key = "");

// Substitutes values (parallel to placeholders) into the template text.
// With escape_sql, single quotes in values are doubled.
std::string substitute(const std::string& template_text, const std::vector<Placeholder>& placeholders,
                       const std::vector<std::string>& values, bool escape_sql);

// Samples up to sample_size placeholder combinations; nullopt means pass,
// otherwise the first combination whose result set has more than one row.
std::optional<std::vector<std::string>> check_singular_answer(const SqlTemplate& tpl,
                                                              const DatabaseHandle& db,
                                                              int sample_size = 32);

// Stringified table tuple, lowercase: ('client',) / ('company', 'people')
std::string schema_key(const std::vector<std::string>& tables);

// Renders the {GIVEN_SCHEMA} slot for a subset of tables.
std::string render_schema(const DatabaseSchema& schema, const std::vector<std::string>& tables);

struct RejectedCandidate {
    std::string candidate;
    std::vector<std::string> violations;
};

struct SqlGenerationResult {
    std::vector<SqlTemplate> templates;
    std::vector<RejectedCandidate> rejected;
};

// Prompts the backend with the SQL-generator prompt for the given table
// subset, then validates and singular-checks every returned line.
SqlGenerationResult generate_sql_templates(const DatabaseSchema& schema,
                                           const std::vector<std::string>& subset,
                                           const GenerationCriteria& criteria,
                                           CompletionBackend& backend, const DatabaseHandle& db,
                                           double temperature = 0.0, int singular_sample_size = 32);

struct TextGenerationOptions {
    int max_attempts = 3;  // 1 primary prompt + up to 2 re-prompts
    double temperature = 0.0;
};

// Best effort: returns up to criteria.num_generations valid paraphrases
// (placeholder set equal to the parent's), re-prompting with an exclusion
// list while attempts remain.
std::vector<TextTemplate> collect_text_templates(const SqlTemplate& tpl,
                                                 const GenerationCriteria& criteria,
                                                 CompletionBackend& backend,
                                                 const TextGenerationOptions& options = {});

// Strict form: throws InsufficientValidCandidates when fewer than
// criteria.num_generations valid candidates could be collected.
std::vector<TextTemplate> generate_text_templates(const SqlTemplate& tpl,
                                                  const GenerationCriteria& criteria,
                                                  CompletionBackend& backend,
                                                  const TextGenerationOptions& options = {});

// Template files: JSON arrays, full round-trip fidelity.
void export_sql_templates(const std::vector<SqlTemplate>& templates, const std::string& path);
std::vector<SqlTemplate> import_sql_templates(const std::string& path);
void export_text_templates(const std::vector<TextTemplate>& templates, const std::string& path);
std::vector<TextTemplate> import_text_templates(const std::string& path);

// Prompt builders shared with the record/replay fixtures.
std::string build_sql_generation_prompt(const DatabaseSchema& schema,
                                        const std::vector<std::string>& subset,
                                        const GenerationCriteria& criteria);
std::string build_text_generation_prompt(const SqlTemplate& tpl, const GenerationCriteria& criteria,
                                         const std::vector<std::string>& exclusions);

}  // namespace grammar
