#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "grammar/answer.hpp"
#include "grammar/schema.hpp"
#include "grammar/template_engine.hpp"

namespace grammar {

struct TextQuery {
    std::string text;
    std::string linguistic_attr;
    int template_index = 0;  // identity of the parent text template
};

// One instantiated SQL query, its ground-truth answer and every paraphrase.
struct SemanticGroup {
    std::string group_id;  // stable hash of (template text, combination)
    std::string sql_query;
    Answer answer;
    std::vector<TextQuery> text_queries;
    std::vector<int> gold_document_ids;

    // provenance needed for balancing and re-checking
    std::string template_text;
    std::vector<std::string> combination;
};

struct DatasetProvenance {
    std::string schema_key;
    std::string criteria_tags;
    std::string backend_identity;
    std::string generated_at;  // ISO timestamp or empty for hermetic runs

    bool operator==(const DatasetProvenance&) const = default;
};

struct Dataset {
    std::vector<SemanticGroup> groups;
    DatasetProvenance provenance;

    size_t total_queries() const;
};

std::string make_group_id(const std::string& template_text, const std::vector<std::string>& combination);

struct SkippedCombination {
    std::string sql;
    std::string reason;  // "empty" or "multiplicity"
};

struct InstantiateResult {
    std::vector<SemanticGroup> groups;
    std::vector<SkippedCombination> skipped;
};

// Cartesian product of per-placeholder distinct values; combinations whose
// SQL does not yield exactly one row are dropped and logged.
InstantiateResult instantiate(const SqlTemplate& tpl, const std::vector<TextTemplate>& text_tpls,
                              const DatabaseHandle& db);

// Per-template generation accounting, machine readable.
struct TemplateReport {
    std::string template_text;
    size_t combinations = 0;
    size_t accepted = 0;
    size_t skipped_empty = 0;
    size_t skipped_multiplicity = 0;
};

struct GenerationReport {
    std::vector<TemplateReport> templates;
    std::string to_json() const;
};

// Supplies additional text templates for a parent SQL template when a group
// needs topping up. Receives the parent template text, the texts already in
// use and the number still needed.
using TextTemplateProvider = std::function<std::vector<TextTemplate>(
    const std::string& parent_sql, const std::vector<std::string>& existing, int needed)>;

// Every group ends up with exactly per_group text queries: surplus queries
// are truncated by template order, deficits are topped up via the provider.
Dataset balance(Dataset dataset, int per_group, const TextTemplateProvider& provider);

// Provider that re-prompts the backend for additional paraphrases of a parent
// template, excluding the template texts already in use.
TextTemplateProvider backend_provider(std::map<std::string, SqlTemplate> parents,
                                      std::map<std::string, std::vector<std::string>> used_texts,
                                      GenerationCriteria criteria,
                                      std::shared_ptr<CompletionBackend> backend,
                                      TextGenerationOptions options = {});

long long estimate_total_variations(long long m, long long n, long long q);

// Full-fidelity dataset file (round-trip identity).
void export_dataset(const Dataset& dataset, const std::string& path);
Dataset import_dataset(const std::string& path);

// QA array shape: [[answer_string, [query, ...]], ...]
std::string export_qa_json(const Dataset& dataset);
void export_qa(const Dataset& dataset, const std::string& path);
Dataset import_qa_json(const std::string& json_text);
Dataset import_qa(const std::string& path);

}  // namespace grammar
