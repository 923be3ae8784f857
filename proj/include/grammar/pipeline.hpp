#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "grammar/backend.hpp"
#include "grammar/corpus.hpp"
#include "grammar/dataset.hpp"
#include "grammar/judges.hpp"
#include "grammar/retrieval.hpp"

namespace grammar {

enum class RetrieverKind { Keyword, Tfidf };

struct GeneratorConfig {
    enum class Kind { ExtractiveStub, HttpLlm };
    Kind kind = Kind::ExtractiveStub;
    double temperature = 0.0;  // ignored by the stub
    std::string prompt_template_id = "rag_answer";
    size_t context_budget = 512;
    // Simulated parametric knowledge for open-domain experiments: the stub
    // answers these groups even when retrieval misses the fact.
    std::map<std::string, std::string> parametric_answers;
};

struct PipelineConfig {
    RetrieverKind retriever = RetrieverKind::Keyword;
    GeneratorConfig generator;
    size_t chunk_size = 128;
    size_t k = 4;
};

inline const char* kIdkResponse = "I don't know.";

// One text query's full evaluation trace.
struct EvalRecord {
    std::string query;
    std::string group_id;
    std::string linguistic_attr;
    Answer truth;
    std::string response;
    std::optional<Judgement> judgement;
    std::vector<int> retrieved_chunk_ids;
    std::vector<int> retrieved_document_ids;  // derived, deduplicated, rank order
    std::vector<int> true_document_ids;
    std::optional<std::string> retrieval_judgement;  // sufficient | insufficient | indeterminate
    std::string context;
    std::string error;  // per-record failure marker; empty on success
};

// Runs retrieval + generation for every text query in the dataset. The
// extractive stub answers with the ground truth whenever the group's gold
// fact sentence appears in the assembled context.
std::vector<EvalRecord> run_pipeline(const Dataset& dataset, const Index& index,
                                     const PipelineConfig& config, const Manifest& manifest,
                                     CompletionBackend* llm_backend = nullptr);

// Results file shaped like the evaluation trace records.
void export_results(const std::vector<EvalRecord>& records, const std::string& path);
std::vector<EvalRecord> import_results(const std::string& path);

struct MrcRecord {
    std::string group_id;
    std::string query;
    bool correct = false;
};

struct MrcReport {
    std::vector<MrcRecord> records;
    double accuracy = 0.0;
    std::vector<std::string> failed_group_ids;  // deduplicated
};

// Machine-reading-comprehension data-quality check: each query is answered
// with its own gold document(s) as context.
MrcReport mrc_check(const Dataset& dataset, const Corpus& corpus, const Manifest& manifest,
                    const GeneratorConfig& generator, CompletionBackend* llm_backend = nullptr);

}  // namespace grammar
