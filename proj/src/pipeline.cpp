#include "grammar/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "grammar/error.hpp"
#include "grammar/prompts.hpp"

namespace grammar {
namespace {

using nlohmann::json;

std::vector<int> dedup_document_ids(const std::vector<int>& chunk_ids, const Index& index) {
    std::vector<int> out;
    std::unordered_set<int> seen;
    for (int cid : chunk_ids) {
        int doc = index.chunks().at(static_cast<size_t>(cid)).doc_id;
        if (seen.insert(doc).second) out.push_back(doc);
    }
    return out;
}

std::string stub_answer(const SemanticGroup& group, const std::string& context,
                        const GeneratorConfig& generator, const Manifest& manifest) {
    auto it = manifest.entries.find(group.group_id);
    if (it != manifest.entries.end() && !it->second.fact_sentence.empty() &&
        context.find(it->second.fact_sentence) != std::string::npos) {
        return group.answer.normalized;
    }
    auto param = generator.parametric_answers.find(group.group_id);
    if (param != generator.parametric_answers.end()) return param->second;
    return kIdkResponse;
}

std::string llm_answer(const std::string& query, const std::string& context,
                       const GeneratorConfig& generator, CompletionBackend& backend) {
    std::string prompt =
        prompts::fill(prompts::kRagAnswer, {{"context", context}, {"query", query}});
    return backend.complete(prompt, generator.temperature);
}

}  // namespace

std::vector<EvalRecord> run_pipeline(const Dataset& dataset, const Index& index,
                                     const PipelineConfig& config, const Manifest& manifest,
                                     CompletionBackend* llm_backend) {
    std::vector<EvalRecord> records;
    for (const auto& group : dataset.groups) {
        std::vector<int> gold = group.gold_document_ids;
        auto mit = manifest.entries.find(group.group_id);
        if (gold.empty() && mit != manifest.entries.end()) gold = mit->second.document_ids;
        for (const auto& tq : group.text_queries) {
            EvalRecord rec;
            rec.query = tq.text;
            rec.group_id = group.group_id;
            rec.linguistic_attr = tq.linguistic_attr;
            rec.truth = group.answer;
            rec.true_document_ids = gold;
            try {
                RetrievalResult rr = config.retriever == RetrieverKind::Keyword
                                         ? keyword_retrieve(tq.text, index, config.k)
                                         : tfidf_retrieve(tq.text, index, config.k);
                rec.retrieved_chunk_ids = rr.ranked_chunk_ids;
                rec.retrieved_document_ids = dedup_document_ids(rr.ranked_chunk_ids, index);
                rec.context = assemble_context(index, rr.ranked_chunk_ids,
                                               config.generator.context_budget);
                if (config.generator.kind == GeneratorConfig::Kind::ExtractiveStub) {
                    rec.response = stub_answer(group, rec.context, config.generator, manifest);
                } else {
                    if (llm_backend == nullptr)
                        throw Error(ErrorCode::BackendUnavailable,
                                    "http generator requires a completion backend");
                    rec.response = llm_answer(tq.text, rec.context, config.generator,
                                              *llm_backend);
                }
            } catch (const Error& e) {
                rec.error = std::string(error_code_name(e.code())) + ": " + e.what();
            }
            records.push_back(std::move(rec));
        }
    }
    return records;
}

void export_results(const std::vector<EvalRecord>& records, const std::string& path) {
    json out = json::array();
    for (const auto& rec : records) {
        json row;
        row["query"] = rec.query;
        row["answer"] = rec.truth.canonical;
        row["response"] = rec.response;
        row["judgement"] =
            rec.judgement ? json(rec.judgement->verdict == Verdict::Correct ? "correct"
                                                                            : "incorrect")
                          : json(nullptr);
        row["retrieval_judgement"] =
            rec.retrieval_judgement ? json(*rec.retrieval_judgement) : json(nullptr);
        row["true_document_ids"] = rec.true_document_ids;
        row["retrieved_document_ids"] = rec.retrieved_document_ids;
        row["group_id"] = rec.group_id;
        row["linguistic_attr"] = rec.linguistic_attr;
        row["retrieved_chunk_ids"] = rec.retrieved_chunk_ids;
        if (!rec.error.empty()) row["error"] = rec.error;
        out.push_back(std::move(row));
    }
    std::ofstream f(path);
    if (!f) throw Error(ErrorCode::IoError, "cannot write " + path);
    f << out.dump(2) << '\n';
}

std::vector<EvalRecord> import_results(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error(ErrorCode::IoError, "cannot read " + path);
    json in;
    try {
        f >> in;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::FormatError, std::string("results parse: ") + e.what());
    }
    if (!in.is_array()) throw Error(ErrorCode::FormatError, "results file must be an array");
    std::vector<EvalRecord> records;
    for (const auto& row : in) {
        if (!row.is_object() || !row.contains("query") || !row.contains("answer") ||
            !row.contains("response"))
            throw Error(ErrorCode::FormatError, "results row missing required fields");
        EvalRecord rec;
        rec.query = row.at("query").get<std::string>();
        rec.truth = Answer::from_canonical(row.at("answer").get<std::string>());
        rec.response = row.at("response").get<std::string>();
        if (row.contains("judgement") && row.at("judgement").is_string()) {
            Judgement j;
            j.verdict = row.at("judgement").get<std::string>() == "correct"
                            ? Verdict::Correct
                            : Verdict::Incorrect;
            j.method = "imported";
            rec.judgement = j;
        }
        if (row.contains("retrieval_judgement") && row.at("retrieval_judgement").is_string())
            rec.retrieval_judgement = row.at("retrieval_judgement").get<std::string>();
        if (row.contains("true_document_ids"))
            rec.true_document_ids = row.at("true_document_ids").get<std::vector<int>>();
        if (row.contains("retrieved_document_ids"))
            rec.retrieved_document_ids =
                row.at("retrieved_document_ids").get<std::vector<int>>();
        if (row.contains("group_id")) rec.group_id = row.at("group_id").get<std::string>();
        if (row.contains("linguistic_attr"))
            rec.linguistic_attr = row.at("linguistic_attr").get<std::string>();
        if (row.contains("retrieved_chunk_ids"))
            rec.retrieved_chunk_ids = row.at("retrieved_chunk_ids").get<std::vector<int>>();
        if (row.contains("error")) rec.error = row.at("error").get<std::string>();
        records.push_back(std::move(rec));
    }
    return records;
}

MrcReport mrc_check(const Dataset& dataset, const Corpus& corpus, const Manifest& manifest,
                    const GeneratorConfig& generator, CompletionBackend* llm_backend) {
    std::unordered_map<int, const Document*> by_id;
    for (const auto& doc : corpus.documents) by_id[doc.id] = &doc;

    MrcReport report;
    std::unordered_set<std::string> failed;
    size_t correct = 0;
    for (const auto& group : dataset.groups) {
        std::vector<int> gold = group.gold_document_ids;
        auto mit = manifest.entries.find(group.group_id);
        if (gold.empty() && mit != manifest.entries.end()) gold = mit->second.document_ids;
        std::string context;
        for (int id : gold) {
            auto it = by_id.find(id);
            if (it == by_id.end()) continue;
            if (!context.empty()) context += '\n';
            context += it->second->body;
        }
        for (const auto& tq : group.text_queries) {
            MrcRecord rec;
            rec.group_id = group.group_id;
            rec.query = tq.text;
            std::string response;
            if (generator.kind == GeneratorConfig::Kind::ExtractiveStub) {
                response = stub_answer(group, context, generator, manifest);
            } else {
                if (llm_backend == nullptr)
                    throw Error(ErrorCode::BackendUnavailable,
                                "http generator requires a completion backend");
                response = llm_answer(tq.text, context, generator, *llm_backend);
            }
            Judgement j = judge_reference(tq.text, group.answer, response, nullptr);
            rec.correct = j.verdict == Verdict::Correct;
            if (rec.correct) {
                ++correct;
            } else if (failed.insert(group.group_id).second) {
                report.failed_group_ids.push_back(group.group_id);
            }
            report.records.push_back(std::move(rec));
        }
    }
    report.accuracy =
        report.records.empty() ? 0.0
                               : static_cast<double>(correct) / report.records.size();
    return report;
}

}  // namespace grammar
