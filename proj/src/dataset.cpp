#include "grammar/dataset.hpp"

#include <algorithm>
#include <fstream>

#include <nlohmann/json.hpp>

#include "grammar/error.hpp"
#include "grammar/hash.hpp"

namespace grammar {

using nlohmann::json;
using nlohmann::ordered_json;

size_t Dataset::total_queries() const {
    size_t n = 0;
    for (const auto& g : groups) n += g.text_queries.size();
    return n;
}

std::string make_group_id(const std::string& template_text, const std::vector<std::string>& combination) {
    std::string key = template_text;
    for (const auto& value : combination) {
        key += '\x1f';
        key += value;
    }
    return fnv1a64_hex(key);
}

InstantiateResult instantiate(const SqlTemplate& tpl, const std::vector<TextTemplate>& text_tpls,
                              const DatabaseHandle& db) {
    InstantiateResult result;

    std::map<std::pair<std::string, std::string>, std::vector<std::string>> cache;
    std::vector<std::vector<std::string>> value_lists;
    for (const auto& p : tpl.placeholders) {
        auto key = std::make_pair(p.table, p.column);
        auto it = cache.find(key);
        if (it == cache.end()) {
            it = cache.emplace(key, db.distinct_values(p.table, p.column)).first;
        }
        value_lists.push_back(it->second);
        if (value_lists.back().empty()) return result;  // empty product
    }

    std::vector<size_t> idx(value_lists.size(), 0);
    while (true) {
        std::vector<std::string> combo;
        combo.reserve(idx.size());
        for (size_t i = 0; i < idx.size(); ++i) combo.push_back(value_lists[i][idx[i]]);

        std::string sql = substitute(tpl.text, tpl.placeholders, combo, true);
        Answer answer = db.execute_answer(sql);
        if (answer.cardinality == 1) {
            SemanticGroup group;
            group.group_id = make_group_id(tpl.text, combo);
            group.sql_query = sql;
            group.answer = std::move(answer);
            group.template_text = tpl.text;
            group.combination = combo;
            for (size_t t = 0; t < text_tpls.size(); ++t) {
                TextQuery q;
                q.text = substitute(text_tpls[t].text, text_tpls[t].placeholders, combo, false);
                q.linguistic_attr = text_tpls[t].linguistic_attr;
                q.template_index = static_cast<int>(t);
                group.text_queries.push_back(std::move(q));
            }
            result.groups.push_back(std::move(group));
        } else {
            result.skipped.push_back({sql, answer.cardinality == 0 ? "empty" : "multiplicity"});
        }

        size_t i = idx.size();
        bool done = true;
        while (i-- > 0) {
            if (++idx[i] < value_lists[i].size()) {
                done = false;
                break;
            }
            idx[i] = 0;
        }
        if (done) break;
    }
    return result;
}

std::string GenerationReport::to_json() const {
    ordered_json arr = ordered_json::array();
    for (const auto& t : templates) {
        arr.push_back({{"template", t.template_text},
                       {"combinations", t.combinations},
                       {"accepted", t.accepted},
                       {"skipped_empty", t.skipped_empty},
                       {"skipped_multiplicity", t.skipped_multiplicity}});
    }
    return arr.dump(2);
}

Dataset balance(Dataset dataset, int per_group, const TextTemplateProvider& provider) {
    // topped-up templates are shared by all groups of the same parent
    std::map<std::string, std::vector<TextTemplate>> extra_templates;

    for (auto& group : dataset.groups) {
        if (static_cast<int>(group.text_queries.size()) > per_group) {
            std::stable_sort(group.text_queries.begin(), group.text_queries.end(),
                             [](const TextQuery& a, const TextQuery& b) {
                                 return a.template_index < b.template_index;
                             });
            group.text_queries.resize(static_cast<size_t>(per_group));
            continue;
        }
        if (static_cast<int>(group.text_queries.size()) == per_group) continue;

        if (group.template_text.empty()) {
            throw Error(ErrorCode::InsufficientValidCandidates,
                        "group " + group.group_id + " lacks template provenance; cannot top up");
        }
        int needed = per_group - static_cast<int>(group.text_queries.size());
        auto it = extra_templates.find(group.template_text);
        if (it == extra_templates.end() || static_cast<int>(it->second.size()) < needed) {
            std::vector<std::string> existing;
            for (const auto& q : group.text_queries) existing.push_back(q.text);
            std::vector<TextTemplate> more =
                provider(group.template_text, existing, needed);
            if (static_cast<int>(more.size()) < needed) {
                throw Error(ErrorCode::InsufficientValidCandidates,
                            "top-up produced " + std::to_string(more.size()) + " of " +
                                std::to_string(needed) + " for: " + group.template_text);
            }
            it = extra_templates.insert_or_assign(group.template_text, std::move(more)).first;
        }
        int base_index = group.text_queries.empty() ? 0 : group.text_queries.back().template_index + 1;
        for (int n = 0; n < needed; ++n) {
            const TextTemplate& tt = it->second[static_cast<size_t>(n)];
            TextQuery q;
            q.text = substitute(tt.text, tt.placeholders, group.combination, false);
            q.linguistic_attr = tt.linguistic_attr;
            q.template_index = base_index + n;
            group.text_queries.push_back(std::move(q));
        }
    }
    return dataset;
}

TextTemplateProvider backend_provider(std::map<std::string, SqlTemplate> parents,
                                      std::map<std::string, std::vector<std::string>> used_texts,
                                      GenerationCriteria criteria,
                                      std::shared_ptr<CompletionBackend> backend,
                                      TextGenerationOptions options) {
    return [parents = std::move(parents), used_texts = std::move(used_texts), criteria,
            backend = std::move(backend),
            options](const std::string& parent_sql, const std::vector<std::string>&,
                     int needed) -> std::vector<TextTemplate> {
        auto pit = parents.find(parent_sql);
        if (pit == parents.end()) return {};
        std::vector<std::string> used;
        auto uit = used_texts.find(parent_sql);
        if (uit != used_texts.end()) used = uit->second;

        GenerationCriteria want = criteria;
        want.num_generations = static_cast<int>(used.size()) + needed;
        std::vector<TextTemplate> all =
            collect_text_templates(pit->second, want, *backend, options);
        std::vector<TextTemplate> fresh;
        for (auto& t : all) {
            if (std::find(used.begin(), used.end(), t.text) == used.end()) {
                fresh.push_back(std::move(t));
            }
        }
        return fresh;
    };
}

long long estimate_total_variations(long long m, long long n, long long q) {
    return m * n * q;
}

void export_dataset(const Dataset& dataset, const std::string& path) {
    ordered_json j;
    j["provenance"] = {{"schema_key", dataset.provenance.schema_key},
                       {"criteria_tags", dataset.provenance.criteria_tags},
                       {"backend_identity", dataset.provenance.backend_identity},
                       {"generated_at", dataset.provenance.generated_at}};
    ordered_json groups = ordered_json::array();
    for (const auto& g : dataset.groups) {
        ordered_json queries = ordered_json::array();
        for (const auto& q : g.text_queries) {
            queries.push_back({{"text", q.text},
                               {"linguistic_attr", q.linguistic_attr},
                               {"template_index", q.template_index}});
        }
        groups.push_back({{"group_id", g.group_id},
                          {"sql_query", g.sql_query},
                          {"answer", g.answer.canonical},
                          {"answer_normalized", g.answer.normalized},
                          {"cardinality", g.answer.cardinality},
                          {"template", g.template_text},
                          {"combination", g.combination},
                          {"gold_document_ids", g.gold_document_ids},
                          {"text_queries", queries}});
    }
    j["groups"] = std::move(groups);
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write dataset: " + path);
    out << j.dump(2) << '\n';
}

Dataset import_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open dataset: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::FormatError, path + ": " + e.what());
    }
    Dataset dataset;
    try {
        const json& p = j.at("provenance");
        dataset.provenance.schema_key = p.at("schema_key");
        dataset.provenance.criteria_tags = p.at("criteria_tags");
        dataset.provenance.backend_identity = p.at("backend_identity");
        dataset.provenance.generated_at = p.at("generated_at");
        for (const auto& gj : j.at("groups")) {
            SemanticGroup g;
            g.group_id = gj.at("group_id");
            g.sql_query = gj.at("sql_query");
            g.answer.canonical = gj.at("answer");
            g.answer.normalized = gj.at("answer_normalized");
            g.answer.cardinality = gj.at("cardinality");
            g.template_text = gj.at("template");
            g.combination = gj.at("combination").get<std::vector<std::string>>();
            g.gold_document_ids = gj.at("gold_document_ids").get<std::vector<int>>();
            for (const auto& qj : gj.at("text_queries")) {
                TextQuery q;
                q.text = qj.at("text");
                q.linguistic_attr = qj.at("linguistic_attr");
                q.template_index = qj.at("template_index");
                g.text_queries.push_back(std::move(q));
            }
            dataset.groups.push_back(std::move(g));
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::FormatError, path + ": " + e.what());
    }
    return dataset;
}

std::string export_qa_json(const Dataset& dataset) {
    ordered_json arr = ordered_json::array();
    for (const auto& g : dataset.groups) {
        ordered_json queries = ordered_json::array();
        for (const auto& q : g.text_queries) queries.push_back(q.text);
        arr.push_back(ordered_json::array({g.answer.canonical, queries}));
    }
    return arr.dump(4);
}

void export_qa(const Dataset& dataset, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write QA file: " + path);
    out << export_qa_json(dataset) << '\n';
}

Dataset import_qa_json(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::FormatError, e.what());
    }
    if (!j.is_array()) throw Error(ErrorCode::FormatError, "QA file must be an array");
    Dataset dataset;
    for (const auto& pair : j) {
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() || !pair[1].is_array()) {
            throw Error(ErrorCode::FormatError, "each QA entry must be [answer, [queries]]");
        }
        SemanticGroup g;
        g.answer = Answer::from_canonical(pair[0].get<std::string>());
        std::string key = pair[0].get<std::string>();
        for (const auto& qj : pair[1]) {
            if (!qj.is_string()) throw Error(ErrorCode::FormatError, "query must be a string");
            TextQuery q;
            q.text = qj.get<std::string>();
            q.template_index = static_cast<int>(g.text_queries.size());
            g.text_queries.push_back(std::move(q));
            key += '\x1f' + g.text_queries.back().text;
        }
        g.group_id = fnv1a64_hex(key);
        dataset.groups.push_back(std::move(g));
    }
    return dataset;
}

Dataset import_qa(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open QA file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return import_qa_json(text);
}

}  // namespace grammar
