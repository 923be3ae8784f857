// Command-line entry point for the dataset generation and evaluation toolkit.
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "grammar/backend.hpp"
#include "grammar/corpus.hpp"
#include "grammar/dataset.hpp"
#include "grammar/error.hpp"
#include "grammar/fixtures.hpp"
#include "grammar/judges.hpp"
#include "grammar/modular.hpp"
#include "grammar/pipeline.hpp"
#include "grammar/prompts.hpp"
#include "grammar/retrieval.hpp"
#include "grammar/schema.hpp"
#include "grammar/template_engine.hpp"

namespace {

using grammar::Error;
using grammar::ErrorCode;
using nlohmann::json;

struct BackendOpts {
    std::string replay;
    std::string endpoint;
    std::string model;
    std::string cache_dir;
};

void add_backend_opts(CLI::App* cmd, BackendOpts& opts) {
    cmd->add_option("--replay", opts.replay, "recorded-completion file (hermetic runs)");
    cmd->add_option("--endpoint", opts.endpoint, "chat-completion endpoint, e.g. http://host:port");
    cmd->add_option("--model", opts.model, "model name for the HTTP backend");
    cmd->add_option("--cache-dir", opts.cache_dir, "disk cache for completions");
}

std::shared_ptr<grammar::CompletionBackend> make_backend(const BackendOpts& opts) {
    if (!opts.replay.empty()) {
        return std::make_shared<grammar::ReplayBackend>(
            grammar::ReplayBackend::from_file(opts.replay, grammar::fixtures::kReplayModel));
    }
    if (!opts.endpoint.empty()) {
        grammar::HttpBackendConfig config;
        config.endpoint = opts.endpoint;
        config.model = opts.model.empty() ? "gpt-3.5-turbo" : opts.model;
        std::shared_ptr<grammar::CompletionBackend> backend =
            std::make_shared<grammar::HttpBackend>(config);
        if (!opts.cache_dir.empty()) {
            backend = std::make_shared<grammar::CachingBackend>(backend, opts.cache_dir);
        }
        return backend;
    }
    throw Error(ErrorCode::BackendUnavailable, "pass --replay or --endpoint");
}

grammar::GenerationCriteria text_criteria(const std::string& attr, int num) {
    if (attr == "short") return grammar::fixtures::short_criteria(num);
    if (attr == "long") return grammar::fixtures::long_criteria(num);
    throw Error(ErrorCode::FormatError, "unknown linguistic attribute: " + attr);
}

std::vector<std::string> split_csv(const std::string& csv) {
    std::vector<std::string> out;
    size_t pos = 0;
    while (pos <= csv.size()) {
        size_t comma = csv.find(',', pos);
        if (comma == std::string::npos) comma = csv.size();
        std::string item = csv.substr(pos, comma - pos);
        if (!item.empty()) out.push_back(item);
        pos = comma + 1;
    }
    return out;
}

grammar::Dataset merged_datasets(const std::vector<std::string>& paths) {
    grammar::Dataset merged;
    for (const auto& path : paths) {
        grammar::Dataset d = grammar::import_dataset(path);
        if (merged.groups.empty()) merged.provenance = d.provenance;
        // The same group may appear in several per-attribute datasets; merge
        // queries under one group entry.
        for (auto& g : d.groups) {
            bool found = false;
            for (auto& existing : merged.groups) {
                if (existing.group_id == g.group_id) {
                    for (auto& q : g.text_queries) existing.text_queries.push_back(q);
                    found = true;
                    break;
                }
            }
            if (!found) merged.groups.push_back(std::move(g));
        }
    }
    return merged;
}

using Dataset = grammar::Dataset;

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open config: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::FormatError, path + ": " + e.what());
    }
    if (!j.is_object()) throw Error(ErrorCode::FormatError, "config must be a JSON object");
    return j;
}

int run(int argc, char** argv) {
    CLI::App app{"SQL-grounded QA dataset generation and modular RAG evaluation"};
    app.require_subcommand(1);

    // make-fixtures
    auto* fix = app.add_subcommand("make-fixtures", "write the bundled fixture artifacts");
    std::string fix_out = "fixtures";
    fix->add_option("--out", fix_out, "output directory");

    // prompts
    auto* pr = app.add_subcommand("prompts", "dump the versioned prompt catalog");
    std::string pr_out = "prompt_catalog.json";
    pr->add_option("--out", pr_out, "catalog file");

    // gen-sql-templates
    auto* gsql = app.add_subcommand("gen-sql-templates", "generate SQL templates per table subset");
    std::string gsql_db;
    std::vector<std::string> gsql_tables;
    std::string gsql_out = "sql_templates.json";
    BackendOpts gsql_backend;
    gsql->add_option("--db", gsql_db, "sqlite database path or sqlite:/// URL")->required();
    gsql->add_option("--tables", gsql_tables, "table subset, comma-joined; repeatable")->required();
    gsql->add_option("--out", gsql_out, "output template file");
    add_backend_opts(gsql, gsql_backend);

    // gen-text-templates
    auto* gtxt = app.add_subcommand("gen-text-templates", "paraphrase SQL templates into text");
    std::string gtxt_sql, gtxt_attr = "short", gtxt_out = "text_templates.json";
    int gtxt_num = 3, gtxt_attempts = 3;
    bool gtxt_partial = false;
    BackendOpts gtxt_backend;
    gtxt->add_option("--sql-templates", gtxt_sql, "input SQL template file")->required();
    gtxt->add_option("--attr", gtxt_attr, "linguistic attribute: short|long");
    gtxt->add_option("--num", gtxt_num, "paraphrases per template");
    gtxt->add_option("--attempts", gtxt_attempts, "prompt attempts (1 primary + re-prompts)");
    gtxt->add_flag("--allow-partial", gtxt_partial, "keep templates even when fewer than --num");
    gtxt->add_option("--out", gtxt_out, "output template file");
    add_backend_opts(gtxt, gtxt_backend);

    // gen-data
    auto* gdata = app.add_subcommand("gen-data", "instantiate templates into a QA dataset");
    std::string gdata_db, gdata_sql, gdata_text, gdata_out = "dataset.json", gdata_qa;
    int gdata_per_group = 0, gdata_attempts = 3;
    BackendOpts gdata_backend;
    gdata->add_option("--db", gdata_db, "sqlite database")->required();
    gdata->add_option("--sql-templates", gdata_sql, "SQL template file")->required();
    gdata->add_option("--text-templates", gdata_text, "text template file")->required();
    gdata->add_option("--per-group", gdata_per_group, "balance to this many queries per group");
    gdata->add_option("--attempts", gdata_attempts, "prompt attempts for top-up");
    gdata->add_option("--out", gdata_out, "dataset file");
    gdata->add_option("--qa-out", gdata_qa, "also write the flat QA array file");
    add_backend_opts(gdata, gdata_backend);

    // run-eval
    auto* eval = app.add_subcommand("run-eval", "retrieve, generate and judge every query");
    std::vector<std::string> eval_datasets;
    std::string eval_corpus, eval_manifest, eval_retriever = "keyword", eval_out = "results.json";
    std::string eval_config;
    int eval_k = 4, eval_chunk = 128, eval_budget = 512;
    eval->add_option("--dataset", eval_datasets, "dataset file; repeatable")->required();
    eval->add_option("--corpus", eval_corpus, "corpus JSON")->required();
    eval->add_option("--manifest", eval_manifest, "gold manifest JSON")->required();
    auto* opt_retr = eval->add_option("--retriever", eval_retriever, "keyword|tfidf");
    auto* opt_k = eval->add_option("--k", eval_k, "chunks retrieved per query");
    auto* opt_chunk = eval->add_option("--chunk-size", eval_chunk, "tokens per chunk");
    auto* opt_budget = eval->add_option("--budget", eval_budget, "context token budget");
    eval->add_option("--config", eval_config, "JSON config; flags override");
    eval->add_option("--out", eval_out, "results file");

    // report
    auto* rep = app.add_subcommand("report", "tag groups and compute the strategy matrix");
    std::string rep_results, rep_out = "report.json";
    uint64_t rep_seed = 17;
    rep->add_option("--results", rep_results, "results file from run-eval")->required();
    rep->add_option("--seed", rep_seed, "seed for gap balancing");
    rep->add_option("--out", rep_out, "report file");

    // mrc-check
    auto* mrc = app.add_subcommand("mrc-check", "answerability check with gold documents");
    std::vector<std::string> mrc_datasets;
    std::string mrc_corpus, mrc_manifest, mrc_out;
    mrc->add_option("--dataset", mrc_datasets, "dataset file; repeatable")->required();
    mrc->add_option("--corpus", mrc_corpus, "corpus JSON")->required();
    mrc->add_option("--manifest", mrc_manifest, "gold manifest JSON")->required();
    mrc->add_option("--out", mrc_out, "report file");

    CLI11_PARSE(app, argc, argv);

    if (fix->parsed()) {
        grammar::fixtures::FixtureSet set = grammar::fixtures::build(fix_out);
        std::cout << "fixtures written under " << set.dir << "\n";
        return 0;
    }

    if (pr->parsed()) {
        std::ofstream out(pr_out);
        if (!out) throw Error(ErrorCode::IoError, "cannot write " + pr_out);
        out << grammar::prompts::catalog_json() << '\n';
        std::cout << "prompt catalog written to " << pr_out << "\n";
        return 0;
    }

    if (gsql->parsed()) {
        auto backend = make_backend(gsql_backend);
        grammar::DatabaseHandle db(gsql_db);
        grammar::DatabaseSchema schema = db.load_schema().schema;
        std::vector<grammar::SqlTemplate> all;
        size_t rejected = 0;
        for (const auto& csv : gsql_tables) {
            auto result = grammar::generate_sql_templates(schema, split_csv(csv),
                                                          grammar::fixtures::sql_criteria(),
                                                          *backend, db);
            rejected += result.rejected.size();
            for (auto& t : result.templates) all.push_back(std::move(t));
        }
        grammar::export_sql_templates(all, gsql_out);
        std::cout << all.size() << " templates accepted, " << rejected << " rejected -> "
                  << gsql_out << "\n";
        return 0;
    }

    if (gtxt->parsed()) {
        auto backend = make_backend(gtxt_backend);
        auto parents = grammar::import_sql_templates(gtxt_sql);
        grammar::GenerationCriteria criteria = text_criteria(gtxt_attr, gtxt_num);
        grammar::TextGenerationOptions options;
        options.max_attempts = gtxt_attempts;
        std::vector<grammar::TextTemplate> all;
        for (const auto& tpl : parents) {
            std::vector<grammar::TextTemplate> got =
                gtxt_partial ? grammar::collect_text_templates(tpl, criteria, *backend, options)
                             : grammar::generate_text_templates(tpl, criteria, *backend, options);
            for (auto& t : got) all.push_back(std::move(t));
        }
        grammar::export_text_templates(all, gtxt_out);
        std::cout << all.size() << " text templates -> " << gtxt_out << "\n";
        return 0;
    }

    if (gdata->parsed()) {
        grammar::DatabaseHandle db(gdata_db);
        auto sql_templates = grammar::import_sql_templates(gdata_sql);
        auto text_templates = grammar::import_text_templates(gdata_text);

        std::map<std::string, std::vector<grammar::TextTemplate>> by_parent;
        for (auto& t : text_templates) by_parent[t.parent_sql].push_back(t);

        Dataset dataset;
        for (const auto& tpl : sql_templates) {
            auto inst = grammar::instantiate(tpl, by_parent[tpl.text], db);
            for (auto& g : inst.groups) dataset.groups.push_back(std::move(g));
        }
        dataset.provenance.schema_key = sql_templates.empty()
                                            ? std::string()
                                            : sql_templates.front().source_schema_key;
        dataset.provenance.criteria_tags =
            text_templates.empty() ? std::string() : text_templates.front().linguistic_attr;

        if (gdata_per_group > 0) {
            std::shared_ptr<grammar::CompletionBackend> backend;
            try {
                backend = make_backend(gdata_backend);
            } catch (const Error&) {
                backend = nullptr;  // only needed when a group is short
            }
            std::map<std::string, grammar::SqlTemplate> parents;
            std::map<std::string, std::vector<std::string>> used;
            for (const auto& tpl : sql_templates) parents[tpl.text] = tpl;
            for (const auto& t : text_templates) used[t.parent_sql].push_back(t.text);
            grammar::TextGenerationOptions options;
            options.max_attempts = gdata_attempts;
            grammar::GenerationCriteria criteria =
                text_criteria(dataset.provenance.criteria_tags.empty()
                                  ? "short"
                                  : dataset.provenance.criteria_tags,
                              gdata_per_group);
            grammar::TextTemplateProvider provider =
                backend ? grammar::backend_provider(parents, used, criteria, backend, options)
                        : grammar::TextTemplateProvider(
                              [](const std::string&, const std::vector<std::string>&, int) {
                                  return std::vector<grammar::TextTemplate>{};
                              });
            if (backend) dataset.provenance.backend_identity = backend->identity();
            dataset = grammar::balance(std::move(dataset), gdata_per_group, provider);
        }

        grammar::export_dataset(dataset, gdata_out);
        if (!gdata_qa.empty()) grammar::export_qa(dataset, gdata_qa);
        std::cout << dataset.groups.size() << " groups, " << dataset.total_queries()
                  << " queries -> " << gdata_out << "\n";
        return 0;
    }

    if (eval->parsed()) {
        json config = load_config(eval_config);
        if (!opt_retr->count() && config.contains("retriever"))
            eval_retriever = config["retriever"].get<std::string>();
        if (!opt_k->count() && config.contains("k")) eval_k = config["k"].get<int>();
        if (!opt_chunk->count() && config.contains("chunk_size"))
            eval_chunk = config["chunk_size"].get<int>();
        if (!opt_budget->count() && config.contains("budget"))
            eval_budget = config["budget"].get<int>();

        Dataset dataset = merged_datasets(eval_datasets);
        grammar::Corpus corpus = grammar::Corpus::load(eval_corpus);
        grammar::Manifest manifest = grammar::Manifest::load(eval_manifest);

        grammar::PipelineConfig pipeline;
        if (eval_retriever == "tfidf") {
            pipeline.retriever = grammar::RetrieverKind::Tfidf;
        } else if (eval_retriever != "keyword") {
            throw Error(ErrorCode::FormatError, "unknown retriever: " + eval_retriever);
        }
        pipeline.k = static_cast<size_t>(eval_k);
        pipeline.chunk_size = static_cast<size_t>(eval_chunk);
        pipeline.generator.context_budget = static_cast<size_t>(eval_budget);

        grammar::Index index = grammar::Index::build(corpus, pipeline.chunk_size);
        auto records = grammar::run_pipeline(dataset, index, pipeline, manifest);
        for (auto& rec : records) {
            rec.judgement = grammar::judge_reference(rec.query, rec.truth, rec.response, nullptr);
        }
        grammar::annotate_retrieval_judgements(records);
        grammar::export_results(records, eval_out);
        std::cout << records.size() << " records -> " << eval_out << "\n";
        return 0;
    }

    if (rep->parsed()) {
        auto records = grammar::import_results(rep_results);
        grammar::ModularReport report =
            grammar::build_report(records, grammar::ContextMatch::NonEmptyIntersection, rep_seed);
        std::ofstream out(rep_out);
        if (!out) throw Error(ErrorCode::IoError, "cannot write " + rep_out);
        out << grammar::report_to_json(report) << '\n';
        std::cout << grammar::render_report(report);
        return 0;
    }

    if (mrc->parsed()) {
        Dataset dataset = merged_datasets(mrc_datasets);
        grammar::Corpus corpus = grammar::Corpus::load(mrc_corpus);
        grammar::Manifest manifest = grammar::Manifest::load(mrc_manifest);
        grammar::GeneratorConfig generator;
        grammar::MrcReport report = grammar::mrc_check(dataset, corpus, manifest, generator);
        std::cout << "accuracy: " << report.accuracy << " over " << report.records.size()
                  << " queries\n";
        for (const auto& id : report.failed_group_ids) std::cout << "failed group " << id << "\n";
        if (!mrc_out.empty()) {
            json j;
            j["accuracy"] = report.accuracy;
            j["failed_group_ids"] = report.failed_group_ids;
            std::ofstream out(mrc_out);
            if (!out) throw Error(ErrorCode::IoError, "cannot write " + mrc_out);
            out << j.dump(2) << '\n';
        }
        return report.failed_group_ids.empty() ? 0 : 1;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const Error& e) {
        std::cerr << "error [" << grammar::error_code_name(e.code()) << "]: " << e.what() << "\n";
        switch (e.code()) {
            case ErrorCode::BackendUnavailable:
            case ErrorCode::ConnectionFailed:
                return 2;
            case ErrorCode::FormatError:
            case ErrorCode::IoError:
                return 3;
            default:
                return 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
