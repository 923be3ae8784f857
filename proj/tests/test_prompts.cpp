#include <doctest.h>

#include <string>

#include <nlohmann/json.hpp>

#include "grammar/prompts.hpp"

using namespace grammar::prompts;

TEST_CASE("fill replaces every occurrence of each slot") {
    CHECK(fill("a {x} b {x} c {y}", {{"x", "1"}, {"y", "2"}}) == "a 1 b 1 c 2");
    CHECK(fill("no slots", {{"x", "1"}}) == "no slots");
    // unknown slots survive untouched so missing bindings are visible
    CHECK(fill("{z}", {}) == "{z}");
}

TEST_CASE("prompt templates expose their documented slots") {
    auto has = [](const char* tmpl, const char* slot) {
        return std::string(tmpl).find(slot) != std::string::npos;
    };
    CHECK(has(kSqlTemplateGenerator, "{SPECIFIC_REQUIREMENTS}"));
    CHECK(has(kSqlTemplateGenerator, "{GIVEN_SCHEMA}"));
    CHECK(has(kTextTemplateGenerator, "{CRITERIA}"));
    CHECK(has(kTextTemplateGenerator, "{SQL_TEMPLATE}"));
    CHECK(has(kTextTemplateGenerator, "{NUM_GENERATIONS}"));
    CHECK(has(kTextTemplateReprompt, "{EXISTING_TEMPLATES}"));
    CHECK(has(kJudgeReference, "{query}"));
    CHECK(has(kJudgeReference, "{true_answer}"));
    CHECK(has(kJudgeReference, "{given_response}"));
    CHECK(has(kRagasNli, "{context}"));
    CHECK(has(kRagasNli, "{statement}"));
    CHECK(has(kSelfCheckQa, "{stochastic_answer}"));
    CHECK(has(kStatementDecomposition, "{response}"));
    CHECK(has(kRagAnswer, "{context}"));
    CHECK(has(kRagAnswer, "{query}"));
}

TEST_CASE("catalog is valid json and carries a version") {
    auto j = nlohmann::json::parse(catalog_json());
    CHECK(j.at("version").get<std::string>() == kCatalogVersion);
    auto& prompts = j.at("prompts");
    CHECK(prompts.contains("sql_template_generator"));
    CHECK(prompts.contains("judge_reference"));
    CHECK(prompts.contains("rag_answer"));
    CHECK(prompts.at("judge_reference").get<std::string>() == kJudgeReference);
}
