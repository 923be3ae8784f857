#pragma once

#include <map>
#include <string>
#include <vector>

namespace grammar::prompts {

extern const char* const kCatalogVersion;

// Generation-side prompts.
extern const char* const kSqlTemplateGenerator;    // slots: {SPECIFIC_REQUIREMENTS}, {GIVEN_SCHEMA}
extern const char* const kTextTemplateGenerator;   // slots: {CRITERIA}, {SQL_TEMPLATE}, {NUM_GENERATIONS}
extern const char* const kTextTemplateReprompt;    // extra slot: {EXISTING_TEMPLATES}
extern const char* const kCriteriaSqlOnePlaceholder;
extern const char* const kCriteriaShort;
extern const char* const kCriteriaLong;

// Judging-side prompts.
extern const char* const kJudgeReference;          // slots: {query}, {true_answer}, {given_response}
extern const char* const kRagasNli;                // slots: {context}, {statement}
extern const char* const kSelfCheckSentence;       // slots: {context}, {sentence}
extern const char* const kSelfCheckQa;             // slots: {query}, {answer}, {stochastic_answer}
extern const char* const kStatementDecomposition;  // slot: {response}

// RAG answer generation prompt for the HTTP generator.
extern const char* const kRagAnswer;               // slots: {context}, {query}

// Replaces every "{name}" occurrence with its mapped value.
std::string fill(const std::string& tmpl, const std::map<std::string, std::string>& slots);

// Versioned catalog, serialized as JSON text (name -> prompt).
std::string catalog_json();

}  // namespace grammar::prompts
