#pragma once

#include <map>
#include <string>
#include <vector>

#include "grammar/corpus.hpp"
#include "grammar/dataset.hpp"
#include "grammar/template_engine.hpp"

namespace grammar::fixtures {

inline constexpr const char* kReplayModel = "fixture-replay";

struct FixtureSet {
    std::string dir;
    std::string aurp_db;        // construction-firm database (Client/Employee/Project)
    std::string spider_db;      // company_employee database (company/people)
    std::string corpus_full;    // one document per entity row, plus distractors
    std::string corpus;         // deployment corpus with some documents missing
    std::string manifest_full;  // group_id -> gold document + fact sentence
    std::string manifest;       // deployment manifest (gap groups carry no gold)
    std::string replay;         // recorded completions for the replay backend
};

// Writes every fixture artifact under dir (created if missing).
FixtureSet build(const std::string& dir);

GenerationCriteria sql_criteria();
GenerationCriteria short_criteria(int per_template);
GenerationCriteria long_criteria(int per_template);

std::vector<std::vector<std::string>> aurp_subsets();
std::vector<std::vector<std::string>> spider_subsets();

// Answers a closed-book generator is scripted to know: every Project group
// plus the Client groups missing from the deployment corpus. Simulates
// parametric knowledge masking retrieval gaps.
std::map<std::string, std::string> open_domain_answers(const Dataset& dataset,
                                                       const Manifest& deployment_manifest);

// Replaces the bodies of the given documents, simulating data corruption.
Corpus corrupt_documents(Corpus corpus, const std::vector<int>& doc_ids);

}  // namespace grammar::fixtures
