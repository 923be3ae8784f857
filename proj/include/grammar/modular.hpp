#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "grammar/pipeline.hpp"

namespace grammar {

enum class GroupTag { Gap, Robust, NonRobust };

const char* group_tag_name(GroupTag tag);

struct TaggedGroup {
    std::string group_id;
    GroupTag tag = GroupTag::Gap;
    size_t total = 0;
    size_t correct = 0;
};

// Tags every semantic group by its instance outcomes: no correct instance is
// a knowledge gap, all correct is robust, otherwise non-robust.
std::vector<TaggedGroup> tag_groups(const std::vector<EvalRecord>& records);

// Share of groups the retrieval database can answer at all (1 - gap share).
double acc_retrieval_db(const std::vector<TaggedGroup>& tags);

struct RefinedAccuracy {
    double acc = 0.0;     // correct / total
    double r = 0.0;       // correct / (total - gap-group instances)
    double lambda = 0.0;  // gap-group instance share
    size_t total = 0;
    size_t gap_instances = 0;
    size_t correct = 0;
};

// Generation accuracy with knowledge-gap instances removed from the
// denominator; acc == r * (1 - lambda) by construction.
RefinedAccuracy refined_accuracy(const std::vector<EvalRecord>& records,
                                 const std::vector<TaggedGroup>& tags);

enum class ContextMatch { NonEmptyIntersection, ExactSet };

// Marks each record's retrieval as sufficient/insufficient by comparing its
// retrieved document ids against those of correct sibling instances in the
// same group; indeterminate when the group has no correct instance.
void annotate_retrieval_judgements(std::vector<EvalRecord>& records,
                                   ContextMatch match = ContextMatch::NonEmptyIntersection);

enum class GapStrategy { None, RemoveGap, BalanceGap };
enum class ContextStrategy { None, ContextComparison };

const char* gap_strategy_name(GapStrategy s);
const char* context_strategy_name(ContextStrategy s);

struct StrategyCell {
    GapStrategy gap = GapStrategy::None;
    ContextStrategy context = ContextStrategy::None;
    // Accuracy per linguistic attribute, plus the overall figure.
    std::map<std::string, double> per_attr;
    double overall = 0.0;
    size_t denominator = 0;
};

struct StrategyMatrix {
    std::vector<StrategyCell> cells;  // all 6 combinations, row-major
    const StrategyCell& cell(GapStrategy g, ContextStrategy c) const;
};

// Evaluates every {gap strategy} x {context strategy} combination. Balancing
// subsamples non-gap instances deterministically from `seed` so each
// attribute carries the same gap share.
StrategyMatrix strategy_matrix(const std::vector<EvalRecord>& records,
                               ContextMatch match = ContextMatch::NonEmptyIntersection,
                               uint64_t seed = 17);

struct OpenDomainFilter {
    std::vector<std::string> removed_group_ids;  // answerable from parametric memory
    std::vector<EvalRecord> kept;
};

// Removes every group the generator already answers without any context, so
// the remaining gaps reflect the retrieval corpus rather than model memory.
// `closed_book` holds one judged record per group evaluated with no context.
OpenDomainFilter filter_open_domain(const std::vector<EvalRecord>& records,
                                    const std::vector<TaggedGroup>& tags,
                                    const std::vector<EvalRecord>& closed_book);

struct ModularReport {
    double acc_retrieval_db = 0.0;
    RefinedAccuracy refined;
    std::map<std::string, double> per_attr_acc;
    size_t groups = 0;
    size_t gap_groups = 0;
    size_t robust_groups = 0;
    size_t nonrobust_groups = 0;
    StrategyMatrix matrix;
};

ModularReport build_report(std::vector<EvalRecord> records,
                           ContextMatch match = ContextMatch::NonEmptyIntersection,
                           uint64_t seed = 17);

std::string report_to_json(const ModularReport& report);
ModularReport report_from_json(const std::string& json_text);
std::string render_report(const ModularReport& report);  // aligned text table

}  // namespace grammar
