#include "grammar/modular.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "grammar/error.hpp"

namespace grammar {
namespace {

using nlohmann::json;

bool is_correct(const EvalRecord& rec) {
    if (!rec.judgement)
        throw Error(ErrorCode::UnjudgedRecord, "record lacks a judgement: " + rec.query);
    return rec.judgement->verdict == Verdict::Correct;
}

std::vector<TaggedGroup> tag_subset(const std::vector<const EvalRecord*>& records) {
    std::vector<TaggedGroup> tags;
    std::unordered_map<std::string, size_t> pos;
    for (const EvalRecord* rec : records) {
        auto [it, inserted] = pos.emplace(rec->group_id, tags.size());
        if (inserted) tags.push_back(TaggedGroup{rec->group_id, GroupTag::Gap, 0, 0});
        TaggedGroup& tg = tags[it->second];
        ++tg.total;
        if (is_correct(*rec)) ++tg.correct;
    }
    for (auto& tg : tags) {
        if (tg.correct == 0)
            tg.tag = GroupTag::Gap;
        else if (tg.correct == tg.total)
            tg.tag = GroupTag::Robust;
        else
            tg.tag = GroupTag::NonRobust;
    }
    return tags;
}

std::unordered_set<std::string> gap_ids(const std::vector<TaggedGroup>& tags) {
    std::unordered_set<std::string> ids;
    for (const auto& tg : tags)
        if (tg.tag == GroupTag::Gap) ids.insert(tg.group_id);
    return ids;
}

struct CellAccumulator {
    size_t correct = 0;
    size_t total = 0;
    double value() const { return total == 0 ? 0.0 : static_cast<double>(correct) / total; }
};

}  // namespace

const char* group_tag_name(GroupTag tag) {
    switch (tag) {
        case GroupTag::Gap: return "gap";
        case GroupTag::Robust: return "robust";
        case GroupTag::NonRobust: return "non_robust";
    }
    return "?";
}

const char* gap_strategy_name(GapStrategy s) {
    switch (s) {
        case GapStrategy::None: return "none";
        case GapStrategy::RemoveGap: return "remove_gap";
        case GapStrategy::BalanceGap: return "balance_gap";
    }
    return "?";
}

const char* context_strategy_name(ContextStrategy s) {
    switch (s) {
        case ContextStrategy::None: return "none";
        case ContextStrategy::ContextComparison: return "context_comparison";
    }
    return "?";
}

std::vector<TaggedGroup> tag_groups(const std::vector<EvalRecord>& records) {
    std::vector<const EvalRecord*> ptrs;
    ptrs.reserve(records.size());
    for (const auto& rec : records) ptrs.push_back(&rec);
    return tag_subset(ptrs);
}

double acc_retrieval_db(const std::vector<TaggedGroup>& tags) {
    if (tags.empty()) throw Error(ErrorCode::EmptyTagList, "no tagged groups");
    size_t gaps = 0;
    for (const auto& tg : tags)
        if (tg.tag == GroupTag::Gap) ++gaps;
    return 1.0 - static_cast<double>(gaps) / tags.size();
}

RefinedAccuracy refined_accuracy(const std::vector<EvalRecord>& records,
                                 const std::vector<TaggedGroup>& tags) {
    auto gaps = gap_ids(tags);
    RefinedAccuracy out;
    for (const auto& rec : records) {
        ++out.total;
        if (is_correct(rec)) ++out.correct;
        if (gaps.count(rec.group_id)) ++out.gap_instances;
    }
    if (out.total == 0) throw Error(ErrorCode::EmptyTagList, "no records");
    if (out.gap_instances == out.total)
        throw Error(ErrorCode::AllGroupsGap, "every instance belongs to a gap group");
    out.acc = static_cast<double>(out.correct) / out.total;
    out.lambda = static_cast<double>(out.gap_instances) / out.total;
    out.r = static_cast<double>(out.correct) / (out.total - out.gap_instances);
    return out;
}

void annotate_retrieval_judgements(std::vector<EvalRecord>& records, ContextMatch match) {
    std::unordered_map<std::string, std::vector<const EvalRecord*>> correct_by_group;
    for (auto& rec : records)
        if (is_correct(rec)) correct_by_group[rec.group_id].push_back(&rec);

    for (auto& rec : records) {
        auto it = correct_by_group.find(rec.group_id);
        if (it == correct_by_group.end()) {
            rec.retrieval_judgement = "indeterminate";
            continue;
        }
        if (is_correct(rec)) {
            rec.retrieval_judgement = "sufficient";
            continue;
        }
        std::set<int> mine(rec.retrieved_document_ids.begin(),
                           rec.retrieved_document_ids.end());
        bool sufficient = false;
        for (const EvalRecord* sibling : it->second) {
            std::set<int> theirs(sibling->retrieved_document_ids.begin(),
                                 sibling->retrieved_document_ids.end());
            if (match == ContextMatch::ExactSet) {
                if (mine == theirs) {
                    sufficient = true;
                    break;
                }
            } else {
                bool overlap = std::any_of(mine.begin(), mine.end(),
                                           [&](int id) { return theirs.count(id) > 0; });
                if (overlap) {
                    sufficient = true;
                    break;
                }
            }
        }
        rec.retrieval_judgement = sufficient ? "sufficient" : "insufficient";
    }
}

const StrategyCell& StrategyMatrix::cell(GapStrategy g, ContextStrategy c) const {
    for (const auto& cell : cells)
        if (cell.gap == g && cell.context == c) return cell;
    throw Error(ErrorCode::FormatError, "strategy cell missing");
}

StrategyMatrix strategy_matrix(const std::vector<EvalRecord>& records, ContextMatch match,
                               uint64_t seed) {
    std::vector<EvalRecord> annotated = records;
    annotate_retrieval_judgements(annotated, match);

    std::map<std::string, std::vector<const EvalRecord*>> by_attr;
    for (const auto& rec : annotated) by_attr[rec.linguistic_attr].push_back(&rec);
    if (by_attr.size() < 2)
        throw Error(ErrorCode::InsufficientAttributes,
                    "strategy matrix needs at least two linguistic attributes");

    struct AttrState {
        std::vector<const EvalRecord*> gap;
        std::vector<const EvalRecord*> non_gap;
    };
    std::map<std::string, AttrState> states;
    double lambda_max = 0.0;
    for (const auto& [attr, recs] : by_attr) {
        auto gaps = gap_ids(tag_subset(recs));
        AttrState st;
        for (const EvalRecord* rec : recs)
            (gaps.count(rec->group_id) ? st.gap : st.non_gap).push_back(rec);
        double lambda = recs.empty() ? 0.0
                                     : static_cast<double>(st.gap.size()) / recs.size();
        lambda_max = std::max(lambda_max, lambda);
        states.emplace(attr, std::move(st));
    }

    // Balanced selection: keep all gap instances and subsample the rest so
    // every attribute carries the highest observed gap share.
    std::map<std::string, std::vector<const EvalRecord*>> balanced;
    std::mt19937_64 rng(seed);
    for (const auto& [attr, st] : states) {
        std::vector<const EvalRecord*> keep = st.gap;
        std::vector<const EvalRecord*> pool = st.non_gap;
        size_t non_gap_keep = pool.size();
        if (lambda_max > 0.0 && !st.gap.empty()) {
            double target =
                static_cast<double>(st.gap.size()) * (1.0 - lambda_max) / lambda_max;
            non_gap_keep = std::min(pool.size(), static_cast<size_t>(std::llround(target)));
        }
        std::shuffle(pool.begin(), pool.end(), rng);
        keep.insert(keep.end(), pool.begin(),
                    pool.begin() + static_cast<long>(non_gap_keep));
        balanced.emplace(attr, std::move(keep));
    }

    auto accumulate = [](const std::vector<const EvalRecord*>& recs, bool drop_gap,
                         const std::unordered_set<std::string>& gaps,
                         bool context_comparison) {
        CellAccumulator acc;
        for (const EvalRecord* rec : recs) {
            if (drop_gap && gaps.count(rec->group_id)) continue;
            bool correct = is_correct(*rec);
            if (context_comparison && !correct && rec->retrieval_judgement &&
                *rec->retrieval_judgement != "sufficient")
                continue;  // failure not attributable to the generator
            ++acc.total;
            if (correct) ++acc.correct;
        }
        return acc;
    };

    StrategyMatrix matrix;
    for (GapStrategy g : {GapStrategy::None, GapStrategy::RemoveGap, GapStrategy::BalanceGap}) {
        for (ContextStrategy c : {ContextStrategy::None, ContextStrategy::ContextComparison}) {
            StrategyCell cell;
            cell.gap = g;
            cell.context = c;
            CellAccumulator overall;
            for (const auto& [attr, recs] : by_attr) {
                const auto& selected =
                    g == GapStrategy::BalanceGap ? balanced.at(attr) : recs;
                auto gaps = gap_ids(tag_subset(recs));
                CellAccumulator acc =
                    accumulate(selected, g == GapStrategy::RemoveGap, gaps,
                               c == ContextStrategy::ContextComparison);
                cell.per_attr[attr] = acc.value();
                overall.correct += acc.correct;
                overall.total += acc.total;
            }
            cell.overall = overall.value();
            cell.denominator = overall.total;
            matrix.cells.push_back(std::move(cell));
        }
    }
    return matrix;
}

OpenDomainFilter filter_open_domain(const std::vector<EvalRecord>& records,
                                    const std::vector<TaggedGroup>& tags,
                                    const std::vector<EvalRecord>& closed_book) {
    std::unordered_map<std::string, bool> answered;
    for (const auto& rec : closed_book) answered[rec.group_id] = is_correct(rec);

    OpenDomainFilter out;
    std::unordered_set<std::string> removed;
    for (const auto& tg : tags) {
        auto it = answered.find(tg.group_id);
        if (it == answered.end())
            throw Error(ErrorCode::MisalignedInputs,
                        "no closed-book record for group " + tg.group_id);
        if (it->second) {
            removed.insert(tg.group_id);
            out.removed_group_ids.push_back(tg.group_id);
        }
    }
    for (const auto& rec : records)
        if (!removed.count(rec.group_id)) out.kept.push_back(rec);
    return out;
}

ModularReport build_report(std::vector<EvalRecord> records, ContextMatch match,
                           uint64_t seed) {
    annotate_retrieval_judgements(records, match);
    ModularReport report;
    auto tags = tag_groups(records);
    report.groups = tags.size();
    for (const auto& tg : tags) {
        switch (tg.tag) {
            case GroupTag::Gap: ++report.gap_groups; break;
            case GroupTag::Robust: ++report.robust_groups; break;
            case GroupTag::NonRobust: ++report.nonrobust_groups; break;
        }
    }
    report.acc_retrieval_db = acc_retrieval_db(tags);
    report.refined = refined_accuracy(records, tags);

    std::map<std::string, CellAccumulator> per_attr;
    for (const auto& rec : records) {
        auto& acc = per_attr[rec.linguistic_attr];
        ++acc.total;
        if (is_correct(rec)) ++acc.correct;
    }
    for (const auto& [attr, acc] : per_attr) report.per_attr_acc[attr] = acc.value();

    report.matrix = strategy_matrix(records, match, seed);
    return report;
}

std::string report_to_json(const ModularReport& report) {
    json out;
    out["acc_retrieval_db"] = report.acc_retrieval_db;
    out["acc"] = report.refined.acc;
    out["refined_accuracy"] = report.refined.r;
    out["lambda"] = report.refined.lambda;
    out["instances"] = report.refined.total;
    out["gap_instances"] = report.refined.gap_instances;
    out["correct_instances"] = report.refined.correct;
    out["groups"] = report.groups;
    out["gap_groups"] = report.gap_groups;
    out["robust_groups"] = report.robust_groups;
    out["nonrobust_groups"] = report.nonrobust_groups;
    out["per_attr_acc"] = report.per_attr_acc;
    json cells = json::array();
    for (const auto& cell : report.matrix.cells) {
        json row;
        row["gap_strategy"] = gap_strategy_name(cell.gap);
        row["context_strategy"] = context_strategy_name(cell.context);
        row["per_attr"] = cell.per_attr;
        row["overall"] = cell.overall;
        row["denominator"] = cell.denominator;
        cells.push_back(std::move(row));
    }
    out["strategy_matrix"] = std::move(cells);
    return out.dump(2);
}

ModularReport report_from_json(const std::string& json_text) {
    json in;
    try {
        in = json::parse(json_text);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::FormatError, std::string("report parse: ") + e.what());
    }
    ModularReport report;
    try {
        report.acc_retrieval_db = in.at("acc_retrieval_db").get<double>();
        report.refined.acc = in.at("acc").get<double>();
        report.refined.r = in.at("refined_accuracy").get<double>();
        report.refined.lambda = in.at("lambda").get<double>();
        report.refined.total = in.at("instances").get<size_t>();
        report.refined.gap_instances = in.at("gap_instances").get<size_t>();
        report.refined.correct = in.at("correct_instances").get<size_t>();
        report.groups = in.at("groups").get<size_t>();
        report.gap_groups = in.at("gap_groups").get<size_t>();
        report.robust_groups = in.at("robust_groups").get<size_t>();
        report.nonrobust_groups = in.at("nonrobust_groups").get<size_t>();
        report.per_attr_acc = in.at("per_attr_acc").get<std::map<std::string, double>>();
        for (const auto& row : in.at("strategy_matrix")) {
            StrategyCell cell;
            std::string g = row.at("gap_strategy").get<std::string>();
            cell.gap = g == "remove_gap" ? GapStrategy::RemoveGap
                       : g == "balance_gap" ? GapStrategy::BalanceGap
                                            : GapStrategy::None;
            cell.context = row.at("context_strategy").get<std::string>() == "context_comparison"
                               ? ContextStrategy::ContextComparison
                               : ContextStrategy::None;
            cell.per_attr = row.at("per_attr").get<std::map<std::string, double>>();
            cell.overall = row.at("overall").get<double>();
            cell.denominator = row.at("denominator").get<size_t>();
            report.matrix.cells.push_back(std::move(cell));
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::FormatError, std::string("report fields: ") + e.what());
    }
    return report;
}

std::string render_report(const ModularReport& report) {
    std::ostringstream os;
    auto pct = [](double v) {
        std::ostringstream s;
        s.setf(std::ios::fixed);
        s.precision(4);
        s << v;
        return s.str();
    };
    os << "groups: " << report.groups << " (gap " << report.gap_groups << ", robust "
       << report.robust_groups << ", non-robust " << report.nonrobust_groups << ")\n";
    os << "acc_retrieval_db: " << pct(report.acc_retrieval_db) << '\n';
    os << "acc: " << pct(report.refined.acc) << "  refined: " << pct(report.refined.r)
       << "  lambda: " << pct(report.refined.lambda) << '\n';
    os << "per-attribute accuracy:\n";
    size_t width = 0;
    for (const auto& [attr, _] : report.per_attr_acc) width = std::max(width, attr.size());
    for (const auto& [attr, acc] : report.per_attr_acc)
        os << "  " << attr << std::string(width - attr.size() + 2, ' ') << pct(acc) << '\n';
    os << "strategy matrix (overall | per attribute):\n";
    for (const auto& cell : report.matrix.cells) {
        std::string label = std::string(gap_strategy_name(cell.gap)) + " x " +
                            context_strategy_name(cell.context);
        os << "  " << label << std::string(label.size() < 32 ? 32 - label.size() : 1, ' ')
           << pct(cell.overall);
        for (const auto& [attr, acc] : cell.per_attr) os << "  " << attr << '=' << pct(acc);
        os << "  n=" << cell.denominator << '\n';
    }
    return os.str();
}

}  // namespace grammar
