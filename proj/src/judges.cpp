#include "grammar/judges.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "grammar/error.hpp"
#include "grammar/prompts.hpp"

namespace grammar {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

// Earliest verdict token wins; "incorrect" is checked first so its embedded
// "correct" cannot be misread.
std::optional<Verdict> parse_verdict(const std::string& reply) {
    std::string text = lower(reply);
    for (size_t i = 0; i < text.size(); ++i) {
        if (text.compare(i, 9, "incorrect") == 0) return Verdict::Incorrect;
        if (text.compare(i, 7, "correct") == 0) return Verdict::Correct;
    }
    return std::nullopt;
}

// -1 = Null, 0 = No, 1 = Yes
std::optional<int> parse_nli(const std::string& reply) {
    std::string text = lower(reply);
    for (size_t i = 0; i < text.size(); ++i) {
        if (text.compare(i, 4, "null") == 0) return -1;
        if (text.compare(i, 3, "yes") == 0) return 1;
        if (text.compare(i, 2, "no") == 0) return 0;
        if (text.compare(i, 2, "-1") == 0) return -1;
        if (text[i] == '1') return 1;
        if (text[i] == '0') return 0;
    }
    return std::nullopt;
}

std::optional<bool> parse_yes_no(const std::string& reply) {
    std::string text = lower(reply);
    for (size_t i = 0; i < text.size(); ++i) {
        if (text.compare(i, 3, "yes") == 0) return true;
        if (text.compare(i, 2, "no") == 0) return false;
    }
    return std::nullopt;
}

std::pair<double, double> wald_interval(double p, long long n) {
    double half = 1.959963984540054 * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
    return {std::max(0.0, p - half), std::min(1.0, p + half)};
}

std::pair<double, double> wilson_interval(double p, long long n) {
    double z = 1.959963984540054;
    double z2 = z * z;
    double nn = static_cast<double>(n);
    double denom = 1.0 + z2 / nn;
    double center = (p + z2 / (2.0 * nn)) / denom;
    double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

}  // namespace

std::string normalize_answer(const std::string& text) {
    std::string out;
    bool pending_space = false;
    for (unsigned char c : text) {
        if (std::isalnum(c) || c >= 0x80) {
            if (pending_space && !out.empty()) out.push_back(' ');
            pending_space = false;
            out.push_back(static_cast<char>(std::tolower(c)));
        } else {
            pending_space = true;
        }
    }
    return out;
}

Judgement judge_reference(const std::string& query, const Answer& truth, const std::string& response,
                          CompletionBackend* backend) {
    std::string norm_response = normalize_answer(response);
    if (norm_response == normalize_answer(truth.normalized) ||
        norm_response == normalize_answer(truth.canonical)) {
        return {Verdict::Correct, "normalized_match", response};
    }
    if (backend == nullptr) {
        return {Verdict::Incorrect, "normalized_match", response};
    }
    std::string prompt = prompts::fill(prompts::kJudgeReference, {{"query", query},
                                                                  {"true_answer", truth.canonical},
                                                                  {"given_response", response}});
    std::string reply = backend->complete(prompt, 0.0);
    std::optional<Verdict> verdict = parse_verdict(reply);
    if (!verdict) {
        throw Error(ErrorCode::JudgeParseFailure, "no Correct/Incorrect token in: " + reply);
    }
    return {*verdict, "llm_judge", reply};
}

RagasResult ragas_fact(const std::string& context, const std::string& response,
                       CompletionBackend& backend, double threshold) {
    if (response.empty()) throw Error(ErrorCode::NoStatementsExtracted, "empty response");

    std::string decomposition = backend.complete(
        prompts::fill(prompts::kStatementDecomposition, {{"response", response}}), 0.0);
    std::vector<std::string> statements;
    std::istringstream in(decomposition);
    std::string line;
    while (std::getline(in, line)) {
        size_t b = line.find_first_not_of(" \t\r-*");
        if (b == std::string::npos) continue;
        statements.push_back(line.substr(b));
    }
    if (statements.empty()) {
        throw Error(ErrorCode::NoStatementsExtracted, "decomposition produced no statements");
    }

    int yes = 0;
    std::string evidence;
    for (const auto& statement : statements) {
        std::string reply = backend.complete(
            prompts::fill(prompts::kRagasNli, {{"context", context}, {"statement", statement}}), 0.0);
        std::optional<int> verdict = parse_nli(reply);
        if (!verdict) throw Error(ErrorCode::ComparisonParseFailure, "unparseable NLI verdict: " + reply);
        if (*verdict == 1) ++yes;  // No and Null both count as unsupported
        evidence += statement + " => " + std::to_string(*verdict) + "\n";
    }

    RagasResult result;
    result.faithfulness = static_cast<double>(yes) / static_cast<double>(statements.size());
    result.judgement.verdict = result.faithfulness >= threshold ? Verdict::Correct : Verdict::Incorrect;
    result.judgement.method = "ragas_fact";
    result.judgement.raw_evidence = evidence;
    return result;
}

Judgement selfcheck(const std::string& query, const std::string& primary_response,
                    const ResponseSampler& sampler, CompletionBackend& backend, int samples) {
    bool all_agree = true;
    std::string evidence;
    for (int i = 0; i < samples; ++i) {
        std::string stochastic = sampler(1.0);
        std::string reply = backend.complete(
            prompts::fill(prompts::kSelfCheckQa, {{"query", query},
                                                  {"answer", primary_response},
                                                  {"stochastic_answer", stochastic}}),
            0.0);
        std::optional<bool> agrees = parse_yes_no(reply);
        if (!agrees) throw Error(ErrorCode::ComparisonParseFailure, "unparseable comparison: " + reply);
        if (!*agrees) all_agree = false;
        evidence += (*agrees ? "Yes" : "No");
        evidence += i + 1 < samples ? "," : "";
    }
    return {all_agree ? Verdict::Correct : Verdict::Incorrect, "selfcheck", evidence};
}

ReliabilityReport reliability_from_counts(long long tp, long long fp, long long fn, long long tn,
                                          IntervalKind kind) {
    if (tp + fp == 0) throw Error(ErrorCode::UndefinedPrecision, "no positive predictions");
    if (tp + fn == 0) throw Error(ErrorCode::UndefinedRecall, "no gold positives");

    ReliabilityReport report;
    report.tp = tp;
    report.fp = fp;
    report.fn = fn;
    report.tn = tn;
    report.n = tp + fp + fn + tn;
    report.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    report.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    auto interval = kind == IntervalKind::Wald ? wald_interval : wilson_interval;
    report.precision_ci = interval(report.precision, tp + fp);
    report.recall_ci = interval(report.recall, tp + fn);
    return report;
}

ReliabilityReport reliability(const std::vector<Judgement>& evaluator_verdicts,
                              const std::vector<Verdict>& gold, IntervalKind kind) {
    if (evaluator_verdicts.empty() || evaluator_verdicts.size() != gold.size()) {
        throw Error(ErrorCode::MisalignedInputs,
                    "evaluator and gold lists must be aligned and nonempty");
    }
    long long tp = 0, fp = 0, fn = 0, tn = 0;
    for (size_t i = 0; i < gold.size(); ++i) {
        bool predicted = evaluator_verdicts[i].verdict == Verdict::Correct;
        bool actual = gold[i] == Verdict::Correct;
        if (predicted && actual) ++tp;
        else if (predicted && !actual) ++fp;
        else if (!predicted && actual) ++fn;
        else ++tn;
    }
    return reliability_from_counts(tp, fp, fn, tn, kind);
}

}  // namespace grammar
