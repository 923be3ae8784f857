#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "grammar/answer.hpp"
#include "grammar/backend.hpp"

namespace grammar {

enum class Verdict { Correct, Incorrect };

struct Judgement {
    Verdict verdict = Verdict::Incorrect;
    std::string method;        // normalized_match | llm_judge | ragas_fact | selfcheck
    std::string raw_evidence;  // judge output / claim verdicts / sample agreements
};

// Case-fold, strip punctuation and answer-tuple decoration, collapse spaces.
std::string normalize_answer(const std::string& text);

// Fast path: normalized equality needs no backend call. Otherwise the
// reference judge prompt is sent and the first "Correct"/"Incorrect"
// occurrence in the reply decides. backend may be null for match-only mode.
Judgement judge_reference(const std::string& query, const Answer& truth, const std::string& response,
                          CompletionBackend* backend);

struct RagasResult {
    double faithfulness = 0.0;
    Judgement judgement;
};

// Decomposes the response into atomic statements (one backend call), judges
// each against the context with the NLI prompt; faithfulness = #Yes / #total.
RagasResult ragas_fact(const std::string& context, const std::string& response,
                       CompletionBackend& backend, double threshold = 0.5);

// Regenerates a response at the given temperature.
using ResponseSampler = std::function<std::string(double temperature)>;

// Draws `samples` stochastic responses at temperature 1.0 and compares each
// against the primary response; Correct only when every comparison agrees.
Judgement selfcheck(const std::string& query, const std::string& primary_response,
                    const ResponseSampler& sampler, CompletionBackend& backend, int samples = 4);

enum class IntervalKind { Wald, Wilson };

struct ReliabilityReport {
    long long tp = 0, fp = 0, fn = 0, tn = 0;
    double precision = 0.0;
    double recall = 0.0;
    std::pair<double, double> precision_ci;
    std::pair<double, double> recall_ci;
    long long n = 0;
};

ReliabilityReport reliability_from_counts(long long tp, long long fp, long long fn, long long tn,
                                          IntervalKind kind = IntervalKind::Wald);

// Treats "evaluator says Correct" as the positive prediction and
// "gold Correct" as the positive class.
ReliabilityReport reliability(const std::vector<Judgement>& evaluator_verdicts,
                              const std::vector<Verdict>& gold,
                              IntervalKind kind = IntervalKind::Wald);

}  // namespace grammar
