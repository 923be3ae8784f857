#include <doctest.h>

#include <cmath>
#include <memory>

#include "grammar/error.hpp"
#include "grammar/judges.hpp"

using namespace grammar;

namespace {

Answer truth_maldives() {
    return Answer::from_rows({{Value::from_text("Maldives")}});
}

}  // namespace

TEST_CASE("answer normalization strips decoration and case") {
    CHECK(normalize_answer("[('Maldives',)]") == "maldives");
    CHECK(normalize_answer("  The  MALDIVES. ") == "the maldives");
    CHECK(normalize_answer("2021-03-05") == "2021 03 05");
    CHECK(normalize_answer("") == "");
}

TEST_CASE("reference judge fast path needs no backend") {
    auto truth = truth_maldives();
    CHECK(judge_reference("q", truth, "Maldives", nullptr).verdict == Verdict::Correct);
    CHECK(judge_reference("q", truth, "maldives!", nullptr).verdict == Verdict::Correct);
    CHECK(judge_reference("q", truth, "[('Maldives',)]", nullptr).verdict == Verdict::Correct);
    auto miss = judge_reference("q", truth, "Fiji", nullptr);
    CHECK(miss.verdict == Verdict::Incorrect);
    CHECK(miss.method == "normalized_match");
}

TEST_CASE("reference judge parses llm verdicts, incorrect first") {
    auto truth = truth_maldives();
    LambdaBackend says_incorrect([](const std::string&, double) {
        return std::string("The response is Incorrect, not correct.");
    });
    CHECK(judge_reference("q", truth, "Fiji", &says_incorrect).verdict == Verdict::Incorrect);

    LambdaBackend says_correct([](const std::string&, double) {
        return std::string("Verdict: Correct");
    });
    auto j = judge_reference("q", truth, "the island nation of Maldives", &says_correct);
    CHECK(j.verdict == Verdict::Correct);
    CHECK(j.method == "llm_judge");

    LambdaBackend mute([](const std::string&, double) { return std::string("hmm"); });
    CHECK_THROWS_AS(judge_reference("q", truth, "Fiji", &mute), Error);
}

TEST_CASE("ragas faithfulness is the supported-statement share") {
    // call 0 is the decomposition, calls 1..2 are per-statement NLI verdicts
    auto scripted = [] {
        auto call = std::make_shared<int>(0);
        return LambdaBackend([call](const std::string&, double) {
            int c = (*call)++;
            if (c == 0) return std::string("- The capital is Paris.\n- The population is 9 million.");
            return std::string(c == 1 ? "Yes" : "No");
        });
    };
    auto backend = scripted();
    auto result = ragas_fact("Paris is the capital.", "Paris, population 9 million.", backend);
    CHECK(result.faithfulness == doctest::Approx(0.5));
    CHECK(result.judgement.verdict == Verdict::Correct);  // 0.5 >= threshold 0.5

    auto backend2 = scripted();
    auto strict = ragas_fact("Paris is the capital.", "Paris, population 9 million.",
                             backend2, 0.75);
    CHECK(strict.judgement.verdict == Verdict::Incorrect);

    CHECK_THROWS_AS(ragas_fact("ctx", "", backend), Error);
}

TEST_CASE("selfcheck requires unanimous agreement") {
    auto sampler = [](double temperature) {
        CHECK(temperature == doctest::Approx(1.0));
        return std::string("sampled");
    };
    LambdaBackend agree([](const std::string&, double) { return std::string("Yes"); });
    CHECK(selfcheck("q", "answer", sampler, agree, 4).verdict == Verdict::Correct);

    int n = 0;
    LambdaBackend one_dissent([&n](const std::string&, double) {
        return std::string(++n == 3 ? "No" : "Yes");
    });
    auto j = selfcheck("q", "answer", sampler, one_dissent, 4);
    CHECK(j.verdict == Verdict::Incorrect);
    CHECK(j.raw_evidence == "Yes,Yes,No,Yes");
}

TEST_CASE("reliability counts and wald intervals") {
    auto report = reliability_from_counts(19, 81, 10, 90);
    CHECK(report.precision == doctest::Approx(0.19));
    double half = 1.959963984540054 * std::sqrt(0.19 * 0.81 / 100.0);
    CHECK(report.precision_ci.first == doctest::Approx(0.19 - half));
    CHECK(report.precision_ci.second == doctest::Approx(0.19 + half));
    CHECK(report.recall == doctest::Approx(19.0 / 29.0));
    CHECK(report.n == 200);

    // Wilson interval is asymmetric and narrower near the extremes
    auto wilson = reliability_from_counts(19, 81, 10, 90, IntervalKind::Wilson);
    CHECK(wilson.precision_ci.first > 0.0);
    CHECK(wilson.precision_ci.first != doctest::Approx(report.precision_ci.first));

    CHECK_THROWS_AS(reliability_from_counts(0, 0, 5, 5), Error);
    CHECK_THROWS_AS(reliability_from_counts(0, 5, 0, 5), Error);
}

TEST_CASE("reliability from aligned verdict lists") {
    std::vector<Judgement> eval = {{Verdict::Correct, "m", ""},
                                   {Verdict::Correct, "m", ""},
                                   {Verdict::Incorrect, "m", ""},
                                   {Verdict::Incorrect, "m", ""}};
    std::vector<Verdict> gold = {Verdict::Correct, Verdict::Incorrect, Verdict::Correct,
                                 Verdict::Incorrect};
    auto report = reliability(eval, gold);
    CHECK(report.tp == 1);
    CHECK(report.fp == 1);
    CHECK(report.fn == 1);
    CHECK(report.tn == 1);
    CHECK_THROWS_AS(reliability(eval, {Verdict::Correct}), Error);
}
