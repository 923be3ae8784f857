#include <doctest.h>

#include <set>

#include "grammar/dataset.hpp"
#include "grammar/error.hpp"
#include "test_util.hpp"

using namespace grammar;

namespace {

std::string crm_db() {
    std::string path = testutil::temp_dir("data") + "/crm.sqlite";
    testutil::make_db(path, {
        "CREATE TABLE Client (Name TEXT PRIMARY KEY, Location TEXT NOT NULL)",
        "CREATE TABLE Lead (Name TEXT PRIMARY KEY, City TEXT)",
        "INSERT INTO Client VALUES ('Acme Co', 'Boston')",
        "INSERT INTO Client VALUES ('Blue Horizon Hotels', 'Maldives')",
        "INSERT INTO Client VALUES ('Zenith Ltd', 'Boston')",
        "INSERT INTO Lead VALUES ('Orbit LLC', 'Lisbon')",
        "INSERT INTO Lead VALUES ('Quark GmbH', NULL)",
    });
    return path;
}

SqlTemplate make_template(const std::string& text) {
    SqlTemplate tpl;
    tpl.text = text;
    tpl.placeholders = parse_placeholders(text).placeholders;
    return tpl;
}

TextTemplate make_text(const std::string& text, const std::string& parent,
                       const std::string& attr = "short") {
    TextTemplate t;
    t.text = text;
    t.parent_sql = parent;
    t.linguistic_attr = attr;
    t.placeholders = parse_placeholders(text).placeholders;
    return t;
}

}  // namespace

TEST_CASE("instantiate matches brute-force enumeration and singular rule") {
    DatabaseHandle db(crm_db());
    auto tpl = make_template("SELECT Location FROM Client WHERE Name = '[Client.Name]'");
    auto text = make_text("Location of '[Client.Name]'", tpl.text);

    auto result = instantiate(tpl, {text}, db);

    // independent enumeration: every distinct name, direct lookup
    std::vector<std::string> names = db.distinct_values("Client", "Name");
    REQUIRE(result.groups.size() == names.size());
    for (size_t i = 0; i < names.size(); ++i) {
        std::string sql = substitute(tpl.text, tpl.placeholders, {names[i]}, true);
        Answer expected = db.execute_answer(sql);
        CHECK(result.groups[i].sql_query == sql);
        CHECK(result.groups[i].answer == expected);
        CHECK(result.groups[i].combination == std::vector<std::string>{names[i]});
        REQUIRE(result.groups[i].text_queries.size() == 1);
        CHECK(result.groups[i].text_queries[0].text ==
              "Location of '" + names[i] + "'");
        CHECK(result.groups[i].text_queries[0].linguistic_attr == "short");
    }
    CHECK(result.skipped.empty());
}

TEST_CASE("multi-row and empty combinations are skipped with reasons") {
    DatabaseHandle db(crm_db());
    // Boston maps to two clients -> multiplicity skip for that value.
    auto tpl = make_template("SELECT Name FROM Client WHERE Location = '[Client.Location]'");
    auto result = instantiate(tpl, {}, db);
    CHECK(result.groups.size() == 1);  // only Maldives survives
    REQUIRE(result.skipped.size() == 1);
    CHECK(result.skipped[0].reason == "multiplicity");

    // Lead city values never match any Client location -> empty skips.
    auto cross = make_template("SELECT Name FROM Client WHERE Location = '[Lead.City]'");
    auto crossed = instantiate(cross, {}, db);
    CHECK(crossed.groups.empty());
    REQUIRE(crossed.skipped.size() == 1);  // NULL city excluded up front
    CHECK(crossed.skipped[0].reason == "empty");
}

TEST_CASE("group ids are stable and value-sensitive") {
    CHECK(make_group_id("t", {"a", "b"}) == make_group_id("t", {"a", "b"}));
    CHECK(make_group_id("t", {"a", "b"}) != make_group_id("t", {"ab"}));
    CHECK(make_group_id("t", {"a"}) != make_group_id("u", {"a"}));
    CHECK(make_group_id("t", {"a"}).size() == 16);
}

TEST_CASE("balance truncates surplus by template order") {
    DatabaseHandle db(crm_db());
    auto tpl = make_template("SELECT Location FROM Client WHERE Name = '[Client.Name]'");
    std::vector<TextTemplate> texts = {
        make_text("q0 '[Client.Name]'", tpl.text),
        make_text("q1 '[Client.Name]'", tpl.text),
        make_text("q2 '[Client.Name]'", tpl.text),
    };
    Dataset dataset;
    dataset.groups = instantiate(tpl, texts, db).groups;

    auto provider = [](const std::string&, const std::vector<std::string>&, int) {
        return std::vector<TextTemplate>{};
    };
    Dataset balanced = balance(dataset, 2, provider);
    for (const auto& g : balanced.groups) {
        REQUIRE(g.text_queries.size() == 2);
        CHECK(g.text_queries[0].template_index == 0);
        CHECK(g.text_queries[1].template_index == 1);
    }
    CHECK(balanced.total_queries() == 2 * balanced.groups.size());
}

TEST_CASE("balance tops up deficits through the provider") {
    DatabaseHandle db(crm_db());
    auto tpl = make_template("SELECT Location FROM Client WHERE Name = '[Client.Name]'");
    Dataset dataset;
    dataset.groups = instantiate(tpl, {make_text("q0 '[Client.Name]'", tpl.text)}, db).groups;

    int provider_calls = 0;
    auto provider = [&](const std::string& parent, const std::vector<std::string>&, int needed) {
        ++provider_calls;
        std::vector<TextTemplate> extra;
        for (int i = 0; i < needed; ++i) {
            extra.push_back(make_text("extra" + std::to_string(i) + " '[Client.Name]'", parent));
        }
        return extra;
    };
    Dataset balanced = balance(dataset, 3, provider);
    CHECK(provider_calls == 1);  // extra templates are reused across groups
    for (const auto& g : balanced.groups) {
        REQUIRE(g.text_queries.size() == 3);
        CHECK(g.text_queries[1].text == "extra0 '" + g.combination[0] + "'");
    }

    auto empty_provider = [](const std::string&, const std::vector<std::string>&, int) {
        return std::vector<TextTemplate>{};
    };
    CHECK_THROWS_AS(balance(dataset, 3, empty_provider), Error);
}

TEST_CASE("dataset file round-trips exactly") {
    DatabaseHandle db(crm_db());
    auto tpl = make_template("SELECT Location FROM Client WHERE Name = '[Client.Name]'");
    Dataset dataset;
    dataset.groups = instantiate(tpl, {make_text("q '[Client.Name]'", tpl.text)}, db).groups;
    dataset.groups[0].gold_document_ids = {4, 2};
    dataset.provenance.schema_key = "('client',)";
    dataset.provenance.criteria_tags = "short";
    dataset.provenance.backend_identity = "fixture-replay";

    std::string path = testutil::temp_dir("dataio") + "/dataset.json";
    export_dataset(dataset, path);
    Dataset back = import_dataset(path);

    REQUIRE(back.groups.size() == dataset.groups.size());
    CHECK(back.provenance == dataset.provenance);
    for (size_t i = 0; i < back.groups.size(); ++i) {
        CHECK(back.groups[i].group_id == dataset.groups[i].group_id);
        CHECK(back.groups[i].sql_query == dataset.groups[i].sql_query);
        CHECK(back.groups[i].answer == dataset.groups[i].answer);
        CHECK(back.groups[i].gold_document_ids == dataset.groups[i].gold_document_ids);
        CHECK(back.groups[i].template_text == dataset.groups[i].template_text);
        CHECK(back.groups[i].combination == dataset.groups[i].combination);
        REQUIRE(back.groups[i].text_queries.size() == dataset.groups[i].text_queries.size());
        for (size_t q = 0; q < back.groups[i].text_queries.size(); ++q) {
            CHECK(back.groups[i].text_queries[q].text == dataset.groups[i].text_queries[q].text);
            CHECK(back.groups[i].text_queries[q].linguistic_attr ==
                  dataset.groups[i].text_queries[q].linguistic_attr);
            CHECK(back.groups[i].text_queries[q].template_index ==
                  dataset.groups[i].text_queries[q].template_index);
        }
    }
}

TEST_CASE("qa array form parses the published snippet shape") {
    const char* snippet = R"([["[('Maldives',)]", ["Location for client 'Blue Horizon Hotels'",
        "Get 'Blue Horizon Hotels' location"]]])";
    Dataset dataset = import_qa_json(snippet);
    REQUIRE(dataset.groups.size() == 1);
    CHECK(dataset.groups[0].answer.canonical == "[('Maldives',)]");
    CHECK(dataset.groups[0].answer.normalized == "Maldives");
    REQUIRE(dataset.groups[0].text_queries.size() == 2);
    CHECK(dataset.groups[0].text_queries[1].text == "Get 'Blue Horizon Hotels' location");

    std::string out = export_qa_json(dataset);
    Dataset again = import_qa_json(out);
    CHECK(again.groups[0].answer.canonical == dataset.groups[0].answer.canonical);
    CHECK(again.groups[0].text_queries.size() == 2);
}

TEST_CASE("variation estimate multiplies templates, values and paraphrases") {
    CHECK(estimate_total_variations(2, 10, 3) == 60);
    CHECK(estimate_total_variations(0, 10, 3) == 0);
}
