#include <doctest.h>

#include "grammar/answer.hpp"

using grammar::Answer;
using grammar::Value;

TEST_CASE("value repr matches python conventions") {
    CHECK(Value::from_text("Maldives").repr() == "'Maldives'");
    CHECK(Value::from_integer(34).repr() == "34");
    CHECK(Value::null().repr() == "None");
    CHECK(Value::from_text("Maldives").flat() == "Maldives");
    CHECK(Value::null().flat() == "None");
}

TEST_CASE("single text row serializes with trailing comma") {
    Answer a = Answer::from_rows({{Value::from_text("Maldives")}});
    CHECK(a.canonical == "[('Maldives',)]");
    CHECK(a.normalized == "Maldives");
    CHECK(a.cardinality == 1);
}

TEST_CASE("multi-row and multi-column serialization") {
    Answer a = Answer::from_rows({{Value::from_text("a"), Value::from_integer(1)},
                                  {Value::from_text("b"), Value::from_integer(2)}});
    CHECK(a.canonical == "[('a', 1), ('b', 2)]");
    CHECK(a.cardinality == 2);
}

TEST_CASE("empty result set") {
    Answer a = Answer::from_rows({});
    CHECK(a.canonical == "[]");
    CHECK(a.cardinality == 0);
}

TEST_CASE("canonical round-trips through from_canonical") {
    for (const Answer& original : {
             Answer::from_rows({{Value::from_text("Maldives")}}),
             Answer::from_rows({{Value::from_integer(34)}}),
             Answer::from_rows({{Value::from_text("a"), Value::from_integer(1)},
                                {Value::from_text("b"), Value::from_integer(2)}}),
             Answer::from_rows({{Value::from_text("O'Brien")}}),
             Answer::from_rows({}),
         }) {
        Answer rebuilt = Answer::from_canonical(original.canonical);
        CHECK(rebuilt.canonical == original.canonical);
        CHECK(rebuilt.normalized == original.normalized);
        CHECK(rebuilt.cardinality == original.cardinality);
    }
}
