#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace grammar {

// One cell of a result row, kept typed so the canonical serialization can
// distinguish quoted text from bare numbers and NULLs.
struct Value {
    enum class Kind { Text, Integer, Real, Null };
    Kind kind = Kind::Null;
    std::string text;       // set for Text
    long long integer = 0;  // set for Integer
    double real = 0.0;      // set for Real

    static Value from_text(std::string s);
    static Value from_integer(long long v);
    static Value from_real(double v);
    static Value null();

    // Python-repr style: 'Maldives', 34, 1.5, None
    std::string repr() const;
    // Flat form used for matching: Maldives, 34, 1.5, None
    std::string flat() const;
};

// A fully executed query result in both its canonical on-disk form
// ("[('Maldives',)]") and a normalized form used for answer matching.
struct Answer {
    std::string canonical;
    std::string normalized;
    std::size_t cardinality = 0;  // number of rows

    static Answer from_rows(const std::vector<std::vector<Value>>& rows);
    // Rebuild from the canonical string (used by dataset import).
    static Answer from_canonical(const std::string& canonical);

    bool operator==(const Answer& other) const = default;
};

}  // namespace grammar
