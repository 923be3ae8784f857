#include "grammar/answer.hpp"

#include <cmath>
#include <cstdio>
#include <utility>

namespace grammar {

Value Value::from_text(std::string s) {
    Value v;
    v.kind = Kind::Text;
    v.text = std::move(s);
    return v;
}

Value Value::from_integer(long long i) {
    Value v;
    v.kind = Kind::Integer;
    v.integer = i;
    return v;
}

Value Value::from_real(double d) {
    Value v;
    v.kind = Kind::Real;
    v.real = d;
    return v;
}

Value Value::null() { return Value{}; }

namespace {

std::string quote(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    out.push_back('\'');
    for (char c : s) {
        if (c == '\\' || c == '\'') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('\'');
    return out;
}

std::string real_repr(double d) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", d);
    double roundtrip = 0.0;
    // prefer the shortest representation that round-trips
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, d);
        std::sscanf(buf, "%lf", &roundtrip);
        if (roundtrip == d) break;
    }
    std::string s(buf);
    if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
        s.find("inf") == std::string::npos && s.find("nan") == std::string::npos) {
        s += ".0";
    }
    return s;
}

}  // namespace

std::string Value::repr() const {
    switch (kind) {
        case Kind::Text: return quote(text);
        case Kind::Integer: return std::to_string(integer);
        case Kind::Real: return real_repr(real);
        case Kind::Null: return "None";
    }
    return "None";
}

std::string Value::flat() const {
    switch (kind) {
        case Kind::Text: return text;
        case Kind::Integer: return std::to_string(integer);
        case Kind::Real: return real_repr(real);
        case Kind::Null: return "None";
    }
    return "None";
}

Answer Answer::from_rows(const std::vector<std::vector<Value>>& rows) {
    Answer a;
    a.cardinality = rows.size();

    std::string canonical = "[";
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (r > 0) canonical += ", ";
        canonical += "(";
        for (std::size_t c = 0; c < rows[r].size(); ++c) {
            if (c > 0) canonical += ", ";
            canonical += rows[r][c].repr();
        }
        if (rows[r].size() == 1) canonical += ",";
        canonical += ")";
    }
    canonical += "]";
    a.canonical = canonical;

    std::string normalized;
    for (const auto& row : rows) {
        for (const auto& v : row) {
            if (!normalized.empty()) normalized += ", ";
            normalized += v.flat();
        }
    }
    a.normalized = normalized;
    return a;
}

Answer Answer::from_canonical(const std::string& canonical) {
    // Parses the row-tuple-list form back into rows. Lenient: anything that
    // does not look like that form becomes a single opaque text value.
    std::vector<std::vector<Value>> rows;
    std::size_t i = 0;
    const std::string& s = canonical;
    auto skip_ws = [&] {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    };
    bool ok = false;
    skip_ws();
    if (i < s.size() && s[i] == '[') {
        ++i;
        ok = true;
        skip_ws();
        while (ok && i < s.size() && s[i] != ']') {
            if (s[i] != '(') {
                ok = false;
                break;
            }
            ++i;
            std::vector<Value> row;
            skip_ws();
            while (i < s.size() && s[i] != ')') {
                skip_ws();
                if (s[i] == '\'') {
                    ++i;
                    std::string text;
                    while (i < s.size() && s[i] != '\'') {
                        if (s[i] == '\\' && i + 1 < s.size()) ++i;
                        text.push_back(s[i]);
                        ++i;
                    }
                    ++i;  // closing quote
                    row.push_back(Value::from_text(text));
                } else if (s.compare(i, 4, "None") == 0) {
                    i += 4;
                    row.push_back(Value::null());
                } else {
                    std::string num;
                    while (i < s.size() && s[i] != ',' && s[i] != ')') num.push_back(s[i++]);
                    while (!num.empty() && num.back() == ' ') num.pop_back();
                    if (num.find('.') != std::string::npos || num.find('e') != std::string::npos) {
                        row.push_back(Value::from_real(std::stod(num)));
                    } else if (!num.empty()) {
                        row.push_back(Value::from_integer(std::stoll(num)));
                    } else {
                        ok = false;
                        break;
                    }
                }
                skip_ws();
                if (i < s.size() && s[i] == ',') {
                    ++i;
                    skip_ws();
                }
            }
            if (i < s.size() && s[i] == ')') ++i;
            rows.push_back(std::move(row));
            skip_ws();
            if (i < s.size() && s[i] == ',') {
                ++i;
                skip_ws();
            }
        }
        if (ok && (i >= s.size() || s[i] != ']')) ok = false;
    }
    if (!ok) {
        Answer a;
        a.canonical = canonical;
        a.normalized = canonical;
        a.cardinality = canonical == "[]" ? 0 : 1;
        return a;
    }
    Answer a = Answer::from_rows(rows);
    a.canonical = canonical;  // preserve the original bytes
    return a;
}

}  // namespace grammar
