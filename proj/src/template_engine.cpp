#include "grammar/template_engine.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "grammar/error.hpp"
#include "grammar/prompts.hpp"

namespace grammar {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

bool is_identifier(const std::string& s) {
    if (s.empty() || std::isdigit(static_cast<unsigned char>(s[0]))) return false;
    return std::all_of(s.begin(), s.end(), is_ident_char);
}

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// Case-insensitive search for a whole keyword.
size_t find_keyword(const std::string& text, const std::string& keyword, size_t from = 0) {
    std::string haystack = lower(text);
    std::string needle = lower(keyword);
    size_t pos = from;
    while ((pos = haystack.find(needle, pos)) != std::string::npos) {
        bool left_ok = pos == 0 || !is_ident_char(haystack[pos - 1]);
        size_t after = pos + needle.size();
        bool right_ok = after >= haystack.size() || !is_ident_char(haystack[after]);
        if (left_ok && right_ok) return pos;
        ++pos;
    }
    return std::string::npos;
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (!line.empty()) lines.push_back(line);
    }
    return lines;
}

std::set<std::pair<std::string, std::string>> placeholder_set(const std::vector<Placeholder>& ps) {
    std::set<std::pair<std::string, std::string>> out;
    for (const auto& p : ps) out.emplace(lower(p.table), lower(p.column));
    return out;
}

}  // namespace

ParsedPlaceholders parse_placeholders(const std::string& text) {
    ParsedPlaceholders out;
    size_t i = 0;
    while ((i = text.find('[', i)) != std::string::npos) {
        size_t close = text.find(']', i);
        if (close == std::string::npos) {
            out.malformed.push_back(text.substr(i));
            break;
        }
        std::string inner = text.substr(i + 1, close - i - 1);
        size_t dot = inner.find('.');
        std::string table = dot == std::string::npos ? "" : inner.substr(0, dot);
        std::string column = dot == std::string::npos ? "" : inner.substr(dot + 1);
        if (dot != std::string::npos && is_identifier(table) && is_identifier(column)) {
            Placeholder p;
            p.table = table;
            p.column = column;
            p.begin = i;
            p.end = close + 1;
            out.placeholders.push_back(std::move(p));
        } else {
            out.malformed.push_back(text.substr(i, close - i + 1));
        }
        i = close + 1;
    }
    return out;
}

std::vector<Placeholder> parse_placeholders_strict(const std::string& text) {
    ParsedPlaceholders parsed = parse_placeholders(text);
    if (!parsed.malformed.empty()) {
        throw Error(ErrorCode::MalformedPlaceholder, parsed.malformed.front());
    }
    return parsed.placeholders;
}

ValidationResult validate_sql_template(const std::string& candidate, const DatabaseSchema& schema,
                                       const GenerationCriteria& criteria,
                                       const std::string& schema_key_str) {
    ValidationResult result;
    std::string text = trim(candidate);
    if (!text.empty() && text.back() == ';') {
        // keep the trailing semicolon, but nothing may follow it
    }

    ParsedPlaceholders parsed = parse_placeholders(text);
    for (const auto& bad : parsed.malformed) {
        result.violations.push_back("malformed placeholder: " + bad);
    }

    std::string body = text;
    if (!body.empty() && body.back() == ';') body.pop_back();
    if (body.find(';') != std::string::npos) {
        result.violations.push_back("multiple statements");
    }
    if (find_keyword(body, "select") != 0) {
        result.violations.push_back("not a SELECT statement");
    }

    size_t from_pos = find_keyword(body, "from");
    if (from_pos == std::string::npos || find_keyword(body, "select") != 0) {
        if (from_pos == std::string::npos) result.violations.push_back("missing FROM clause");
    } else {
        std::string projection = body.substr(6, from_pos - 6);
        if (projection.find('*') != std::string::npos) {
            result.violations.push_back("star projection");
        }
        size_t where_pos = find_keyword(body, "where");
        if (parsed.placeholders.empty()) {
            result.violations.push_back("no placeholder in WHERE clause");
        } else if (where_pos == std::string::npos) {
            result.violations.push_back("no WHERE clause");
        } else {
            for (const auto& p : parsed.placeholders) {
                if (p.begin < where_pos) {
                    result.violations.push_back("placeholder outside WHERE clause: " + p.surface());
                }
            }
            // Projected attributes must not reappear in the predicate.
            std::string predicate = body.substr(where_pos + 5);
            for (const auto& p : parsed.placeholders) {
                size_t rel = p.begin > where_pos + 5 ? p.begin - (where_pos + 5) : 0;
                size_t len = p.end - p.begin;
                if (rel + len <= predicate.size()) predicate.replace(rel, len, std::string(len, ' '));
            }
            std::istringstream proj_in(projection);
            std::string item;
            while (std::getline(proj_in, item, ',')) {
                item = trim(item);
                size_t dot = item.rfind('.');
                if (dot != std::string::npos) item = item.substr(dot + 1);
                if (!item.empty() && find_keyword(predicate, item) != std::string::npos) {
                    result.violations.push_back("projected attribute in predicate: " + item);
                }
            }
        }
    }

    for (const auto& p : parsed.placeholders) {
        if (!schema.resolves(p.table, p.column)) {
            result.violations.push_back("unknown table or column in placeholder: " + p.surface());
        }
    }
    if (criteria.required_placeholder_count &&
        static_cast<int>(parsed.placeholders.size()) != *criteria.required_placeholder_count) {
        result.violations.push_back("wrong placeholder count");
    }

    if (result.violations.empty()) {
        SqlTemplate tpl;
        tpl.text = text;
        tpl.placeholders = parsed.placeholders;
        tpl.source_schema_key = schema_key_str;
        result.accepted = std::move(tpl);
    }
    return result;
}

std::string substitute(const std::string& template_text, const std::vector<Placeholder>& placeholders,
                       const std::vector<std::string>& values, bool escape_sql) {
    std::string out = template_text;
    // right to left so earlier spans stay valid
    for (size_t i = placeholders.size(); i-- > 0;) {
        std::string value = values.at(i);
        if (escape_sql) {
            std::string escaped;
            for (char c : value) {
                escaped.push_back(c);
                if (c == '\'') escaped.push_back('\'');
            }
            value = std::move(escaped);
        }
        out.replace(placeholders[i].begin, placeholders[i].end - placeholders[i].begin, value);
    }
    return out;
}

std::optional<std::vector<std::string>> check_singular_answer(const SqlTemplate& tpl,
                                                              const DatabaseHandle& db,
                                                              int sample_size) {
    std::vector<std::vector<std::string>> value_lists;
    for (const auto& p : tpl.placeholders) {
        value_lists.push_back(db.distinct_values(p.table, p.column));
        if (value_lists.back().empty()) return std::nullopt;  // vacuous pass
    }
    std::vector<size_t> idx(value_lists.size(), 0);
    int checked = 0;
    while (checked < sample_size) {
        std::vector<std::string> combo;
        combo.reserve(idx.size());
        for (size_t i = 0; i < idx.size(); ++i) combo.push_back(value_lists[i][idx[i]]);
        Answer a = db.execute_answer(substitute(tpl.text, tpl.placeholders, combo, true));
        if (a.cardinality > 1) return combo;
        ++checked;
        // advance the mixed-radix counter
        size_t i = idx.size();
        while (i-- > 0) {
            if (++idx[i] < value_lists[i].size()) break;
            idx[i] = 0;
            if (i == 0) return std::nullopt;  // exhausted the full product
        }
    }
    return std::nullopt;
}

std::string schema_key(const std::vector<std::string>& tables) {
    std::string out = "(";
    for (size_t i = 0; i < tables.size(); ++i) {
        if (i > 0) out += ", ";
        out += "'" + lower(tables[i]) + "'";
    }
    if (tables.size() == 1) out += ",";
    out += ")";
    return out;
}

std::string render_schema(const DatabaseSchema& schema, const std::vector<std::string>& tables) {
    std::string out;
    for (const auto& name : tables) {
        const TableSchema* t = schema.find_table(name);
        if (t == nullptr) throw Error(ErrorCode::UnknownTableOrColumn, name);
        out += "Table: " + t->name + "\n";
        out += "Columns:";
        for (const auto& a : t->attributes) {
            out += " " + a.name;
        }
        out += "\n";
        if (!t->primary_key.empty()) out += "Primary key: " + t->primary_key + "\n";
        for (const auto& fk : t->foreign_keys) {
            out += "Foreign key: " + t->name + "." + fk.local_attribute + " -> " + fk.foreign_table +
                   "." + fk.foreign_attribute + "\n";
        }
    }
    if (!out.empty() && out.back() == '\n') out.pop_back();
    return out;
}

std::string build_sql_generation_prompt(const DatabaseSchema& schema,
                                        const std::vector<std::string>& subset,
                                        const GenerationCriteria& criteria) {
    std::string requirements = criteria.instruction_text.empty()
                                   ? std::string(prompts::kCriteriaSqlOnePlaceholder)
                                   : criteria.instruction_text;
    return prompts::fill(prompts::kSqlTemplateGenerator,
                         {{"SPECIFIC_REQUIREMENTS", "- " + requirements},
                          {"GIVEN_SCHEMA", render_schema(schema, subset)}});
}

SqlGenerationResult generate_sql_templates(const DatabaseSchema& schema,
                                           const std::vector<std::string>& subset,
                                           const GenerationCriteria& criteria,
                                           CompletionBackend& backend, const DatabaseHandle& db,
                                           double temperature, int singular_sample_size) {
    std::string prompt = build_sql_generation_prompt(schema, subset, criteria);
    std::string reply = backend.complete(prompt, temperature);

    SqlGenerationResult result;
    std::set<std::string> seen;
    std::string key = schema_key(subset);
    std::vector<std::string> candidates = split_lines(reply);
    for (const auto& line : candidates) {
        if (!seen.insert(line).second) continue;
        ValidationResult v = validate_sql_template(line, schema, criteria, key);
        if (!v.ok()) {
            result.rejected.push_back({line, v.violations});
            continue;
        }
        if (auto offending = check_singular_answer(*v.accepted, db, singular_sample_size)) {
            std::string combo;
            for (const auto& value : *offending) combo += (combo.empty() ? "" : ", ") + value;
            result.rejected.push_back({line, {"non-singular answer for: " + combo}});
            continue;
        }
        result.templates.push_back(std::move(*v.accepted));
    }
    if (!candidates.empty() && result.templates.empty()) {
        throw Error(ErrorCode::AllCandidatesRejected,
                    "all " + std::to_string(candidates.size()) + " candidates rejected for " + key);
    }
    return result;
}

void export_sql_templates(const std::vector<SqlTemplate>& templates, const std::string& path) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& t : templates) {
        arr.push_back({{"text", t.text}, {"schema_key", t.source_schema_key}});
    }
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write templates: " + path);
    out << arr.dump(2) << '\n';
}

std::vector<SqlTemplate> import_sql_templates(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open templates: " + path);
    nlohmann::json arr;
    try {
        in >> arr;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::FormatError, path + ": " + e.what());
    }
    if (!arr.is_array()) throw Error(ErrorCode::FormatError, "template file must be an array");
    std::vector<SqlTemplate> out;
    for (const auto& item : arr) {
        SqlTemplate t;
        t.text = item.at("text").get<std::string>();
        t.source_schema_key = item.value("schema_key", std::string());
        t.placeholders = parse_placeholders_strict(t.text);
        out.push_back(std::move(t));
    }
    return out;
}

void export_text_templates(const std::vector<TextTemplate>& templates, const std::string& path) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& t : templates) {
        arr.push_back({{"text", t.text},
                       {"parent_sql", t.parent_sql},
                       {"linguistic_attr", t.linguistic_attr}});
    }
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write templates: " + path);
    out << arr.dump(2) << '\n';
}

std::vector<TextTemplate> import_text_templates(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open templates: " + path);
    nlohmann::json arr;
    try {
        in >> arr;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::FormatError, path + ": " + e.what());
    }
    std::vector<TextTemplate> out;
    if (arr.is_object()) {
        // compact map form: { "<sql template>": ["<paraphrase>", ...], ... }
        for (const auto& [parent, texts] : arr.items()) {
            if (!texts.is_array())
                throw Error(ErrorCode::FormatError, "map-form values must be arrays");
            for (const auto& text : texts) {
                TextTemplate t;
                t.text = text.get<std::string>();
                t.parent_sql = parent;
                t.placeholders = parse_placeholders_strict(t.text);
                out.push_back(std::move(t));
            }
        }
        return out;
    }
    if (!arr.is_array()) throw Error(ErrorCode::FormatError, "template file must be an array");
    for (const auto& item : arr) {
        TextTemplate t;
        t.text = item.at("text").get<std::string>();
        t.parent_sql = item.value("parent_sql", std::string());
        t.linguistic_attr = item.value("linguistic_attr", std::string());
        t.placeholders = parse_placeholders_strict(t.text);
        out.push_back(std::move(t));
    }
    return out;
}

std::string build_text_generation_prompt(const SqlTemplate& tpl, const GenerationCriteria& criteria,
                                         const std::vector<std::string>& exclusions) {
    std::map<std::string, std::string> slots = {
        {"CRITERIA", criteria.instruction_text},
        {"SQL_TEMPLATE", tpl.text},
        {"NUM_GENERATIONS", std::to_string(criteria.num_generations)},
    };
    if (exclusions.empty()) {
        return prompts::fill(prompts::kTextTemplateGenerator, slots);
    }
    std::string existing;
    for (const auto& e : exclusions) existing += e + "\n";
    if (!existing.empty()) existing.pop_back();
    slots["EXISTING_TEMPLATES"] = existing;
    return prompts::fill(prompts::kTextTemplateReprompt, slots);
}

std::vector<TextTemplate> collect_text_templates(const SqlTemplate& tpl,
                                                 const GenerationCriteria& criteria,
                                                 CompletionBackend& backend,
                                                 const TextGenerationOptions& options) {
    auto parent_set = placeholder_set(tpl.placeholders);
    std::vector<TextTemplate> accepted;
    std::set<std::string> seen;
    std::vector<std::string> exclusions;

    for (int attempt = 0; attempt < options.max_attempts; ++attempt) {
        std::string prompt = build_text_generation_prompt(tpl, criteria, exclusions);
        std::string reply = backend.complete(prompt, options.temperature);
        for (const auto& line : split_lines(reply)) {
            if (static_cast<int>(accepted.size()) >= criteria.num_generations) break;
            if (!seen.insert(line).second) continue;
            ParsedPlaceholders parsed = parse_placeholders(line);
            if (!parsed.malformed.empty()) continue;
            if (placeholder_set(parsed.placeholders) != parent_set) continue;
            TextTemplate t;
            t.text = line;
            t.parent_sql = tpl.text;
            t.linguistic_attr = criteria.linguistic_attr;
            t.placeholders = parsed.placeholders;
            accepted.push_back(std::move(t));
            exclusions.push_back(line);
        }
        if (static_cast<int>(accepted.size()) >= criteria.num_generations) break;
    }
    return accepted;
}

std::vector<TextTemplate> generate_text_templates(const SqlTemplate& tpl,
                                                  const GenerationCriteria& criteria,
                                                  CompletionBackend& backend,
                                                  const TextGenerationOptions& options) {
    std::vector<TextTemplate> out = collect_text_templates(tpl, criteria, backend, options);
    if (static_cast<int>(out.size()) < criteria.num_generations) {
        throw Error(ErrorCode::InsufficientValidCandidates,
                    "wanted " + std::to_string(criteria.num_generations) + ", got " +
                        std::to_string(out.size()) + " for: " + tpl.text);
    }
    return out;
}

}  // namespace grammar
