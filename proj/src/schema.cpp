#include "grammar/schema.hpp"

#include <sqlite3.h>

#include <algorithm>
#include <cctype>
#include <filesystem>

#include "grammar/error.hpp"

namespace grammar {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::ConnectionFailed: return "ConnectionFailed";
        case ErrorCode::UnsupportedSchemaFeature: return "UnsupportedSchemaFeature";
        case ErrorCode::UnknownTableOrColumn: return "UnknownTableOrColumn";
        case ErrorCode::SqlExecutionError: return "SqlExecutionError";
        case ErrorCode::NonSelectStatement: return "NonSelectStatement";
        case ErrorCode::MalformedPlaceholder: return "MalformedPlaceholder";
        case ErrorCode::BackendUnavailable: return "BackendUnavailable";
        case ErrorCode::AllCandidatesRejected: return "AllCandidatesRejected";
        case ErrorCode::InsufficientValidCandidates: return "InsufficientValidCandidates";
        case ErrorCode::EmptyCorpus: return "EmptyCorpus";
        case ErrorCode::FirstChunkTooLarge: return "FirstChunkTooLarge";
        case ErrorCode::JudgeParseFailure: return "JudgeParseFailure";
        case ErrorCode::NoStatementsExtracted: return "NoStatementsExtracted";
        case ErrorCode::ComparisonParseFailure: return "ComparisonParseFailure";
        case ErrorCode::UndefinedPrecision: return "UndefinedPrecision";
        case ErrorCode::UndefinedRecall: return "UndefinedRecall";
        case ErrorCode::UnjudgedRecord: return "UnjudgedRecord";
        case ErrorCode::EmptyTagList: return "EmptyTagList";
        case ErrorCode::AllGroupsGap: return "AllGroupsGap";
        case ErrorCode::InsufficientAttributes: return "InsufficientAttributes";
        case ErrorCode::MisalignedInputs: return "MisalignedInputs";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::FormatError: return "FormatError";
    }
    return "Error";
}

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::string strip_locator(const std::string& locator) {
    const std::string prefix = "sqlite:///";
    if (locator.rfind(prefix, 0) == 0) return locator.substr(prefix.size());
    return locator;
}

std::string quote_ident(const std::string& ident) {
    std::string out = "\"";
    for (char c : ident) {
        out.push_back(c);
        if (c == '"') out.push_back('"');
    }
    out += "\"";
    return out;
}

ValueKind kind_from_decltype(const std::string& decl) {
    std::string d = lower(decl);
    if (d.find("int") != std::string::npos) return ValueKind::Integer;
    if (d.find("real") != std::string::npos || d.find("floa") != std::string::npos ||
        d.find("doub") != std::string::npos)
        return ValueKind::Real;
    if (d.find("date") != std::string::npos || d.find("time") != std::string::npos)
        return ValueKind::Date;
    return ValueKind::Text;
}

struct Stmt {
    sqlite3_stmt* stmt = nullptr;
    ~Stmt() {
        if (stmt) sqlite3_finalize(stmt);
    }
};

bool is_select(const std::string& sql) {
    size_t i = 0;
    while (i < sql.size() && std::isspace(static_cast<unsigned char>(sql[i]))) ++i;
    return lower(sql.substr(i, 6)) == "select";
}

}  // namespace

bool TableSchema::has_attribute(const std::string& attr) const {
    std::string want = lower(attr);
    return std::any_of(attributes.begin(), attributes.end(),
                       [&](const Attribute& a) { return lower(a.name) == want; });
}

const TableSchema* DatabaseSchema::find_table(const std::string& name) const {
    std::string want = lower(name);
    for (const auto& t : tables) {
        if (lower(t.name) == want) return &t;
    }
    return nullptr;
}

bool DatabaseSchema::resolves(const std::string& table, const std::string& column) const {
    const TableSchema* t = find_table(table);
    return t != nullptr && t->has_attribute(column);
}

struct DatabaseHandle::Impl {
    sqlite3* db = nullptr;
    ~Impl() {
        if (db) sqlite3_close(db);
    }

    void prepare(Stmt& s, const std::string& sql) const {
        if (sqlite3_prepare_v2(db, sql.c_str(), -1, &s.stmt, nullptr) != SQLITE_OK) {
            throw Error(ErrorCode::SqlExecutionError, std::string(sqlite3_errmsg(db)) + " in: " + sql);
        }
    }
};

DatabaseHandle::DatabaseHandle(const std::string& locator)
    : impl_(std::make_unique<Impl>()), locator_(locator) {
    std::string path = strip_locator(locator);
    if (!std::filesystem::exists(path)) {
        throw Error(ErrorCode::ConnectionFailed, "database file not found: " + path);
    }
    if (sqlite3_open_v2(path.c_str(), &impl_->db, SQLITE_OPEN_READONLY, nullptr) != SQLITE_OK) {
        std::string msg = impl_->db ? sqlite3_errmsg(impl_->db) : "unknown error";
        throw Error(ErrorCode::ConnectionFailed, msg + ": " + path);
    }
}

DatabaseHandle::~DatabaseHandle() = default;
DatabaseHandle::DatabaseHandle(DatabaseHandle&&) noexcept = default;
DatabaseHandle& DatabaseHandle::operator=(DatabaseHandle&&) noexcept = default;

LoadedSchema DatabaseHandle::load_schema() const {
    LoadedSchema out;

    Stmt tables;
    impl_->prepare(tables,
                   "SELECT name FROM sqlite_master WHERE type='table' "
                   "AND name NOT LIKE 'sqlite_%' ORDER BY name");
    std::vector<std::string> names;
    while (sqlite3_step(tables.stmt) == SQLITE_ROW) {
        names.emplace_back(reinterpret_cast<const char*>(sqlite3_column_text(tables.stmt, 0)));
    }

    for (const auto& name : names) {
        TableSchema table;
        table.name = name;

        Stmt info;
        impl_->prepare(info, "PRAGMA table_info(" + quote_ident(name) + ")");
        int pk_count = 0;
        while (sqlite3_step(info.stmt) == SQLITE_ROW) {
            Attribute attr;
            attr.name = reinterpret_cast<const char*>(sqlite3_column_text(info.stmt, 1));
            const char* decl = reinterpret_cast<const char*>(sqlite3_column_text(info.stmt, 2));
            attr.kind = kind_from_decltype(decl ? decl : "");
            if (sqlite3_column_int(info.stmt, 5) > 0) {
                ++pk_count;
                table.primary_key = attr.name;
            }
            table.attributes.push_back(std::move(attr));
        }
        if (pk_count > 1) {
            out.skipped.push_back(name + ": composite primary key");
            continue;
        }

        Stmt fks;
        impl_->prepare(fks, "PRAGMA foreign_key_list(" + quote_ident(name) + ")");
        while (sqlite3_step(fks.stmt) == SQLITE_ROW) {
            ForeignKey fk;
            fk.foreign_table = reinterpret_cast<const char*>(sqlite3_column_text(fks.stmt, 2));
            fk.local_attribute = reinterpret_cast<const char*>(sqlite3_column_text(fks.stmt, 3));
            const char* to = reinterpret_cast<const char*>(sqlite3_column_text(fks.stmt, 4));
            fk.foreign_attribute = to ? to : "";
            table.foreign_keys.push_back(std::move(fk));
        }
        std::sort(table.foreign_keys.begin(), table.foreign_keys.end(),
                  [](const ForeignKey& a, const ForeignKey& b) {
                      return a.local_attribute < b.local_attribute;
                  });

        out.schema.tables.push_back(std::move(table));
    }
    return out;
}

std::vector<std::string> DatabaseHandle::distinct_values(const std::string& table,
                                                         const std::string& column) const {
    LoadedSchema loaded = load_schema();
    const TableSchema* t = loaded.schema.find_table(table);
    if (t == nullptr || !t->has_attribute(column)) {
        throw Error(ErrorCode::UnknownTableOrColumn, table + "." + column);
    }

    Stmt stmt;
    impl_->prepare(stmt, "SELECT DISTINCT " + quote_ident(column) + " FROM " + quote_ident(table) +
                             " WHERE " + quote_ident(column) + " IS NOT NULL");
    std::vector<std::string> values;
    while (sqlite3_step(stmt.stmt) == SQLITE_ROW) {
        const unsigned char* text = sqlite3_column_text(stmt.stmt, 0);
        values.emplace_back(text ? reinterpret_cast<const char*>(text) : "");
    }
    std::sort(values.begin(), values.end());
    return values;
}

Answer DatabaseHandle::execute_answer(const std::string& sql) const {
    if (!is_select(sql)) {
        throw Error(ErrorCode::NonSelectStatement, sql);
    }
    Stmt stmt;
    impl_->prepare(stmt, sql);

    std::vector<std::vector<Value>> rows;
    int rc;
    while ((rc = sqlite3_step(stmt.stmt)) == SQLITE_ROW) {
        std::vector<Value> row;
        int cols = sqlite3_column_count(stmt.stmt);
        for (int c = 0; c < cols; ++c) {
            switch (sqlite3_column_type(stmt.stmt, c)) {
                case SQLITE_INTEGER:
                    row.push_back(Value::from_integer(sqlite3_column_int64(stmt.stmt, c)));
                    break;
                case SQLITE_FLOAT:
                    row.push_back(Value::from_real(sqlite3_column_double(stmt.stmt, c)));
                    break;
                case SQLITE_NULL:
                    row.push_back(Value::null());
                    break;
                default:
                    row.push_back(Value::from_text(
                        reinterpret_cast<const char*>(sqlite3_column_text(stmt.stmt, c))));
            }
        }
        rows.push_back(std::move(row));
    }
    if (rc != SQLITE_DONE) {
        throw Error(ErrorCode::SqlExecutionError, std::string(sqlite3_errmsg(impl_->db)) + " in: " + sql);
    }
    return Answer::from_rows(rows);
}

}  // namespace grammar
