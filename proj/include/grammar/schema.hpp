#pragma once

#include <memory>
#include <string>
#include <vector>

#include "grammar/answer.hpp"

namespace grammar {

enum class ValueKind { Text, Integer, Real, Date };

struct Attribute {
    std::string name;
    ValueKind kind = ValueKind::Text;
};

struct ForeignKey {
    std::string local_attribute;
    std::string foreign_table;
    std::string foreign_attribute;
};

struct TableSchema {
    std::string name;
    std::vector<Attribute> attributes;
    std::string primary_key;
    std::vector<ForeignKey> foreign_keys;

    bool has_attribute(const std::string& attr) const;
};

struct DatabaseSchema {
    std::vector<TableSchema> tables;

    const TableSchema* find_table(const std::string& name) const;  // case-insensitive
    bool resolves(const std::string& table, const std::string& column) const;
};

struct LoadedSchema {
    DatabaseSchema schema;
    // Tables skipped because of unsupported features (e.g. composite primary
    // keys), with a reason per table.
    std::vector<std::string> skipped;
};

// Read-only handle on a SQLite database. The locator is either a plain file
// path or a "sqlite:///path" URL. All statements executed through the handle
// are rejected unless they are SELECTs.
class DatabaseHandle {
public:
    explicit DatabaseHandle(const std::string& locator);
    ~DatabaseHandle();

    DatabaseHandle(const DatabaseHandle&) = delete;
    DatabaseHandle& operator=(const DatabaseHandle&) = delete;
    DatabaseHandle(DatabaseHandle&&) noexcept;
    DatabaseHandle& operator=(DatabaseHandle&&) noexcept;

    const std::string& locator() const { return locator_; }

    LoadedSchema load_schema() const;

    // SELECT DISTINCT "column" FROM "table" WHERE "column" IS NOT NULL,
    // sorted lexicographically on the serialized value; NULLs excluded.
    std::vector<std::string> distinct_values(const std::string& table, const std::string& column) const;

    // Executes an instantiated SELECT and serializes the full result set.
    Answer execute_answer(const std::string& sql) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    std::string locator_;
};

}  // namespace grammar
