#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "linkalign/common.hpp"

namespace linkalign {

// Normalized qualified identifier. column_name absent means a table-level
// item. Equality and ordering are on the normalized fields.
struct SchemaItem {
    std::string db_id;
    std::string table_name;
    std::optional<std::string> column_name;

    static SchemaItem table(std::string_view db, std::string_view table);
    static SchemaItem column(std::string_view db, std::string_view table,
                             std::string_view column);

    bool is_column() const { return column_name.has_value(); }
    std::string qualified() const;

    auto operator<=>(const SchemaItem&) const = default;
};

struct ForeignRef {
    std::string db_id;
    std::string table_name;
    std::string column_name;
};

struct ColumnMeta {
    std::string db_id;
    std::string table_name;
    std::string column_name;
    std::string data_type;
    std::optional<std::string> description;
    std::vector<std::string> value_examples;
    bool is_primary_key = false;
    std::vector<ForeignRef> foreign_refs;

    SchemaItem item() const;
};

struct TableMeta {
    std::string db_id;
    std::string table_name;
    std::vector<ColumnMeta> columns;

    SchemaItem item() const;
    const ColumnMeta* find_column(std::string_view normalized_name) const;
};

// Immutable after load; safe for concurrent readers.
class DatabaseCatalog {
public:
    DatabaseCatalog() = default;

    void add_database(std::string db_id, std::vector<TableMeta> tables);
    void validate() const;  // uniqueness + foreign ref resolution

    const std::vector<std::string>& db_ids() const { return db_order_; }
    bool has_db(std::string_view db_id) const;
    const std::vector<TableMeta>& tables(std::string_view db_id) const;
    std::size_t table_count() const;
    std::size_t column_count() const;

    const TableMeta* find_table(std::string_view db_id, std::string_view table) const;
    const ColumnMeta* find_column(const SchemaItem& item) const;
    bool resolves(const SchemaItem& item) const;

    std::vector<SchemaItem> all_items() const;  // tables then columns, catalog order
    std::vector<const ColumnMeta*> all_columns() const;

private:
    std::vector<std::string> db_order_;
    std::map<std::string, std::vector<TableMeta>> databases_;
};

enum class CatalogFormat { spider_tables };

// Load a Spider-style schema description file (JSON array of databases).
// Unknown extra fields are ignored. An optional sidecar file maps
// "db.table.column" to sample values used for value_examples.
DatabaseCatalog load_catalog(const std::string& path,
                             CatalogFormat format = CatalogFormat::spider_tables,
                             const std::string& values_sidecar_path = "");

DatabaseCatalog parse_spider_tables(const std::string& json_text,
                                    const std::string& values_sidecar_json = "");

// Deterministic single-line rendering of one column, the text that gets
// embedded. max_examples bounds the value examples serialized.
std::string serialize_node(const ColumnMeta& col, std::size_t max_examples = 3);

// Stable id for a column node: "db.table.column" (normalized fields).
std::string node_id_for(const ColumnMeta& col);

struct PromptOptions {
    std::size_t char_budget = 0;  // 0 = unbounded
    std::size_t max_examples = 3;
};

// Grouped db -> table -> column rendering of a scope. Scope entries may be
// table- or column-level items; a table-level item pulls in all its columns.
// When over budget, value examples are dropped first, then descriptions,
// then trailing lines until the budget holds.
std::string schema_to_prompt(const DatabaseCatalog& catalog,
                             const std::vector<SchemaItem>& scope,
                             const PromptOptions& opts = {});

// Whole-database scope convenience.
std::string schema_to_prompt(const DatabaseCatalog& catalog,
                             const std::string& db_id,
                             const PromptOptions& opts = {});

}  // namespace linkalign
