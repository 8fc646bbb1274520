#include "linkalign/catalog.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace linkalign {

using nlohmann::json;

SchemaItem SchemaItem::table(std::string_view db, std::string_view table) {
    return SchemaItem{normalize_identifier(db), normalize_identifier(table), std::nullopt};
}

SchemaItem SchemaItem::column(std::string_view db, std::string_view table,
                              std::string_view column) {
    return SchemaItem{normalize_identifier(db), normalize_identifier(table),
                      normalize_identifier(column)};
}

std::string SchemaItem::qualified() const {
    std::string out = db_id + "." + table_name;
    if (column_name) out += "." + *column_name;
    return out;
}

SchemaItem ColumnMeta::item() const {
    return SchemaItem::column(db_id, table_name, column_name);
}

SchemaItem TableMeta::item() const {
    return SchemaItem::table(db_id, table_name);
}

const ColumnMeta* TableMeta::find_column(std::string_view normalized_name) const {
    for (const auto& col : columns) {
        if (col.column_name == normalized_name) return &col;
    }
    return nullptr;
}

void DatabaseCatalog::add_database(std::string db_id, std::vector<TableMeta> tables) {
    std::string norm = normalize_identifier(db_id);
    if (databases_.count(norm)) {
        throw ValidationError("duplicate db_id: " + norm);
    }
    db_order_.push_back(norm);
    databases_.emplace(std::move(norm), std::move(tables));
}

void DatabaseCatalog::validate() const {
    for (const auto& [db, tables] : databases_) {
        std::set<std::string> table_names;
        for (const auto& table : tables) {
            if (table.columns.empty()) {
                throw ValidationError("table without columns: " + db + "." + table.table_name);
            }
            if (!table_names.insert(table.table_name).second) {
                throw ValidationError("duplicate table: " + db + "." + table.table_name);
            }
            std::set<std::string> col_names;
            for (const auto& col : table.columns) {
                if (!col_names.insert(col.column_name).second) {
                    throw ValidationError("duplicate column: " + db + "." + table.table_name +
                                          "." + col.column_name);
                }
                for (const auto& ref : col.foreign_refs) {
                    SchemaItem target = SchemaItem::column(ref.db_id, ref.table_name, ref.column_name);
                    if (!resolves(target)) {
                        throw ValidationError("dangling foreign key from " +
                                              col.item().qualified() + " to " + target.qualified());
                    }
                }
            }
        }
    }
}

bool DatabaseCatalog::has_db(std::string_view db_id) const {
    return databases_.count(normalize_identifier(db_id)) > 0;
}

const std::vector<TableMeta>& DatabaseCatalog::tables(std::string_view db_id) const {
    auto it = databases_.find(normalize_identifier(db_id));
    if (it == databases_.end()) {
        throw ValidationError("unknown db_id: " + std::string(db_id));
    }
    return it->second;
}

std::size_t DatabaseCatalog::table_count() const {
    std::size_t n = 0;
    for (const auto& [db, tables] : databases_) n += tables.size();
    return n;
}

std::size_t DatabaseCatalog::column_count() const {
    std::size_t n = 0;
    for (const auto& [db, tables] : databases_) {
        for (const auto& table : tables) n += table.columns.size();
    }
    return n;
}

const TableMeta* DatabaseCatalog::find_table(std::string_view db_id,
                                             std::string_view table) const {
    auto it = databases_.find(normalize_identifier(db_id));
    if (it == databases_.end()) return nullptr;
    std::string norm = normalize_identifier(table);
    for (const auto& t : it->second) {
        if (t.table_name == norm) return &t;
    }
    return nullptr;
}

const ColumnMeta* DatabaseCatalog::find_column(const SchemaItem& item) const {
    if (!item.column_name) return nullptr;
    const TableMeta* table = find_table(item.db_id, item.table_name);
    if (!table) return nullptr;
    return table->find_column(*item.column_name);
}

bool DatabaseCatalog::resolves(const SchemaItem& item) const {
    if (item.column_name) return find_column(item) != nullptr;
    return find_table(item.db_id, item.table_name) != nullptr;
}

std::vector<SchemaItem> DatabaseCatalog::all_items() const {
    std::vector<SchemaItem> items;
    for (const auto& db : db_order_) {
        for (const auto& table : databases_.at(db)) {
            items.push_back(table.item());
            for (const auto& col : table.columns) items.push_back(col.item());
        }
    }
    return items;
}

std::vector<const ColumnMeta*> DatabaseCatalog::all_columns() const {
    std::vector<const ColumnMeta*> cols;
    for (const auto& db : db_order_) {
        for (const auto& table : databases_.at(db)) {
            for (const auto& col : table.columns) cols.push_back(&col);
        }
    }
    return cols;
}

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

DatabaseCatalog parse_spider_tables(const std::string& json_text,
                                    const std::string& values_sidecar_json) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("catalog file is not valid JSON: ") + e.what());
    }
    if (!doc.is_array()) throw ParseError("catalog file must be a JSON array of databases");

    json values = json::object();
    if (!values_sidecar_json.empty()) {
        try {
            values = json::parse(values_sidecar_json);
        } catch (const json::exception& e) {
            throw ParseError(std::string("values sidecar is not valid JSON: ") + e.what());
        }
    }

    DatabaseCatalog catalog;
    for (std::size_t di = 0; di < doc.size(); ++di) {
        const json& db = doc[di];
        auto record = "database record #" + std::to_string(di);
        if (!db.is_object() || !db.contains("db_id")) {
            throw ParseError(record + ": missing db_id");
        }
        std::string db_id = normalize_identifier(db["db_id"].get<std::string>());
        if (!db.contains("table_names_original") || !db.contains("column_names_original")) {
            throw ParseError(record + " (" + db_id +
                             "): missing table_names_original/column_names_original");
        }

        std::vector<std::string> table_names;
        for (const auto& t : db["table_names_original"]) {
            table_names.push_back(normalize_identifier(t.get<std::string>()));
        }

        const json& cols = db["column_names_original"];
        const json types = db.value("column_types", json::array());
        std::vector<TableMeta> tables(table_names.size());
        for (std::size_t i = 0; i < table_names.size(); ++i) {
            tables[i].db_id = db_id;
            tables[i].table_name = table_names[i];
        }

        // global column index -> (table index, column name); index 0 is the
        // synthetic [-1, "*"] entry in Spider files.
        std::vector<std::pair<int, std::string>> col_index;
        for (std::size_t ci = 0; ci < cols.size(); ++ci) {
            const json& entry = cols[ci];
            if (!entry.is_array() || entry.size() != 2) {
                throw ParseError(record + " (" + db_id + "): malformed column entry #" +
                                 std::to_string(ci));
            }
            int table_idx = entry[0].get<int>();
            std::string name = normalize_identifier(entry[1].get<std::string>());
            col_index.emplace_back(table_idx, name);
            if (table_idx < 0) continue;  // the "*" placeholder
            if (table_idx >= static_cast<int>(tables.size())) {
                throw ParseError(record + " (" + db_id + "): column #" + std::to_string(ci) +
                                 " references table index " + std::to_string(table_idx));
            }
            ColumnMeta col;
            col.db_id = db_id;
            col.table_name = table_names[static_cast<std::size_t>(table_idx)];
            col.column_name = name;
            if (ci < types.size()) col.data_type = to_lower(types[ci].get<std::string>());
            std::string key = db_id + "." + col.table_name + "." + col.column_name;
            if (values.contains(key)) {
                for (const auto& v : values[key]) {
                    col.value_examples.push_back(v.is_string() ? v.get<std::string>() : v.dump());
                }
            }
            tables[static_cast<std::size_t>(table_idx)].columns.push_back(std::move(col));
        }

        auto column_at = [&](std::size_t idx) -> ColumnMeta* {
            if (idx >= col_index.size() || col_index[idx].first < 0) return nullptr;
            TableMeta& table = tables[static_cast<std::size_t>(col_index[idx].first)];
            for (auto& col : table.columns) {
                if (col.column_name == col_index[idx].second) return &col;
            }
            return nullptr;
        };

        for (const auto& pk : db.value("primary_keys", json::array())) {
            // Bird files sometimes nest composite keys as arrays.
            std::vector<std::size_t> idxs;
            if (pk.is_array()) {
                for (const auto& p : pk) idxs.push_back(p.get<std::size_t>());
            } else {
                idxs.push_back(pk.get<std::size_t>());
            }
            for (std::size_t idx : idxs) {
                if (ColumnMeta* col = column_at(idx)) col->is_primary_key = true;
            }
        }

        for (const auto& fk : db.value("foreign_keys", json::array())) {
            if (!fk.is_array() || fk.size() != 2) {
                throw ParseError(record + " (" + db_id + "): malformed foreign key entry");
            }
            ColumnMeta* from = column_at(fk[0].get<std::size_t>());
            ColumnMeta* to = column_at(fk[1].get<std::size_t>());
            if (!from || !to) {
                throw ParseError(record + " (" + db_id + "): foreign key references column "
                                 "index outside the schema");
            }
            from->foreign_refs.push_back({db_id, to->table_name, to->column_name});
        }

        catalog.add_database(db_id, std::move(tables));
    }

    catalog.validate();
    return catalog;
}

DatabaseCatalog load_catalog(const std::string& path, CatalogFormat format,
                             const std::string& values_sidecar_path) {
    (void)format;  // spider_tables is the only format
    std::string sidecar;
    if (!values_sidecar_path.empty()) sidecar = read_file(values_sidecar_path);
    return parse_spider_tables(read_file(path), sidecar);
}

std::string serialize_node(const ColumnMeta& col, std::size_t max_examples) {
    std::ostringstream out;
    out << "db: " << col.db_id << " | table: " << col.table_name
        << " | column: " << col.column_name << " | type: "
        << (col.data_type.empty() ? "n/a" : col.data_type) << " | desc: "
        << (col.description && !col.description->empty() ? *col.description : "n/a")
        << " | examples: ";
    if (col.value_examples.empty()) {
        out << "n/a";
    } else {
        std::size_t n = std::min(max_examples, col.value_examples.size());
        for (std::size_t i = 0; i < n; ++i) {
            if (i) out << ", ";
            out << col.value_examples[i];
        }
    }
    return out.str();
}

std::string node_id_for(const ColumnMeta& col) {
    return col.item().qualified();
}

namespace {

std::string render_column_line(const ColumnMeta& col, bool with_desc, bool with_examples,
                               std::size_t max_examples) {
    std::ostringstream out;
    out << "    - " << col.column_name << " ("
        << (col.data_type.empty() ? "n/a" : col.data_type) << ")";
    if (col.is_primary_key) out << " [pk]";
    for (const auto& ref : col.foreign_refs) {
        out << " [fk -> " << ref.table_name << "." << ref.column_name << "]";
    }
    if (with_desc) {
        out << " | desc: "
            << (col.description && !col.description->empty() ? *col.description : "n/a");
    }
    if (with_examples && !col.value_examples.empty()) {
        out << " | examples: ";
        std::size_t n = std::min(max_examples, col.value_examples.size());
        for (std::size_t i = 0; i < n; ++i) {
            if (i) out << ", ";
            out << col.value_examples[i];
        }
    }
    return out.str();
}

struct ScopeSelection {
    // db -> table -> selected column names; empty column set means whole table
    std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::set<std::string>>>>> groups;
};

}  // namespace

std::string schema_to_prompt(const DatabaseCatalog& catalog,
                             const std::vector<SchemaItem>& scope,
                             const PromptOptions& opts) {
    if (scope.empty()) throw ValidationError("schema_to_prompt: empty scope");

    std::map<std::string, std::map<std::string, std::set<std::string>>> selected;
    std::map<std::string, std::set<std::string>> whole_tables;
    for (const auto& raw : scope) {
        SchemaItem item = raw.column_name
                              ? SchemaItem::column(raw.db_id, raw.table_name, *raw.column_name)
                              : SchemaItem::table(raw.db_id, raw.table_name);
        if (!catalog.resolves(item)) {
            throw ValidationError("schema_to_prompt: unresolvable scope item " + item.qualified());
        }
        if (item.column_name) {
            selected[item.db_id][item.table_name].insert(*item.column_name);
        } else {
            whole_tables[item.db_id].insert(item.table_name);
            selected[item.db_id][item.table_name];
        }
    }

    auto render = [&](bool with_desc, bool with_examples) {
        std::ostringstream out;
        for (const auto& db : catalog.db_ids()) {
            auto db_it = selected.find(db);
            if (db_it == selected.end()) continue;
            out << "database: " << db << "\n";
            for (const auto& table : catalog.tables(db)) {
                auto t_it = db_it->second.find(table.table_name);
                if (t_it == db_it->second.end()) continue;
                out << "  table: " << table.table_name << "\n";
                bool whole = whole_tables.count(db) &&
                             whole_tables.at(db).count(table.table_name);
                for (const auto& col : table.columns) {
                    if (!whole && !t_it->second.count(col.column_name)) continue;
                    out << render_column_line(col, with_desc, with_examples,
                                              opts.max_examples)
                        << "\n";
                }
            }
        }
        return out.str();
    };

    std::string text = render(true, true);
    if (opts.char_budget == 0 || text.size() <= opts.char_budget) return text;
    text = render(true, false);
    if (text.size() <= opts.char_budget) return text;
    text = render(false, false);
    if (text.size() <= opts.char_budget) return text;
    // Identifiers are never elided per line; cut whole trailing lines instead.
    std::size_t cut = text.rfind('\n', opts.char_budget);
    return cut == std::string::npos ? text.substr(0, opts.char_budget)
                                    : text.substr(0, cut + 1);
}

std::string schema_to_prompt(const DatabaseCatalog& catalog, const std::string& db_id,
                             const PromptOptions& opts) {
    std::vector<SchemaItem> scope;
    for (const auto& table : catalog.tables(db_id)) scope.push_back(table.item());
    return schema_to_prompt(catalog, scope, opts);
}

}  // namespace linkalign
