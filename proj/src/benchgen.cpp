#include "linkalign/benchgen.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "linkalign/extractor.hpp"
#include "linkalign/prompts.hpp"

namespace linkalign {

using nlohmann::json;

namespace {

std::string render_db_schema(const std::vector<TableMeta>& db) {
    std::ostringstream out;
    for (const auto& table : db) {
        out << "table: " << table.table_name << "\n";
        for (const auto& col : table.columns) {
            out << "  - " << col.column_name << " ("
                << (col.data_type.empty() ? "n/a" : col.data_type) << ")\n";
        }
    }
    return out.str();
}

const TableMeta* find_table_in(const std::vector<TableMeta>& db, const std::string& name) {
    for (const auto& table : db) {
        if (table.table_name == name) return &table;
    }
    return nullptr;
}

}  // namespace

SchemaSubset extract_subset(const std::vector<TableMeta>& db, ChatBackend& backend) {
    if (db.empty()) throw ValidationError("extract_subset: empty database");

    ChatRequest req;
    req.tag = "benchgen/subset";
    req.messages.push_back(
        {Role::user, prompts::render(prompts::get(prompts::kBenchSubset),
                                     {{"schema", render_db_schema(db)}})});
    ExtractionProposal proposal = parse_proposal(backend.complete(req));

    SchemaSubset subset;
    std::string db_id = db.front().db_id;
    std::set<std::string> kept_tables;
    for (const auto& table : proposal.tables) {
        if (find_table_in(db, table)) {
            subset.items.push_back(SchemaItem::table(db_id, table));
            kept_tables.insert(table);
        } else {
            subset.warnings.push_back("dropped nonexistent table: " + table);
        }
    }
    std::size_t kept_columns = 0;
    for (const auto& column : proposal.columns) {
        auto dot = column.find('.');
        if (dot == std::string::npos) continue;
        std::string table = column.substr(0, dot);
        std::string name = column.substr(dot + 1);
        const TableMeta* meta = find_table_in(db, table);
        if (meta && meta->find_column(name)) {
            subset.items.push_back(SchemaItem::column(db_id, table, name));
            ++kept_columns;
        } else {
            subset.warnings.push_back("dropped nonexistent column: " + column);
        }
    }
    if (subset.items.empty()) {
        throw ValidationError("extract_subset: no recoverable subset for db " + db_id);
    }

    std::size_t total_columns = 0;
    for (const auto& table : db) total_columns += table.columns.size();
    if (kept_tables.size() == db.size() && kept_columns == total_columns) {
        subset.warnings.push_back("subset equals the whole database");
    }
    return subset;
}

namespace {

// Addition lines from the expansion prompt:
//   table: <name> | columns: a (type), b (type)
//   column: <table>.<name> (type)
struct Additions {
    std::vector<TableMeta> new_tables;
    std::vector<ColumnMeta> new_columns;
};

std::pair<std::string, std::string> split_name_and_type(const std::string& fragment) {
    std::string name = fragment, type;
    auto lp = fragment.find('(');
    auto rp = fragment.rfind(')');
    if (lp != std::string::npos && rp != std::string::npos && rp > lp) {
        name = fragment.substr(0, lp);
        type = to_lower(trim(fragment.substr(lp + 1, rp - lp - 1)));
    }
    return {normalize_identifier(name), type};
}

Additions parse_additions(const std::string& text, const std::string& db_id) {
    Additions additions;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        std::string lower = to_lower(line);
        if (auto pos = lower.find("table:"); pos != std::string::npos &&
                                             lower.find("| columns:") != std::string::npos) {
            auto bar = line.find('|', pos);
            std::string table_name =
                normalize_identifier(line.substr(pos + 6, bar - pos - 6));
            if (table_name.empty()) continue;
            TableMeta table;
            table.db_id = db_id;
            table.table_name = table_name;
            auto cols_pos = lower.find("columns:", bar);
            std::istringstream cols(line.substr(cols_pos + 8));
            std::string fragment;
            while (std::getline(cols, fragment, ',')) {
                auto [name, type] = split_name_and_type(trim(fragment));
                if (name.empty()) continue;
                ColumnMeta col;
                col.db_id = db_id;
                col.table_name = table_name;
                col.column_name = name;
                col.data_type = type;
                table.columns.push_back(std::move(col));
            }
            if (!table.columns.empty()) additions.new_tables.push_back(std::move(table));
        } else if (auto cpos = lower.find("column:"); cpos != std::string::npos) {
            auto [qualified, type] = split_name_and_type(trim(line.substr(cpos + 7)));
            auto dot = qualified.find('.');
            if (dot == std::string::npos) continue;
            ColumnMeta col;
            col.db_id = db_id;
            col.table_name = qualified.substr(0, dot);
            col.column_name = qualified.substr(dot + 1);
            col.data_type = type;
            additions.new_columns.push_back(std::move(col));
        }
    }
    return additions;
}

}  // namespace

ExpandOutcome expand_schema(const std::vector<TableMeta>& db, const SchemaSubset& subset,
                            ChatBackend& backend) {
    if (db.empty()) throw ValidationError("expand_schema: empty database");
    std::string db_id = db.front().db_id;
    for (const auto& item : subset.items) {
        const TableMeta* table = find_table_in(db, item.table_name);
        if (!table || (item.column_name && !table->find_column(*item.column_name))) {
            throw ValidationError("expand_schema: subset item outside db: " + item.qualified());
        }
    }

    ChatRequest req;
    req.tag = "benchgen/expand";
    req.messages.push_back(
        {Role::user, prompts::render(prompts::get(prompts::kBenchExpand),
                                     {{"schema", render_db_schema(db)}})});
    Additions additions = parse_additions(backend.complete(req), db_id);

    ExpandOutcome outcome;
    outcome.tables = db;  // originals first, item for item

    for (auto& table : additions.new_tables) {
        if (find_table_in(outcome.tables, table.table_name)) {
            outcome.warnings.push_back("dropped colliding table: " + table.table_name);
            continue;
        }
        outcome.tables.push_back(std::move(table));
    }
    for (auto& col : additions.new_columns) {
        auto it = std::find_if(outcome.tables.begin(), outcome.tables.end(),
                               [&](const TableMeta& t) { return t.table_name == col.table_name; });
        if (it == outcome.tables.end()) {
            outcome.warnings.push_back("dropped column for unknown table: " +
                                       col.table_name + "." + col.column_name);
            continue;
        }
        if (it->find_column(col.column_name)) {
            outcome.warnings.push_back("dropped colliding column: " + col.table_name + "." +
                                       col.column_name);
            continue;
        }
        it->columns.push_back(std::move(col));
    }
    return outcome;
}

GenPair modify_query(const Example& example, const std::vector<std::string>& synonym_db_ids,
                     const DatabaseCatalog& catalog, ChatBackend& backend) {
    if (synonym_db_ids.empty()) {
        throw ValidationError("modify_query: at least one synonym db required");
    }

    std::string synonyms;
    for (std::size_t i = 0; i < synonym_db_ids.size(); ++i) {
        if (i) synonyms += ", ";
        synonyms += synonym_db_ids[i];
    }
    ChatRequest req;
    req.tag = "benchgen/modify";
    req.messages.push_back(
        {Role::user, prompts::render(prompts::get(prompts::kBenchModify),
                                     {{"question", example.question},
                                      {"synonyms", synonyms}})});
    std::string draft = trim(backend.complete(req));

    GenPair pair;
    pair.original = example;
    pair.modified_question = draft;
    if (draft.empty()) {
        pair.status = PairStatus::rejected;
        pair.notes = "empty model output";
        return pair;
    }

    // Identifier token -> owning dbs, over tables and columns.
    std::map<std::string, std::set<std::string>> owners;
    for (const auto& db : catalog.db_ids()) {
        for (const auto& table : catalog.tables(db)) {
            owners[table.table_name].insert(db);
            for (const auto& col : table.columns) owners[col.column_name].insert(db);
        }
    }
    for (const auto& token : tokenize_words(draft)) {
        auto it = owners.find(token);
        if (it != owners.end() && it->second.size() == 1) {
            pair.status = PairStatus::rejected;
            pair.notes = "draft contains identifier unique to db " + *it->second.begin() +
                         ": " + token;
            return pair;
        }
    }
    pair.status = PairStatus::draft;
    return pair;
}

FilterOutcome filter_pairs(std::vector<GenPair> pairs) {
    FilterOutcome outcome;
    if (pairs.size() < 20) {
        outcome.skipped = true;
        outcome.retained = std::move(pairs);
        return outcome;
    }
    std::size_t n = pairs.size();
    std::size_t drop_long = n / 10;  // floor(0.10 N)
    std::size_t drop_short = n / 20; // floor(0.05 N)

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return pairs[a].modified_question.size() < pairs[b].modified_question.size();
    });

    std::set<std::size_t> removed;
    for (std::size_t i = 0; i < drop_short; ++i) removed.insert(order[i]);
    for (std::size_t i = 0; i < drop_long; ++i) removed.insert(order[n - 1 - i]);

    for (std::size_t i = 0; i < n; ++i) {
        if (!removed.count(i)) outcome.retained.push_back(std::move(pairs[i]));
    }
    return outcome;
}

namespace {

bool verdict_aligned(const std::string& text) {
    std::string lower = to_lower(text);
    if (lower.find("mismatch") != std::string::npos) return false;
    return lower.find("aligned") != std::string::npos;
}

}  // namespace

GenPair verify_pair(GenPair pair, ChatBackend& backend) {
    if (pair.status != PairStatus::draft) {
        throw ValidationError("verify_pair: pair is not a draft");
    }

    auto ask_verdict = [&](int attempt) {
        ChatRequest req;
        req.tag = "benchgen/verify/" + std::to_string(attempt);
        req.messages.push_back(
            {Role::user, prompts::render(prompts::get(prompts::kBenchVerify),
                                         {{"question", pair.modified_question},
                                          {"sql", pair.original.gold_sql}})});
        return verdict_aligned(backend.complete(req));
    };

    if (ask_verdict(1)) {
        pair.status = PairStatus::verified;
        return pair;
    }

    // Single correction opportunity.
    ChatRequest correct_req;
    correct_req.tag = "benchgen/correct";
    correct_req.messages.push_back(
        {Role::user, prompts::render(prompts::get(prompts::kBenchCorrect),
                                     {{"question", pair.modified_question},
                                      {"sql", pair.original.gold_sql}})});
    std::string corrected = trim(backend.complete(correct_req));
    if (corrected.empty()) {
        pair.status = PairStatus::rejected;
        pair.notes = "correction produced empty output";
        return pair;
    }
    pair.modified_question = corrected;
    pair.notes = "corrected once";
    if (ask_verdict(2)) {
        pair.status = PairStatus::verified;
    } else {
        pair.status = PairStatus::rejected;
        pair.notes = "mismatch after one correction";
    }
    return pair;
}

std::string render_catalog_file(const std::vector<std::vector<TableMeta>>& databases) {
    json out = json::array();
    for (const auto& db : databases) {
        if (db.empty()) continue;
        json rec;
        rec["db_id"] = db.front().db_id;
        json table_names = json::array();
        json column_names = json::array();
        json column_types = json::array();
        json primary_keys = json::array();
        json foreign_keys = json::array();
        column_names.push_back({-1, "*"});
        column_types.push_back("text");

        std::map<std::string, int> column_index;  // "table.column" -> global index
        int table_idx = 0;
        for (const auto& table : db) {
            table_names.push_back(table.table_name);
            for (const auto& col : table.columns) {
                column_index[table.table_name + "." + col.column_name] =
                    static_cast<int>(column_names.size());
                column_names.push_back({table_idx, col.column_name});
                column_types.push_back(col.data_type.empty() ? "text" : col.data_type);
                if (col.is_primary_key) {
                    primary_keys.push_back(static_cast<int>(column_names.size()) - 1);
                }
            }
            ++table_idx;
        }
        for (const auto& table : db) {
            for (const auto& col : table.columns) {
                for (const auto& ref : col.foreign_refs) {
                    auto from = column_index.find(table.table_name + "." + col.column_name);
                    auto to = column_index.find(ref.table_name + "." + ref.column_name);
                    if (from != column_index.end() && to != column_index.end()) {
                        foreign_keys.push_back({from->second, to->second});
                    }
                }
            }
        }
        rec["table_names_original"] = table_names;
        rec["column_names_original"] = column_names;
        rec["column_types"] = column_types;
        rec["primary_keys"] = primary_keys;
        rec["foreign_keys"] = foreign_keys;
        out.push_back(std::move(rec));
    }
    return out.dump(2);
}

std::string render_question_file(const std::vector<GenPair>& pairs) {
    json out = json::array();
    for (const auto& pair : pairs) {
        json rec;
        rec["example_id"] = pair.original.example_id;
        rec["question"] = pair.modified_question;
        rec["query"] = pair.original.gold_sql;
        rec["db_id"] = pair.original.gold_db;
        rec["status"] = pair.status == PairStatus::verified
                            ? "verified"
                            : pair.status == PairStatus::draft ? "draft" : "rejected";
        if (!pair.notes.empty()) rec["notes"] = pair.notes;
        out.push_back(std::move(rec));
    }
    return out.dump(2);
}

}  // namespace linkalign
