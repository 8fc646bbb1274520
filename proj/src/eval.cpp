#include "linkalign/eval.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace linkalign {

using nlohmann::json;

std::string error_label_name(ErrorLabel label) {
    switch (label) {
        case ErrorLabel::none: return "none";
        case ErrorLabel::e1_target_db_missing: return "E1";
        case ErrorLabel::e2_irrelevant_db: return "E2";
        case ErrorLabel::e3_wrong_tables: return "E3";
        case ErrorLabel::e4_wrong_columns: return "E4";
    }
    return "none";
}

namespace {

bool covered_by_candidates(const SchemaItem& gold_item,
                           const std::set<SchemaItem>& candidate_items) {
    if (gold_item.is_column()) return candidate_items.count(gold_item) > 0;
    // Table-level gold item: any retrieved column of that table covers it.
    return std::any_of(candidate_items.begin(), candidate_items.end(),
                       [&](const SchemaItem& item) {
                           return item.db_id == gold_item.db_id &&
                                  item.table_name == gold_item.table_name;
                       });
}

std::set<std::string> table_set(const std::set<SchemaItem>& items) {
    std::set<std::string> out;
    for (const auto& item : items) out.insert(item.db_id + "." + item.table_name);
    return out;
}

std::set<SchemaItem> column_set(const std::set<SchemaItem>& items) {
    std::set<SchemaItem> out;
    for (const auto& item : items) {
        if (item.is_column()) out.insert(item);
    }
    return out;
}

}  // namespace

ErrorLabel classify_error(const LinkResult& result, const GoldLabel& gold) {
    for (const auto& item : gold.items) {
        if (!covered_by_candidates(item, result.candidate_items)) {
            return ErrorLabel::e1_target_db_missing;
        }
    }
    if (normalize_identifier(result.selected_db) != normalize_identifier(gold.gold_db)) {
        return ErrorLabel::e2_irrelevant_db;
    }
    if (table_set(result.predicted.items) != table_set(gold.items)) {
        return ErrorLabel::e3_wrong_tables;
    }
    if (column_set(result.predicted.items) != column_set(gold.items)) {
        return ErrorLabel::e4_wrong_columns;
    }
    return ErrorLabel::none;
}

MetricRecord compute_metrics(const std::vector<LinkResult>& results,
                             const std::vector<GoldLabel>& golds,
                             const MetricOptions& opts) {
    if (results.empty()) throw ValidationError("compute_metrics: empty result set");
    if (results.size() != golds.size()) {
        throw ValidationError("compute_metrics: results/golds size mismatch");
    }

    MetricRecord rec;
    rec.n = results.size();

    std::size_t la_hits = 0, em_hits = 0, superset_hits = 0;
    double inter_sum = 0, gold_sum = 0, pred_sum = 0;
    double col_inter_sum = 0, col_gold_sum = 0;
    double macro_recall_sum = 0, macro_precision_sum = 0;

    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& result = results[i];
        const auto& gold = golds[i];
        ErrorLabel label = classify_error(result, gold);
        ++rec.error_histogram[error_label_name(label)];

        bool la_ok = opts.la_policy == LaPolicy::selection_only
                         ? normalize_identifier(result.selected_db) ==
                               normalize_identifier(gold.gold_db)
                         : label != ErrorLabel::e1_target_db_missing &&
                               label != ErrorLabel::e2_irrelevant_db;
        if (la_ok) ++la_hits;
        if (label == ErrorLabel::none) ++em_hits;

        std::set<SchemaItem> inter;
        std::set_intersection(result.predicted.items.begin(), result.predicted.items.end(),
                              gold.items.begin(), gold.items.end(),
                              std::inserter(inter, inter.begin()));
        if (inter.size() == gold.items.size()) ++superset_hits;

        inter_sum += static_cast<double>(inter.size());
        gold_sum += static_cast<double>(gold.items.size());
        pred_sum += static_cast<double>(result.predicted.items.size());

        auto gold_cols = column_set(gold.items);
        auto inter_cols = column_set(inter);
        col_inter_sum += static_cast<double>(inter_cols.size());
        col_gold_sum += static_cast<double>(gold_cols.size());

        macro_recall_sum += gold.items.empty()
                                ? 1.0
                                : static_cast<double>(inter.size()) /
                                      static_cast<double>(gold.items.size());
        if (result.predicted.items.empty()) {
            // Empty prediction against non-empty gold contributes precision 0.
            macro_precision_sum += gold.items.empty() ? 1.0 : 0.0;
        } else {
            macro_precision_sum += static_cast<double>(inter.size()) /
                                   static_cast<double>(result.predicted.items.size());
        }
    }

    double n = static_cast<double>(rec.n);
    rec.la = static_cast<double>(la_hits) / n;
    rec.em = static_cast<double>(em_hits) / n;
    rec.superset_em = static_cast<double>(superset_hits) / n;
    rec.recall = gold_sum > 0 ? inter_sum / gold_sum : 1.0;
    rec.precision = pred_sum > 0 ? inter_sum / pred_sum : 1.0;
    rec.column_recall = col_gold_sum > 0 ? col_inter_sum / col_gold_sum : 1.0;
    rec.macro_recall = macro_recall_sum / n;
    rec.macro_precision = macro_precision_sum / n;
    return rec;
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

DatasetLoadReport parse_dataset(const std::string& json_text, DatasetFormat format,
                                bool strict) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("dataset file is not valid JSON: ") + e.what());
    }
    if (!doc.is_array()) throw ParseError("dataset file must be a JSON array");

    DatasetLoadReport report;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const json& rec = doc[i];
        auto bad = [&](const std::string& why) {
            std::string msg = "record #" + std::to_string(i) + ": " + why;
            if (strict) throw ParseError(msg);
            report.record_errors.push_back(msg);
        };
        if (!rec.is_object()) {
            bad("not an object");
            continue;
        }
        std::string question = rec.value("question", "");
        std::string sql = rec.contains("query") ? rec.value("query", "")
                                                : rec.value("SQL", "");
        std::string db = rec.value("db_id", "");
        if (question.empty() || sql.empty() || db.empty()) {
            bad("missing question/query/db_id");
            continue;
        }
        Example ex;
        ex.example_id = rec.contains("example_id")
                            ? rec["example_id"].get<std::string>()
                            : "ex" + std::to_string(i);
        ex.question = question;
        ex.gold_sql = sql;
        ex.gold_db = normalize_identifier(db);
        if (format == DatasetFormat::bird_dev && rec.contains("evidence") &&
            !rec["evidence"].get<std::string>().empty()) {
            ex.question += " Hint: " + rec["evidence"].get<std::string>();
            ex.has_evidence = true;
        }
        report.examples.push_back(std::move(ex));
    }
    return report;
}

DatasetLoadReport load_dataset(const std::string& path, DatasetFormat format, bool strict) {
    return parse_dataset(read_file(path), format, strict);
}

}  // namespace linkalign
