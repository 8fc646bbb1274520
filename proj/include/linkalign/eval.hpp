#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "linkalign/catalog.hpp"
#include "linkalign/extractor.hpp"

namespace linkalign {

struct Example {
    std::string example_id;
    std::string question;
    std::string gold_sql;
    std::string gold_db;
    bool has_evidence = false;  // Bird-style hint appended to the question
};

struct StepTimings {
    double retrieve_seconds = 0.0;
    double filter_seconds = 0.0;
    double extract_seconds = 0.0;
};

struct LinkResult {
    std::string example_id;
    std::set<SchemaItem> candidate_items;  // Z summary: node items
    std::set<std::string> candidate_dbs;
    std::string selected_db;
    LinkedSchema predicted;
    StepTimings timings;
    std::optional<std::string> error;  // per-example hard failure
};

enum class ErrorLabel {
    none,
    e1_target_db_missing,
    e2_irrelevant_db,
    e3_wrong_tables,
    e4_wrong_columns,
};

std::string error_label_name(ErrorLabel label);

struct GoldLabel {
    std::string gold_db;
    std::set<SchemaItem> items;  // from sqlref over the gold SQL
};

// First failing check in priority order E1 > E2 > E3 > E4. A gold table item
// counts as present in Z when any of its columns was retrieved.
ErrorLabel classify_error(const LinkResult& result, const GoldLabel& gold);

enum class LaPolicy { strict, selection_only };

struct MetricOptions {
    LaPolicy la_policy = LaPolicy::strict;
};

struct MetricRecord {
    std::string variant = "full";
    std::size_t n = 0;
    double la = 0.0;
    double em = 0.0;
    double recall = 0.0;      // micro, tables + columns
    double precision = 0.0;   // micro
    double macro_recall = 0.0;
    double macro_precision = 0.0;
    double column_recall = 0.0;  // micro, columns only
    double superset_em = 0.0;    // fraction with predicted superset of gold
    std::map<std::string, std::size_t> error_histogram;
};

MetricRecord compute_metrics(const std::vector<LinkResult>& results,
                             const std::vector<GoldLabel>& golds,
                             const MetricOptions& opts = {});

enum class DatasetFormat { spider_dev, bird_dev, ambidb };

struct DatasetLoadReport {
    std::vector<Example> examples;
    std::vector<std::string> record_errors;  // "record #i: why"
};

DatasetLoadReport load_dataset(const std::string& path, DatasetFormat format,
                               bool strict = false);
DatasetLoadReport parse_dataset(const std::string& json_text, DatasetFormat format,
                                bool strict = false);

}  // namespace linkalign
