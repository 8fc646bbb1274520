// Command-line front end: index building, linking, evaluation, ablation and
// benchmark generation over a declarative JSON run config. Flags override
// config keys; secrets come from the environment only.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "linkalign/benchgen.hpp"
#include "linkalign/engine.hpp"
#include "linkalign/prompts.hpp"
#include "linkalign/sqlref.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace linkalign;

namespace {

struct RunConfig {
    std::string catalog_path;
    std::string values_sidecar;
    std::string dataset_path;
    std::string dataset_format = "spider";
    std::string index_path;
    std::string output_dir = "out";
    bool strict = false;

    EngineConfig engine;

    std::string embed_kind = "hash";  // hash | http
    std::size_t embed_dim = 64;
    HttpEmbedderConfig embed_http;

    std::string chat_kind = "mock";  // mock | http
    std::string mock_script_path;
    BackendConfig chat_http;

    std::string prompts_dir;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

RunConfig load_config(const std::string& path) {
    RunConfig cfg;
    if (path.empty()) return cfg;
    json doc = json::parse(read_file(path));

    cfg.catalog_path = doc.value("catalog", "");
    cfg.values_sidecar = doc.value("values_sidecar", "");
    cfg.dataset_path = doc.value("dataset", "");
    cfg.dataset_format = doc.value("dataset_format", "spider");
    cfg.index_path = doc.value("index", "");
    cfg.output_dir = doc.value("output_dir", "out");
    cfg.strict = doc.value("strict", false);
    cfg.prompts_dir = doc.value("prompts_dir", "");

    cfg.engine.mode = doc.value("mode", "agent") == "pipeline" ? Mode::pipeline : Mode::agent;
    cfg.engine.top_k = doc.value("top_k", 5);
    if (doc.contains("turn_n") && !doc["turn_n"].is_string()) {
        cfg.engine.turn_n = doc["turn_n"].get<int>();
    }  // "adaptive" (or absent) keeps -1
    cfg.engine.seed = doc.value("seed", 0);
    cfg.engine.concurrency = doc.value("concurrency", 4);
    cfg.engine.schema_prompt_budget = doc.value("schema_prompt_budget", 12000);

    if (doc.contains("filter")) {
        const json& f = doc["filter"];
        cfg.engine.filter_rounds_limit = f.value("rounds_limit", 3);
        cfg.engine.single_db = f.value("single_db", false);
        if (f.contains("decay")) {
            cfg.engine.decay.initial_rate = f["decay"].value("initial_rate", 0.55);
            cfg.engine.decay.decay = f["decay"].value("decay", 0.6);
            cfg.engine.decay.rng_seed = f["decay"].value("seed", 0);
        }
    }
    if (doc.contains("extractor")) {
        cfg.engine.extractor.n_parsers = doc["extractor"].value("n_parsers", 3);
        cfg.engine.extractor.rounds_limit = doc["extractor"].value("rounds", 2);
    }
    if (doc.contains("embed")) {
        const json& e = doc["embed"];
        cfg.embed_kind = e.value("kind", "hash");
        cfg.embed_dim = e.value("dim", 64);
        cfg.embed_http.endpoint = e.value("endpoint", "");
        cfg.embed_http.model = e.value("model", cfg.embed_http.model);
        cfg.embed_http.api_key_env = e.value("api_key_env", cfg.embed_http.api_key_env);
    }
    if (doc.contains("chat")) {
        const json& c = doc["chat"];
        cfg.chat_kind = c.value("kind", "mock");
        cfg.mock_script_path = c.value("script", "");
        cfg.chat_http.endpoint = c.value("endpoint", "");
        cfg.chat_http.model = c.value("model", cfg.chat_http.model);
        cfg.chat_http.api_key_env = c.value("api_key_env", cfg.chat_http.api_key_env);
        cfg.chat_http.max_concurrency = c.value("max_concurrency", 4);
    }
    return cfg;
}

std::unique_ptr<Embedder> make_embedder(const RunConfig& cfg) {
    if (cfg.embed_kind == "hash") return std::make_unique<HashEmbedder>(cfg.embed_dim);
    if (cfg.embed_kind == "http") return std::make_unique<HttpEmbedder>(cfg.embed_http);
    throw ValidationError("unknown embedder kind: " + cfg.embed_kind);
}

std::unique_ptr<ChatBackend> make_backend(const RunConfig& cfg,
                                          std::shared_ptr<TranscriptLog> log) {
    if (cfg.chat_kind == "mock") {
        auto mock = std::make_unique<MockChatBackend>();
        if (!cfg.mock_script_path.empty()) {
            json doc = json::parse(read_file(cfg.mock_script_path));
            if (doc.is_object()) {
                for (auto& [tag, response] : doc.items()) {
                    mock->script(tag, response.get<std::string>());
                }
            } else if (doc.is_array()) {
                for (const json& entry : doc) {
                    if (entry.contains("user")) {
                        mock->script_for(entry.at("tag"), entry.at("user"),
                                         entry.at("response"));
                    } else {
                        mock->script(entry.at("tag"), entry.at("response"));
                    }
                }
            } else {
                throw ParseError("mock script must be a JSON object or array");
            }
        }
        return mock;
    }
    if (cfg.chat_kind == "http") {
        if (cfg.chat_http.endpoint.empty()) {
            throw ValidationError("chat.endpoint is required for the http backend");
        }
        return std::make_unique<HttpChatBackend>(cfg.chat_http, std::move(log));
    }
    throw ValidationError("unknown chat backend kind: " + cfg.chat_kind);
}

DatasetFormat dataset_format(const std::string& name) {
    if (name == "spider") return DatasetFormat::spider_dev;
    if (name == "bird") return DatasetFormat::bird_dev;
    if (name == "ambidb") return DatasetFormat::ambidb;
    throw ValidationError("unknown dataset format: " + name);
}

json item_to_json(const SchemaItem& item) {
    json out{{"db", item.db_id}, {"table", item.table_name}};
    if (item.column_name) out["column"] = *item.column_name;
    return out;
}

SchemaItem item_from_json(const json& rec) {
    if (rec.contains("column")) {
        return SchemaItem::column(rec.at("db").get<std::string>(),
                                  rec.at("table").get<std::string>(),
                                  rec.at("column").get<std::string>());
    }
    return SchemaItem::table(rec.at("db").get<std::string>(),
                             rec.at("table").get<std::string>());
}

json result_to_json(const LinkResult& result) {
    json rec;
    rec["example_id"] = result.example_id;
    rec["selected_db"] = result.selected_db;
    rec["candidate_dbs"] = result.candidate_dbs;
    json candidates = json::array();
    for (const auto& item : result.candidate_items) candidates.push_back(item_to_json(item));
    rec["candidate_items"] = std::move(candidates);
    json predicted = json::array();
    for (const auto& item : result.predicted.items) predicted.push_back(item_to_json(item));
    rec["predicted"] = std::move(predicted);
    rec["warnings"] = result.predicted.warnings;
    rec["timings"] = {{"retrieve_s", result.timings.retrieve_seconds},
                      {"filter_s", result.timings.filter_seconds},
                      {"extract_s", result.timings.extract_seconds}};
    if (result.error) rec["error"] = *result.error;
    return rec;
}

LinkResult result_from_json(const json& rec) {
    LinkResult result;
    result.example_id = rec.at("example_id").get<std::string>();
    result.selected_db = rec.value("selected_db", "");
    for (const auto& db : rec.value("candidate_dbs", std::vector<std::string>{})) {
        result.candidate_dbs.insert(db);
    }
    for (const json& item : rec.value("candidate_items", json::array())) {
        result.candidate_items.insert(item_from_json(item));
    }
    result.predicted.db_id = result.selected_db;
    for (const json& item : rec.value("predicted", json::array())) {
        result.predicted.items.insert(item_from_json(item));
    }
    if (rec.contains("error")) result.error = rec["error"].get<std::string>();
    return result;
}

void write_text(const fs::path& path, const std::string& text) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write file: " + path.string());
    out << text;
}

std::string metric_table_text(const std::vector<MetricRecord>& records) {
    std::ostringstream out;
    out << "variant      n     LA      EM      Recall  Prec    ColRec  SupEM\n";
    char line[256];
    for (const auto& r : records) {
        std::snprintf(line, sizeof(line), "%-12s %-5zu %-7.4f %-7.4f %-7.4f %-7.4f %-7.4f %-7.4f\n",
                      r.variant.c_str(), r.n, r.la, r.em, r.recall, r.precision,
                      r.column_recall, r.superset_em);
        out << line;
    }
    out << "\nerror histogram:\n";
    for (const auto& r : records) {
        out << "  " << r.variant << ":";
        for (const auto& [label, count] : r.error_histogram) {
            out << " " << label << "=" << count;
        }
        out << "\n";
    }
    return out.str();
}

std::string metric_table_csv(const std::vector<MetricRecord>& records) {
    std::ostringstream out;
    out << "variant,n,la,em,recall,precision,macro_recall,macro_precision,"
           "column_recall,superset_em,e1,e2,e3,e4,none\n";
    auto bucket = [](const MetricRecord& r, const char* key) {
        auto it = r.error_histogram.find(key);
        return it == r.error_histogram.end() ? std::size_t{0} : it->second;
    };
    for (const auto& r : records) {
        out << r.variant << ',' << r.n << ',' << r.la << ',' << r.em << ',' << r.recall
            << ',' << r.precision << ',' << r.macro_recall << ',' << r.macro_precision
            << ',' << r.column_recall << ',' << r.superset_em << ',' << bucket(r, "E1")
            << ',' << bucket(r, "E2") << ',' << bucket(r, "E3") << ',' << bucket(r, "E4")
            << ',' << bucket(r, "none") << '\n';
    }
    return out.str();
}

struct Runtime {
    DatabaseCatalog catalog;
    std::unique_ptr<Embedder> embedder;
    std::shared_ptr<TranscriptLog> log;
    std::unique_ptr<ChatBackend> backend;
};

Runtime make_runtime(const RunConfig& cfg, bool with_transcripts = true) {
    Runtime rt;
    if (cfg.catalog_path.empty()) throw ValidationError("config key 'catalog' is required");
    rt.catalog = load_catalog(cfg.catalog_path, CatalogFormat::spider_tables,
                              cfg.values_sidecar);
    rt.embedder = make_embedder(cfg);
    rt.log = std::make_shared<TranscriptLog>();
    if (with_transcripts) {
        fs::create_directories(fs::path(cfg.output_dir) / "transcripts");
        rt.log->set_file((fs::path(cfg.output_dir) / "transcripts" / "calls.jsonl").string());
    }
    rt.backend = make_backend(cfg, rt.log);
    if (!cfg.prompts_dir.empty()) prompts::set_override_dir(cfg.prompts_dir);
    return rt;
}

Index load_or_build_index(const RunConfig& cfg, Runtime& rt) {
    if (!cfg.index_path.empty() && fs::exists(cfg.index_path)) {
        std::string embedder_id;
        Index index = Index::load(cfg.index_path, &embedder_id);
        if (!index.empty() && index.dimension() != rt.embedder->dimension()) {
            throw ValidationError(
                "index dimension " + std::to_string(index.dimension()) +
                " does not match embedder '" + rt.embedder->id() + "' dimension " +
                std::to_string(rt.embedder->dimension()) + "; rebuild with `index`");
        }
        return index;
    }
    return build_index(rt.catalog, *rt.embedder);
}

int cmd_index(const RunConfig& cfg) {
    Runtime rt = make_runtime(cfg, /*with_transcripts=*/false);
    std::string out_path = cfg.index_path.empty()
                               ? (fs::path(cfg.output_dir) / "index.jsonl").string()
                               : cfg.index_path;
    if (fs::exists(out_path)) {
        std::string old_id;
        Index existing = Index::load(out_path, &old_id);
        if (!existing.empty() && existing.dimension() != rt.embedder->dimension()) {
            std::cerr << "refusing to overwrite " << out_path << ": existing index (embedder '"
                      << old_id << "', dim " << existing.dimension()
                      << ") does not match embedder '" << rt.embedder->id() << "' (dim "
                      << rt.embedder->dimension() << ")\n";
            return 2;
        }
    }
    Index index = build_index(rt.catalog, *rt.embedder);
    fs::path out(out_path);
    if (!out.parent_path().empty()) fs::create_directories(out.parent_path());
    index.save(out_path, rt.embedder->id());
    std::cout << "wrote " << out_path << " (" << index.size() << " nodes, dim "
              << index.dimension() << ", embedder " << rt.embedder->id() << ")\n";
    return 0;
}

int cmd_link(const RunConfig& cfg, const std::string& single_question) {
    Runtime rt = make_runtime(cfg);
    Index index = load_or_build_index(cfg, rt);
    LinkEngine engine(rt.catalog, index, *rt.embedder, *rt.backend, cfg.engine);

    std::vector<Example> examples;
    if (!single_question.empty()) {
        Example ex;
        ex.example_id = "q0";
        ex.question = single_question;
        examples.push_back(std::move(ex));
    } else {
        if (cfg.dataset_path.empty()) {
            throw ValidationError("either --question or config key 'dataset' is required");
        }
        auto report = load_dataset(cfg.dataset_path, dataset_format(cfg.dataset_format),
                                   cfg.strict);
        for (const auto& err : report.record_errors) std::cerr << "dataset: " << err << "\n";
        examples = std::move(report.examples);
    }

    auto results = engine.link_dataset(examples);
    fs::create_directories(cfg.output_dir);
    fs::path out = fs::path(cfg.output_dir) / "results.jsonl";
    std::ofstream stream(out, std::ios::binary);
    std::size_t failures = 0;
    for (const auto& result : results) {
        if (result.error) ++failures;
        stream << result_to_json(result).dump() << "\n";
    }
    std::cout << "wrote " << out.string() << " (" << results.size() << " records, "
              << failures << " failed)\n";
    return cfg.strict && failures > 0 ? 1 : 0;
}

std::vector<LinkResult> read_results(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open results file: " + path);
    std::vector<LinkResult> results;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        results.push_back(result_from_json(json::parse(line)));
    }
    return results;
}

int cmd_eval(const RunConfig& cfg, const std::string& results_path) {
    Runtime rt = make_runtime(cfg, /*with_transcripts=*/false);
    if (cfg.dataset_path.empty()) throw ValidationError("config key 'dataset' is required");
    auto report = load_dataset(cfg.dataset_path, dataset_format(cfg.dataset_format),
                               cfg.strict);
    auto results = read_results(results_path);

    std::map<std::string, const Example*> by_id;
    for (const auto& ex : report.examples) by_id[ex.example_id] = &ex;
    std::vector<std::string> missing;
    std::vector<GoldLabel> golds;
    std::size_t failures = 0;
    for (const auto& result : results) {
        auto it = by_id.find(result.example_id);
        if (it == by_id.end()) {
            missing.push_back(result.example_id);
            continue;
        }
        if (result.error) ++failures;
        golds.push_back({it->second->gold_db,
                         extract_refs(it->second->gold_sql, it->second->gold_db, rt.catalog)});
    }
    if (!missing.empty()) {
        std::string ids;
        for (const auto& id : missing) ids += (ids.empty() ? "" : ", ") + id;
        throw ValidationError("result ids not present in the dataset: " + ids);
    }

    MetricRecord record = compute_metrics(results, golds);
    std::vector<MetricRecord> table{record};
    std::string text = metric_table_text(table);
    std::cout << text;
    write_text(fs::path(cfg.output_dir) / "metrics.txt", text);
    write_text(fs::path(cfg.output_dir) / "metrics.csv", metric_table_csv(table));
    return cfg.strict && failures > 0 ? 1 : 0;
}

int cmd_ablate(const RunConfig& cfg) {
    Runtime rt = make_runtime(cfg);
    Index index = load_or_build_index(cfg, rt);
    LinkEngine engine(rt.catalog, index, *rt.embedder, *rt.backend, cfg.engine);
    if (cfg.dataset_path.empty()) throw ValidationError("config key 'dataset' is required");
    auto report = load_dataset(cfg.dataset_path, dataset_format(cfg.dataset_format),
                               cfg.strict);

    auto records = engine.run_ablation(report.examples);
    std::string text = metric_table_text(records);
    std::cout << text;
    write_text(fs::path(cfg.output_dir) / "ablation.txt", text);
    write_text(fs::path(cfg.output_dir) / "ablation.csv", metric_table_csv(records));
    return 0;
}

int cmd_benchgen(const RunConfig& cfg) {
    Runtime rt = make_runtime(cfg);
    if (cfg.dataset_path.empty()) throw ValidationError("config key 'dataset' is required");
    auto report = load_dataset(cfg.dataset_path, dataset_format(cfg.dataset_format),
                               cfg.strict);

    // One synonym database per source database: subset, then expand.
    std::vector<std::vector<TableMeta>> generated;
    std::vector<std::string> synonym_ids;
    for (const auto& db_id : rt.catalog.db_ids()) {
        const auto& db = rt.catalog.tables(db_id);
        SchemaSubset subset = extract_subset(db, *rt.backend);
        ExpandOutcome expanded = expand_schema(db, subset, *rt.backend);
        for (const auto& warning : expanded.warnings) {
            std::cerr << "benchgen[" << db_id << "]: " << warning << "\n";
        }
        std::string synonym_id = db_id + "_syn";
        for (auto& table : expanded.tables) table.db_id = synonym_id;
        synonym_ids.push_back(synonym_id);
        generated.push_back(std::move(expanded.tables));
    }

    std::vector<GenPair> pairs;
    for (const auto& example : report.examples) {
        GenPair pair = modify_query(example, synonym_ids, rt.catalog, *rt.backend);
        if (pair.status == PairStatus::draft) pair = verify_pair(std::move(pair), *rt.backend);
        pairs.push_back(std::move(pair));
    }
    std::vector<GenPair> verified;
    for (auto& pair : pairs) {
        if (pair.status == PairStatus::verified) verified.push_back(pair);
    }
    FilterOutcome filtered = filter_pairs(std::move(verified));
    if (filtered.skipped) {
        std::cerr << "benchgen: fewer than 20 verified pairs, length filter skipped\n";
    }

    write_text(fs::path(cfg.output_dir) / "generated_tables.json",
               render_catalog_file(generated));
    write_text(fs::path(cfg.output_dir) / "generated_questions.json",
               render_question_file(filtered.retained));
    write_text(fs::path(cfg.output_dir) / "all_pairs.json", render_question_file(pairs));
    std::cout << "wrote " << generated.size() << " synonym databases and "
              << filtered.retained.size() << " retained pairs to " << cfg.output_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"schema linking toolkit: retrieval, database filtering, extraction"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("-c,--config", config_path, "JSON run config")->required(false);

    // Flag overrides shared by all subcommands.
    std::string catalog_override, dataset_override, output_override, index_override;
    std::string mode_override, question;
    int top_k_override = -1, turn_n_override = -2, concurrency_override = -1;
    long long seed_override = -1;
    bool strict_override = false;
    app.add_option("--catalog", catalog_override, "schema description file");
    app.add_option("--dataset", dataset_override, "question/SQL dataset file");
    app.add_option("--index", index_override, "index file path");
    app.add_option("--output-dir", output_override, "output directory");
    app.add_option("--mode", mode_override, "pipeline|agent");
    app.add_option("--top-k", top_k_override, "retrieval size per round");
    app.add_option("--turn-n", turn_n_override, "rewrite rounds (-1 = adaptive)");
    app.add_option("--seed", seed_override, "run seed");
    app.add_option("--concurrency", concurrency_override, "parallel examples");
    app.add_flag("--strict", strict_override, "nonzero exit on any example failure");

    auto* sub_index = app.add_subcommand("index", "embed the catalog and persist the index");
    auto* sub_link = app.add_subcommand("link", "run the linking pipeline");
    sub_link->add_option("--question", question, "link a single ad-hoc question");
    auto* sub_eval = app.add_subcommand("eval", "score result records against the dataset");
    std::string results_path;
    sub_eval->add_option("--results", results_path, "results.jsonl from `link`")->required();
    auto* sub_ablate = app.add_subcommand("ablate", "compare pipeline variants");
    auto* sub_benchgen =
        app.add_subcommand("benchgen", "synthesize synonym databases and ambiguous questions");

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg = load_config(config_path);
        if (!catalog_override.empty()) cfg.catalog_path = catalog_override;
        if (!dataset_override.empty()) cfg.dataset_path = dataset_override;
        if (!index_override.empty()) cfg.index_path = index_override;
        if (!output_override.empty()) cfg.output_dir = output_override;
        if (!mode_override.empty()) {
            cfg.engine.mode = mode_override == "pipeline" ? Mode::pipeline : Mode::agent;
        }
        if (top_k_override >= 0) cfg.engine.top_k = static_cast<std::size_t>(top_k_override);
        if (turn_n_override >= -1) cfg.engine.turn_n = turn_n_override;
        if (seed_override >= 0) cfg.engine.seed = static_cast<std::uint64_t>(seed_override);
        if (concurrency_override > 0) cfg.engine.concurrency = concurrency_override;
        if (strict_override) cfg.strict = true;

        if (sub_index->parsed()) return cmd_index(cfg);
        if (sub_link->parsed()) return cmd_link(cfg, question);
        if (sub_eval->parsed()) return cmd_eval(cfg, results_path);
        if (sub_ablate->parsed()) return cmd_ablate(cfg);
        if (sub_benchgen->parsed()) return cmd_benchgen(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
