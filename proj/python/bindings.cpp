#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "linkalign/engine.hpp"
#include "linkalign/sqlref.hpp"

namespace py = pybind11;
using namespace linkalign;

namespace {

std::vector<std::string> qualified_items(const std::set<SchemaItem>& items) {
    std::vector<std::string> out;
    for (const auto& item : items) out.push_back(item.qualified());
    return out;
}

py::dict link_question(const DatabaseCatalog& catalog, const Index& index,
                       Embedder& embedder, ChatBackend& backend, const std::string& question,
                       const std::string& mode, std::size_t top_k, int turn_n,
                       int n_parsers, int rounds_limit) {
    EngineConfig cfg;
    cfg.mode = mode == "pipeline" ? Mode::pipeline : Mode::agent;
    cfg.top_k = top_k;
    cfg.turn_n = turn_n;
    cfg.extractor = {n_parsers, rounds_limit};
    cfg.concurrency = 1;
    LinkEngine engine(catalog, index, embedder, backend, cfg);

    Example ex;
    ex.example_id = "py";
    ex.question = question;
    LinkResult result = engine.link(ex);

    py::dict out;
    out["selected_db"] = result.selected_db;
    out["items"] = qualified_items(result.predicted.items);
    out["candidate_dbs"] =
        std::vector<std::string>(result.candidate_dbs.begin(), result.candidate_dbs.end());
    out["warnings"] = result.predicted.warnings;
    out["error"] = result.error ? py::cast(*result.error) : py::none();
    return out;
}

}  // namespace

PYBIND11_MODULE(_linkalign, m) {
    m.doc() = "schema linking core: catalog, retrieval, filtering, extraction";

    py::register_exception<ParseError>(m, "ParseError");
    py::register_exception<ValidationError>(m, "ValidationError");
    py::register_exception<BackendError>(m, "BackendError");

    py::class_<DatabaseCatalog>(m, "Catalog")
        .def("db_ids", &DatabaseCatalog::db_ids)
        .def("table_count", &DatabaseCatalog::table_count)
        .def("column_count", &DatabaseCatalog::column_count)
        .def("schema_prompt",
             [](const DatabaseCatalog& catalog, const std::string& db_id,
                std::size_t char_budget) {
                 PromptOptions opts;
                 opts.char_budget = char_budget;
                 return schema_to_prompt(catalog, db_id, opts);
             },
             py::arg("db_id"), py::arg("char_budget") = 0);

    m.def("load_catalog",
          [](const std::string& path, const std::string& values_sidecar) {
              return load_catalog(path, CatalogFormat::spider_tables, values_sidecar);
          },
          py::arg("path"), py::arg("values_sidecar") = "");
    m.def("parse_spider_tables", &parse_spider_tables, py::arg("json_text"),
          py::arg("values_sidecar_json") = "");

    py::class_<Embedder>(m, "Embedder");
    py::class_<HashEmbedder, Embedder>(m, "HashEmbedder")
        .def(py::init<std::size_t>(), py::arg("dim") = 64)
        .def("embed_one", &HashEmbedder::embed_one)
        .def("dimension", &HashEmbedder::dimension)
        .def("id", &HashEmbedder::id);

    py::class_<Index>(m, "Index")
        .def("__len__", &Index::size)
        .def("dimension", &Index::dimension)
        .def("retrieve",
             [](const Index& index, const std::string& query, Embedder& embedder,
                std::size_t top_k) {
                 std::vector<std::pair<std::string, double>> out;
                 for (const auto& hit : index.retrieve(query, embedder, top_k)) {
                     out.emplace_back(hit.node->node_id, hit.similarity);
                 }
                 return out;
             },
             py::arg("query"), py::arg("embedder"), py::arg("top_k") = 5)
        .def("save",
             [](const Index& index, const std::string& path, const std::string& embedder_id) {
                 index.save(path, embedder_id);
             },
             py::arg("path"), py::arg("embedder_id"));

    m.def("build_index",
          [](const DatabaseCatalog& catalog, Embedder& embedder) {
              return build_index(catalog, embedder);
          },
          py::arg("catalog"), py::arg("embedder"));
    m.def("load_index", [](const std::string& path) {
        std::string embedder_id;
        Index index = Index::load(path, &embedder_id);
        return py::make_tuple(std::move(index), embedder_id);
    });

    py::class_<ChatBackend>(m, "ChatBackend");
    py::class_<MockChatBackend, ChatBackend>(m, "MockChatBackend")
        .def(py::init<>())
        .def("script", &MockChatBackend::script, py::arg("tag"), py::arg("response"))
        .def("call_count", &MockChatBackend::call_count)
        .def("tags_seen", &MockChatBackend::tags_seen);

    m.def("extract_refs",
          [](const std::string& sql, const std::string& db_id,
             const DatabaseCatalog& catalog) {
              return qualified_items(extract_refs(sql, db_id, catalog));
          },
          py::arg("sql"), py::arg("db_id"), py::arg("catalog"));

    m.def("adaptive_turn_n", &adaptive_turn_n, py::arg("table_count"));
    m.def("decay_rate",
          [](int n, double initial_rate, double decay) {
              DecayConfig cfg;
              cfg.initial_rate = initial_rate;
              cfg.decay = decay;
              return cfg.rate(n);
          },
          py::arg("n"), py::arg("initial_rate") = 0.55, py::arg("decay") = 0.6);

    m.def("link_question", &link_question, py::arg("catalog"), py::arg("index"),
          py::arg("embedder"), py::arg("backend"), py::arg("question"),
          py::arg("mode") = "agent", py::arg("top_k") = 5, py::arg("turn_n") = -1,
          py::arg("n_parsers") = 3, py::arg("rounds_limit") = 2);
}
