#include "linkalign/index.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include <json.hpp>

namespace linkalign {

using nlohmann::json;

Index::Index(std::vector<IndexNode> nodes) : nodes_(std::move(nodes)) {
    std::sort(nodes_.begin(), nodes_.end(),
              [](const IndexNode& a, const IndexNode& b) { return a.node_id < b.node_id; });
    for (std::size_t i = 1; i < nodes_.size(); ++i) {
        if (nodes_[i].node_id == nodes_[i - 1].node_id) {
            throw ValidationError("duplicate node_id in index: " + nodes_[i].node_id);
        }
        if (nodes_[i].vector.size() != nodes_[0].vector.size()) {
            throw ValidationError("mixed vector dimensions in index");
        }
    }
}

const IndexNode* Index::find(const std::string& node_id) const {
    auto it = std::lower_bound(
        nodes_.begin(), nodes_.end(), node_id,
        [](const IndexNode& n, const std::string& id) { return n.node_id < id; });
    if (it == nodes_.end() || it->node_id != node_id) return nullptr;
    return &*it;
}

std::size_t Index::dimension() const {
    return nodes_.empty() ? 0 : nodes_[0].vector.size();
}

std::vector<RetrievalHit> Index::retrieve(const EmbeddingVector& query_vector,
                                          std::size_t top_k, int round) const {
    std::vector<RetrievalHit> hits;
    hits.reserve(nodes_.size());
    for (const auto& node : nodes_) {
        hits.push_back({&node, cosine_similarity(query_vector, node.vector), round, "main"});
    }
    std::stable_sort(hits.begin(), hits.end(), [](const RetrievalHit& a, const RetrievalHit& b) {
        if (a.similarity != b.similarity) return a.similarity > b.similarity;
        return a.node->node_id < b.node->node_id;
    });
    if (hits.size() > top_k) hits.resize(top_k);
    return hits;
}

std::vector<RetrievalHit> Index::retrieve(const std::string& query_text, Embedder& embedder,
                                          std::size_t top_k, int round) const {
    if (empty()) return {};
    return retrieve(embedder.embed_one(query_text), top_k, round);
}

Index Index::subset(const std::set<std::string>& node_ids) const {
    std::vector<IndexNode> nodes;
    for (const auto& node : nodes_) {
        if (node_ids.count(node.node_id)) nodes.push_back(node);
    }
    return Index(std::move(nodes));
}

void Index::save(const std::string& path, const std::string& embedder_id) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write index file: " + path);
    json manifest = {{"format", "linkalign-index"},
                     {"version", 1},
                     {"embedder_id", embedder_id},
                     {"dimension", dimension()},
                     {"node_count", nodes_.size()}};
    out << manifest.dump() << "\n";
    for (const auto& node : nodes_) {
        json rec = {{"node_id", node.node_id},
                    {"db", node.item.db_id},
                    {"table", node.item.table_name},
                    {"column", node.item.column_name.value_or("")},
                    {"text", node.text},
                    {"vector", node.vector}};
        out << rec.dump() << "\n";
    }
}

Index Index::load(const std::string& path, std::string* embedder_id_out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open index file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("index file is empty: " + path);
    json manifest = json::parse(line);
    if (manifest.value("format", "") != "linkalign-index") {
        throw ParseError("not a linkalign index file: " + path);
    }
    if (embedder_id_out) *embedder_id_out = manifest.value("embedder_id", "");
    std::vector<IndexNode> nodes;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json rec = json::parse(line);
        IndexNode node;
        node.node_id = rec.at("node_id").get<std::string>();
        node.item = SchemaItem::column(rec.at("db").get<std::string>(),
                                       rec.at("table").get<std::string>(),
                                       rec.at("column").get<std::string>());
        node.text = rec.at("text").get<std::string>();
        node.vector = rec.at("vector").get<EmbeddingVector>();
        nodes.push_back(std::move(node));
    }
    if (nodes.size() != manifest.value("node_count", nodes.size())) {
        throw ParseError("index file truncated: " + path);
    }
    return Index(std::move(nodes));
}

Index build_index(const DatabaseCatalog& catalog, Embedder& embedder,
                  std::size_t max_examples) {
    auto columns = catalog.all_columns();
    if (columns.empty()) throw ValidationError("build_index: catalog has no columns");

    std::vector<std::string> texts;
    texts.reserve(columns.size());
    for (const auto* col : columns) texts.push_back(serialize_node(*col, max_examples));

    std::vector<EmbeddingVector> vectors;
    try {
        vectors = embedder.embed(texts);
    } catch (const std::exception& e) {
        throw BackendError(std::string("build_index: embedding failed: ") + e.what());
    }
    if (vectors.size() != columns.size()) {
        throw BackendError("build_index: embedder returned wrong batch size");
    }

    std::vector<IndexNode> nodes;
    nodes.reserve(columns.size());
    for (std::size_t i = 0; i < columns.size(); ++i) {
        nodes.push_back({node_id_for(*columns[i]), columns[i]->item(), texts[i],
                         std::move(vectors[i])});
    }
    return Index(std::move(nodes));
}

CandidateSet aggregate_rounds(const std::vector<std::vector<RetrievalHit>>& per_round_hits) {
    std::map<std::string, CandidateEntry> by_id;
    for (const auto& round_hits : per_round_hits) {
        for (const auto& hit : round_hits) {
            auto& entry = by_id[hit.node->node_id];
            entry.node = hit.node;
            entry.aggregate_score += hit.similarity;
            entry.rounds_seen.insert(hit.round);
        }
    }
    CandidateSet out;
    out.reserve(by_id.size());
    for (auto& [id, entry] : by_id) out.push_back(std::move(entry));
    std::sort(out.begin(), out.end(), [](const CandidateEntry& a, const CandidateEntry& b) {
        if (a.aggregate_score != b.aggregate_score) return a.aggregate_score > b.aggregate_score;
        if (a.rounds_seen.size() != b.rounds_seen.size())
            return a.rounds_seen.size() > b.rounds_seen.size();
        return a.node->node_id < b.node->node_id;
    });
    return out;
}

}  // namespace linkalign
