#pragma once

#include <set>
#include <string>
#include <vector>

#include "linkalign/catalog.hpp"
#include "linkalign/embedder.hpp"

namespace linkalign {

struct IndexNode {
    std::string node_id;  // "db.table.column", normalized
    SchemaItem item;      // column-level
    std::string text;     // serialize_node output
    EmbeddingVector vector;
};

struct RetrievalHit {
    const IndexNode* node = nullptr;
    double similarity = 0.0;
    int round = 0;
    std::string phase = "main";  // "main" or "post"
};

struct CandidateEntry {
    const IndexNode* node = nullptr;
    double aggregate_score = 0.0;
    std::set<int> rounds_seen;
};

// Z: deduplicated union of per-round hits, ranked by aggregate score.
using CandidateSet = std::vector<CandidateEntry>;

// Exhaustive cosine index over column-level nodes. Immutable after build;
// retrieve() is safe for concurrent callers.
class Index {
public:
    Index() = default;
    explicit Index(std::vector<IndexNode> nodes);

    std::size_t size() const { return nodes_.size(); }
    bool empty() const { return nodes_.empty(); }
    const std::vector<IndexNode>& nodes() const { return nodes_; }
    const IndexNode* find(const std::string& node_id) const;
    std::size_t dimension() const;

    // top-k by cosine similarity, ties broken by node_id ascending.
    std::vector<RetrievalHit> retrieve(const EmbeddingVector& query_vector,
                                       std::size_t top_k, int round = 0) const;
    std::vector<RetrievalHit> retrieve(const std::string& query_text, Embedder& embedder,
                                       std::size_t top_k, int round = 0) const;

    // Subset index over the given node ids (vectors reused, not re-embedded).
    Index subset(const std::set<std::string>& node_ids) const;

    void save(const std::string& path, const std::string& embedder_id) const;
    static Index load(const std::string& path, std::string* embedder_id_out = nullptr);

private:
    std::vector<IndexNode> nodes_;
};

// One node per catalog column, vectors from serialize_node text.
Index build_index(const DatabaseCatalog& catalog, Embedder& embedder,
                  std::size_t max_examples = 3);

// aggregate_score(node) = sum of its per-round similarities; ranking by
// score desc, then |rounds_seen| desc, then node_id asc.
CandidateSet aggregate_rounds(const std::vector<std::vector<RetrievalHit>>& per_round_hits);

}  // namespace linkalign
