#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <random>

#include "fixtures.hpp"
#include "linkalign/index.hpp"

using namespace linkalign;

TEST_CASE("hash embedder is deterministic with fixed dimension") {
    HashEmbedder embedder(64);
    auto a = embedder.embed_one("count the singers");
    auto b = embedder.embed_one("count the singers");
    CHECK(a == b);
    CHECK(a.size() == 64);
    CHECK(embedder.dimension() == 64);
}

TEST_CASE("cosine similarity basics") {
    CHECK(cosine_similarity({1, 0}, {1, 0}) == doctest::Approx(1.0));
    CHECK(cosine_similarity({1, 0}, {0, 1}) == doctest::Approx(0.0));
    CHECK(cosine_similarity({0, 0}, {1, 1}) == 0.0);  // zero norm contributes 0
}

TEST_CASE("build_index produces one node per column") {
    DatabaseCatalog catalog = fixtures::synthetic_catalog(2, 1, 5);
    HashEmbedder embedder;
    Index index = build_index(catalog, embedder);
    CHECK(index.size() == 10);
    CHECK(index.dimension() == embedder.dimension());
    for (const auto& node : index.nodes()) CHECK(catalog.resolves(node.item));
}

TEST_CASE("identical texts embed to identical vectors") {
    HashEmbedder embedder;
    auto vectors = embedder.embed({"same text", "same text", "other"});
    CHECK(vectors[0] == vectors[1]);
    CHECK(vectors[0] != vectors[2]);
}

TEST_CASE("retrieve with top_k = |index| returns every node") {
    DatabaseCatalog catalog = fixtures::pets_catalog();
    HashEmbedder embedder;
    Index index = build_index(catalog, embedder);
    auto hits = index.retrieve("anything at all", embedder, index.size());
    CHECK(hits.size() == index.size());
}

TEST_CASE("retrieve matches brute-force cosine ranking on 100 nodes") {
    DatabaseCatalog catalog = fixtures::synthetic_catalog(5, 4, 5);  // 100 columns
    HashEmbedder embedder;
    Index index = build_index(catalog, embedder);
    REQUIRE(index.size() == 100);

    std::string query = "which c2_1_3 appears in t2_1 with c2_1_0";
    auto qv = embedder.embed_one(query);

    // Independent oracle: exhaustive scoring with the documented tie-break.
    std::vector<std::pair<double, std::string>> scored;
    for (const auto& node : index.nodes()) {
        scored.push_back({cosine_similarity(qv, node.vector), node.node_id});
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });

    auto hits = index.retrieve(query, embedder, 5);
    REQUIRE(hits.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(hits[i].node->node_id == scored[i].second);
        CHECK(hits[i].similarity == doctest::Approx(scored[i].first));
    }
}

TEST_CASE("query equal to a node text ranks that node first at similarity 1") {
    DatabaseCatalog catalog = fixtures::pets_catalog();
    HashEmbedder embedder;
    Index index = build_index(catalog, embedder);
    const IndexNode& target = index.nodes()[3];
    auto hits = index.retrieve(target.text, embedder, 1);
    REQUIRE(hits.size() == 1);
    CHECK(hits[0].node->node_id == target.node_id);
    CHECK(hits[0].similarity == doctest::Approx(1.0));
}

TEST_CASE("similarity ties break by node_id ascending") {
    HashEmbedder embedder;
    auto v = embedder.embed_one("same tokens here");
    std::vector<IndexNode> nodes;
    for (const char* id : {"b.b.b", "a.a.a", "c.c.c"}) {
        nodes.push_back({id, SchemaItem::column("x", "x", id), "same tokens here", v});
    }
    Index index(std::move(nodes));
    auto hits = index.retrieve("same tokens here", embedder, 3);
    CHECK(hits[0].node->node_id == "a.a.a");
    CHECK(hits[1].node->node_id == "b.b.b");
    CHECK(hits[2].node->node_id == "c.c.c");
}

TEST_CASE("empty index retrieval is empty, not an error") {
    HashEmbedder embedder;
    Index index;
    CHECK(index.retrieve("anything", embedder, 5).empty());
}

namespace {

RetrievalHit hit(const IndexNode* node, double sim, int round) {
    return {node, sim, round, "main"};
}

}  // namespace

TEST_CASE("aggregate_rounds sums similarities with documented tie-breaks") {
    HashEmbedder embedder;
    auto v = embedder.embed_one("x");
    IndexNode a{"a", SchemaItem::column("d", "t", "a"), "x", v};
    IndexNode b{"b", SchemaItem::column("d", "t", "b"), "x", v};

    SUBCASE("single round preserves ordering") {
        auto z = aggregate_rounds({{hit(&b, 0.9, 0), hit(&a, 0.8, 0)}});
        REQUIRE(z.size() == 2);
        CHECK(z[0].node->node_id == "b");
        CHECK(z[1].node->node_id == "a");
    }

    SUBCASE("repeated node outranks a single stronger hit") {
        auto z = aggregate_rounds({{hit(&a, 0.8, 0), hit(&b, 0.9, 0)}, {hit(&a, 0.8, 1)}});
        REQUIRE(z.size() == 2);
        CHECK(z[0].node->node_id == "a");
        CHECK(z[0].aggregate_score == doctest::Approx(1.6));
        CHECK(z[0].rounds_seen.size() == 2);
        CHECK(z[1].aggregate_score == doctest::Approx(0.9));
    }

    SUBCASE("equal scores: more rounds wins, then node_id") {
        auto z = aggregate_rounds({{hit(&b, 0.5, 0)}, {hit(&a, 0.25, 1)}, {hit(&a, 0.25, 2)}});
        CHECK(z[0].node->node_id == "a");  // 0.5 over 2 rounds beats 0.5 over 1
        auto z2 = aggregate_rounds({{hit(&b, 0.5, 0), hit(&a, 0.5, 0)}});
        CHECK(z2[0].node->node_id == "a");  // final tie-break: node_id ascending
    }
}

TEST_CASE("disjoint rounds union their sizes") {
    DatabaseCatalog catalog = fixtures::synthetic_catalog(1, 3, 5);
    HashEmbedder embedder;
    Index index = build_index(catalog, embedder);
    std::vector<std::vector<RetrievalHit>> rounds(3);
    for (int t = 0; t < 3; ++t) {
        for (int i = 0; i < 5; ++i) {
            rounds[t].push_back(hit(&index.nodes()[static_cast<std::size_t>(t * 5 + i)],
                                    0.5, t));
        }
    }
    CHECK(aggregate_rounds(rounds).size() == 15);
}

TEST_CASE("aggregate score is permutation-invariant over round order") {
    DatabaseCatalog catalog = fixtures::synthetic_catalog(2, 2, 4);
    HashEmbedder embedder;
    Index index = build_index(catalog, embedder);
    std::mt19937 rng(42);
    std::vector<std::vector<RetrievalHit>> rounds;
    for (int t = 0; t < 4; ++t) {
        std::vector<RetrievalHit> r;
        std::uniform_int_distribution<std::size_t> pick(0, index.size() - 1);
        std::uniform_real_distribution<double> sim(0.0, 1.0);
        for (int i = 0; i < 6; ++i) r.push_back(hit(&index.nodes()[pick(rng)], sim(rng), t));
        rounds.push_back(std::move(r));
    }
    auto forward = aggregate_rounds(rounds);
    std::reverse(rounds.begin(), rounds.end());
    auto backward = aggregate_rounds(rounds);
    REQUIRE(forward.size() == backward.size());
    for (std::size_t i = 0; i < forward.size(); ++i) {
        CHECK(forward[i].node->node_id == backward[i].node->node_id);
        CHECK(forward[i].aggregate_score == doctest::Approx(backward[i].aggregate_score));
    }
}

TEST_CASE("candidate set over a longer round prefix is a superset") {
    DatabaseCatalog catalog = fixtures::synthetic_catalog(3, 3, 4);
    HashEmbedder embedder;
    Index index = build_index(catalog, embedder);
    std::mt19937 rng(11);
    std::vector<std::vector<RetrievalHit>> rounds;
    std::uniform_int_distribution<std::size_t> pick(0, index.size() - 1);
    for (int t = 0; t < 4; ++t) {
        std::vector<RetrievalHit> r;
        for (int i = 0; i < 5; ++i) r.push_back(hit(&index.nodes()[pick(rng)], 0.4, t));
        rounds.push_back(std::move(r));
        auto shorter = aggregate_rounds({rounds.begin(), rounds.end() - 1});
        auto longer = aggregate_rounds(rounds);
        for (const auto& entry : shorter) {
            bool present = std::any_of(longer.begin(), longer.end(), [&](const auto& e) {
                return e.node->node_id == entry.node->node_id;
            });
            CHECK(present);
        }
    }
}

TEST_CASE("index save/load round-trips nodes and the embedder id") {
    DatabaseCatalog catalog = fixtures::pets_catalog();
    HashEmbedder embedder;
    Index index = build_index(catalog, embedder);
    std::string path = "test_index_roundtrip.jsonl";
    index.save(path, embedder.id());

    std::string embedder_id;
    Index loaded = Index::load(path, &embedder_id);
    CHECK(embedder_id == embedder.id());
    REQUIRE(loaded.size() == index.size());
    for (std::size_t i = 0; i < index.size(); ++i) {
        CHECK(loaded.nodes()[i].node_id == index.nodes()[i].node_id);
        CHECK(loaded.nodes()[i].text == index.nodes()[i].text);
        CHECK(loaded.nodes()[i].vector == index.nodes()[i].vector);
    }
    std::remove(path.c_str());
}
