#pragma once

#include <string>
#include <vector>

#include "linkalign/catalog.hpp"
#include "linkalign/chat.hpp"
#include "linkalign/index.hpp"
#include "linkalign/rewrite.hpp"

namespace linkalign {

struct DatabaseCandidate {
    std::string db_id;
    std::vector<CandidateEntry> entries;  // this db's slice of Z
    double coverage_score = 0.0;          // sum of aggregate scores
};

enum class Speaker { analyst, expert };

struct DebateUtterance {
    Speaker speaker;
    std::string text;
};

struct DebateTranscript {
    std::vector<DebateUtterance> rounds;
    std::string verdict;
    bool consensus = true;  // false when the round budget ran out with a rejection
    int rounds_limit = 0;
};

struct DecayConfig {
    double initial_rate = 0.55;
    double decay = 0.6;
    std::uint64_t rng_seed = 0;

    double rate(int n) const;
};

struct DbSelection {
    std::string db_id;
    bool fuzzy_match = false;  // pipeline: model output matched by substring only
    bool fallback = false;     // pipeline: model named no known candidate
};

// Partition Z by database; candidates sorted by coverage_score descending,
// ties by db_id ascending.
std::vector<DatabaseCandidate> group_by_database(const CandidateSet& z);

// Resolve free-text model output to one of the candidate db_ids: normalized
// exact match, then substring containment either way, then fallback to the
// top-coverage candidate.
DbSelection match_db_name(const std::string& model_output,
                          const std::vector<DatabaseCandidate>& candidates);

DbSelection select_database_pipeline(const std::string& question,
                                     const std::vector<DatabaseCandidate>& candidates,
                                     ChatBackend& backend);

// One-by-one Analyst/Expert debate. The terminator emits the current nominee
// on retain or when rounds_limit is exhausted (flagged no-consensus).
std::pair<std::string, DebateTranscript> select_database_debate(
    const std::string& question, const std::vector<DatabaseCandidate>& candidates,
    const DatabaseCatalog& catalog, int rounds_limit, ChatBackend& backend);

// Random preservation with exponential decay: each node kept independently
// with probability rate(n); when rate(n) * |nodes| < 1 the retained set is
// clipped to empty. Pure function of (nodes, n, cfg).
std::vector<const IndexNode*> decay_prune(const std::vector<const IndexNode*>& nodes,
                                          int n, const DecayConfig& cfg);

struct PostRetrieveOptions {
    std::size_t top_k = 5;
    int turn_n = 1;
    Mode mode = Mode::agent;
};

// Mini-batch Step-One loop over previously excluded nodes only; hits come
// back with phase "post" and point into the main index.
std::vector<RetrievalHit> post_retrieve(const Index& index,
                                        const std::vector<const IndexNode*>& excluded_nodes,
                                        Embedder& embedder, const std::string& question,
                                        ChatBackend& backend,
                                        const PostRetrieveOptions& opts = {});

}  // namespace linkalign
