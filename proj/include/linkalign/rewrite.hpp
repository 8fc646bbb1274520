#pragma once

#include <optional>
#include <string>
#include <vector>

#include "linkalign/chat.hpp"
#include "linkalign/index.hpp"

namespace linkalign {

enum class Mode { pipeline, agent };
enum class Confidence { high, medium, low };

struct SchemaHypothesis {
    std::string text;  // e.g. "degree_programs (degree_type)"
    Confidence confidence = Confidence::medium;
};

struct AuditReport {
    std::vector<std::string> entities;
    std::vector<std::string> attributes;
    std::vector<std::string> constraints;
    std::vector<SchemaHypothesis> missing_schemas;
    bool no_gap = false;
    bool parse_warning = false;

    std::string summary() const;  // rendering fed to the rewriter
};

struct RewriteRound {
    int t = 0;  // >= 1
    std::string query;
    AuditReport report;
    std::vector<RetrievalHit> hits;
};

struct RewriteSession {
    std::string original_query;
    std::vector<RetrievalHit> initial_hits;  // round 0
    std::vector<RewriteRound> rounds;
    CandidateSet candidate_set;
    std::optional<std::string> error;  // set when the backend failed mid-loop

    std::size_t retrievals_executed() const { return rounds.size() + 1; }
    std::vector<std::vector<RetrievalHit>> all_round_hits() const;
};

// Parse the structured audit block out of (possibly chatty) model output.
// Unparseable sections degrade to empty lists with parse_warning set.
AuditReport parse_audit_report(const std::string& text);

// One audit call over a rendered (schema context, question) pair. `tag_suffix`
// distinguishes rounds in logs and mock scripts (e.g. "round1").
AuditReport audit(const std::string& schema_context, const std::string& question,
                  Mode mode, ChatBackend& backend, const std::string& tag_suffix = "");

// Rewrite the query from the audit report; never returns the input unchanged
// (an echo gets the missing-schema hypotheses appended).
std::string rewrite_query(const std::string& q_prev, const AuditReport& report,
                          ChatBackend& backend, const std::string& tag_suffix = "");

struct MultiRoundOptions {
    std::size_t top_k = 5;
    int turn_n = 1;  // number of rewrite rounds after round 0
    Mode mode = Mode::agent;
    bool accumulated_context = true;  // audit sees all hits so far, not just the latest round
    std::size_t context_char_budget = 8000;
    std::string tag_prefix;  // e.g. "post/" for the post-retrieval mini loop
};

// The Step-One loop: retrieve with the original query, then audit/rewrite/
// retrieve up to turn_n times, early-stopping on no_gap. Backend failures
// mid-loop leave the completed rounds usable and set session.error.
RewriteSession multi_round_retrieve(const Index& index, Embedder& embedder,
                                    const std::string& original_query,
                                    const MultiRoundOptions& opts, ChatBackend& backend);

// turn_n schedule keyed on catalog size (tables): <=50 -> 1, <=500 -> 2, else 3.
int adaptive_turn_n(std::size_t table_count);

std::string confidence_name(Confidence c);

}  // namespace linkalign
