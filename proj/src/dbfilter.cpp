#include "linkalign/dbfilter.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <sstream>

#include "linkalign/prompts.hpp"

namespace linkalign {

double DecayConfig::rate(int n) const {
    double r = initial_rate;
    for (int i = 0; i < n; ++i) r *= decay;
    return r;
}

std::vector<DatabaseCandidate> group_by_database(const CandidateSet& z) {
    if (z.empty()) throw ValidationError("group_by_database: nothing retrieved");
    std::map<std::string, DatabaseCandidate> by_db;
    for (const auto& entry : z) {
        auto& candidate = by_db[entry.node->item.db_id];
        candidate.db_id = entry.node->item.db_id;
        candidate.entries.push_back(entry);
        candidate.coverage_score += entry.aggregate_score;
    }
    std::vector<DatabaseCandidate> out;
    out.reserve(by_db.size());
    for (auto& [db, candidate] : by_db) out.push_back(std::move(candidate));
    std::sort(out.begin(), out.end(),
              [](const DatabaseCandidate& a, const DatabaseCandidate& b) {
                  if (a.coverage_score != b.coverage_score)
                      return a.coverage_score > b.coverage_score;
                  return a.db_id < b.db_id;
              });
    return out;
}

DbSelection match_db_name(const std::string& model_output,
                          const std::vector<DatabaseCandidate>& candidates) {
    if (candidates.empty()) throw ValidationError("match_db_name: no candidates");
    std::string norm = normalize_identifier(model_output);

    // Prefer an explicit "database: x" label on any line.
    std::istringstream lines(model_output);
    std::string line;
    std::string labeled;
    while (std::getline(lines, line)) {
        std::string lower = to_lower(line);
        for (const char* label : {"database:", "nominate:", "answer:"}) {
            auto pos = lower.find(label);
            if (pos != std::string::npos) {
                labeled = normalize_identifier(line.substr(pos + std::string(label).size()));
            }
        }
    }

    for (const auto& text : {labeled, norm}) {
        if (text.empty()) continue;
        for (const auto& candidate : candidates) {
            if (text == candidate.db_id) return {candidate.db_id, false, false};
        }
    }
    for (const auto& text : {labeled, norm}) {
        if (text.empty()) continue;
        for (const auto& candidate : candidates) {
            if (text.find(candidate.db_id) != std::string::npos ||
                candidate.db_id.find(text) != std::string::npos) {
                return {candidate.db_id, true, false};
            }
        }
        // Token-level match tolerates "the pets database" for db "pets_1".
        auto tokens = tokenize_words(text);
        for (const auto& candidate : candidates) {
            auto db_tokens = tokenize_words(candidate.db_id);
            for (const auto& token : tokens) {
                if (std::find(db_tokens.begin(), db_tokens.end(), token) != db_tokens.end()) {
                    return {candidate.db_id, true, false};
                }
            }
        }
    }
    return {candidates.front().db_id, false, true};
}

namespace {

std::string render_candidates(const std::vector<DatabaseCandidate>& candidates,
                              std::size_t max_nodes_per_db = 20) {
    std::ostringstream out;
    for (const auto& candidate : candidates) {
        out << "database " << candidate.db_id << " (coverage "
            << candidate.coverage_score << "):\n";
        std::size_t n = std::min(max_nodes_per_db, candidate.entries.size());
        for (std::size_t i = 0; i < n; ++i) {
            out << "  " << candidate.entries[i].node->text << "\n";
        }
    }
    return out.str();
}

}  // namespace

DbSelection select_database_pipeline(const std::string& question,
                                     const std::vector<DatabaseCandidate>& candidates,
                                     ChatBackend& backend) {
    if (candidates.empty()) throw ValidationError("select_database_pipeline: no candidates");
    if (candidates.size() == 1) return {candidates.front().db_id, false, false};

    ChatRequest req;
    req.tag = "db_select";
    req.messages.push_back(
        {Role::user, prompts::render(prompts::get(prompts::kDbSelectPipeline),
                                     {{"question", question},
                                      {"candidates", render_candidates(candidates)}})});
    return match_db_name(backend.complete(req), candidates);
}

namespace {

bool parse_expert_verdict(const std::string& utterance) {
    // true = retain. Look for a "verdict:" label first, then bare keywords.
    std::istringstream lines(utterance);
    std::string line;
    while (std::getline(lines, line)) {
        std::string lower = to_lower(line);
        auto pos = lower.find("verdict:");
        if (pos != std::string::npos) {
            std::string value = trim(lower.substr(pos + 8));
            return !value.starts_with("reject");
        }
    }
    std::string lower = to_lower(utterance);
    if (lower.find("reject") != std::string::npos) return false;
    return true;
}

}  // namespace

std::pair<std::string, DebateTranscript> select_database_debate(
    const std::string& question, const std::vector<DatabaseCandidate>& candidates,
    const DatabaseCatalog& catalog, int rounds_limit, ChatBackend& backend) {
    if (candidates.empty()) throw ValidationError("select_database_debate: no candidates");
    if (rounds_limit < 1) throw ValidationError("select_database_debate: rounds_limit < 1");

    DebateTranscript transcript;
    transcript.rounds_limit = rounds_limit;

    if (candidates.size() == 1) {
        transcript.verdict = candidates.front().db_id;
        return {transcript.verdict, transcript};
    }

    std::vector<DatabaseCandidate> remaining = candidates;
    std::string nominee = remaining.front().db_id;
    for (int round = 1; round <= rounds_limit; ++round) {
        std::string suffix = "/round" + std::to_string(round);

        ChatRequest analyst_req;
        analyst_req.tag = "analyst" + suffix;
        analyst_req.messages.push_back(
            {Role::user, prompts::render(prompts::get(prompts::kDebateAnalyst),
                                         {{"question", question},
                                          {"candidates", render_candidates(remaining)}})});
        std::string analyst_utterance = backend.complete(analyst_req);
        transcript.rounds.push_back({Speaker::analyst, analyst_utterance});
        nominee = match_db_name(analyst_utterance, remaining).db_id;

        ChatRequest expert_req;
        expert_req.tag = "expert" + suffix;
        expert_req.messages.push_back(
            {Role::user,
             prompts::render(prompts::get(prompts::kDebateExpert),
                             {{"question", question},
                              {"db_id", nominee},
                              {"schema", schema_to_prompt(catalog, nominee)}})});
        std::string expert_utterance = backend.complete(expert_req);
        transcript.rounds.push_back({Speaker::expert, expert_utterance});

        if (parse_expert_verdict(expert_utterance)) {
            transcript.verdict = nominee;
            transcript.consensus = true;
            return {nominee, transcript};
        }

        // Rejected nominees are removed so the debate cannot livelock.
        std::erase_if(remaining, [&](const DatabaseCandidate& c) { return c.db_id == nominee; });
        if (remaining.empty()) break;
        nominee = remaining.front().db_id;
    }

    transcript.verdict = nominee;
    transcript.consensus = false;
    return {nominee, transcript};
}

std::vector<const IndexNode*> decay_prune(const std::vector<const IndexNode*>& nodes,
                                          int n, const DecayConfig& cfg) {
    if (n < 0) throw ValidationError("decay_prune: round index must be >= 0");
    double rate = cfg.rate(n);
    if (rate * static_cast<double>(nodes.size()) < 1.0) return {};

    std::seed_seq seed{cfg.rng_seed, static_cast<std::uint64_t>(n)};
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution keep(rate);
    std::vector<const IndexNode*> retained;
    for (const auto* node : nodes) {
        if (keep(rng)) retained.push_back(node);
    }
    return retained;
}

std::vector<RetrievalHit> post_retrieve(const Index& index,
                                        const std::vector<const IndexNode*>& excluded_nodes,
                                        Embedder& embedder, const std::string& question,
                                        ChatBackend& backend,
                                        const PostRetrieveOptions& opts) {
    if (excluded_nodes.empty()) return {};

    std::set<std::string> ids;
    for (const auto* node : excluded_nodes) ids.insert(node->node_id);
    Index mini = index.subset(ids);

    MultiRoundOptions mr;
    mr.top_k = opts.top_k;
    mr.turn_n = opts.turn_n;
    mr.mode = opts.mode;
    mr.tag_prefix = "post/";
    RewriteSession session = multi_round_retrieve(mini, embedder, question, mr, backend);

    // Map back onto the main index so callers never hold pointers into the
    // temporary mini index.
    std::vector<RetrievalHit> out;
    for (const auto& entry : session.candidate_set) {
        const IndexNode* main_node = index.find(entry.node->node_id);
        if (!main_node) continue;
        out.push_back({main_node, entry.aggregate_score, 0, "post"});
    }
    return out;
}

}  // namespace linkalign
