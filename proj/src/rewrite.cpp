#include "linkalign/rewrite.hpp"

#include <sstream>

#include "linkalign/prompts.hpp"

namespace linkalign {

namespace {

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == ',' || c == ';') {
            std::string t = trim(cur);
            if (!t.empty() && t != "none" && t != "n/a") out.push_back(t);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    std::string t = trim(cur);
    if (!t.empty() && t != "none" && t != "n/a") out.push_back(t);
    return out;
}

bool label_value(const std::string& line, const std::string& label, std::string* value) {
    std::string lower = to_lower(line);
    std::string needle = label + ":";
    auto pos = lower.find(needle);
    if (pos == std::string::npos) return false;
    // reject matches inside longer words, e.g. "no_gap" vs "gap"
    if (pos > 0 && (std::isalnum(static_cast<unsigned char>(lower[pos - 1])) ||
                    lower[pos - 1] == '_')) {
        return false;
    }
    *value = trim(line.substr(pos + needle.size()));
    return true;
}

SchemaHypothesis parse_hypothesis(const std::string& raw) {
    SchemaHypothesis hyp;
    std::string text = trim(raw);
    auto lb = text.rfind('[');
    auto rb = text.rfind(']');
    if (lb != std::string::npos && rb != std::string::npos && rb > lb) {
        std::string conf = to_lower(trim(text.substr(lb + 1, rb - lb - 1)));
        if (conf == "high" || conf == "medium" || conf == "low") {
            if (conf == "high") hyp.confidence = Confidence::high;
            else if (conf == "low") hyp.confidence = Confidence::low;
            text = trim(text.substr(0, lb));
        }
    }
    hyp.text = text;
    return hyp;
}

}  // namespace

std::string confidence_name(Confidence c) {
    switch (c) {
        case Confidence::high: return "high";
        case Confidence::medium: return "medium";
        case Confidence::low: return "low";
    }
    return "medium";
}

AuditReport parse_audit_report(const std::string& text) {
    AuditReport report;
    bool any_label = false;
    bool in_missing = false;
    bool saw_no_gap_label = false;

    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        std::string value;
        if (label_value(line, "entities", &value)) {
            report.entities = split_list(value);
            any_label = true;
            in_missing = false;
        } else if (label_value(line, "attributes", &value)) {
            report.attributes = split_list(value);
            any_label = true;
            in_missing = false;
        } else if (label_value(line, "constraints", &value)) {
            report.constraints = split_list(value);
            any_label = true;
            in_missing = false;
        } else if (label_value(line, "missing_schemas", &value) ||
                   label_value(line, "missing schema", &value) ||
                   label_value(line, "missing", &value)) {
            any_label = true;
            in_missing = true;
            for (const auto& item : split_list(value)) {
                report.missing_schemas.push_back(parse_hypothesis(item));
            }
        } else if (label_value(line, "no_gap", &value)) {
            any_label = true;
            in_missing = false;
            saw_no_gap_label = true;
            report.no_gap = to_lower(value).starts_with("true") ||
                            to_lower(value).starts_with("yes");
        } else if (in_missing) {
            std::string t = trim(line);
            if (t.starts_with("-") || t.starts_with("*")) {
                t = trim(t.substr(1));
                if (!t.empty() && t != "none" && t != "n/a") {
                    report.missing_schemas.push_back(parse_hypothesis(t));
                }
            } else if (!t.empty()) {
                in_missing = false;
            }
        }
    }

    if (!any_label) report.parse_warning = true;
    if (!saw_no_gap_label) report.no_gap = report.missing_schemas.empty() && any_label;
    if (report.no_gap) report.missing_schemas.clear();
    return report;
}

std::string AuditReport::summary() const {
    std::ostringstream out;
    auto join = [](const std::vector<std::string>& items) {
        std::string s;
        for (std::size_t i = 0; i < items.size(); ++i) {
            if (i) s += ", ";
            s += items[i];
        }
        return s.empty() ? "none" : s;
    };
    out << "entities: " << join(entities) << "\n";
    out << "attributes: " << join(attributes) << "\n";
    out << "constraints: " << join(constraints) << "\n";
    out << "missing_schemas:\n";
    for (const auto& hyp : missing_schemas) {
        out << "- " << hyp.text << " [" << confidence_name(hyp.confidence) << "]\n";
    }
    out << "no_gap: " << (no_gap ? "true" : "false") << "\n";
    return out.str();
}

AuditReport audit(const std::string& schema_context, const std::string& question,
                  Mode mode, ChatBackend& backend, const std::string& tag_suffix) {
    if (schema_context.empty()) throw ValidationError("audit: empty schema context");
    std::string tmpl = prompts::get(mode == Mode::agent ? prompts::kAuditorAgent
                                                        : prompts::kAuditorPipeline);
    ChatRequest req;
    req.tag = "audit" + (tag_suffix.empty() ? "" : "/" + tag_suffix);
    req.messages.push_back({Role::user, prompts::render(tmpl, {{"context", schema_context},
                                                               {"question", question}})});
    return parse_audit_report(backend.complete(req));
}

std::string rewrite_query(const std::string& q_prev, const AuditReport& report,
                          ChatBackend& backend, const std::string& tag_suffix) {
    if (report.no_gap) throw ValidationError("rewrite_query: report has no gap to fill");
    ChatRequest req;
    req.tag = "rewrite" + (tag_suffix.empty() ? "" : "/" + tag_suffix);
    req.messages.push_back(
        {Role::user, prompts::render(prompts::get(prompts::kRewriter),
                                     {{"report", report.summary()}, {"question", q_prev}})});
    std::string rewritten = trim(backend.complete(req));
    if (rewritten.empty() || rewritten == q_prev) {
        // Force progress: append the hypotheses verbatim.
        std::string out = q_prev;
        for (const auto& hyp : report.missing_schemas) out += " " + hyp.text;
        return out;
    }
    return rewritten;
}

std::vector<std::vector<RetrievalHit>> RewriteSession::all_round_hits() const {
    std::vector<std::vector<RetrievalHit>> out;
    out.push_back(initial_hits);
    for (const auto& round : rounds) out.push_back(round.hits);
    return out;
}

namespace {

std::string render_hits_context(const std::vector<std::vector<RetrievalHit>>& rounds,
                                std::size_t char_budget) {
    // Deduplicated node texts in first-seen order.
    std::set<std::string> seen;
    std::string out;
    for (const auto& hits : rounds) {
        for (const auto& hit : hits) {
            if (!seen.insert(hit.node->node_id).second) continue;
            if (char_budget && out.size() + hit.node->text.size() + 1 > char_budget) return out;
            out += hit.node->text;
            out += "\n";
        }
    }
    return out;
}

}  // namespace

RewriteSession multi_round_retrieve(const Index& index, Embedder& embedder,
                                    const std::string& original_query,
                                    const MultiRoundOptions& opts, ChatBackend& backend) {
    if (opts.turn_n < 0) throw ValidationError("multi_round_retrieve: turn_n must be >= 0");

    RewriteSession session;
    session.original_query = original_query;
    session.initial_hits = index.retrieve(original_query, embedder, opts.top_k, 0);

    std::string query = original_query;
    for (int t = 1; t <= opts.turn_n; ++t) {
        std::string suffix = opts.tag_prefix + "round" + std::to_string(t);
        try {
            auto context_rounds = opts.accumulated_context
                                      ? session.all_round_hits()
                                      : std::vector<std::vector<RetrievalHit>>{
                                            session.rounds.empty()
                                                ? session.initial_hits
                                                : session.rounds.back().hits};
            std::string context =
                render_hits_context(context_rounds, opts.context_char_budget);
            if (context.empty()) context = "(nothing retrieved)";

            AuditReport report = audit(context, original_query, opts.mode, backend, suffix);
            if (report.no_gap) break;

            query = rewrite_query(query, report, backend, suffix);
            RewriteRound round;
            round.t = t;
            round.query = query;
            round.report = std::move(report);
            round.hits = index.retrieve(query, embedder, opts.top_k, t);
            session.rounds.push_back(std::move(round));
        } catch (const BackendError& e) {
            session.error = e.what();
            break;
        }
    }

    session.candidate_set = aggregate_rounds(session.all_round_hits());
    return session;
}

int adaptive_turn_n(std::size_t table_count) {
    if (table_count <= 50) return 1;
    if (table_count <= 500) return 2;
    return 3;
}

}  // namespace linkalign
