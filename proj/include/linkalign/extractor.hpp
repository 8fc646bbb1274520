#pragma once

#include <set>
#include <string>
#include <vector>

#include "linkalign/catalog.hpp"
#include "linkalign/chat.hpp"

namespace linkalign {

struct ExtractionProposal {
    std::string parser_id;
    std::vector<std::string> tables;                          // normalized
    std::vector<std::string> columns;                         // "table.column", normalized
    std::vector<std::pair<std::string, std::string>> relationships;  // join column pairs
    std::string rationale;
    bool parse_warning = false;
};

struct LinkedSchema {
    std::string db_id;
    std::set<SchemaItem> items;  // tables and columns, all resolvable under db_id
    std::vector<std::string> warnings;
};

// Tolerant extraction of labeled lists (tables/columns/relationships) from
// free text. Accepts bracketed lists, bullet lists, backticked identifiers
// and bare table.column tokens; never throws on malformed text.
ExtractionProposal parse_proposal(const std::string& text);

// Canonical rendering; parse_proposal(render(p)) recovers p's items.
std::string render_proposal(const ExtractionProposal& proposal);

// Resolve a proposal against the catalog under db_id: unknown identifiers
// are dropped with warnings, tables of kept columns are auto-added, and
// relationship endpoints are flattened into column items.
LinkedSchema resolve_proposal(const ExtractionProposal& proposal,
                              const DatabaseCatalog& catalog, const std::string& db_id);

// Single-call DIN-SQL-style extraction.
LinkedSchema extract_pipeline(const std::string& question, const std::string& db_schema_prompt,
                              const DatabaseCatalog& catalog, const std::string& db_id,
                              ChatBackend& backend);

struct DebateOptions {
    int n_parsers = 3;
    int rounds_limit = 2;
};

// Simultaneous-talk-with-summarizer: n_parsers propose per round, the Data
// Scientist reviews the union with an add/remove diff; the reviewed union
// after rounds_limit rounds is the result.
LinkedSchema extract_debate(const std::string& question, const std::string& db_schema_prompt,
                            const DatabaseCatalog& catalog, const std::string& db_id,
                            const DebateOptions& opts, ChatBackend& backend);

}  // namespace linkalign
