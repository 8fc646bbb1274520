#pragma once

#include <string>
#include <vector>

#include "linkalign/catalog.hpp"
#include "linkalign/chat.hpp"
#include "linkalign/eval.hpp"

namespace linkalign {

enum class PairStatus { draft, verified, rejected };

struct GenPair {
    Example original;
    std::string modified_question;
    PairStatus status = PairStatus::draft;
    std::string notes;
};

struct SchemaSubset {
    std::vector<SchemaItem> items;  // tables + columns, all within one db
    std::vector<std::string> warnings;
};

// Ask the model for a domain-characteristic sub-schema of one database;
// proposals outside the database are dropped.
SchemaSubset extract_subset(const std::vector<TableMeta>& db, ChatBackend& backend);

struct ExpandOutcome {
    std::vector<TableMeta> tables;  // superset of the input, item for item
    std::vector<std::string> warnings;
};

// Grow the database with model-proposed tables/columns. Existing identifiers
// are never touched; colliding additions are dropped with a warning.
ExpandOutcome expand_schema(const std::vector<TableMeta>& db, const SchemaSubset& subset,
                            ChatBackend& backend);

// Ambiguate a question for a multi-database setting. Drafts that copy a
// token that is a normalized identifier unique to a single database are
// rejected.
GenPair modify_query(const Example& example, const std::vector<std::string>& synonym_db_ids,
                     const DatabaseCatalog& catalog, ChatBackend& backend);

// Length filter: drop the floor(10% N) longest and floor(5% N) shortest
// modified questions; skipped (with a note) below 20 pairs.
struct FilterOutcome {
    std::vector<GenPair> retained;
    bool skipped = false;
};
FilterOutcome filter_pairs(std::vector<GenPair> pairs);

// LLM-judged question/SQL alignment with a single correction attempt.
GenPair verify_pair(GenPair pair, ChatBackend& backend);

// Emit generated databases + pairs in the same formats eval consumes.
std::string render_catalog_file(const std::vector<std::vector<TableMeta>>& databases);
std::string render_question_file(const std::vector<GenPair>& pairs);

}  // namespace linkalign
