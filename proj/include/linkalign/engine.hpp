#pragma once

#include <memory>
#include <string>
#include <vector>

#include "linkalign/catalog.hpp"
#include "linkalign/chat.hpp"
#include "linkalign/dbfilter.hpp"
#include "linkalign/eval.hpp"
#include "linkalign/extractor.hpp"
#include "linkalign/index.hpp"
#include "linkalign/rewrite.hpp"

namespace linkalign {

enum class AblationVariant { full, no_rewrite, no_filter, no_both };

std::string variant_name(AblationVariant variant);
AblationVariant variant_from_name(const std::string& name);

struct EngineConfig {
    Mode mode = Mode::agent;
    std::size_t top_k = 5;
    int turn_n = -1;  // -1 = adaptive from catalog size
    bool accumulated_audit_context = true;

    int filter_rounds_limit = 3;
    bool single_db = false;  // prune + post-retrieve instead of db selection
    DecayConfig decay;

    DebateOptions extractor;
    std::size_t schema_prompt_budget = 12000;
    int concurrency = 4;
    std::uint64_t seed = 0;
};

// Wires Step One (multi-round retrieval), Step Two (database filtering) and
// Step Three (table/column extraction) over one catalog + index.
class LinkEngine {
public:
    LinkEngine(const DatabaseCatalog& catalog, const Index& index, Embedder& embedder,
               ChatBackend& backend, EngineConfig config);

    LinkResult link(const Example& example,
                    AblationVariant variant = AblationVariant::full) const;

    // Concurrent over examples; per-example failures are recorded in the
    // result, never thrown.
    std::vector<LinkResult> link_dataset(const std::vector<Example>& examples,
                                         AblationVariant variant = AblationVariant::full) const;

    GoldLabel gold_label(const Example& example) const;

    MetricRecord evaluate(const std::vector<Example>& examples,
                          const std::vector<LinkResult>& results,
                          const MetricOptions& opts = {}) const;

    // Table 6-style variant comparison: full, no_rewrite, no_filter, no_both.
    std::vector<MetricRecord> run_ablation(const std::vector<Example>& examples,
                                           const MetricOptions& opts = {}) const;

    const EngineConfig& config() const { return config_; }

private:
    const DatabaseCatalog& catalog_;
    const Index& index_;
    Embedder& embedder_;
    ChatBackend& backend_;
    EngineConfig config_;
};

}  // namespace linkalign
