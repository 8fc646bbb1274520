#include "linkalign/engine.hpp"

#include <atomic>
#include <chrono>
#include <thread>

#include "linkalign/sqlref.hpp"

namespace linkalign {

std::string variant_name(AblationVariant variant) {
    switch (variant) {
        case AblationVariant::full: return "full";
        case AblationVariant::no_rewrite: return "no_rewrite";
        case AblationVariant::no_filter: return "no_filter";
        case AblationVariant::no_both: return "no_both";
    }
    return "full";
}

AblationVariant variant_from_name(const std::string& name) {
    if (name == "full") return AblationVariant::full;
    if (name == "no_rewrite") return AblationVariant::no_rewrite;
    if (name == "no_filter") return AblationVariant::no_filter;
    if (name == "no_both") return AblationVariant::no_both;
    throw ValidationError("unknown ablation variant: " + name);
}

LinkEngine::LinkEngine(const DatabaseCatalog& catalog, const Index& index,
                       Embedder& embedder, ChatBackend& backend, EngineConfig config)
    : catalog_(catalog), index_(index), embedder_(embedder), backend_(backend),
      config_(std::move(config)) {}

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

LinkResult LinkEngine::link(const Example& example, AblationVariant variant) const {
    LinkResult result;
    result.example_id = example.example_id;

    bool rewriting = variant == AblationVariant::full || variant == AblationVariant::no_filter;
    bool filtering = variant == AblationVariant::full || variant == AblationVariant::no_rewrite;

    try {
        // Step One: multi-round semantically enhanced retrieval.
        auto started = std::chrono::steady_clock::now();
        MultiRoundOptions mr;
        mr.top_k = config_.top_k;
        mr.turn_n = !rewriting ? 0
                               : (config_.turn_n < 0
                                      ? adaptive_turn_n(catalog_.table_count())
                                      : config_.turn_n);
        mr.mode = config_.mode;
        mr.accumulated_context = config_.accumulated_audit_context;
        RewriteSession session =
            multi_round_retrieve(index_, embedder_, example.question, mr, backend_);
        if (session.error) {
            result.error = "step1: " + *session.error;
            return result;
        }

        std::vector<CandidateEntry> kept = session.candidate_set;
        if (config_.single_db) {
            // Single-database setting: random preservation with exponential
            // decay over the excluded nodes of each round, plus a
            // post-retrieval pass over what is still excluded.
            DecayConfig decay = config_.decay;
            decay.rng_seed ^= fnv1a(example.example_id) ^ config_.seed;
            std::set<std::string> kept_ids;
            for (const auto& entry : kept) kept_ids.insert(entry.node->node_id);

            auto rounds = session.all_round_hits();
            std::vector<std::vector<RetrievalHit>> merged = rounds;
            std::set<std::string> preserved_ids;
            for (std::size_t t = 0; t < rounds.size(); ++t) {
                std::vector<const IndexNode*> excluded;
                std::set<std::string> round_ids;
                for (const auto& hit : rounds[t]) round_ids.insert(hit.node->node_id);
                for (const auto& node : index_.nodes()) {
                    if (!round_ids.count(node.node_id) && !kept_ids.count(node.node_id)) {
                        excluded.push_back(&node);
                    }
                }
                for (const auto* node : decay_prune(excluded, static_cast<int>(t), decay)) {
                    preserved_ids.insert(node->node_id);
                }
            }
            std::vector<RetrievalHit> preserved;
            for (const auto& id : preserved_ids) {
                preserved.push_back({index_.find(id), 0.0, 0, "preserved"});
            }
            if (!preserved.empty()) merged.push_back(preserved);

            std::vector<const IndexNode*> still_excluded;
            for (const auto& node : index_.nodes()) {
                if (!kept_ids.count(node.node_id) && !preserved_ids.count(node.node_id)) {
                    still_excluded.push_back(&node);
                }
            }
            PostRetrieveOptions post;
            post.mode = config_.mode;
            auto recovered = post_retrieve(index_, still_excluded, embedder_,
                                           example.question, backend_, post);
            if (!recovered.empty()) merged.push_back(recovered);
            kept = aggregate_rounds(merged);
        }

        for (const auto& entry : kept) {
            result.candidate_items.insert(entry.node->item);
            result.candidate_dbs.insert(entry.node->item.db_id);
        }
        result.timings.retrieve_seconds = seconds_since(started);

        // Step Two: isolate irrelevant schema information.
        started = std::chrono::steady_clock::now();
        auto candidates = group_by_database(kept);
        if (!filtering || candidates.size() == 1) {
            result.selected_db = candidates.front().db_id;  // top coverage
        } else if (config_.mode == Mode::pipeline) {
            result.selected_db =
                select_database_pipeline(example.question, candidates, backend_).db_id;
        } else {
            result.selected_db =
                select_database_debate(example.question, candidates, catalog_,
                                       config_.filter_rounds_limit, backend_)
                    .first;
        }
        result.timings.filter_seconds = seconds_since(started);

        // Step Three: extract schemas for SQL generation.
        started = std::chrono::steady_clock::now();
        PromptOptions prompt_opts;
        prompt_opts.char_budget = config_.schema_prompt_budget;
        std::string schema_prompt;
        if (config_.single_db) {
            std::vector<SchemaItem> scope;
            for (const auto& entry : kept) {
                if (entry.node->item.db_id == result.selected_db) {
                    scope.push_back(entry.node->item);
                }
            }
            schema_prompt = scope.empty()
                                ? schema_to_prompt(catalog_, result.selected_db, prompt_opts)
                                : schema_to_prompt(catalog_, scope, prompt_opts);
        } else {
            schema_prompt = schema_to_prompt(catalog_, result.selected_db, prompt_opts);
        }
        result.predicted =
            config_.mode == Mode::pipeline
                ? extract_pipeline(example.question, schema_prompt, catalog_,
                                   result.selected_db, backend_)
                : extract_debate(example.question, schema_prompt, catalog_,
                                 result.selected_db, config_.extractor, backend_);
        result.timings.extract_seconds = seconds_since(started);
    } catch (const std::exception& e) {
        result.error = e.what();
    }
    return result;
}

std::vector<LinkResult> LinkEngine::link_dataset(const std::vector<Example>& examples,
                                                 AblationVariant variant) const {
    std::vector<LinkResult> results(examples.size());
    int workers = std::max(1, std::min<int>(config_.concurrency,
                                            static_cast<int>(examples.size())));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= examples.size()) break;
            results[i] = link(examples[i], variant);
        }
    };
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        for (int w = 0; w < workers; ++w) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }
    return results;
}

GoldLabel LinkEngine::gold_label(const Example& example) const {
    return {example.gold_db, extract_refs(example.gold_sql, example.gold_db, catalog_)};
}

MetricRecord LinkEngine::evaluate(const std::vector<Example>& examples,
                                  const std::vector<LinkResult>& results,
                                  const MetricOptions& opts) const {
    std::vector<GoldLabel> golds;
    golds.reserve(examples.size());
    for (const auto& example : examples) golds.push_back(gold_label(example));
    return compute_metrics(results, golds, opts);
}

std::vector<MetricRecord> LinkEngine::run_ablation(const std::vector<Example>& examples,
                                                   const MetricOptions& opts) const {
    std::vector<MetricRecord> records;
    for (AblationVariant variant : {AblationVariant::full, AblationVariant::no_rewrite,
                                    AblationVariant::no_filter, AblationVariant::no_both}) {
        auto results = link_dataset(examples, variant);
        MetricRecord record = evaluate(examples, results, opts);
        record.variant = variant_name(variant);
        records.push_back(std::move(record));
    }
    return records;
}

}  // namespace linkalign
