#pragma once

#include <string>

namespace linkalign::prompts {

inline constexpr const char* kVersion = "v1";

// A template may be overridden at runtime by placing a file named
// "<name>.txt" in a prompts directory (see set_override_dir). Placeholders
// use {name} substitution.
void set_override_dir(const std::string& dir);
std::string get(const std::string& name);

std::string render(const std::string& template_text,
                   std::initializer_list<std::pair<std::string, std::string>> vars);

// Template names.
inline constexpr const char* kAuditorAgent = "auditor_agent";
inline constexpr const char* kAuditorPipeline = "auditor_pipeline";
inline constexpr const char* kRewriter = "rewriter";
inline constexpr const char* kDbSelectPipeline = "db_select_pipeline";
inline constexpr const char* kDebateAnalyst = "debate_analyst";
inline constexpr const char* kDebateExpert = "debate_expert";
inline constexpr const char* kExtractPipeline = "extract_pipeline";
inline constexpr const char* kExtractParser = "extract_parser";
inline constexpr const char* kExtractScientist = "extract_scientist";
inline constexpr const char* kBenchSubset = "bench_subset";
inline constexpr const char* kBenchExpand = "bench_expand";
inline constexpr const char* kBenchModify = "bench_modify";
inline constexpr const char* kBenchVerify = "bench_verify";
inline constexpr const char* kBenchCorrect = "bench_correct";

}  // namespace linkalign::prompts
