#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace linkalign {

// Error categories surfaced by the library. Everything user-facing carries
// a message naming the offending record/identifier/construct.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct BackendError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Identifier normalization: lowercase, trim, strip backticks and double
// quotes. Idempotent.
std::string normalize_identifier(std::string_view raw);

// Lowercased alphanumeric word tokens (underscores kept inside tokens).
std::vector<std::string> tokenize_words(std::string_view text);

// FNV-1a, used for deterministic digests and the mock embedder buckets.
std::uint64_t fnv1a(std::string_view data);

// Short hex digest of a string; stable across runs and platforms.
std::string content_digest(std::string_view data);

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);

}  // namespace linkalign
