#pragma once

#include <memory>
#include <string>
#include <vector>

#include "linkalign/common.hpp"

namespace linkalign {

using EmbeddingVector = std::vector<double>;

// Batch embedding contract. Implementations must be deterministic per text
// (same text, same vector) and return vectors of a fixed dimension.
class Embedder {
public:
    virtual ~Embedder() = default;
    virtual std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) = 0;
    virtual std::size_t dimension() const = 0;
    virtual std::string id() const = 0;

    EmbeddingVector embed_one(const std::string& text);
};

// Deterministic token-hash bag-of-words embedder for offline tests and
// fixtures. Each lowercased word token is hashed into one of `dim` buckets
// and counted.
class HashEmbedder : public Embedder {
public:
    explicit HashEmbedder(std::size_t dim = 64) : dim_(dim) {}
    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override;
    std::size_t dimension() const override { return dim_; }
    std::string id() const override;

private:
    std::size_t dim_;
};

struct HttpEmbedderConfig {
    std::string endpoint;                        // e.g. http://host:port
    std::string path = "/v1/embeddings";
    std::string model = "bge-large-en-v1.5";
    std::string api_key_env = "EMBEDDING_API_KEY";
    int max_retries = 3;
    double backoff_base_seconds = 0.5;
};

// OpenAI-style embeddings endpoint client.
class HttpEmbedder : public Embedder {
public:
    explicit HttpEmbedder(HttpEmbedderConfig config);
    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override;
    std::size_t dimension() const override;
    std::string id() const override { return config_.model; }

private:
    HttpEmbedderConfig config_;
    mutable std::size_t dim_ = 0;  // learned from the first response
};

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

}  // namespace linkalign
