#include "linkalign/embedder.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace linkalign {

using nlohmann::json;

EmbeddingVector Embedder::embed_one(const std::string& text) {
    auto batch = embed({text});
    if (batch.size() != 1) throw BackendError("embedder returned wrong batch size");
    return std::move(batch[0]);
}

std::vector<EmbeddingVector> HashEmbedder::embed(const std::vector<std::string>& texts) {
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& text : texts) {
        EmbeddingVector vec(dim_, 0.0);
        for (const auto& token : tokenize_words(text)) {
            vec[fnv1a(token) % dim_] += 1.0;
        }
        out.push_back(std::move(vec));
    }
    return out;
}

std::string HashEmbedder::id() const {
    return "hash-bow-" + std::to_string(dim_);
}

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.size() != b.size()) throw ValidationError("cosine: dimension mismatch");
    double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0 || nb == 0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

HttpEmbedder::HttpEmbedder(HttpEmbedderConfig config) : config_(std::move(config)) {}

std::size_t HttpEmbedder::dimension() const {
    return dim_;  // 0 until the first successful call
}

std::vector<EmbeddingVector> HttpEmbedder::embed(const std::vector<std::string>& texts) {
    json body;
    body["model"] = config_.model;
    body["input"] = texts;

    httplib::Client client(config_.endpoint);
    client.set_read_timeout(120, 0);
    httplib::Headers headers;
    if (const char* key = std::getenv(config_.api_key_env.c_str())) {
        headers.emplace("Authorization", std::string("Bearer ") + key);
    }

    std::string payload = body.dump();
    std::string last_error;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
        if (attempt > 0) {
            auto delay = config_.backoff_base_seconds * std::pow(2.0, attempt - 1);
            std::this_thread::sleep_for(std::chrono::duration<double>(delay));
        }
        auto res = client.Post(config_.path, headers, payload, "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status == 429 || res->status >= 500) {
            last_error = "http status " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200) {
            throw BackendError("embeddings endpoint returned status " +
                               std::to_string(res->status) + ": " + res->body);
        }
        json doc = json::parse(res->body);
        std::vector<EmbeddingVector> out;
        for (const auto& item : doc.at("data")) {
            out.push_back(item.at("embedding").get<EmbeddingVector>());
        }
        if (out.size() != texts.size()) {
            throw BackendError("embeddings endpoint returned wrong batch size");
        }
        for (const auto& vec : out) {
            if (dim_ == 0) dim_ = vec.size();
            if (vec.size() != dim_) throw BackendError("embedding dimension changed mid-run");
        }
        return out;
    }
    throw BackendError("embeddings request failed after retries: " + last_error);
}

}  // namespace linkalign
