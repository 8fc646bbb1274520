#pragma once

#include <condition_variable>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "linkalign/common.hpp"

namespace linkalign {

enum class Role { system, user, assistant };

struct ChatMessage {
    Role role = Role::user;
    std::string content;
};

struct ChatRequest {
    std::vector<ChatMessage> messages;
    double temperature = 0.0;
    int max_tokens = 2048;
    std::string tag;  // e.g. "schema_auditor/round2", used for logging and mocks

    const std::string& last_user_content() const;
};

struct BackendConfig {
    std::string endpoint;  // e.g. http://host:port
    std::string path = "/v1/chat/completions";
    std::string model = "glm-4-air";
    std::string api_key_env = "CHAT_API_KEY";
    int max_retries = 3;
    double backoff_base_seconds = 0.5;
    int max_concurrency = 4;
};

struct TranscriptRecord {
    std::string timestamp;
    std::string tag;
    std::size_t prompt_chars = 0;
    std::size_t response_chars = 0;
    double latency_ms = 0.0;
};

// Thread-safe append-only transcript log; optionally mirrored to a JSONL file.
class TranscriptLog {
public:
    void set_file(const std::string& path);
    void append(const TranscriptRecord& record);
    std::vector<TranscriptRecord> records() const;

private:
    mutable std::mutex mutex_;
    std::string file_path_;
    std::vector<TranscriptRecord> records_;
};

class ChatBackend {
public:
    virtual ~ChatBackend() = default;
    virtual std::string complete(const ChatRequest& request) = 0;
};

// Deterministic scripted backend for offline tests. Responses are matched
// by (tag, digest of the last user message) first, then by tag alone.
// An unscripted tag is an error, not a silent default.
class MockChatBackend : public ChatBackend {
public:
    void script(const std::string& tag, const std::string& response);
    void script_for(const std::string& tag, const std::string& user_content,
                    const std::string& response);
    std::string complete(const ChatRequest& request) override;

    std::size_t call_count() const;
    std::vector<std::string> tags_seen() const;

private:
    mutable std::mutex mutex_;
    std::map<std::string, std::string> by_tag_;
    std::map<std::pair<std::string, std::string>, std::string> by_tag_and_digest_;
    std::vector<std::string> tags_seen_;
};

// Adapter for test fixtures that need response logic instead of a table.
class CallbackChatBackend : public ChatBackend {
public:
    explicit CallbackChatBackend(std::function<std::string(const ChatRequest&)> fn)
        : fn_(std::move(fn)) {}
    std::string complete(const ChatRequest& request) override { return fn_(request); }

private:
    std::function<std::string(const ChatRequest&)> fn_;
};

// OpenAI-style chat-completions client with retry, exponential backoff and
// a bounded in-flight request count. The transport is injectable so retry
// behavior is testable without a server.
class HttpChatBackend : public ChatBackend {
public:
    // Takes a JSON request body, returns the assistant text. Throws
    // BackendError on transport failure; a thrown RetryableError is retried.
    using Transport = std::function<std::string(const std::string& body)>;

    struct RetryableError : BackendError {
        using BackendError::BackendError;
    };

    explicit HttpChatBackend(BackendConfig config, std::shared_ptr<TranscriptLog> log = {});
    HttpChatBackend(BackendConfig config, Transport transport,
                    std::shared_ptr<TranscriptLog> log = {});

    std::string complete(const ChatRequest& request) override;

    int peak_in_flight() const;

private:
    std::string default_transport(const std::string& body);

    BackendConfig config_;
    Transport transport_;
    std::shared_ptr<TranscriptLog> log_;

    mutable std::mutex mutex_;
    std::condition_variable slot_free_;
    int in_flight_ = 0;
    int peak_in_flight_ = 0;
};

std::string role_name(Role role);

}  // namespace linkalign
