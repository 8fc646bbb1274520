#include "linkalign/chat.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace linkalign {

using nlohmann::json;

std::string role_name(Role role) {
    switch (role) {
        case Role::system: return "system";
        case Role::user: return "user";
        case Role::assistant: return "assistant";
    }
    return "user";
}

const std::string& ChatRequest::last_user_content() const {
    for (auto it = messages.rbegin(); it != messages.rend(); ++it) {
        if (it->role == Role::user) return it->content;
    }
    throw ValidationError("chat request has no user message (tag: " + tag + ")");
}

void TranscriptLog::set_file(const std::string& path) {
    std::lock_guard lock(mutex_);
    file_path_ = path;
}

void TranscriptLog::append(const TranscriptRecord& record) {
    std::lock_guard lock(mutex_);
    records_.push_back(record);
    if (!file_path_.empty()) {
        std::ofstream out(file_path_, std::ios::app);
        json rec = {{"ts", record.timestamp},
                    {"tag", record.tag},
                    {"prompt_chars", record.prompt_chars},
                    {"response_chars", record.response_chars},
                    {"latency_ms", record.latency_ms}};
        out << rec.dump() << "\n";
    }
}

std::vector<TranscriptRecord> TranscriptLog::records() const {
    std::lock_guard lock(mutex_);
    return records_;
}

void MockChatBackend::script(const std::string& tag, const std::string& response) {
    std::lock_guard lock(mutex_);
    by_tag_[tag] = response;
}

void MockChatBackend::script_for(const std::string& tag, const std::string& user_content,
                                 const std::string& response) {
    std::lock_guard lock(mutex_);
    by_tag_and_digest_[{tag, content_digest(user_content)}] = response;
}

std::string MockChatBackend::complete(const ChatRequest& request) {
    std::string digest = content_digest(request.last_user_content());
    std::lock_guard lock(mutex_);
    tags_seen_.push_back(request.tag);
    if (auto it = by_tag_and_digest_.find({request.tag, digest});
        it != by_tag_and_digest_.end()) {
        return it->second;
    }
    if (auto it = by_tag_.find(request.tag); it != by_tag_.end()) {
        return it->second;
    }
    throw BackendError("mock backend: no script for tag \"" + request.tag + "\"");
}

std::size_t MockChatBackend::call_count() const {
    std::lock_guard lock(mutex_);
    return tags_seen_.size();
}

std::vector<std::string> MockChatBackend::tags_seen() const {
    std::lock_guard lock(mutex_);
    return tags_seen_;
}

HttpChatBackend::HttpChatBackend(BackendConfig config, std::shared_ptr<TranscriptLog> log)
    : config_(std::move(config)), log_(std::move(log)) {
    transport_ = [this](const std::string& body) { return default_transport(body); };
}

HttpChatBackend::HttpChatBackend(BackendConfig config, Transport transport,
                                 std::shared_ptr<TranscriptLog> log)
    : config_(std::move(config)), transport_(std::move(transport)), log_(std::move(log)) {}

namespace {

std::string now_iso8601() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
#if defined(_WIN32)
    gmtime_s(&tm, &t);
#else
    gmtime_r(&t, &tm);
#endif
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

std::string HttpChatBackend::complete(const ChatRequest& request) {
    if (request.messages.empty()) {
        throw ValidationError("chat request has no messages (tag: " + request.tag + ")");
    }
    request.last_user_content();  // validates presence of a user message

    json body;
    body["model"] = config_.model;
    body["temperature"] = request.temperature;
    body["max_tokens"] = request.max_tokens;
    body["messages"] = json::array();
    std::size_t prompt_chars = 0;
    for (const auto& msg : request.messages) {
        if (msg.content.empty()) {
            throw ValidationError("chat message with empty content (tag: " + request.tag + ")");
        }
        prompt_chars += msg.content.size();
        body["messages"].push_back({{"role", role_name(msg.role)}, {"content", msg.content}});
    }
    std::string payload = body.dump();

    {
        std::unique_lock lock(mutex_);
        slot_free_.wait(lock, [this] { return in_flight_ < config_.max_concurrency; });
        ++in_flight_;
        peak_in_flight_ = std::max(peak_in_flight_, in_flight_);
    }
    auto release = [this] {
        std::lock_guard lock(mutex_);
        --in_flight_;
        slot_free_.notify_one();
    };

    auto started = std::chrono::steady_clock::now();
    std::string response;
    std::string last_error;
    bool ok = false;
    for (int attempt = 0; attempt <= config_.max_retries && !ok; ++attempt) {
        if (attempt > 0) {
            auto delay = config_.backoff_base_seconds * std::pow(2.0, attempt - 1);
            std::this_thread::sleep_for(std::chrono::duration<double>(delay));
        }
        try {
            response = transport_(payload);
            ok = true;
        } catch (const RetryableError& e) {
            last_error = e.what();
        } catch (const std::exception& e) {
            release();
            throw BackendError("chat request failed (tag: " + request.tag + "): " + e.what());
        }
    }
    release();
    if (!ok) {
        throw BackendError("chat request failed after " +
                           std::to_string(config_.max_retries + 1) + " attempts (tag: " +
                           request.tag + "): " + last_error);
    }

    if (log_) {
        auto elapsed = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - started)
                           .count();
        log_->append({now_iso8601(), request.tag, prompt_chars, response.size(), elapsed});
    }
    return response;
}

int HttpChatBackend::peak_in_flight() const {
    std::lock_guard lock(mutex_);
    return peak_in_flight_;
}

std::string HttpChatBackend::default_transport(const std::string& body) {
    httplib::Client client(config_.endpoint);
    client.set_read_timeout(300, 0);
    httplib::Headers headers;
    if (const char* key = std::getenv(config_.api_key_env.c_str())) {
        headers.emplace("Authorization", std::string("Bearer ") + key);
    }
    auto res = client.Post(config_.path, headers, body, "application/json");
    if (!res) {
        throw RetryableError("transport error: " + httplib::to_string(res.error()));
    }
    if (res->status == 429 || res->status >= 500) {
        throw RetryableError("http status " + std::to_string(res->status));
    }
    if (res->status != 200) {
        throw BackendError("chat endpoint returned status " + std::to_string(res->status) +
                           ": " + res->body);
    }
    json doc = json::parse(res->body);
    return doc.at("choices").at(0).at("message").at("content").get<std::string>();
}

}  // namespace linkalign
