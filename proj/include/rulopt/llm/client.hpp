#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rulopt {
class KeyValueConfig;
}

namespace rulopt::llm {

enum class ErrorKind {
    Config,          // missing key/model/endpoint, bad mode
    Timeout,
    Transport,       // connection-level failure
    HttpStatus,      // non-retryable status
    RetriesExhausted,
    MalformedBody,
    EmptyResponse,
    CassetteExhausted,
    DigestMismatch,
};

class LlmError : public std::runtime_error {
public:
    LlmError(ErrorKind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

struct ChatMessage {
    std::string role; // system | user | assistant
    std::string content;
};

struct ChatRequest {
    std::string model;
    double temperature = 0.7;
    int max_tokens = 2048;
    std::vector<ChatMessage> messages;
};

struct ChatResponse {
    std::string content;
    long prompt_tokens = 0;
    long completion_tokens = 0;
    double latency_seconds = 0.0;
};

struct CassetteEntry {
    std::string digest;
    ChatRequest request;
    ChatResponse response;
};

struct Cassette {
    std::string model;
    std::string created_at;
    std::vector<CassetteEntry> entries;
};

// FNV-1a hash over a canonical serialization of the request; used to flag
// prompt drift between recording and replay.
std::string request_digest(const ChatRequest& request);

Cassette load_cassette(const std::string& path);
void save_cassette(const Cassette& cassette, const std::string& path);

enum class Mode { Live, Record, Replay };

struct ClientConfig {
    Mode mode = Mode::Replay;
    std::string base_url = "https://api.openai.com/v1";
    std::string model;
    double temperature = 0.7;
    int max_tokens = 2048;
    double timeout_seconds = 120.0;
    std::string api_key;      // from LLM_API_KEY unless set explicitly
    std::string cassette_path; // required for record/replay
    bool strict_replay = false;
    int max_attempts = 3;          // total tries on 429/5xx
    double backoff_base_seconds = 2.0;
};

// Reads `llm.*` keys (base_url, model, temperature, timeout_s, mode,
// cassette, max_tokens, strict_replay) and the LLM_API_KEY environment
// variable.
ClientConfig client_config_from(const KeyValueConfig& cfg);

Mode parse_mode(const std::string& text);

// Synchronous chat-completions client with deterministic replay. One
// instance serves one optimization run.
class ChatClient {
public:
    explicit ChatClient(ClientConfig config);

    // Throws LlmError; never returns an empty content on success.
    ChatResponse chat(const ChatRequest& request);

    // Next in-order cassette entry; digest mismatches warn (or throw in
    // strict mode).
    ChatResponse replay_match(const ChatRequest& request);

    const std::vector<std::string>& warnings() const { return warnings_; }
    int calls_made() const { return calls_made_; }
    const ClientConfig& config() const { return config_; }

private:
    ChatResponse live_chat(const ChatRequest& request);

    ClientConfig config_;
    Cassette cassette_;
    std::size_t replay_index_ = 0;
    int calls_made_ = 0;
    std::vector<std::string> warnings_;
};

} // namespace rulopt::llm
