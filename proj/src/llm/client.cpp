#include "rulopt/llm/client.hpp"

#include "rulopt/config.hpp"
#include "rulopt/text.hpp"

#ifdef RULOPT_HAVE_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <thread>

namespace rulopt::llm {

namespace {

using nlohmann::json;

std::uint64_t fnv1a(std::uint64_t hash, std::string_view data) {
    constexpr std::uint64_t prime = 1099511628211ULL;
    for (unsigned char c : data) {
        hash ^= c;
        hash *= prime;
    }
    return hash;
}

} // namespace

std::string request_digest(const ChatRequest& request) {
    std::uint64_t hash = 1469598103934665603ULL;
    hash = fnv1a(hash, request.model);
    hash = fnv1a(hash, "\x1f");
    hash = fnv1a(hash, format_double(request.temperature));
    hash = fnv1a(hash, "\x1f");
    hash = fnv1a(hash, std::to_string(request.max_tokens));
    for (const auto& m : request.messages) {
        hash = fnv1a(hash, "\x1e");
        hash = fnv1a(hash, m.role);
        hash = fnv1a(hash, "\x1f");
        hash = fnv1a(hash, m.content);
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return std::string(buf);
}

namespace {

json request_to_json(const ChatRequest& r) {
    json messages = json::array();
    for (const auto& m : r.messages)
        messages.push_back({{"role", m.role}, {"content", m.content}});
    return json{{"model", r.model},
                {"temperature", r.temperature},
                {"max_tokens", r.max_tokens},
                {"messages", std::move(messages)}};
}

ChatRequest request_from_json(const json& j) {
    ChatRequest r;
    r.model = j.value("model", "");
    r.temperature = j.value("temperature", 0.7);
    r.max_tokens = j.value("max_tokens", 2048);
    for (const auto& m : j.at("messages"))
        r.messages.push_back(ChatMessage{m.value("role", ""), m.value("content", "")});
    return r;
}

} // namespace

Cassette load_cassette(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw LlmError(ErrorKind::Config, "cannot open cassette: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw LlmError(ErrorKind::MalformedBody, "cassette " + path + " is not valid JSON: " + e.what());
    }
    Cassette cassette;
    try {
        const auto& meta = j.at("metadata");
        cassette.model = meta.value("model", "");
        cassette.created_at = meta.value("created_at", "");
        for (const auto& e : j.at("entries")) {
            CassetteEntry entry;
            entry.digest = e.value("digest", "");
            entry.request = request_from_json(e.at("request"));
            const auto& resp = e.at("response");
            entry.response.content = resp.value("content", "");
            entry.response.prompt_tokens = resp.value("prompt_tokens", 0L);
            entry.response.completion_tokens = resp.value("completion_tokens", 0L);
            entry.response.latency_seconds = resp.value("latency_seconds", 0.0);
            cassette.entries.push_back(std::move(entry));
        }
    } catch (const json::exception& e) {
        throw LlmError(ErrorKind::MalformedBody, "cassette " + path + " has unexpected shape: " + e.what());
    }
    return cassette;
}

void save_cassette(const Cassette& cassette, const std::string& path) {
    json entries = json::array();
    for (const auto& e : cassette.entries) {
        entries.push_back(json{{"digest", e.digest},
                               {"request", request_to_json(e.request)},
                               {"response",
                                json{{"content", e.response.content},
                                     {"prompt_tokens", e.response.prompt_tokens},
                                     {"completion_tokens", e.response.completion_tokens},
                                     {"latency_seconds", e.response.latency_seconds}}}});
    }
    json j{{"metadata", json{{"model", cassette.model}, {"created_at", cassette.created_at}}},
           {"entries", std::move(entries)}};
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw LlmError(ErrorKind::Config, "cannot write cassette: " + path);
    out << j.dump(2) << "\n";
}

Mode parse_mode(const std::string& text) {
    if (text == "live")
        return Mode::Live;
    if (text == "record")
        return Mode::Record;
    if (text == "replay")
        return Mode::Replay;
    throw LlmError(ErrorKind::Config, "llm.mode must be live, record or replay, got \"" + text + "\"");
}

ClientConfig client_config_from(const KeyValueConfig& cfg) {
    ClientConfig c;
    c.mode = parse_mode(cfg.get_string("llm.mode", "replay"));
    c.base_url = cfg.get_string("llm.base_url", c.base_url);
    c.model = cfg.get_string("llm.model", c.model);
    c.temperature = cfg.get_double("llm.temperature", c.temperature);
    c.max_tokens = cfg.get_int("llm.max_tokens", c.max_tokens);
    c.timeout_seconds = cfg.get_double("llm.timeout_s", c.timeout_seconds);
    c.cassette_path = cfg.get_string("llm.cassette", c.cassette_path);
    c.strict_replay = cfg.get_bool("llm.strict_replay", c.strict_replay);
    if (const char* key = std::getenv("LLM_API_KEY"))
        c.api_key = key;
    return c;
}

ChatClient::ChatClient(ClientConfig config) : config_(std::move(config)) {
    if (config_.mode == Mode::Replay) {
        if (config_.cassette_path.empty())
            throw LlmError(ErrorKind::Config, "replay mode requires a cassette path");
        cassette_ = load_cassette(config_.cassette_path);
    } else {
        // Fail fast, before any network call.
        if (config_.api_key.empty())
            throw LlmError(ErrorKind::Config,
                           "live/record mode requires an API key (set the LLM_API_KEY environment variable)");
        if (config_.model.empty())
            throw LlmError(ErrorKind::Config, "live/record mode requires llm.model");
        if (config_.mode == Mode::Record && config_.cassette_path.empty())
            throw LlmError(ErrorKind::Config, "record mode requires a cassette path");
        cassette_.model = config_.model;
    }
}

ChatResponse ChatClient::replay_match(const ChatRequest& request) {
    if (replay_index_ >= cassette_.entries.size())
        throw LlmError(ErrorKind::CassetteExhausted,
                       "cassette exhausted at call " + std::to_string(replay_index_ + 1) + " (cassette has " +
                           std::to_string(cassette_.entries.size()) + " entries)");
    const CassetteEntry& entry = cassette_.entries[replay_index_];
    std::string digest = request_digest(request);
    if (digest != entry.digest) {
        std::string note = "digest mismatch at call " + std::to_string(replay_index_ + 1) + ": recorded " +
                           entry.digest + ", got " + digest;
        if (config_.strict_replay)
            throw LlmError(ErrorKind::DigestMismatch, note);
        warnings_.push_back(note);
    }
    ++replay_index_;
    return entry.response;
}

ChatResponse ChatClient::chat(const ChatRequest& request) {
    if (request.messages.empty())
        throw LlmError(ErrorKind::Config, "chat request has no messages");
    const std::string& first = request.messages.front().role;
    if (first != "system" && first != "user")
        throw LlmError(ErrorKind::Config, "first message role must be system or user");

    ++calls_made_;
    ChatResponse response;
    if (config_.mode == Mode::Replay) {
        response = replay_match(request);
    } else {
        response = live_chat(request);
        if (config_.mode == Mode::Record) {
            cassette_.entries.push_back(CassetteEntry{request_digest(request), request, response});
            save_cassette(cassette_, config_.cassette_path);
        }
    }
    if (response.content.empty())
        throw LlmError(ErrorKind::EmptyResponse, "empty response content");
    return response;
}

ChatResponse ChatClient::live_chat(const ChatRequest& request) {
    // Split base_url into scheme://host[:port] and a path prefix.
    std::string root = config_.base_url;
    std::string prefix;
    auto scheme_end = root.find("://");
    if (scheme_end == std::string::npos)
        throw LlmError(ErrorKind::Config, "llm.base_url must include a scheme: " + root);
    auto path_start = root.find('/', scheme_end + 3);
    if (path_start != std::string::npos) {
        prefix = root.substr(path_start);
        root = root.substr(0, path_start);
    }
    while (!prefix.empty() && prefix.back() == '/')
        prefix.pop_back();

#ifndef RULOPT_HAVE_OPENSSL
    if (root.rfind("https://", 0) == 0)
        throw LlmError(ErrorKind::Config, "built without TLS support; use an http:// endpoint");
#endif

    httplib::Client client(root);
    auto timeout = std::chrono::duration<double>(config_.timeout_seconds);
    client.set_connection_timeout(std::chrono::duration_cast<std::chrono::milliseconds>(timeout));
    client.set_read_timeout(std::chrono::duration_cast<std::chrono::milliseconds>(timeout));
    client.set_write_timeout(std::chrono::duration_cast<std::chrono::milliseconds>(timeout));
    client.set_bearer_token_auth(config_.api_key);

    std::string body = request_to_json(request).dump();

    for (int attempt = 1;; ++attempt) {
        auto start = std::chrono::steady_clock::now();
        httplib::Result result = client.Post(prefix + "/chat/completions", body, "application/json");
        double latency = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

        if (!result) {
            if (result.error() == httplib::Error::ConnectionTimeout || result.error() == httplib::Error::Read)
                throw LlmError(ErrorKind::Timeout, "request timed out after " +
                                                       format_double(config_.timeout_seconds) + "s");
            throw LlmError(ErrorKind::Transport,
                           "transport failure: " + httplib::to_string(result.error()));
        }

        int status = result->status;
        if (status == 429 || status >= 500) {
            if (attempt >= config_.max_attempts)
                throw LlmError(ErrorKind::RetriesExhausted, "giving up after " + std::to_string(attempt) +
                                                                " attempts, last status " +
                                                                std::to_string(status));
            double delay = config_.backoff_base_seconds * static_cast<double>(1 << (attempt - 1));
            std::this_thread::sleep_for(std::chrono::duration<double>(delay));
            continue;
        }
        if (status != 200)
            throw LlmError(ErrorKind::HttpStatus, "endpoint returned status " + std::to_string(status));

        try {
            json j = json::parse(result->body);
            ChatResponse response;
            response.content = j.at("choices").at(0).at("message").at("content").get<std::string>();
            if (j.contains("usage")) {
                response.prompt_tokens = j["usage"].value("prompt_tokens", 0L);
                response.completion_tokens = j["usage"].value("completion_tokens", 0L);
            }
            response.latency_seconds = latency;
            return response;
        } catch (const json::exception& e) {
            throw LlmError(ErrorKind::MalformedBody, std::string("malformed response body: ") + e.what());
        }
    }
}

} // namespace rulopt::llm
