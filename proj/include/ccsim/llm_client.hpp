#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ccsim/errors.hpp"

namespace ccsim {

struct ChatRequest {
    std::string model_name;
    std::string system_text;
    std::string user_text;
    double temperature{0.0};  // pinned 0 for all policy consults
    int max_tokens{256};
};

struct CassetteEntry {
    std::string key;  // lowercase hex hash of (model, system, user)
    std::string response_text;
    std::string recorded_at;
};

/// Exact-match store of prompt -> response pairs, persisted as JSON-lines.
/// Keys are content hashes only (no timestamps), so re-rendered identical
/// prompts hit the same entry; duplicate keys keep the latest response.
class Cassette {
public:
    static std::string key_for(const ChatRequest& req);

    static Cassette load(const std::string& path);
    void save(const std::string& path) const;

    void put(const ChatRequest& req, const std::string& response_text,
             const std::string& recorded_at);
    std::optional<std::string> find(const std::string& key) const;

    size_t size() const { return order_.size(); }
    const std::vector<CassetteEntry>& entries() const { return order_; }

private:
    std::vector<CassetteEntry> order_;          // insertion order for persistence
    std::map<std::string, size_t> by_key_;      // key -> index in order_
};

class LlmBackend {
public:
    virtual ~LlmBackend() = default;
    virtual std::string complete(const ChatRequest& req) = 0;
    virtual std::string name() const = 0;
};

/// Scripted responses delivered in order; throws ScriptExhaustedError when
/// the script runs out.
class MockBackend : public LlmBackend {
public:
    explicit MockBackend(std::vector<std::string> script) : script_(std::move(script)) {}
    std::string complete(const ChatRequest&) override {
        if (next_ >= script_.size()) throw ScriptExhaustedError("mock: script exhausted");
        return script_[next_++];
    }
    std::string name() const override { return "mock"; }

private:
    std::vector<std::string> script_;
    size_t next_{0};
};

/// Strict cassette replay: unseen requests raise ReplayMissError carrying
/// the offending key.
class ReplayBackend : public LlmBackend {
public:
    explicit ReplayBackend(Cassette cassette) : cassette_(std::move(cassette)) {}
    std::string complete(const ChatRequest& req) override;
    std::string name() const override { return "replay"; }

private:
    Cassette cassette_;
};

struct LiveConfig {
    std::string base_url;  // e.g. https://api.example.com/v1
    std::string api_key;
    std::string model;
    int max_retries{3};
    int backoff_initial_ms{250};

    /// Fills unset fields from CC_LLM_API_BASE / CC_LLM_API_KEY / CC_LLM_MODEL.
    static LiveConfig from_env();
    static LiveConfig from_env(LiveConfig base);
};

/// One HTTP chat-completions call per consult with bounded retries and
/// exponential backoff; only the first choice's text is consumed.
class LiveBackend : public LlmBackend {
public:
    explicit LiveBackend(LiveConfig cfg);
    std::string complete(const ChatRequest& req) override;
    std::string name() const override { return "live"; }

    /// Request body for a chat completion; exposed for wire-format tests.
    static std::string request_body(const ChatRequest& req, const std::string& model);

private:
    LiveConfig cfg_;
};

/// Wraps another backend and appends every exchange to a cassette file.
class RecordingBackend : public LlmBackend {
public:
    RecordingBackend(std::unique_ptr<LlmBackend> inner, std::string cassette_path);
    ~RecordingBackend();
    std::string complete(const ChatRequest& req) override;
    std::string name() const override { return "record(" + inner_->name() + ")"; }
    const Cassette& cassette() const { return cassette_; }

private:
    std::unique_ptr<LlmBackend> inner_;
    std::string path_;
    Cassette cassette_;
};

}  // namespace ccsim
