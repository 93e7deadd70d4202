#include "ccsim/llm_client.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "ccsim/sha256.hpp"

namespace ccsim {

namespace {

// Length-prefixed concatenation keeps the key injective over the three
// request texts.
std::string key_material(const ChatRequest& req) {
    std::string out;
    auto append = [&out](const std::string& s) {
        uint64_t len = s.size();
        for (int i = 0; i < 8; ++i) out.push_back(char(len >> (8 * i)));
        out += s;
    };
    append(req.model_name);
    append(req.system_text);
    append(req.user_text);
    return out;
}

}  // namespace

std::string Cassette::key_for(const ChatRequest& req) { return sha256_hex(key_material(req)); }

Cassette Cassette::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cassette: cannot open " + path);
    Cassette c;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.contains("key") || !j.contains("response_text")) {
            throw IoError("cassette: malformed line " + std::to_string(line_no) + " in " + path);
        }
        CassetteEntry e;
        e.key = j.at("key").get<std::string>();
        e.response_text = j.at("response_text").get<std::string>();
        e.recorded_at = j.value("recorded_at", "");
        if (auto it = c.by_key_.find(e.key); it != c.by_key_.end()) {
            c.order_[it->second] = std::move(e);  // latest wins
        } else {
            c.by_key_[e.key] = c.order_.size();
            c.order_.push_back(std::move(e));
        }
    }
    return c;
}

void Cassette::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("cassette: cannot write " + path);
    for (const auto& e : order_) {
        nlohmann::json j{{"key", e.key}, {"response_text", e.response_text},
                         {"recorded_at", e.recorded_at}};
        out << j.dump() << '\n';
    }
}

void Cassette::put(const ChatRequest& req, const std::string& response_text,
                   const std::string& recorded_at) {
    CassetteEntry e{key_for(req), response_text, recorded_at};
    if (auto it = by_key_.find(e.key); it != by_key_.end()) {
        order_[it->second] = std::move(e);
    } else {
        by_key_[e.key] = order_.size();
        order_.push_back(std::move(e));
    }
}

std::optional<std::string> Cassette::find(const std::string& key) const {
    auto it = by_key_.find(key);
    if (it == by_key_.end()) return std::nullopt;
    return order_[it->second].response_text;
}

std::string ReplayBackend::complete(const ChatRequest& req) {
    std::string key = Cassette::key_for(req);
    auto hit = cassette_.find(key);
    if (!hit) {
        throw ReplayMissError("replay: no cassette entry for key " + key +
                              " (user text begins: " + req.user_text.substr(0, 60) + ")");
    }
    return *hit;
}

LiveConfig LiveConfig::from_env() { return from_env(LiveConfig{}); }

LiveConfig LiveConfig::from_env(LiveConfig base) {
    auto fill = [](std::string& field, const char* var) {
        if (field.empty()) {
            if (const char* v = std::getenv(var)) field = v;
        }
    };
    fill(base.base_url, "CC_LLM_API_BASE");
    fill(base.api_key, "CC_LLM_API_KEY");
    fill(base.model, "CC_LLM_MODEL");
    return base;
}

LiveBackend::LiveBackend(LiveConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.base_url.empty()) {
        throw ConfigError("live backend: no base url (set CC_LLM_API_BASE)");
    }
}

std::string LiveBackend::request_body(const ChatRequest& req, const std::string& model) {
    nlohmann::json body{
        {"model", model.empty() ? req.model_name : model},
        {"messages",
         {{{"role", "system"}, {"content", req.system_text}},
          {{"role", "user"}, {"content", req.user_text}}}},
        {"temperature", req.temperature},
        {"max_tokens", req.max_tokens},
    };
    return body.dump();
}

std::string LiveBackend::complete(const ChatRequest& req) {
    httplib::Client client(cfg_.base_url);
    client.set_read_timeout(60, 0);
    httplib::Headers headers;
    if (!cfg_.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg_.api_key);

    std::string body = request_body(req, cfg_.model);
    std::string last_error = "no attempt made";
    for (int attempt = 0; attempt < cfg_.max_retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(
                std::chrono::milliseconds(cfg_.backoff_initial_ms << (attempt - 1)));
        }
        auto res = client.Post("/chat/completions", headers, body, "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status < 200 || res->status >= 300) {
            last_error = "http status " + std::to_string(res->status);
            continue;
        }
        nlohmann::json j = nlohmann::json::parse(res->body, nullptr, false);
        if (j.is_discarded()) {
            last_error = "unparseable response body";
            continue;
        }
        try {
            return j.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const std::exception& e) {
            last_error = std::string("unexpected response shape: ") + e.what();
        }
    }
    throw LiveError("live backend failed after retries: " + last_error);
}

RecordingBackend::RecordingBackend(std::unique_ptr<LlmBackend> inner, std::string cassette_path)
    : inner_(std::move(inner)), path_(std::move(cassette_path)) {}

RecordingBackend::~RecordingBackend() {
    try {
        cassette_.save(path_);
    } catch (...) {
        // Destructor: nothing sensible to do; explicit completes already saved.
    }
}

std::string RecordingBackend::complete(const ChatRequest& req) {
    std::string response = inner_->complete(req);
    auto now = std::chrono::system_clock::now().time_since_epoch();
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(now).count();
    cassette_.put(req, response, std::to_string(secs));
    cassette_.save(path_);
    return response;
}

}  // namespace ccsim
