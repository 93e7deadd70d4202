#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "ccsim/llm_client.hpp"
#include "ccsim/sha256.hpp"

using namespace ccsim;

namespace {

ChatRequest request(const std::string& user) {
    ChatRequest r;
    r.model_name = "gpt-4o-mini";
    r.system_text = "You are an expert congestion controller in wide area networks.";
    r.user_text = user;
    return r;
}

std::string temp_path(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("sha256 matches the reference vectors") {
    CHECK(sha256_hex("") ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq") ==
          "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
    // Multi-block input (>64 bytes).
    CHECK(sha256_hex(std::string(1000, 'a')) ==
          "41edece42d63e8d9bf515a9ba6932e1c20cbc9f5a5d134645adb5db1b9737ea3");
}

TEST_CASE("cassette keys are content hashes, injective over the texts") {
    auto k1 = Cassette::key_for(request("hello"));
    auto k2 = Cassette::key_for(request("hello"));
    auto k3 = Cassette::key_for(request("world"));
    CHECK(k1 == k2);
    CHECK(k1 != k3);
    CHECK(k1.size() == 64);

    ChatRequest other_model = request("hello");
    other_model.model_name = "other";
    CHECK(Cassette::key_for(other_model) != k1);
}

TEST_CASE("cassette round trip with latest-wins overwrite") {
    Cassette c;
    c.put(request("a"), "first", "t0");
    c.put(request("b"), "other", "t1");
    c.put(request("a"), "second", "t2");  // same key, latest wins
    CHECK(c.size() == 2);
    CHECK(*c.find(Cassette::key_for(request("a"))) == "second");

    std::string path = temp_path("ccsim_cassette.jsonl");
    c.save(path);
    Cassette loaded = Cassette::load(path);
    CHECK(loaded.size() == 2);
    CHECK(*loaded.find(Cassette::key_for(request("a"))) == "second");
    CHECK(*loaded.find(Cassette::key_for(request("b"))) == "other");
}

TEST_CASE("replay returns recorded bytes and misses strictly") {
    Cassette c;
    c.put(request("seen"), "{\"next_CWND\": 1, \"next_SSThreshold\": 1}", "t");
    ReplayBackend replay(c);
    CHECK(replay.complete(request("seen")) == "{\"next_CWND\": 1, \"next_SSThreshold\": 1}");
    CHECK_THROWS_AS(replay.complete(request("unseen")), ReplayMissError);
}

TEST_CASE("mock backend walks the script in order and then exhausts") {
    MockBackend mock({"hold", "decrease"});
    ChatRequest r = request("any");
    CHECK(mock.complete(r) == "hold");
    CHECK(mock.complete(r) == "decrease");
    CHECK_THROWS_AS(mock.complete(r), ScriptExhaustedError);
}

TEST_CASE("recording backend persists entries as it completes") {
    std::string path = temp_path("ccsim_record.jsonl");
    std::filesystem::remove(path);
    {
        RecordingBackend rec(std::make_unique<MockBackend>(
                                 std::vector<std::string>{"resp-one", "resp-two"}),
                             path);
        CHECK(rec.complete(request("one")) == "resp-one");
        CHECK(rec.complete(request("two")) == "resp-two");
    }
    Cassette loaded = Cassette::load(path);
    CHECK(loaded.size() == 2);
    CHECK(*loaded.find(Cassette::key_for(request("one"))) == "resp-one");
}

TEST_CASE("live backend speaks the chat-completions wire format") {
    httplib::Server server;
    std::atomic<int> hits{0};
    nlohmann::json seen_body;
    server.Post("/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
        ++hits;
        seen_body = nlohmann::json::parse(req.body);
        if (hits == 1) {
            res.status = 500;  // first attempt fails, retry should recover
            return;
        }
        nlohmann::json reply{
            {"choices",
             {{{"message", {{"role", "assistant"}, {"content", "{\"next_CWND\": 7}"}}}}}}};
        res.set_content(reply.dump(), "application/json");
    });
    int port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread server_thread([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    LiveConfig cfg;
    cfg.base_url = "http://127.0.0.1:" + std::to_string(port);
    cfg.api_key = "test-key";
    cfg.model = "test-model";
    cfg.backoff_initial_ms = 1;
    LiveBackend live(cfg);

    ChatRequest r = request("net stats here");
    CHECK(live.complete(r) == "{\"next_CWND\": 7}");
    CHECK(hits == 2);
    CHECK(seen_body.at("model") == "test-model");
    CHECK(seen_body.at("temperature") == 0.0);
    CHECK(seen_body.at("messages").size() == 2);
    CHECK(seen_body.at("messages")[0].at("role") == "system");
    CHECK(seen_body.at("messages")[1].at("content") == "net stats here");

    server.stop();
    server_thread.join();
}

TEST_CASE("live backend gives up after bounded retries") {
    httplib::Server server;
    std::atomic<int> hits{0};
    server.Post("/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
        ++hits;
        res.status = 503;
    });
    int port = server.bind_to_any_port("127.0.0.1");
    std::thread server_thread([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    LiveConfig cfg;
    cfg.base_url = "http://127.0.0.1:" + std::to_string(port);
    cfg.backoff_initial_ms = 1;
    LiveBackend live(cfg);
    CHECK_THROWS_AS(live.complete(request("x")), LiveError);
    CHECK(hits == 3);

    server.stop();
    server_thread.join();
}
