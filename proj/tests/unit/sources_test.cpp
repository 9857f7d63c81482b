#include <gtest/gtest.h>

#include <atomic>
#include <thread>

#include <httplib.h>

#include "helpers.hpp"

using namespace recgraph;
using namespace testing_helpers;

namespace {

/// Local HTTP server on an ephemeral port, stopped on destruction.
class StubServer {
public:
    StubServer() {
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~StubServer() {
        server_.stop();
        thread_.join();
    }
    httplib::Server& server() { return server_; }
    std::string base() const { return "http://127.0.0.1:" + std::to_string(port_); }

private:
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
};

std::string page_with(const std::vector<std::string>& ids) {
    std::string body = "<html><script>var data = {";
    for (const auto& id : ids) body += R"("videoId": ")" + id + R"(", "x": 1, )";
    return body + "};</script></html>";
}

HttpSourceConfig config_for(const StubServer& s) {
    HttpSourceConfig c;
    c.endpoint_template = s.base() + "/watch?v={id}";
    c.meta_endpoint_template = s.base() + "/meta/{id}";
    c.timeout = Millis{500};
    c.max_retries = 2;
    c.retry_backoff = Millis{1};
    return c;
}

std::vector<std::string> numbered(int n) {
    std::vector<std::string> out;
    for (int i = 0; i < n; ++i) out.push_back("s" + std::to_string(i));
    return out;
}

} // namespace

TEST(InFlightLimiter, NeverExceedsCap) {
    std::atomic<int> active{0}, peak{0};
    ScriptedProvider inner([&](const VideoId& id, RequestIndex k) {
        const int now = ++active;
        int prev = peak.load();
        while (now > prev && !peak.compare_exchange_weak(prev, now)) {}
        std::this_thread::sleep_for(std::chrono::milliseconds(2));
        --active;
        return ok_sample(id.str(), k, {});
    });
    InFlightLimiter limited(inner, 3);
    std::vector<std::thread> threads;
    for (int t = 0; t < 8; ++t) {
        threads.emplace_back([&, t] {
            for (int k = 0; k < 10; ++k) limited.fetch_suggestions(vid("t" + std::to_string(t)), k);
        });
    }
    for (auto& t : threads) t.join();
    EXPECT_LE(peak.load(), 3);
    EXPECT_GE(peak.load(), 2);
    EXPECT_EQ(inner.calls.load(), 80);
}

TEST(ReplaySource, ServesInStoredOrderThenThrows) {
    SampleLog log;
    log.samples.push_back(ok_sample("a", 1, ids({"y"})));
    log.samples.push_back(ok_sample("a", 0, ids({"x"})));
    auto m = meta("a", "Music", 10, 1, 0, "au");
    log.metas.push_back({0, m});
    ReplaySource replay(log);
    EXPECT_EQ(replay.fetch_suggestions(vid("a"), 99).suggestions, ids({"x"}));
    EXPECT_EQ(replay.remaining(vid("a")), 1u);
    EXPECT_EQ(replay.fetch_suggestions(vid("a"), 0).suggestions, ids({"y"}));
    EXPECT_THROW(replay.fetch_suggestions(vid("a"), 2), ExhaustedLogError);
    EXPECT_THROW(replay.fetch_suggestions(vid("b"), 0), ExhaustedLogError);
    EXPECT_EQ(replay.fetch_meta(vid("a")), m);
    EXPECT_FALSE(replay.fetch_meta(vid("b")).has_value());
}

TEST(HttpSourceConfig, ValidatesTemplatesAndPattern) {
    HttpSourceConfig c;
    EXPECT_THROW(c.validate(), ConfigError);
    c.endpoint_template = "http://h/{id}";
    EXPECT_NO_THROW(c.validate());
    c.extract_pattern = "no-groups";
    EXPECT_THROW(c.validate(), ConfigError);
    c.extract_pattern = "(";
    EXPECT_THROW(c.validate(), ConfigError);
}

TEST(HttpSource, ExtractsSanitizedSuggestions) {
    StubServer stub;
    std::vector<std::string> page = numbered(19);
    page.insert(page.begin() + 3, "self");
    page.push_back("s4");
    stub.server().Get("/watch", [&](const httplib::Request&, httplib::Response& res) {
        res.set_content(page_with(page), "text/html");
    });
    HttpSource source(config_for(stub));
    const auto sample = source.fetch_suggestions(vid("self"), 7);
    ASSERT_TRUE(sample.ok());
    EXPECT_EQ(sample.request_index, 7);
    EXPECT_EQ(sample.suggestions.size(), 19u);
    EXPECT_EQ(sample.suggestions.front(), vid("s0"));
}

TEST(HttpSource, CapsTwentyFiveAtTwenty) {
    StubServer stub;
    stub.server().Get("/watch", [](const httplib::Request&, httplib::Response& res) {
        res.set_content(page_with(numbered(25)), "text/html");
    });
    HttpSource source(config_for(stub));
    const auto sample = source.fetch_suggestions(vid("self"), 0);
    ASSERT_TRUE(sample.ok());
    EXPECT_EQ(sample.suggestions.size(), kMaxSuggestions);
}

TEST(HttpSource, NotFoundIsItemGone) {
    StubServer stub;
    std::atomic<int> hits{0};
    stub.server().Get("/watch", [&](const httplib::Request&, httplib::Response& res) {
        ++hits;
        res.status = 404;
    });
    HttpSource source(config_for(stub));
    EXPECT_EQ(source.fetch_suggestions(vid("gone"), 0).status, SampleStatus::item_gone);
    EXPECT_EQ(hits.load(), 1);
}

TEST(HttpSource, RetriesServerErrorsThenGivesUp) {
    StubServer stub;
    std::atomic<int> hits{0};
    stub.server().Get("/watch", [&](const httplib::Request&, httplib::Response& res) {
        ++hits;
        res.status = 503;
    });
    HttpSource source(config_for(stub));
    EXPECT_EQ(source.fetch_suggestions(vid("x"), 0).status, SampleStatus::transport_error);
    EXPECT_EQ(hits.load(), 3);
}

TEST(HttpSource, RecoversAfterTransientFailure) {
    StubServer stub;
    std::atomic<int> hits{0};
    stub.server().Get("/watch", [&](const httplib::Request&, httplib::Response& res) {
        if (++hits == 1) {
            res.status = 429;
            return;
        }
        res.set_content(page_with({"a", "b"}), "text/html");
    });
    HttpSource source(config_for(stub));
    const auto sample = source.fetch_suggestions(vid("x"), 0);
    EXPECT_TRUE(sample.ok());
    EXPECT_EQ(hits.load(), 2);
}

TEST(HttpSource, EmptyPageIsParseError) {
    StubServer stub;
    stub.server().Get("/watch", [](const httplib::Request&, httplib::Response& res) {
        res.set_content("<html></html>", "text/html");
    });
    HttpSource source(config_for(stub));
    EXPECT_EQ(source.fetch_suggestions(vid("x"), 0).status, SampleStatus::parse_error);
}

TEST(HttpSource, SendsNoSessionState) {
    StubServer stub;
    std::vector<httplib::Headers> seen;
    std::mutex m;
    stub.server().Get("/watch", [&](const httplib::Request& req, httplib::Response& res) {
        std::lock_guard lock(m);
        seen.push_back(req.headers);
        res.set_header("Set-Cookie", "session=abc");
        res.set_content(page_with({"a"}), "text/html");
    });
    HttpSource source(config_for(stub));
    source.fetch_suggestions(vid("x"), 0);
    source.fetch_suggestions(vid("x"), 1);
    ASSERT_EQ(seen.size(), 2u);
    for (const auto& h : seen) {
        EXPECT_EQ(h.count("Cookie"), 0u);
        EXPECT_EQ(h.count("Authorization"), 0u);
    }
    auto strip = [](httplib::Headers h) {
        h.erase("REMOTE_ADDR");
        h.erase("REMOTE_PORT");
        h.erase("LOCAL_ADDR");
        h.erase("LOCAL_PORT");
        return h;
    };
    EXPECT_EQ(strip(seen[0]), strip(seen[1]));
}

TEST(HttpSource, TimeoutIsBounded) {
    StubServer stub;
    stub.server().Get("/watch", [](const httplib::Request&, httplib::Response& res) {
        std::this_thread::sleep_for(std::chrono::milliseconds(600));
        res.set_content(page_with({"a"}), "text/html");
    });
    auto cfg = config_for(stub);
    cfg.timeout = Millis{100};
    cfg.max_retries = 0;
    HttpSource source(cfg);
    const auto start = std::chrono::steady_clock::now();
    EXPECT_EQ(source.fetch_suggestions(vid("x"), 0).status, SampleStatus::transport_error);
    EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::milliseconds(550));
}

TEST(HttpSource, ParsesMetadata) {
    StubServer stub;
    stub.server().Get(R"(/meta/(\w+))", [](const httplib::Request& req, httplib::Response& res) {
        res.set_content(R"({"views": 120, "likes": 9, "dislikes": 2, "category": "Music", "author": ")" +
                            req.matches[1].str() + R"("})",
                        "application/json");
    });
    HttpSource source(config_for(stub));
    const auto m = source.fetch_meta(vid("abc"));
    ASSERT_TRUE(m.has_value());
    EXPECT_EQ(m->views, 120u);
    EXPECT_EQ(m->category, "Music");
    EXPECT_EQ(m->author, "abc");
}

TEST(HttpSource, PercentEncodesIds) {
    EXPECT_EQ(detail::expand_template("http://h/w?v={id}&again={id}", vid("a b/c")),
              "http://h/w?v=a%20b%2Fc&again=a%20b%2Fc");
}
