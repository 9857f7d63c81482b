#pragma once

#include <regex>
#include <string>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "recgraph/source.hpp"

namespace recgraph {

struct HttpSourceConfig {
    /// URL with an `{id}` placeholder, e.g. `https://host/watch?v={id}`.
    std::string endpoint_template;
    /// Optional metadata endpoint returning a JSON object; empty disables fetch_meta.
    std::string meta_endpoint_template;
    Millis timeout{10000};
    int max_retries = 3;
    /// Wait before the first retry; doubled for every further retry.
    Millis retry_backoff{1000};
    /// Regex whose first capture group yields one suggestion id per match, in order.
    std::string extract_pattern = R"re("videoId"\s*:\s*"([A-Za-z0-9_-]+)")re";
    std::string user_agent = "recgraph/1.0";

    void validate() const {
        if (endpoint_template.find("{id}") == std::string::npos) {
            throw ConfigError("endpoint_template must contain an {id} placeholder");
        }
        if (!meta_endpoint_template.empty() && meta_endpoint_template.find("{id}") == std::string::npos) {
            throw ConfigError("meta_endpoint_template must contain an {id} placeholder");
        }
        if (timeout <= Millis::zero()) throw ConfigError("timeout must be positive");
        if (max_retries < 0) throw ConfigError("max_retries must be >= 0");
        if (retry_backoff < Millis::zero()) throw ConfigError("retry_backoff must be >= 0");
        try {
            std::regex probe(extract_pattern);
            if (probe.mark_count() < 1) throw ConfigError("extract_pattern needs a capture group");
        } catch (const std::regex_error& e) {
            throw ConfigError(std::string("extract_pattern: ") + e.what());
        }
    }
};

namespace detail {

inline std::string percent_encode(std::string_view text) {
    static constexpr char hex[] = "0123456789ABCDEF";
    std::string out;
    for (const unsigned char c : text) {
        if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
            out += static_cast<char>(c);
        } else {
            out += '%';
            out += hex[c >> 4];
            out += hex[c & 15];
        }
    }
    return out;
}

struct SplitUrl {
    std::string origin; // scheme://host[:port]
    std::string target; // path + query
};

inline SplitUrl split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("URL lacks a scheme: " + url);
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

inline std::string expand_template(const std::string& tmpl, const VideoId& id) {
    std::string out = tmpl;
    const std::string encoded = percent_encode(id.str());
    for (auto pos = out.find("{id}"); pos != std::string::npos; pos = out.find("{id}", pos + encoded.size())) {
        out.replace(pos, 4, encoded);
    }
    return out;
}

} // namespace detail

/// Stateless HTTP(S) source. Every request uses a fresh client with a fixed
/// header set: no cookies, session tokens or per-request identifiers are sent.
class HttpSource final : public Provider {
public:
    explicit HttpSource(HttpSourceConfig config) : config_(std::move(config)) {
        config_.validate();
        pattern_ = std::regex(config_.extract_pattern);
    }

    const HttpSourceConfig& config() const noexcept { return config_; }

    SuggestionSample fetch_suggestions(const VideoId& id, RequestIndex request_index) override {
        const auto url = detail::split_url(detail::expand_template(config_.endpoint_template, id));
        const auto stamp = SystemClock{}.now();
        Millis backoff = config_.retry_backoff;
        for (int attempt = 0;; ++attempt) {
            const Outcome outcome = attempt_once(url);
            switch (outcome.kind) {
                case Outcome::Kind::body: {
                    auto ids = extract(outcome.body);
                    auto cleaned = sanitize_suggestions(id, std::move(ids));
                    if (cleaned.empty()) {
                        return SuggestionSample::failed(id, request_index, stamp, SampleStatus::parse_error);
                    }
                    return SuggestionSample{id, request_index, stamp, std::move(cleaned), SampleStatus::ok};
                }
                case Outcome::Kind::gone:
                    return SuggestionSample::failed(id, request_index, stamp, SampleStatus::item_gone);
                case Outcome::Kind::fatal:
                    return SuggestionSample::failed(id, request_index, stamp, SampleStatus::transport_error);
                case Outcome::Kind::retryable:
                    break;
            }
            if (attempt >= config_.max_retries) {
                spdlog::warn("{}: giving up after {} attempt(s)", id.str(), attempt + 1);
                return SuggestionSample::failed(id, request_index, stamp, SampleStatus::transport_error);
            }
            std::this_thread::sleep_for(backoff);
            backoff *= 2;
        }
    }

    std::optional<VideoMeta> fetch_meta(const VideoId& id) override {
        if (config_.meta_endpoint_template.empty()) return std::nullopt;
        const auto url = detail::split_url(detail::expand_template(config_.meta_endpoint_template, id));
        Millis backoff = config_.retry_backoff;
        for (int attempt = 0;; ++attempt) {
            const Outcome outcome = attempt_once(url);
            if (outcome.kind == Outcome::Kind::body) return parse_meta(id, outcome.body);
            if (outcome.kind != Outcome::Kind::retryable || attempt >= config_.max_retries) {
                return std::nullopt;
            }
            std::this_thread::sleep_for(backoff);
            backoff *= 2;
        }
    }

    /// Applies the extraction rule to a response body.
    std::vector<VideoId> extract(const std::string& body) const {
        std::vector<VideoId> ids;
        for (std::sregex_iterator it(body.begin(), body.end(), pattern_), end; it != end; ++it) {
            const auto& group = (*it)[1];
            if (group.matched && group.length() > 0) ids.emplace_back(group.str());
        }
        return ids;
    }

private:
    struct Outcome {
        enum class Kind { body, gone, retryable, fatal } kind;
        std::string body;
    };

    Outcome attempt_once(const detail::SplitUrl& url) const {
        httplib::Client client(url.origin);
        const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
        const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - secs);
        client.set_connection_timeout(secs.count(), usecs.count());
        client.set_read_timeout(secs.count(), usecs.count());
        client.set_write_timeout(secs.count(), usecs.count());
        client.set_keep_alive(false);
        client.set_follow_location(true);
        const httplib::Headers headers{{"User-Agent", config_.user_agent}, {"Accept", "*/*"}};
        auto result = client.Get(url.target, headers);
        if (!result) return {Outcome::Kind::retryable, {}};
        const int status = result->status;
        if (status >= 200 && status < 300) return {Outcome::Kind::body, std::move(result->body)};
        if (status == 404 || status == 410) return {Outcome::Kind::gone, {}};
        if (status == 429 || status >= 500) return {Outcome::Kind::retryable, {}};
        return {Outcome::Kind::fatal, {}};
    }

    static std::optional<VideoMeta> parse_meta(const VideoId& id, const std::string& body) {
        try {
            const auto j = nlohmann::json::parse(body);
            VideoMeta m{id};
            m.views = j.value("views", std::uint64_t{0});
            m.likes = j.value("likes", std::uint64_t{0});
            m.dislikes = j.value("dislikes", std::uint64_t{0});
            m.subscribers = j.value("subscribers", std::uint64_t{0});
            m.age_seconds = j.value("age", std::uint64_t{0});
            m.category = j.value("category", std::string(kUnknownCategory));
            if (m.category.empty()) m.category = kUnknownCategory;
            m.author = j.value("author", std::string());
            m.fetched_at = SystemClock{}.now();
            return m;
        } catch (const nlohmann::json::exception& e) {
            spdlog::warn("{}: unparseable metadata: {}", id.str(), e.what());
            return std::nullopt;
        }
    }

    HttpSourceConfig config_;
    std::regex pattern_;
};

} // namespace recgraph
