#pragma once

#include <filesystem>
#include <fstream>
#include <istream>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "recgraph/core.hpp"

namespace recgraph {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kSampleLogFormat = "recgraph-samplelog";
inline constexpr int kSampleLogVersion = 1;

/// Parameters of a long crawl; recorded in the sample-log header.
struct CrawlPlan {
    std::vector<VideoId> seeds;
    std::int64_t requests_per_seed = 2000;
    Millis mean_interval = std::chrono::minutes(10);
    double jitter_fraction = 0.1;
    /// Metadata is snapshotted at every request index divisible by this stride; 0 disables.
    std::int64_t fetch_meta_every = 100;
    std::uint64_t rng_seed = 0;

    friend bool operator==(const CrawlPlan&, const CrawlPlan&) = default;
};

struct MetaSnapshot {
    RequestIndex request_index = 0;
    VideoMeta meta;

    friend bool operator==(const MetaSnapshot&, const MetaSnapshot&) = default;
};

/// In-memory image of a sample log.
struct SampleLog {
    std::optional<CrawlPlan> plan;
    std::vector<SuggestionSample> samples;
    std::vector<MetaSnapshot> metas;

    /// Samples for one source, ordered by request index.
    std::vector<SuggestionSample> samples_for(const VideoId& id) const {
        std::vector<SuggestionSample> out;
        for (const auto& s : samples) {
            if (s.source_id == id) out.push_back(s);
        }
        std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
            return a.request_index < b.request_index;
        });
        return out;
    }

    /// Source ids in first-appearance order (plan seeds first when a header exists).
    std::vector<VideoId> sources() const {
        std::vector<VideoId> out;
        std::set<VideoId> seen;
        if (plan) {
            for (const auto& s : plan->seeds) {
                if (seen.insert(s).second) out.push_back(s);
            }
        }
        for (const auto& s : samples) {
            if (seen.insert(s.source_id).second) out.push_back(s.source_id);
        }
        return out;
    }

    /// Latest metadata snapshot for an id, if any.
    std::optional<VideoMeta> latest_meta(const VideoId& id) const {
        std::optional<MetaSnapshot> best;
        for (const auto& m : metas) {
            if (m.meta.id == id && (!best || m.request_index >= best->request_index)) best = m;
        }
        if (!best) return std::nullopt;
        return best->meta;
    }
};

// ---- JSON mapping -----------------------------------------------------------

inline Json to_json(const VideoMeta& m) {
    Json j;
    j["id"] = m.id.str();
    j["views"] = m.views;
    j["likes"] = m.likes;
    j["dislikes"] = m.dislikes;
    j["subscribers"] = m.subscribers;
    j["age"] = m.age_seconds;
    j["category"] = m.category;
    j["author"] = m.author;
    j["fetched_at"] = format_timestamp(m.fetched_at);
    return j;
}

inline VideoMeta meta_from_json(const Json& j) {
    try {
        VideoMeta m{VideoId(j.at("id").get<std::string>())};
        m.views = j.at("views").get<std::uint64_t>();
        m.likes = j.at("likes").get<std::uint64_t>();
        m.dislikes = j.at("dislikes").get<std::uint64_t>();
        m.subscribers = j.at("subscribers").get<std::uint64_t>();
        m.age_seconds = j.at("age").get<std::uint64_t>();
        m.category = j.value("category", std::string(kUnknownCategory));
        if (m.category.empty()) m.category = kUnknownCategory;
        m.author = j.value("author", std::string());
        m.fetched_at = parse_timestamp(j.at("fetched_at").get<std::string>());
        return m;
    } catch (const Json::exception& e) {
        throw FormatError(std::string("malformed metadata record: ") + e.what());
    }
}

inline Json to_json(const SuggestionSample& s) {
    Json j;
    j["record"] = "sample";
    j["source_id"] = s.source_id.str();
    j["request_index"] = s.request_index;
    j["timestamp"] = format_timestamp(s.timestamp);
    j["status"] = to_string(s.status);
    Json list = Json::array();
    for (const auto& id : s.suggestions) list.push_back(id.str());
    j["suggestions"] = std::move(list);
    return j;
}

inline SuggestionSample sample_from_json(const Json& j) {
    try {
        SuggestionSample s{VideoId(j.at("source_id").get<std::string>())};
        s.request_index = j.at("request_index").get<RequestIndex>();
        s.timestamp = parse_timestamp(j.at("timestamp").get<std::string>());
        s.status = parse_sample_status(j.at("status").get<std::string>());
        for (const auto& id : j.at("suggestions")) s.suggestions.emplace_back(id.get<std::string>());
        if (s.ok() && (s.suggestions.empty() || s.suggestions.size() > kMaxSuggestions)) {
            throw FormatError("ok sample for " + s.source_id.str() + " has " +
                              std::to_string(s.suggestions.size()) + " suggestions");
        }
        if (!s.ok() && !s.suggestions.empty()) {
            throw FormatError("failed sample for " + s.source_id.str() + " carries suggestions");
        }
        return s;
    } catch (const Json::exception& e) {
        throw FormatError(std::string("malformed sample record: ") + e.what());
    }
}

inline Json to_json(const CrawlPlan& plan) {
    Json j;
    Json seeds = Json::array();
    for (const auto& s : plan.seeds) seeds.push_back(s.str());
    j["seeds"] = std::move(seeds);
    j["requests_per_seed"] = plan.requests_per_seed;
    j["mean_interval_ms"] = plan.mean_interval.count();
    j["jitter_fraction"] = plan.jitter_fraction;
    j["fetch_meta_every"] = plan.fetch_meta_every;
    j["rng_seed"] = plan.rng_seed;
    return j;
}

inline CrawlPlan plan_from_json(const Json& j) {
    try {
        CrawlPlan plan;
        for (const auto& s : j.at("seeds")) plan.seeds.emplace_back(s.get<std::string>());
        plan.requests_per_seed = j.at("requests_per_seed").get<std::int64_t>();
        plan.mean_interval = Millis(j.at("mean_interval_ms").get<std::int64_t>());
        plan.jitter_fraction = j.at("jitter_fraction").get<double>();
        plan.fetch_meta_every = j.at("fetch_meta_every").get<std::int64_t>();
        plan.rng_seed = j.at("rng_seed").get<std::uint64_t>();
        return plan;
    } catch (const Json::exception& e) {
        throw FormatError(std::string("malformed plan: ") + e.what());
    }
}

inline Json header_record(const CrawlPlan& plan) {
    Json j;
    j["record"] = "header";
    j["format"] = kSampleLogFormat;
    j["version"] = kSampleLogVersion;
    j["plan"] = to_json(plan);
    return j;
}

inline Json meta_record(const MetaSnapshot& snapshot) {
    Json j;
    j["record"] = "meta";
    j["request_index"] = snapshot.request_index;
    const Json fields = to_json(snapshot.meta);
    for (const auto& [key, value] : fields.items()) j[key] = value;
    return j;
}

// ---- reading ----------------------------------------------------------------

/// Parses a sample log. A final line without a trailing newline that fails to
/// parse is treated as an interrupted write and skipped; any other malformed
/// line is an error.
inline SampleLog read_sample_log(std::istream& in) {
    SampleLog log;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const bool complete = !in.eof();
        Json j;
        try {
            j = Json::parse(line);
        } catch (const Json::parse_error& e) {
            if (!complete) {
                spdlog::warn("sample log: ignoring truncated final line {}", line_no);
                break;
            }
            throw FormatError("sample log line " + std::to_string(line_no) + ": " + e.what());
        }
        const std::string kind = j.value("record", std::string());
        if (kind == "header") {
            if (line_no != 1 || log.plan) throw FormatError("sample log header must be the first line");
            if (j.value("format", std::string()) != kSampleLogFormat) {
                throw FormatError("not a recgraph sample log");
            }
            if (j.value("version", 0) != kSampleLogVersion) {
                throw FormatError("unsupported sample log version " + j.value("version", Json()).dump());
            }
            log.plan = plan_from_json(j.at("plan"));
        } else if (kind == "sample") {
            log.samples.push_back(sample_from_json(j));
        } else if (kind == "meta") {
            log.metas.push_back({j.at("request_index").get<RequestIndex>(), meta_from_json(j)});
        } else {
            throw FormatError("sample log line " + std::to_string(line_no) + ": unknown record '" +
                              kind + "'");
        }
    }
    return log;
}

inline SampleLog read_sample_log(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open sample log " + path.string());
    return read_sample_log(in);
}

/// Drops a trailing partial line left by an interrupted writer.
inline void repair_log_tail(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open sample log " + path.string());
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    in.close();
    if (content.empty() || content.back() == '\n') return;
    const auto cut = content.rfind('\n');
    const auto keep = cut == std::string::npos ? 0 : cut + 1;
    std::filesystem::resize_file(path, keep);
}

// ---- writing ----------------------------------------------------------------

/// Destination of crawl records. Implementations serialize concurrent appends.
class SampleSink {
public:
    virtual ~SampleSink() = default;
    virtual void write_header(const CrawlPlan& plan) = 0;
    virtual void append(const SuggestionSample& sample) = 0;
    virtual void append(const MetaSnapshot& snapshot) = 0;
};

/// Writes one JSON record per line and flushes after each, so every
/// acknowledged append is durable.
class StreamSampleSink : public SampleSink {
public:
    explicit StreamSampleSink(std::ostream& out) : out_(&out) {}

    void write_header(const CrawlPlan& plan) override { write_line(header_record(plan)); }
    void append(const SuggestionSample& sample) override { write_line(to_json(sample)); }
    void append(const MetaSnapshot& snapshot) override { write_line(meta_record(snapshot)); }

protected:
    StreamSampleSink() = default;
    void bind(std::ostream& out) { out_ = &out; }

private:
    void write_line(const Json& record) {
        const std::string text = record.dump() + '\n';
        std::lock_guard lock(mutex_);
        out_->write(text.data(), static_cast<std::streamsize>(text.size()));
        out_->flush();
        if (!*out_) throw IoError("sample log write failed");
    }

    std::ostream* out_ = nullptr;
    std::mutex mutex_;
};

class FileSampleSink final : public StreamSampleSink {
public:
    enum class Mode { truncate, append };

    FileSampleSink(const std::filesystem::path& path, Mode mode)
        : file_(path, mode == Mode::append ? std::ios::app : std::ios::trunc) {
        if (!file_) throw IoError("cannot open " + path.string() + " for writing");
        bind(file_);
    }

private:
    std::ofstream file_;
};

/// Collects records in memory; convenient for tests and in-process pipelines.
class MemorySampleSink final : public SampleSink {
public:
    void write_header(const CrawlPlan& plan) override {
        std::lock_guard lock(mutex_);
        log_.plan = plan;
    }
    void append(const SuggestionSample& sample) override {
        std::lock_guard lock(mutex_);
        log_.samples.push_back(sample);
    }
    void append(const MetaSnapshot& snapshot) override {
        std::lock_guard lock(mutex_);
        log_.metas.push_back(snapshot);
    }
    const SampleLog& log() const noexcept { return log_; }

private:
    SampleLog log_;
    std::mutex mutex_;
};

inline void write_sample_log(std::ostream& out, const SampleLog& log) {
    StreamSampleSink sink(out);
    if (log.plan) sink.write_header(*log.plan);
    for (const auto& s : log.samples) sink.append(s);
    for (const auto& m : log.metas) sink.append(m);
}

struct LogViolation {
    std::string kind;
    std::string message;
};

/// Structural checks on a parsed log: header present, per-source indices
/// contiguous from 0, ok samples well formed, failed samples empty.
inline std::vector<LogViolation> validate_sample_log(const SampleLog& log) {
    std::vector<LogViolation> out;
    if (!log.plan) out.push_back({"missing_header", "log has no header record"});
    for (const auto& id : log.sources()) {
        if (log.plan && std::find(log.plan->seeds.begin(), log.plan->seeds.end(), id) == log.plan->seeds.end()) {
            out.push_back({"unknown_source", id.str() + " is not a seed of the plan"});
        }
        const auto samples = log.samples_for(id);
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const auto& s = samples[i];
            const std::string where = id.str() + "#" + std::to_string(s.request_index);
            if (s.request_index != static_cast<RequestIndex>(i)) {
                out.push_back({"index_gap", where + ": expected request index " + std::to_string(i)});
            }
            if (!s.ok() && !s.suggestions.empty()) {
                out.push_back({"failed_with_suggestions", where + ": failed sample carries suggestions"});
            }
            if (s.suggestions.size() > kMaxSuggestions) {
                out.push_back({"oversized", where + ": more than 20 suggestions"});
            }
            std::set<VideoId> seen;
            for (const auto& v : s.suggestions) {
                if (v == s.source_id) out.push_back({"self_reference", where + ": suggests itself"});
                if (!seen.insert(v).second) out.push_back({"duplicate", where + ": duplicate suggestion " + v.str()});
            }
        }
    }
    return out;
}

} // namespace recgraph
