#pragma once

#include <map>
#include <mutex>
#include <queue>
#include <set>

#include "recgraph/detail/parallel.hpp"
#include "recgraph/random.hpp"
#include "recgraph/sample_log.hpp"
#include "recgraph/source.hpp"

namespace recgraph {

struct SeedCounts {
    std::int64_t ok = 0;
    std::int64_t item_gone = 0;
    std::int64_t transport_error = 0;
    std::int64_t parse_error = 0;

    std::int64_t total() const noexcept { return ok + item_gone + transport_error + parse_error; }

    void add(SampleStatus status) noexcept {
        switch (status) {
            case SampleStatus::ok: ++ok; break;
            case SampleStatus::item_gone: ++item_gone; break;
            case SampleStatus::transport_error: ++transport_error; break;
            case SampleStatus::parse_error: ++parse_error; break;
        }
    }

    SeedCounts& operator+=(const SeedCounts& o) noexcept {
        ok += o.ok;
        item_gone += o.item_gone;
        transport_error += o.transport_error;
        parse_error += o.parse_error;
        return *this;
    }

    friend bool operator==(const SeedCounts&, const SeedCounts&) = default;
};

struct CrawlSummary {
    std::map<VideoId, SeedCounts> per_seed;

    SeedCounts totals() const {
        SeedCounts sum;
        for (const auto& [_, c] : per_seed) sum += c;
        return sum;
    }
};

/// Raised when the sink fails mid-crawl. Carries the last durable request
/// index per seed (nullopt when nothing was written for that seed).
class CrawlAbortedError : public IoError {
public:
    CrawlAbortedError(const std::string& what, std::map<VideoId, std::optional<RequestIndex>> durable)
        : IoError(what), last_durable_(std::move(durable)) {}

    const std::map<VideoId, std::optional<RequestIndex>>& last_durable() const noexcept {
        return last_durable_;
    }

private:
    std::map<VideoId, std::optional<RequestIndex>> last_durable_;
};

class PlanMismatchError : public ConfigError {
public:
    explicit PlanMismatchError(const std::string& what) : ConfigError(what) {}
};

inline void validate_plan(const CrawlPlan& plan) {
    if (plan.seeds.empty()) throw ConfigError("crawl plan has no seeds");
    if (std::set<VideoId>(plan.seeds.begin(), plan.seeds.end()).size() != plan.seeds.size()) {
        throw ConfigError("crawl plan seeds must be unique");
    }
    if (plan.requests_per_seed < 1) throw ConfigError("requests_per_seed must be >= 1");
    if (plan.mean_interval < Millis::zero()) throw ConfigError("mean_interval must be >= 0");
    if (!(plan.jitter_fraction >= 0.0 && plan.jitter_fraction < 1.0)) {
        throw ConfigError("jitter_fraction must lie in [0, 1)");
    }
    if (plan.fetch_meta_every < 0) throw ConfigError("fetch_meta_every must be >= 0");
}

/// Spacing between request `index` and `index + 1` of a seed: uniform on
/// mean * (1 +- jitter), drawn from a stream keyed on (plan seed, seed id, index).
inline Millis request_spacing(const CrawlPlan& plan, const VideoId& seed, RequestIndex index) {
    if (plan.jitter_fraction == 0.0) return plan.mean_interval;
    SplitMix64 rng(derive_key(plan.rng_seed, {stable_hash(seed.str()), static_cast<std::uint64_t>(index)}));
    const double factor = 1.0 + plan.jitter_fraction * (2.0 * rng.uniform() - 1.0);
    return Millis(static_cast<std::int64_t>(std::llround(static_cast<double>(plan.mean_interval.count()) * factor)));
}

/// Offset of request `index` from the seed's first request.
inline Millis schedule_offset(const CrawlPlan& plan, const VideoId& seed, RequestIndex index) {
    Millis total{0};
    for (RequestIndex j = 0; j < index; ++j) total += request_spacing(plan, seed, j);
    return total;
}

namespace detail {

struct SeedCursor {
    VideoId seed;
    RequestIndex next = 0;
    Millis offset{0};
    Timestamp anchor{};
    RequestIndex skip_meta_at = -1;
};

class CrawlRunner {
public:
    CrawlRunner(const CrawlPlan& plan, Provider& provider, SampleSink& sink, const Clock& clock)
        : plan_(plan), provider_(provider), sink_(sink), clock_(clock) {}

    void run(std::vector<SeedCursor> cursors, unsigned jobs, CrawlSummary& summary) {
        for (const auto& c : cursors) {
            durable_[c.seed] = c.next > 0 ? std::optional<RequestIndex>(c.next - 1) : std::nullopt;
            summary.per_seed[c.seed];
        }
        try {
            if (clock_.simulated()) {
                run_simulated(cursors, summary);
            } else {
                std::mutex summary_mutex;
                parallel_for(cursors.size(), jobs, [&](std::size_t i) {
                    auto& c = cursors[i];
                    SeedCounts local;
                    while (c.next < plan_.requests_per_seed) step(c, local);
                    std::lock_guard lock(summary_mutex);
                    summary.per_seed[c.seed] += local;
                });
            }
        } catch (const IoError& e) {
            std::lock_guard lock(durable_mutex_);
            throw CrawlAbortedError(std::string("crawl aborted: ") + e.what(), durable_);
        }
    }

private:
    // Single-threaded discrete-event order: earliest due time first, ties by seed position.
    void run_simulated(std::vector<SeedCursor>& cursors, CrawlSummary& summary) {
        using Event = std::tuple<Timestamp, std::size_t>;
        std::priority_queue<Event, std::vector<Event>, std::greater<>> queue;
        for (std::size_t i = 0; i < cursors.size(); ++i) {
            if (cursors[i].next < plan_.requests_per_seed) {
                queue.emplace(cursors[i].anchor + cursors[i].offset, i);
            }
        }
        while (!queue.empty()) {
            const auto [due, i] = queue.top();
            queue.pop();
            auto& c = cursors[i];
            step(c, summary.per_seed[c.seed]);
            if (c.next < plan_.requests_per_seed) queue.emplace(c.anchor + c.offset, i);
        }
    }

    void step(SeedCursor& c, SeedCounts& counts) {
        const RequestIndex k = c.next;
        const Timestamp stamp = clock_.wait_until(c.anchor + c.offset);
        if (plan_.fetch_meta_every > 0 && k % plan_.fetch_meta_every == 0 && k != c.skip_meta_at) {
            if (auto meta = provider_.fetch_meta(c.seed)) {
                meta->fetched_at = stamp;
                sink_.append(MetaSnapshot{k, std::move(*meta)});
            }
        }
        auto sample = provider_.fetch_suggestions(c.seed, k);
        if (sample.source_id != c.seed) {
            throw ProviderError("provider answered for " + sample.source_id.str() + " instead of " +
                                c.seed.str());
        }
        sample.request_index = k;
        sample.timestamp = stamp;
        sink_.append(sample);
        counts.add(sample.status);
        {
            std::lock_guard lock(durable_mutex_);
            durable_[c.seed] = k;
        }
        c.offset += request_spacing(plan_, c.seed, k);
        c.next = k + 1;
    }

    const CrawlPlan& plan_;
    Provider& provider_;
    SampleSink& sink_;
    const Clock& clock_;
    std::map<VideoId, std::optional<RequestIndex>> durable_;
    std::mutex durable_mutex_;
};

} // namespace detail

/// Issues `requests_per_seed` spaced requests for every seed and appends each
/// outcome to the sink. Failed requests still consume their request index.
/// Against a simulated clock the crawl runs as a deterministic single-threaded
/// event loop; against a real clock seeds are crawled on up to `jobs` threads.
inline CrawlSummary run_long_crawl(const CrawlPlan& plan, Provider& provider, SampleSink& sink,
                                   const Clock& clock, unsigned jobs = 1) {
    validate_plan(plan);
    try {
        sink.write_header(plan);
    } catch (const IoError& e) {
        std::map<VideoId, std::optional<RequestIndex>> none;
        for (const auto& s : plan.seeds) none[s] = std::nullopt;
        throw CrawlAbortedError(std::string("crawl aborted: ") + e.what(), std::move(none));
    }
    const Timestamp anchor = clock.now();
    std::vector<detail::SeedCursor> cursors;
    for (const auto& seed : plan.seeds) cursors.push_back({seed, 0, Millis{0}, anchor, -1});
    CrawlSummary summary;
    detail::CrawlRunner(plan, provider, sink, clock).run(std::move(cursors), jobs, summary);
    return summary;
}

/// Continues an interrupted crawl. `existing` must be a prefix of a run of
/// the same plan: identical header and, per seed, contiguous indices from 0.
/// Only missing indices are requested; the summary covers the whole log.
inline CrawlSummary resume_long_crawl(const CrawlPlan& plan, const SampleLog& existing, Provider& provider,
                                      SampleSink& sink, const Clock& clock, unsigned jobs = 1) {
    validate_plan(plan);
    if (!existing.plan) throw PlanMismatchError("existing log has no header");
    if (existing.plan->seeds != plan.seeds) {
        throw PlanMismatchError("seed list differs from the existing log");
    }
    if (*existing.plan != plan) {
        throw PlanMismatchError("crawl parameters differ from the existing log");
    }

    CrawlSummary summary;
    std::vector<detail::SeedCursor> cursors;
    const Timestamp now = clock.now();
    for (const auto& seed : plan.seeds) {
        const auto samples = existing.samples_for(seed);
        SeedCounts prior;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            if (samples[i].request_index != static_cast<RequestIndex>(i)) {
                throw FormatError("existing log for " + seed.str() + " has a gap or duplicate at index " +
                                  std::to_string(i));
            }
            prior.add(samples[i].status);
        }
        summary.per_seed[seed] = prior;
        const auto next = static_cast<RequestIndex>(samples.size());
        if (next > plan.requests_per_seed) {
            throw PlanMismatchError("existing log for " + seed.str() + " exceeds requests_per_seed");
        }
        RequestIndex skip_meta = -1;
        for (const auto& m : existing.metas) {
            if (m.meta.id == seed && m.request_index == next) skip_meta = next;
        }
        const Millis offset = schedule_offset(plan, seed, next);
        // A real clock restarts the schedule now; a simulated one keeps the original timeline.
        const Timestamp anchor = clock.simulated() ? now : now - offset;
        cursors.push_back({seed, next, offset, anchor, skip_meta});
    }
    detail::CrawlRunner(plan, provider, sink, clock).run(std::move(cursors), jobs, summary);
    return summary;
}

} // namespace recgraph
