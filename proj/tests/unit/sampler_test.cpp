#include <gtest/gtest.h>

#include <sstream>

#include "helpers.hpp"

using namespace recgraph;
using namespace testing_helpers;

namespace {

/// Forwards to a stream sink and fails after a fixed number of appends.
class FailingSink : public SampleSink {
public:
    FailingSink(std::ostream& out, int allowed) : inner_(out), allowed_(allowed) {}
    void write_header(const CrawlPlan& plan) override { inner_.write_header(plan); }
    void append(const SuggestionSample& s) override {
        tick();
        inner_.append(s);
    }
    void append(const MetaSnapshot& m) override {
        tick();
        inner_.append(m);
    }

private:
    void tick() {
        if (allowed_-- <= 0) throw IoError("disk full");
    }
    StreamSampleSink inner_;
    int allowed_;
};

CrawlPlan plan_for(std::vector<VideoId> seeds, std::int64_t requests) {
    CrawlPlan plan;
    plan.seeds = std::move(seeds);
    plan.requests_per_seed = requests;
    plan.fetch_meta_every = 10;
    plan.rng_seed = 5;
    return plan;
}

} // namespace

TEST(LongCrawl, TwentyRequestsAtZeroInterval) {
    SynthPlatform synth(SynthConfig::calibrated());
    const auto seed = synth.pick_seeds(1)[0];
    CrawlPlan plan = plan_for({seed}, 20);
    plan.mean_interval = Millis{0};
    MemorySampleSink sink;
    SimulatedClock clock(default_simulation_origin());
    const auto summary = run_long_crawl(plan, synth, sink, clock);
    const auto& samples = sink.log().samples;
    ASSERT_EQ(samples.size(), 20u);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        EXPECT_EQ(samples[i].request_index, static_cast<RequestIndex>(i));
        EXPECT_TRUE(samples[i].ok());
    }
    EXPECT_EQ(summary.per_seed.at(seed).ok, 20);
}

TEST(LongCrawl, ScheduleIsJitteredAroundTheMean) {
    CrawlPlan plan = plan_for(ids({"s"}), 500);
    for (RequestIndex k = 0; k < 500; ++k) {
        const auto gap = request_spacing(plan, vid("s"), k);
        EXPECT_GE(gap, Millis{540000});
        EXPECT_LE(gap, Millis{660000});
    }
    const auto total = schedule_offset(plan, vid("s"), 500);
    EXPECT_NEAR(static_cast<double>(total.count()) / 500.0, 600000.0, 6000.0);
}

TEST(LongCrawl, TimestampsFollowTheSimulatedSchedule) {
    ScriptedProvider p([](const VideoId& id, RequestIndex k) { return ok_sample(id.str(), k, ids({"x"})); });
    CrawlPlan plan = plan_for(ids({"s"}), 5);
    MemorySampleSink sink;
    SimulatedClock clock(default_simulation_origin());
    run_long_crawl(plan, p, sink, clock);
    for (const auto& s : sink.log().samples) {
        EXPECT_EQ(s.timestamp, default_simulation_origin() + schedule_offset(plan, vid("s"), s.request_index));
    }
}

TEST(LongCrawl, FailuresConsumeIndicesAndAreCounted) {
    ScriptedProvider p([](const VideoId& id, RequestIndex k) {
        if (k % 3 == 1) return SuggestionSample::failed(id, k, {}, SampleStatus::transport_error);
        return ok_sample(id.str(), k, ids({"x"}));
    });
    MemorySampleSink sink;
    SimulatedClock clock(default_simulation_origin());
    const auto summary = run_long_crawl(plan_for(ids({"s"}), 9), p, sink, clock);
    EXPECT_EQ(summary.per_seed.at(vid("s")).transport_error, 3);
    EXPECT_EQ(summary.per_seed.at(vid("s")).ok, 6);
    EXPECT_EQ(sink.log().samples.size(), 9u);
}

TEST(LongCrawl, MetadataSnapshotsAtStride) {
    ScriptedProvider p([](const VideoId& id, RequestIndex k) { return ok_sample(id.str(), k, ids({"x"})); });
    MemorySampleSink sink;
    SimulatedClock clock(default_simulation_origin());
    run_long_crawl(plan_for(ids({"s"}), 35), p, sink, clock);
    std::vector<RequestIndex> at;
    for (const auto& m : sink.log().metas) at.push_back(m.request_index);
    EXPECT_EQ(at, (std::vector<RequestIndex>{0, 10, 20, 30}));
}

TEST(LongCrawl, InvalidPlansAreRejected) {
    ScriptedProvider p([](const VideoId& id, RequestIndex k) { return ok_sample(id.str(), k, {}); });
    MemorySampleSink sink;
    SimulatedClock clock(default_simulation_origin());
    EXPECT_THROW(run_long_crawl(plan_for({}, 5), p, sink, clock), ConfigError);
    EXPECT_THROW(run_long_crawl(plan_for(ids({"a", "a"}), 5), p, sink, clock), ConfigError);
    EXPECT_THROW(run_long_crawl(plan_for(ids({"a"}), 0), p, sink, clock), ConfigError);
    auto bad = plan_for(ids({"a"}), 5);
    bad.jitter_fraction = 1.5;
    EXPECT_THROW(run_long_crawl(bad, p, sink, clock), ConfigError);
}

TEST(LongCrawl, SinkFailureReportsLastDurableIndex) {
    ScriptedProvider p([](const VideoId& id, RequestIndex k) { return ok_sample(id.str(), k, ids({"x"})); });
    auto plan = plan_for(ids({"a", "b"}), 10);
    plan.fetch_meta_every = 0;
    std::stringstream out;
    FailingSink sink(out, 7);
    SimulatedClock clock(default_simulation_origin());
    try {
        run_long_crawl(plan, p, sink, clock);
        FAIL() << "expected CrawlAbortedError";
    } catch (const CrawlAbortedError& e) {
        const auto log = read_sample_log(out);
        for (const auto& seed : plan.seeds) {
            const auto samples = log.samples_for(seed);
            const auto durable = e.last_durable().at(seed);
            if (samples.empty()) {
                EXPECT_FALSE(durable.has_value());
            } else {
                EXPECT_EQ(durable, samples.back().request_index);
            }
        }
    }
}

TEST(LongCrawl, ResumeReproducesTheUninterruptedLog) {
    const SynthConfig cfg = SynthConfig::calibrated();
    SynthPlatform reference_platform(cfg);
    const auto seeds = reference_platform.pick_seeds(3);
    const auto plan = plan_for(seeds, 60);
    SimulatedClock clock(default_simulation_origin());

    std::stringstream full;
    {
        StreamSampleSink sink(full);
        run_long_crawl(plan, reference_platform, sink, clock);
    }
    for (int cut : {0, 1, 17, 64, 150}) {
        SynthPlatform platform(cfg);
        std::stringstream partial;
        {
            FailingSink sink(partial, cut);
            EXPECT_THROW(run_long_crawl(plan, platform, sink, clock), CrawlAbortedError);
        }
        const auto existing = read_sample_log(partial);
        SynthPlatform fresh(cfg);
        std::stringstream rest;
        StreamSampleSink sink(rest);
        const auto summary = resume_long_crawl(plan, existing, fresh, sink, clock);
        EXPECT_EQ(partial.str() + rest.str(), full.str()) << "cut after " << cut;
        EXPECT_EQ(summary.totals().ok, 180);
    }
}

TEST(LongCrawl, ResumeRejectsDifferentPlans) {
    ScriptedProvider p([](const VideoId& id, RequestIndex k) { return ok_sample(id.str(), k, {}); });
    SampleLog existing;
    existing.plan = plan_for(ids({"a"}), 5);
    MemorySampleSink sink;
    SimulatedClock clock(default_simulation_origin());
    EXPECT_THROW(resume_long_crawl(plan_for(ids({"b"}), 5), existing, p, sink, clock), PlanMismatchError);
    EXPECT_THROW(resume_long_crawl(plan_for(ids({"a"}), 6), existing, p, sink, clock), PlanMismatchError);
    SampleLog headerless;
    EXPECT_THROW(resume_long_crawl(plan_for(ids({"a"}), 5), headerless, p, sink, clock), PlanMismatchError);
}

TEST(LongCrawl, ResumeRejectsGaps) {
    ScriptedProvider p([](const VideoId& id, RequestIndex k) { return ok_sample(id.str(), k, {}); });
    SampleLog existing;
    existing.plan = plan_for(ids({"a"}), 5);
    existing.samples.push_back(ok_sample("a", 0, {}));
    existing.samples.push_back(ok_sample("a", 2, {}));
    MemorySampleSink sink;
    SimulatedClock clock(default_simulation_origin());
    EXPECT_THROW(resume_long_crawl(*existing.plan, existing, p, sink, clock), FormatError);
}

TEST(LongCrawl, RealClockWithThreadsCollectsEverything) {
    ScriptedProvider p([](const VideoId& id, RequestIndex k) { return ok_sample(id.str(), k, ids({"x"})); });
    auto plan = plan_for(ids({"a", "b", "c", "d"}), 5);
    plan.mean_interval = Millis{2};
    MemorySampleSink sink;
    SystemClock clock;
    const auto summary = run_long_crawl(plan, p, sink, clock, 4);
    EXPECT_EQ(summary.totals().ok, 20);
    for (const auto& seed : plan.seeds) {
        const auto s = sink.log().samples_for(seed);
        ASSERT_EQ(s.size(), 5u);
        for (std::size_t i = 1; i < s.size(); ++i) EXPECT_GE(s[i].timestamp, s[i - 1].timestamp);
    }
}

TEST(LongCrawl, SynthLongCrawlTopRanksMatchLatentPlateau) {
    SynthPlatform synth(SynthConfig::calibrated());
    const auto seed = synth.pick_seeds(1, 3)[0];
    CrawlPlan plan = plan_for({seed}, 2000);
    MemorySampleSink sink;
    SimulatedClock clock(default_simulation_origin());
    run_long_crawl(plan, synth, sink, clock);
    const auto samples = sink.log().samples_for(seed);
    const auto truth = synth.ground_truth(seed, 0);
    const auto table = build_frequency_table(samples, 2000);
    // The most frequent entries are initial-plateau members (renewal replaces only a few).
    std::set<VideoId> initial(truth.initial_plateau.begin(), truth.initial_plateau.end());
    int hits = 0;
    for (std::size_t r = 0; r < 10; ++r) hits += initial.contains(table.entries[r].id);
    EXPECT_GE(hits, 8);
}
