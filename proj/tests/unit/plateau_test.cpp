#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "helpers.hpp"

using namespace recgraph;
using namespace testing_helpers;

namespace {

long double naive_sse(const std::vector<double>& f, std::size_t a, std::size_t b) {
    long double mean = 0;
    for (auto i = a; i < b; ++i) mean += f[i];
    mean /= static_cast<long double>(b - a);
    long double s = 0;
    for (auto i = a; i < b; ++i) s += (f[i] - mean) * (f[i] - mean);
    return s;
}

FrequencyTable table_of(const std::vector<double>& freqs) {
    FrequencyTable t{vid("src"), 100, {}};
    for (std::size_t i = 0; i < freqs.size(); ++i) t.entries.push_back({vid("e" + std::to_string(1000 + i)), freqs[i]});
    return t;
}

/// Reference changepoint: argmin over k of the two-segment SSE, lowest k on ties,
/// falling back to all entries when the best split saves less than 5%.
std::size_t oracle_rank(const std::vector<double>& f) {
    const auto whole = naive_sse(f, 0, f.size());
    std::size_t best = 1;
    long double best_sse = naive_sse(f, 0, 1) + naive_sse(f, 1, f.size());
    for (std::size_t k = 2; k < f.size(); ++k) {
        const auto s = naive_sse(f, 0, k) + naive_sse(f, k, f.size());
        if (s < best_sse - 1e-15L) {
            best = k;
            best_sse = s;
        }
    }
    return whole > 0 && best_sse <= 0.95L * whole ? best : f.size();
}

std::vector<SuggestionSample> series(const std::vector<std::vector<std::string>>& responses) {
    std::vector<SuggestionSample> out;
    for (std::size_t i = 0; i < responses.size(); ++i) out.push_back(ok_sample("src", static_cast<RequestIndex>(i), ids(responses[i])));
    return out;
}

} // namespace

TEST(FrequencyTable, CountsOverFirstWindow) {
    auto samples = series({{"a", "b"}, {"a", "c"}, {"a"}, {"z"}});
    const auto t = build_frequency_table(samples, 3);
    EXPECT_EQ(t.window, 3u);
    ASSERT_EQ(t.entries.size(), 3u);
    EXPECT_EQ(t.entries[0].id, vid("a"));
    EXPECT_DOUBLE_EQ(t.entries[0].frequency, 1.0);
    EXPECT_DOUBLE_EQ(t.entries[1].frequency, 1.0 / 3.0);
    EXPECT_EQ(t.entries[1].id, vid("b"));
}

TEST(FrequencyTable, FailedSamplesLeaveTheDenominator) {
    auto samples = series({{"a"}, {"a", "b"}});
    samples.insert(samples.begin() + 1, SuggestionSample::failed(vid("src"), 5, {}, SampleStatus::transport_error));
    const auto t = build_frequency_table(samples, 3);
    EXPECT_EQ(t.window, 2u);
    EXPECT_DOUBLE_EQ(t.entries[0].frequency, 1.0);
}

TEST(FrequencyTable, EmptyAndMixedInputsThrow) {
    std::vector<SuggestionSample> none;
    EXPECT_THROW(build_frequency_table(none, 5), EmptyWindowError);
    auto failed = std::vector{SuggestionSample::failed(vid("src"), 0, {}, SampleStatus::item_gone)};
    EXPECT_THROW(build_frequency_table(failed, 5), EmptyWindowError);
    auto mixed = series({{"a"}});
    mixed.push_back(ok_sample("other", 1, ids({"a"})));
    EXPECT_THROW(build_frequency_table(mixed, 5), AnalysisError);
}

TEST(FrequencyTable, TailUsesLastSamples) {
    auto samples = series({{"a"}, {"a"}, {"b"}, {"b"}});
    const auto t = build_tail_frequency_table(samples, 2);
    ASSERT_EQ(t.entries.size(), 1u);
    EXPECT_EQ(t.entries[0].id, vid("b"));
}

TEST(SplitSse, MatchesNaiveSegments) {
    SplitMix64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> f(2 + rng.below(40));
        for (auto& x : f) x = rng.uniform();
        const auto sse = split_sse(f);
        EXPECT_NEAR(sse[0], static_cast<double>(naive_sse(f, 0, f.size())), 1e-9);
        for (std::size_t k = 1; k < f.size(); ++k) {
            EXPECT_NEAR(sse[k], static_cast<double>(naive_sse(f, 0, k) + naive_sse(f, k, f.size())), 1e-9);
        }
    }
}

TEST(DetectPlateau, FindsTheStepInCleanProfiles) {
    for (std::size_t p : {5u, 12u, 24u, 33u}) {
        std::vector<double> f(p, 0.9);
        for (int i = 0; i < 60; ++i) f.push_back(0.05);
        EXPECT_EQ(detect_plateau(table_of(f)).changepoint_rank, p);
    }
}

TEST(DetectPlateau, AgreesWithBruteForceOracle) {
    SplitMix64 rng(3);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<double> f(2 + rng.below(60));
        for (auto& x : f) x = 0.01 + 0.99 * rng.uniform();
        if (trial % 3 == 0) {
            for (auto& x : f) x = std::round(x * 4.0) / 4.0 + 0.01;
        }
        std::sort(f.begin(), f.end(), std::greater<>());
        const auto plateau = detect_plateau(table_of(f));
        EXPECT_EQ(plateau.changepoint_rank, oracle_rank(f)) << "trial " << trial;
        EXPECT_EQ(plateau.members.size(), plateau.changepoint_rank);
    }
}

TEST(DetectPlateau, FlatProfileKeepsEverything) {
    std::vector<double> f(10, 0.5);
    EXPECT_EQ(detect_plateau(table_of(f)).changepoint_rank, 10u);
}

TEST(DetectPlateau, FloorDropsRareEntries) {
    std::vector<double> f{0.9, 0.9, 0.9, 0.2, 0.2, 0.005, 0.005, 0.005};
    EXPECT_EQ(detect_plateau(table_of(f)).changepoint_rank, 3u);
    EXPECT_THROW(detect_plateau(table_of({0.9, 0.005})), TooFewEntriesError);
    EXPECT_THROW(detect_plateau(table_of({0.9, 0.5}), 0.95), TooFewEntriesError);
}

TEST(Lifespans, MatchSlidingWindowOracle) {
    SplitMix64 rng(8);
    std::vector<std::vector<std::string>> responses(60);
    for (auto& r : responses) {
        for (int c = 0; c < 8; ++c) {
            if (rng.bernoulli(0.4)) r.push_back("c" + std::to_string(c));
        }
    }
    const auto samples = series(responses);
    const std::vector<double> thetas{0.0, 0.5};
    const std::size_t w = 7;
    const auto records = compute_lifespans(samples, w, thetas);

    std::map<std::pair<double, std::string>, const LifespanRecord*> got;
    for (const auto& r : records) got[{r.threshold, r.suggestion.str()}] = &r;
    std::size_t expected = 0;
    for (double theta : thetas) {
        for (int c = 0; c < 8; ++c) {
            const std::string id = "c" + std::to_string(c);
            std::vector<int> count;
            for (std::size_t t = 0; t + w <= responses.size(); ++t) {
                int n = 0;
                for (auto i = t; i < t + w; ++i) n += std::count(responses[i].begin(), responses[i].end(), id) > 0;
                count.push_back(n);
            }
            int first = -1, last = -1;
            for (int t = 0; t < static_cast<int>(count.size()); ++t) {
                if (count[t] / static_cast<double>(w) > theta) {
                    if (first < 0) first = t;
                    last = t;
                }
            }
            if (first < 0) continue;
            ++expected;
            const auto& r = *got.at({theta, id});
            EXPECT_EQ(r.first_window, first);
            EXPECT_EQ(r.last_window, last);
            EXPECT_EQ(r.lifespan, last - first);
            double sum = 0;
            for (int t = first; t <= last; ++t) sum += count[t];
            EXPECT_NEAR(r.mean_presence_over_lifespan, sum / (w * (last - first + 1.0)), 1e-12);
        }
    }
    EXPECT_EQ(records.size(), expected);
}

TEST(Lifespans, NeedsEnoughOkSamples) {
    auto samples = series({{"a"}, {"a"}});
    EXPECT_THROW(compute_lifespans(samples, 3, std::vector<double>{0.0}), InsufficientSamplesError);
    EXPECT_THROW(compute_lifespans(samples, 0, std::vector<double>{0.0}), AnalysisError);
}

TEST(Survival, IsMonotoneAndCountsRecords) {
    SplitMix64 rng(2);
    std::vector<std::vector<std::string>> responses(120);
    for (auto& r : responses) {
        for (int c = 0; c < 30; ++c) {
            if (rng.bernoulli(c < 10 ? 0.9 : 0.1)) r.push_back("c" + std::to_string(c));
        }
    }
    const auto samples = series(responses);
    const std::vector<double> thetas{0.0, 0.5, 0.9};
    const auto records = compute_lifespans(samples, 20, thetas);
    const auto survival = lifespan_survival(records);
    std::map<double, std::vector<SurvivalPoint>> by_theta;
    for (const auto& p : survival) by_theta[p.threshold].push_back(p);
    for (const auto& [theta, points] : by_theta) {
        const auto n = std::count_if(records.begin(), records.end(), [&](const auto& r) { return r.threshold == theta; });
        EXPECT_EQ(points.front().lifespan, 0);
        EXPECT_EQ(points.front().count, n);
        for (std::size_t i = 1; i < points.size(); ++i) EXPECT_LE(points[i].count, points[i - 1].count);
        EXPECT_GE(points.back().count, 1);
    }
    // A stricter threshold never has more survivors at any T.
    for (std::size_t i = 0; i < by_theta[0.9].size(); ++i) {
        EXPECT_LE(by_theta[0.9][i].count, by_theta[0.0][i].count);
    }
}

TEST(SynthFrequencies, InclusionMatchesBinomialExpectation) {
    auto cfg = SynthConfig::calibrated();
    cfg.plateau_weight_skew = 0.0;
    cfg.renewal_rate = 0.0;
    SynthPlatform synth(cfg);
    const auto seeds = synth.pick_seeds(5);
    const double h = cfg.plateau_hit_rate;
    auto binom_pmf = [](int n, int k, double p) {
        return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) + k * std::log(p) +
                        (n - k) * std::log1p(-p));
    };
    for (const auto& seed : seeds) {
        const auto truth = synth.ground_truth(seed, 0);
        const auto p = static_cast<int>(truth.plateau.size());
        double expected_hits = 0.0;
        for (int slots : {19, 20}) {
            const double w = slots == 19 ? cfg.short_response_probability : 1.0 - cfg.short_response_probability;
            for (int k = 0; k <= slots; ++k) expected_hits += w * binom_pmf(slots, k, h) * std::min(k, p);
        }
        const double expected = expected_hits / p;
        std::vector<SuggestionSample> samples;
        for (RequestIndex k = 0; k < 4000; ++k) samples.push_back(synth.fetch_suggestions(seed, k));
        const auto table = build_frequency_table(samples, samples.size());
        std::map<VideoId, double> freq;
        for (const auto& e : table.entries) freq[e.id] = e.frequency;
        for (const auto& m : truth.plateau) EXPECT_NEAR(freq[m], expected, 0.03) << seed.str();
    }
}

TEST(SynthFrequencies, DeterministicWorldRecoversExactPlateau) {
    SynthPlatform synth(SynthConfig::deterministic(15));
    for (const auto& seed : synth.pick_seeds(10)) {
        std::vector<SuggestionSample> samples;
        for (RequestIndex k = 0; k < 20; ++k) samples.push_back(synth.fetch_suggestions(seed, k));
        auto table = build_frequency_table(samples, 20);
        // Pad with rare noise so the changepoint has a tail to split from.
        for (int i = 0; i < 20; ++i) table.entries.push_back({vid("n" + std::to_string(i)), 0.05});
        EXPECT_EQ(detect_plateau(table).changepoint_rank, 15u);
    }
}
