#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "helpers.hpp"

using namespace recgraph;
using namespace testing_helpers;

namespace {

WalkConfig walks(std::size_t n, std::size_t length = 20, std::uint64_t seed = 1) {
    WalkConfig cfg;
    cfg.walks = n;
    cfg.walk_length = length;
    cfg.rng_seed = seed;
    return cfg;
}

/// Exact expected walk entropy by enumerating every path with its probability.
double exact_expected_entropy(const RecommendationGraph& g, std::size_t length) {
    std::map<VideoId, std::vector<VideoId>> adj;
    for (const auto& e : g.edges) adj[e.src].push_back(e.dst);
    std::vector<VideoId> path{g.ego};
    std::function<double(double)> go = [&](double prob) -> double {
        const auto& next = adj[path.back()];
        if (path.size() == length + 1 || next.empty()) {
            std::map<VideoId, int> counts;
            for (const auto& v : path) ++counts[v];
            double h = 0;
            for (const auto& [_, c] : counts) {
                const double p = static_cast<double>(c) / static_cast<double>(path.size());
                h -= p * std::log(p);
            }
            return prob * h;
        }
        double sum = 0;
        for (const auto& v : next) {
            path.push_back(v);
            sum += go(prob / static_cast<double>(next.size()));
            path.pop_back();
        }
        return sum;
    };
    return go(1.0);
}

} // namespace

TEST(LabelEntropy, MatchesDefinition) {
    const std::vector<int> labels{1, 1, 2, 3, 3, 3};
    const double expected = -(2.0 / 6 * std::log(2.0 / 6) + 1.0 / 6 * std::log(1.0 / 6) + 0.5 * std::log(0.5));
    EXPECT_NEAR(label_entropy<int>(labels), expected, 1e-12);
    EXPECT_EQ(label_entropy<int>(std::vector<int>{4, 4, 4}), 0.0);
    EXPECT_EQ(label_entropy<int>(std::vector<int>{}), 0.0);
}

TEST(WalkMetrics, PathVisitsDistinctNodes) {
    std::vector<std::pair<std::string, std::string>> edges;
    for (int i = 0; i < 25; ++i) edges.push_back({"p" + std::to_string(i), "p" + std::to_string(i + 1)});
    const auto g = make_graph("p0", edges, 30);
    const auto m = compute_graph_metrics(g, walks(50));
    EXPECT_NEAR(m.mean_walk_entropy, std::log(21.0), 1e-12);
    EXPECT_NEAR(m.mean_distinct_visited, 21.0, 1e-12);
    EXPECT_NEAR(m.walk_entropy_stderr, 0.0, 1e-7);
}

TEST(WalkMetrics, ThreeCycleIsLogThree) {
    const auto g = make_graph("a", {{"a", "b"}, {"b", "c"}, {"c", "a"}}, 3);
    auto cycle = g;
    cycle.nodes.at(vid("c")).status = NodeStatus::expanded;
    EXPECT_NEAR(compute_graph_metrics(cycle, walks(10)).mean_walk_entropy, std::log(3.0), 1e-12);
}

TEST(WalkMetrics, SinkEgoHasZeroEntropy) {
    auto g = make_graph("e", {}, 3);
    g.nodes.at(vid("e")).status = NodeStatus::no_plateau;
    const auto m = compute_graph_metrics(g, walks(10));
    EXPECT_EQ(m.mean_walk_entropy, 0.0);
    EXPECT_EQ(m.node_count, 1u);
}

TEST(WalkMetrics, MonteCarloMatchesExactExpectation) {
    const auto g = make_graph("e", {{"e", "a"}, {"e", "b"}, {"e", "c"}, {"a", "b"}, {"a", "d"}, {"b", "e"},
                                    {"b", "a"}, {"c", "c2"}, {"d", "x"}, {"c2", "y"}},
                              3);
    for (std::size_t length : {1u, 3u, 8u}) {
        const double exact = exact_expected_entropy(g, length);
        const auto m = compute_graph_metrics(g, walks(200000, length, 4));
        EXPECT_NEAR(m.mean_walk_entropy, exact, 5.0 * m.walk_entropy_stderr + 1e-12) << "length " << length;
    }
}

TEST(WalkMetrics, CategoryAndAuthorLabelling) {
    auto g = make_graph("a", {{"a", "b"}, {"b", "c"}, {"c", "a"}}, 3);
    g.nodes.at(vid("c")).status = NodeStatus::expanded;
    g.nodes.at(vid("a")).meta = meta("a", "Music", 1, 1, 1, "same");
    g.nodes.at(vid("b")).meta = meta("b", "Music", 1, 1, 1, "same");
    const auto m = compute_graph_metrics(g, walks(5, 20));
    // 21 visits: a and b share a label (14), c is unknown (7).
    const double two_label = -(14.0 / 21 * std::log(14.0 / 21) + 7.0 / 21 * std::log(7.0 / 21));
    EXPECT_NEAR(m.mean_category_entropy, two_label, 1e-12);
    EXPECT_NEAR(m.mean_author_entropy, two_label, 1e-12);
}

TEST(WalkMetrics, ReproducibleAndIndependentOfJobs) {
    SynthPlatform synth(SynthConfig::calibrated());
    SimulatedClock clock(default_simulation_origin());
    GraphCrawlConfig cc;
    cc.max_depth = 2;
    const auto g = crawl_recommendation_graph(synth.pick_seeds(1)[0], synth, cc, clock);
    const auto one = compute_graph_metrics(g, walks(5000), 1);
    EXPECT_EQ(one, compute_graph_metrics(g, walks(5000), 1));
    EXPECT_EQ(one, compute_graph_metrics(g, walks(5000), 3));
    EXPECT_FALSE(one == compute_graph_metrics(g, walks(5000, 20, 2), 1));
    EXPECT_EQ(one.node_count, g.nodes.size());
    EXPECT_EQ(one.edge_count, g.edges.size());
    EXPECT_DOUBLE_EQ(one.mean_degree, static_cast<double>(g.edges.size()) / static_cast<double>(g.nodes.size()));
}

TEST(WalkMetrics, StandardErrorShrinksWithWalks) {
    const auto g = make_graph("e", {{"e", "a"}, {"e", "b"}, {"a", "e"}, {"a", "b"}, {"b", "c"}, {"b", "e"}}, 2);
    const auto small = compute_graph_metrics(g, walks(4000));
    const auto large = compute_graph_metrics(g, walks(64000));
    EXPECT_GT(small.walk_entropy_stderr, 0.0);
    EXPECT_NEAR(large.walk_entropy_stderr / small.walk_entropy_stderr, 0.25, 0.03);
}

TEST(WalkMetrics, SeedCovariatesFromEgoMeta) {
    auto g = make_graph("e", {{"e", "a"}}, 1);
    auto m0 = compute_graph_metrics(g, walks(3));
    EXPECT_TRUE(std::isnan(m0.views));
    g.nodes.at(vid("e")).meta = meta("e", "Music", 500, 40, 9, "au");
    const auto m = compute_graph_metrics(g, walks(3));
    EXPECT_EQ(m.views, 500.0);
    EXPECT_NEAR(m.contentment, std::log(41.0 / 10.0), 1e-12);
}

TEST(WalkMetrics, RejectsInvalidInput) {
    auto g = make_graph("e", {{"e", "a"}, {"a", "a"}}, 3);
    EXPECT_THROW(compute_graph_metrics(g, walks(3)), InvalidGraphError);
    EXPECT_THROW(compute_graph_metrics(make_graph("e", {{"e", "a"}}, 1), walks(0)), ConfigError);
}
