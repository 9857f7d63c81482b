#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "helpers.hpp"

using namespace recgraph;
using namespace testing_helpers;

TEST(Settings, LoadsIniSections) {
    std::istringstream in(R"(
[longcrawl]
requests_per_seed = 50
mean_interval_s = 1.5
[walk]
walks = 77
[synth]
rng_seed = 9
categories = A:1, B:3
contraction_with_views = true
[clock]
mode = system
)");
    Settings s;
    load_settings(s, in);
    EXPECT_EQ(s.plan.requests_per_seed, 50);
    EXPECT_EQ(s.plan.mean_interval, Millis{1500});
    EXPECT_EQ(s.walk.walks, 77u);
    EXPECT_EQ(s.synth.rng_seed, 9u);
    EXPECT_EQ(s.synth.categories, (std::vector<CategorySpec>{{"A", 1.0}, {"B", 3.0}}));
    EXPECT_TRUE(s.synth.contraction_with_views);
    EXPECT_FALSE(s.use_simulated_clock());
}

TEST(Settings, RejectsUnknownAndMalformedKeys) {
    Settings s;
    std::istringstream unknown("[walk]\nsteps = 3\n");
    EXPECT_THROW(load_settings(s, unknown), ConfigError);
    std::istringstream section("[nowhere]\nx = 1\n");
    EXPECT_THROW(load_settings(s, section), ConfigError);
    std::istringstream bare("walks = 3\n");
    EXPECT_THROW(load_settings(s, bare), ConfigError);
    std::istringstream bad("[walk]\nwalks = many\n");
    EXPECT_THROW(load_settings(s, bad), ConfigError);
    EXPECT_THROW(apply_setting(s, "source", "kind", "carrier-pigeon"), ConfigError);
    EXPECT_THROW(load_settings(s, std::filesystem::path("/nonexistent/x.ini")), ConfigError);
}

TEST(Settings, SourceDependentDefaults) {
    Settings s;
    EXPECT_TRUE(s.use_simulated_clock());
    EXPECT_EQ(s.effective_probe_interval(), Millis{1000});
    s.source = SourceKind::http;
    EXPECT_FALSE(s.use_simulated_clock());
    EXPECT_EQ(s.effective_probe_interval(), Millis{30000});
    apply_setting(s, "graphcrawl", "probe_interval_ms", "250");
    EXPECT_EQ(s.effective_probe_interval(), Millis{250});
}

TEST(Settings, WrittenSettingsReloadIdentically) {
    Settings s;
    apply_setting(s, "synth", "homophily", "0.75");
    apply_setting(s, "source", "extract_pattern", R"(id=([a-z]+))");
    apply_setting(s, "longcrawl", "jitter_fraction", "0.2");
    std::ostringstream first;
    write_settings(first, s);
    Settings reloaded;
    std::istringstream in(first.str());
    load_settings(reloaded, in);
    std::ostringstream second;
    write_settings(second, reloaded);
    EXPECT_EQ(first.str(), second.str());
    EXPECT_EQ(reloaded.synth.homophily, 0.75);
}

TEST(Settings, EveryKeyRoundTripsItsDefault) {
    Settings s;
    for (const auto& k : config_keys()) {
        Settings copy;
        EXPECT_NO_THROW(k.apply(copy, k.show(s))) << k.section << "." << k.key;
        EXPECT_EQ(k.show(copy), k.show(s)) << k.section << "." << k.key;
    }
}

TEST(Tables, CsvAndJsonlRoundTrip) {
    Table t{"demo", {"name", "count", "value", "missing"}, {}};
    t.add({std::string("plain"), std::int64_t{3}, 0.1, Cell{}});
    t.add({std::string("with, comma \"quoted\""), std::int64_t{-7}, std::nan(""), Cell{}});
    t.add({std::string("News & Politics"), std::int64_t{0}, 1e300, Cell{}});
    for (auto format : {TableFormat::csv, TableFormat::jsonl}) {
        std::istringstream in(table_to_string(t, format));
        const auto back = read_table(in);
        EXPECT_EQ(back.command, "demo");
        EXPECT_EQ(back.columns, t.columns);
        ASSERT_EQ(back.rows.size(), 3u);
        for (std::size_t r = 0; r < 3; ++r) {
            EXPECT_EQ(cell_string(back.rows[r][0]), cell_string(t.rows[r][0]));
            EXPECT_EQ(cell_int(back.rows[r][1]), cell_int(t.rows[r][1]));
            const double v = cell_double(back.rows[r][2]);
            if (std::isnan(cell_double(t.rows[r][2]))) {
                EXPECT_TRUE(std::isnan(v));
            } else {
                EXPECT_EQ(v, cell_double(t.rows[r][2]));
            }
            EXPECT_EQ(cell_string(back.rows[r][3]), "");
        }
    }
}

TEST(Tables, HeaderNamesCommandAndVersion) {
    Table t{"metrics", {"a"}, {}};
    t.add({std::int64_t{1}});
    EXPECT_EQ(table_to_string(t, TableFormat::csv), "# recgraph metrics v1\na\n1\n");
    const auto jsonl = table_to_string(t, TableFormat::jsonl);
    EXPECT_EQ(jsonl.substr(0, jsonl.find('\n')),
              R"({"record":"header","command":"metrics","version":1,"columns":["a"]})");
    EXPECT_THROW(t.add({std::int64_t{1}, std::int64_t{2}}), AnalysisError);
    EXPECT_THROW(t.column("b"), FormatError);
}

TEST(Tables, RejectsForeignInput) {
    std::istringstream junk("hello\nworld\n");
    EXPECT_THROW(read_table(junk), FormatError);
    std::istringstream ragged("# recgraph x v1\na,b\n1\n");
    EXPECT_THROW(read_table(ragged), FormatError);
}

TEST(Tables, DoublesRoundTripExactly) {
    SplitMix64 rng(1);
    for (int i = 0; i < 1000; ++i) {
        const double v = std::ldexp(rng.uniform() - 0.5, static_cast<int>(rng.below(200)) - 100);
        double back = 0;
        const auto text = format_double(v);
        std::from_chars(text.data(), text.data() + text.size(), back);
        EXPECT_EQ(back, v);
    }
}

TEST(Tables, MetricsRoundTrip) {
    GraphMetrics m{vid("e")};
    m.mean_walk_entropy = 2.5;
    m.node_count = 40;
    m.mean_degree = 1.0 / 3.0;
    m.views = 1e6;
    const std::vector<GraphMetrics> ms{m, GraphMetrics{vid("f")}};
    for (auto format : {TableFormat::csv, TableFormat::jsonl}) {
        std::istringstream in(table_to_string(metrics_table(ms), format));
        EXPECT_EQ(metrics_from_table(read_table(in)), ms);
    }
}

TEST(Tables, NoveltyRoundTrip) {
    NoveltyReport a{vid("a")}, b{vid("b")};
    a.novelty_fraction = 0.5;
    a.inside_fraction = 0.5;
    a.provenance = {{vid("x"), Provenance::depth2}, {vid("y"), Provenance::outside}};
    const std::vector<NoveltyReport> reports{a, b};
    std::istringstream in(table_to_string(novelty_table(reports), TableFormat::csv));
    const auto back = novelty_from_table(read_table(in));
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back[0].provenance, a.provenance);
    EXPECT_EQ(back[0].novelty_fraction, 0.5);
    EXPECT_TRUE(back[1].provenance.empty());
}

TEST(Tables, SeedsRoundTrip) {
    const auto seeds = ids({"v000001", "v000002"});
    std::istringstream in(table_to_string(seed_table(seeds), TableFormat::jsonl));
    EXPECT_EQ(seeds_from_table(read_table(in)), seeds);
}
