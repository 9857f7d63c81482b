#pragma once

#include <charconv>
#include <filesystem>
#include <functional>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "recgraph/evolution.hpp"
#include "recgraph/graphcrawl.hpp"
#include "recgraph/http_source.hpp"
#include "recgraph/metrics.hpp"
#include "recgraph/sample_log.hpp"
#include "recgraph/synth.hpp"

namespace recgraph {

enum class SourceKind { synth, http, replay };

inline SourceKind parse_source_kind(std::string_view text) {
    if (text == "synth") return SourceKind::synth;
    if (text == "http") return SourceKind::http;
    if (text == "replay") return SourceKind::replay;
    throw ConfigError("unknown source kind '" + std::string(text) + "' (expected synth, http or replay)");
}

struct Settings {
    SourceKind source = SourceKind::synth;
    std::filesystem::path replay_log;
    HttpSourceConfig http;
    std::ptrdiff_t max_in_flight = kDefaultMaxInFlight;

    CrawlPlan plan;
    GraphCrawlConfig graph;
    /// Set when the probe interval was configured explicitly; otherwise it
    /// depends on the source (1 s against synth, 30 s against live endpoints).
    bool probe_interval_set = false;
    WalkConfig walk;
    NoveltyConfig novelty;
    std::size_t lifespan_window = kDefaultLifespanWindow;
    SynthConfig synth;

    /// Unless configured, the clock is simulated for synth and replay sources
    /// and real for live endpoints.
    std::optional<bool> simulated_clock;
    Timestamp clock_origin = default_simulation_origin();

    bool use_simulated_clock() const { return simulated_clock.value_or(source != SourceKind::http); }

    Millis effective_probe_interval() const {
        if (probe_interval_set) return graph.probe_interval;
        return source == SourceKind::http ? Millis{30000} : Millis{1000};
    }
};

namespace detail {

template <class T>
T parse_number(const std::string& text, const std::string& key) {
    T value{};
    const char* first = text.data();
    const char* last = first + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) throw ConfigError("invalid value '" + text + "' for " + key);
    return value;
}

inline bool parse_bool(const std::string& text, const std::string& key) {
    if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
    if (text == "false" || text == "0" || text == "no" || text == "off") return false;
    throw ConfigError("invalid boolean '" + text + "' for " + key);
}

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return std::string(s.substr(b, e - b + 1));
}

/// "Name:weight, Name:weight, ..."
inline std::vector<CategorySpec> parse_categories(const std::string& text, const std::string& key) {
    std::vector<CategorySpec> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto colon = item.rfind(':');
        if (colon == std::string::npos) throw ConfigError(key + ": expected Name:weight, got '" + item + "'");
        out.push_back({trim(item.substr(0, colon)), parse_number<double>(trim(item.substr(colon + 1)), key)});
    }
    if (out.empty()) throw ConfigError(key + " is empty");
    return out;
}

inline std::string format_categories(const std::vector<CategorySpec>& cats) {
    std::string out;
    for (const auto& c : cats) {
        if (!out.empty()) out += ", ";
        char buf[32];
        const auto r = std::to_chars(buf, buf + sizeof buf, c.weight);
        out += c.name + ":" + std::string(buf, r.ptr);
    }
    return out;
}

} // namespace detail

/// One recognised configuration key.
struct ConfigKey {
    std::string section;
    std::string key;
    std::string description;
    std::function<void(Settings&, const std::string&)> apply;
    std::function<std::string(const Settings&)> show;
};

inline const std::vector<ConfigKey>& config_keys() {
    using detail::parse_bool;
    using detail::parse_number;
    auto num = [](auto v) {
        if constexpr (std::is_floating_point_v<decltype(v)>) {
            char buf[32];
            const auto r = std::to_chars(buf, buf + sizeof buf, v);
            return std::string(buf, r.ptr);
        } else {
            return std::to_string(v);
        }
    };
    auto ms = [](Millis m) { return std::to_string(m.count()); };
    static const std::vector<ConfigKey> keys{
        {"source", "kind", "Suggestion provider: synth, http or replay.",
         [](Settings& s, const std::string& v) { s.source = parse_source_kind(v); },
         [](const Settings& s) {
             return std::string(s.source == SourceKind::synth ? "synth"
                                : s.source == SourceKind::http ? "http"
                                                               : "replay");
         }},
        {"source", "replay_log", "Sample log served by the replay source.",
         [](Settings& s, const std::string& v) { s.replay_log = v; },
         [](const Settings& s) { return s.replay_log.string(); }},
        {"source", "endpoint_template", "Suggestion URL with an {id} placeholder (http source).",
         [](Settings& s, const std::string& v) { s.http.endpoint_template = v; },
         [](const Settings& s) { return s.http.endpoint_template; }},
        {"source", "meta_endpoint_template", "Metadata URL with an {id} placeholder returning JSON; empty disables.",
         [](Settings& s, const std::string& v) { s.http.meta_endpoint_template = v; },
         [](const Settings& s) { return s.http.meta_endpoint_template; }},
        {"source", "timeout_ms", "Per-attempt HTTP timeout in milliseconds.",
         [](Settings& s, const std::string& v) { s.http.timeout = Millis{parse_number<std::int64_t>(v, "timeout_ms")}; },
         [=](const Settings& s) { return ms(s.http.timeout); }},
        {"source", "max_retries", "Retries after a transient HTTP failure.",
         [](Settings& s, const std::string& v) { s.http.max_retries = parse_number<int>(v, "max_retries"); },
         [=](const Settings& s) { return num(s.http.max_retries); }},
        {"source", "retry_backoff_ms", "Wait before the first retry; doubled for each further retry.",
         [](Settings& s, const std::string& v) {
             s.http.retry_backoff = Millis{parse_number<std::int64_t>(v, "retry_backoff_ms")};
         },
         [=](const Settings& s) { return ms(s.http.retry_backoff); }},
        {"source", "extract_pattern", "Regex whose first capture group yields one suggestion id per match.",
         [](Settings& s, const std::string& v) { s.http.extract_pattern = v; },
         [](const Settings& s) { return s.http.extract_pattern; }},
        {"source", "user_agent", "User-Agent header sent with every request.",
         [](Settings& s, const std::string& v) { s.http.user_agent = v; },
         [](const Settings& s) { return s.http.user_agent; }},
        {"source", "max_in_flight", "Cap on concurrent provider requests.",
         [](Settings& s, const std::string& v) { s.max_in_flight = parse_number<std::ptrdiff_t>(v, "max_in_flight"); },
         [=](const Settings& s) { return num(s.max_in_flight); }},

        {"longcrawl", "requests_per_seed", "Requests issued per seed.",
         [](Settings& s, const std::string& v) { s.plan.requests_per_seed = parse_number<std::int64_t>(v, "requests_per_seed"); },
         [=](const Settings& s) { return num(s.plan.requests_per_seed); }},
        {"longcrawl", "mean_interval_s", "Mean spacing between requests for one seed, in seconds.",
         [](Settings& s, const std::string& v) {
             s.plan.mean_interval = Millis{std::llround(parse_number<double>(v, "mean_interval_s") * 1000.0)};
         },
         [=](const Settings& s) { return num(static_cast<double>(s.plan.mean_interval.count()) / 1000.0); }},
        {"longcrawl", "jitter_fraction", "Uniform jitter on each spacing, as a fraction of the mean.",
         [](Settings& s, const std::string& v) { s.plan.jitter_fraction = parse_number<double>(v, "jitter_fraction"); },
         [=](const Settings& s) { return num(s.plan.jitter_fraction); }},
        {"longcrawl", "fetch_meta_every", "Metadata snapshot stride in requests; 0 disables.",
         [](Settings& s, const std::string& v) { s.plan.fetch_meta_every = parse_number<std::int64_t>(v, "fetch_meta_every"); },
         [=](const Settings& s) { return num(s.plan.fetch_meta_every); }},
        {"longcrawl", "rng_seed", "Seed of the request-jitter stream.",
         [](Settings& s, const std::string& v) { s.plan.rng_seed = parse_number<std::uint64_t>(v, "rng_seed"); },
         [=](const Settings& s) { return num(s.plan.rng_seed); }},

        {"graphcrawl", "probe_requests", "Requests per node used to detect its plateau.",
         [](Settings& s, const std::string& v) { s.graph.probe_requests = parse_number<std::size_t>(v, "probe_requests"); },
         [=](const Settings& s) { return num(s.graph.probe_requests); }},
        {"graphcrawl", "max_depth", "Depth horizon; nodes at this depth are sinks.",
         [](Settings& s, const std::string& v) { s.graph.max_depth = parse_number<int>(v, "max_depth"); },
         [=](const Settings& s) { return num(s.graph.max_depth); }},
        {"graphcrawl", "frequency_floor", "Entries below this frequency are ignored by plateau detection.",
         [](Settings& s, const std::string& v) { s.graph.floor = parse_number<double>(v, "frequency_floor"); },
         [=](const Settings& s) { return num(s.graph.floor); }},
        {"graphcrawl", "probe_interval_ms", "Spacing between probes of one node (default 1000 for synth, 30000 for http).",
         [](Settings& s, const std::string& v) {
             s.graph.probe_interval = Millis{parse_number<std::int64_t>(v, "probe_interval_ms")};
             s.probe_interval_set = true;
         },
         [=](const Settings& s) { return ms(s.effective_probe_interval()); }},
        {"graphcrawl", "first_request_index", "Request index of each node's first probe.",
         [](Settings& s, const std::string& v) {
             s.graph.first_request_index = parse_number<std::int64_t>(v, "first_request_index");
         },
         [=](const Settings& s) { return num(s.graph.first_request_index); }},

        {"walk", "walk_length", "Edge traversals per random walk.",
         [](Settings& s, const std::string& v) { s.walk.walk_length = parse_number<std::size_t>(v, "walk_length"); },
         [=](const Settings& s) { return num(s.walk.walk_length); }},
        {"walk", "walks", "Random walks per graph.",
         [](Settings& s, const std::string& v) { s.walk.walks = parse_number<std::size_t>(v, "walks"); },
         [=](const Settings& s) { return num(s.walk.walks); }},
        {"walk", "rng_seed", "Seed of the walk streams.",
         [](Settings& s, const std::string& v) { s.walk.rng_seed = parse_number<std::uint64_t>(v, "rng_seed"); },
         [=](const Settings& s) { return num(s.walk.rng_seed); }},

        {"analysis", "lifespan_window", "Sliding-window length for lifespans.",
         [](Settings& s, const std::string& v) { s.lifespan_window = parse_number<std::size_t>(v, "lifespan_window"); },
         [=](const Settings& s) { return num(s.lifespan_window); }},
        {"analysis", "novelty_tail_window", "Final samples used for the late plateau.",
         [](Settings& s, const std::string& v) { s.novelty.tail_window = parse_number<std::size_t>(v, "novelty_tail_window"); },
         [=](const Settings& s) { return num(s.novelty.tail_window); }},
        {"analysis", "frequency_floor", "Frequency floor for plateau detection in analyses.",
         [](Settings& s, const std::string& v) { s.novelty.floor = parse_number<double>(v, "frequency_floor"); },
         [=](const Settings& s) { return num(s.novelty.floor); }},

        {"clock", "mode", "simulated (instant, reproducible timestamps) or system (real waiting).",
         [](Settings& s, const std::string& v) {
             if (v == "simulated") s.simulated_clock = true;
             else if (v == "system") s.simulated_clock = false;
             else throw ConfigError("clock mode must be simulated or system");
         },
         [](const Settings& s) { return std::string(s.use_simulated_clock() ? "simulated" : "system"); }},
        {"clock", "origin", "Start time of the simulated clock (ISO 8601, UTC).",
         [](Settings& s, const std::string& v) {
             try {
                 s.clock_origin = parse_timestamp(v);
             } catch (const FormatError& e) {
                 throw ConfigError(std::string("clock origin: ") + e.what());
             }
         },
         [](const Settings& s) { return format_timestamp(s.clock_origin); }},

        {"synth", "rng_seed", "Seed of the synthetic platform.",
         [](Settings& s, const std::string& v) { s.synth.rng_seed = parse_number<std::uint64_t>(v, "rng_seed"); },
         [=](const Settings& s) { return num(s.synth.rng_seed); }},
        {"synth", "topology", "ring (category rings with locality windows) or tree (non-overlapping).",
         [](Settings& s, const std::string& v) {
             if (v == "ring") s.synth.topology = SynthConfig::Topology::ring;
             else if (v == "tree") s.synth.topology = SynthConfig::Topology::tree;
             else throw ConfigError("synth topology must be ring or tree");
         },
         [](const Settings& s) {
             return std::string(s.synth.topology == SynthConfig::Topology::ring ? "ring" : "tree");
         }},
        {"synth", "universe_size", "Number of items.",
         [](Settings& s, const std::string& v) { s.synth.universe_size = parse_number<std::size_t>(v, "universe_size"); },
         [=](const Settings& s) { return num(s.synth.universe_size); }},
        {"synth", "tree_branching", "Children per item in the tree topology.",
         [](Settings& s, const std::string& v) { s.synth.tree_branching = parse_number<std::size_t>(v, "tree_branching"); },
         [=](const Settings& s) { return num(s.synth.tree_branching); }},
        {"synth", "plateau_size_mean", "Mean latent plateau size.",
         [](Settings& s, const std::string& v) { s.synth.plateau_size_mean = parse_number<double>(v, "plateau_size_mean"); },
         [=](const Settings& s) { return num(s.synth.plateau_size_mean); }},
        {"synth", "plateau_size_std", "Standard deviation of latent plateau sizes.",
         [](Settings& s, const std::string& v) { s.synth.plateau_size_std = parse_number<double>(v, "plateau_size_std"); },
         [=](const Settings& s) { return num(s.synth.plateau_size_std); }},
        {"synth", "plateau_size_min", "Lower truncation of plateau sizes.",
         [](Settings& s, const std::string& v) { s.synth.plateau_size_min = parse_number<int>(v, "plateau_size_min"); },
         [=](const Settings& s) { return num(s.synth.plateau_size_min); }},
        {"synth", "plateau_size_max", "Upper truncation of plateau sizes.",
         [](Settings& s, const std::string& v) { s.synth.plateau_size_max = parse_number<int>(v, "plateau_size_max"); },
         [=](const Settings& s) { return num(s.synth.plateau_size_max); }},
        {"synth", "plateau_weight_skew", "Member r of a plateau of size P is drawn with weight exp(-skew r / P).",
         [](Settings& s, const std::string& v) { s.synth.plateau_weight_skew = parse_number<double>(v, "plateau_weight_skew"); },
         [=](const Settings& s) { return num(s.synth.plateau_weight_skew); }},
        {"synth", "short_response_probability", "Probability that a response carries 19 instead of 20 ids.",
         [](Settings& s, const std::string& v) {
             s.synth.short_response_probability = parse_number<double>(v, "short_response_probability");
         },
         [=](const Settings& s) { return num(s.synth.short_response_probability); }},
        {"synth", "plateau_hit_rate", "Probability that a response slot is filled from the plateau.",
         [](Settings& s, const std::string& v) { s.synth.plateau_hit_rate = parse_number<double>(v, "plateau_hit_rate"); },
         [=](const Settings& s) { return num(s.synth.plateau_hit_rate); }},
        {"synth", "tail_pool_size", "Size of each item's tail pool; 0 disables tail fill.",
         [](Settings& s, const std::string& v) { s.synth.tail_pool_size = parse_number<std::size_t>(v, "tail_pool_size"); },
         [=](const Settings& s) { return num(s.synth.tail_pool_size); }},
        {"synth", "tail_exponent", "Tail rank j is drawn with weight (j + 1)^-exponent.",
         [](Settings& s, const std::string& v) { s.synth.tail_exponent = parse_number<double>(v, "tail_exponent"); },
         [=](const Settings& s) { return num(s.synth.tail_exponent); }},
        {"synth", "renewal_rate", "Per-request probability of replacing one plateau member.",
         [](Settings& s, const std::string& v) { s.synth.renewal_rate = parse_number<double>(v, "renewal_rate"); },
         [=](const Settings& s) { return num(s.synth.renewal_rate); }},
        {"synth", "renewal_locality", "Share of replacements drawn from the 2- and 3-hop neighbourhood.",
         [](Settings& s, const std::string& v) { s.synth.renewal_locality = parse_number<double>(v, "renewal_locality"); },
         [=](const Settings& s) { return num(s.synth.renewal_locality); }},
        {"synth", "renewal_depth3_share", "Among local replacements, share drawn exactly 3 hops away.",
         [](Settings& s, const std::string& v) {
             s.synth.renewal_depth3_share = parse_number<double>(v, "renewal_depth3_share");
         },
         [=](const Settings& s) { return num(s.synth.renewal_depth3_share); }},
        {"synth", "homophily", "Probability that a plateau member shares the source's category.",
         [](Settings& s, const std::string& v) { s.synth.homophily = parse_number<double>(v, "homophily"); },
         [=](const Settings& s) { return num(s.synth.homophily); }},
        {"synth", "locality_window", "Half-width of the same-category window on the category ring.",
         [](Settings& s, const std::string& v) { s.synth.locality_window = parse_number<std::size_t>(v, "locality_window"); },
         [=](const Settings& s) { return num(s.synth.locality_window); }},
        {"synth", "author_block", "Consecutive ring positions sharing one author.",
         [](Settings& s, const std::string& v) { s.synth.author_block = parse_number<std::size_t>(v, "author_block"); },
         [=](const Settings& s) { return num(s.synth.author_block); }},
        {"synth", "categories", "Category weights as Name:weight, comma separated.",
         [](Settings& s, const std::string& v) { s.synth.categories = detail::parse_categories(v, "categories"); },
         [](const Settings& s) { return detail::format_categories(s.synth.categories); }},
        {"synth", "log_views_mean", "Mean of log views.",
         [](Settings& s, const std::string& v) { s.synth.log_views_mean = parse_number<double>(v, "log_views_mean"); },
         [=](const Settings& s) { return num(s.synth.log_views_mean); }},
        {"synth", "log_views_std", "Standard deviation of log views.",
         [](Settings& s, const std::string& v) { s.synth.log_views_std = parse_number<double>(v, "log_views_std"); },
         [=](const Settings& s) { return num(s.synth.log_views_std); }},
        {"synth", "like_rate_log_mean", "Mean of the log like-per-view rate.",
         [](Settings& s, const std::string& v) { s.synth.like_rate_log_mean = parse_number<double>(v, "like_rate_log_mean"); },
         [=](const Settings& s) { return num(s.synth.like_rate_log_mean); }},
        {"synth", "like_rate_log_std", "Standard deviation of the log like-per-view rate.",
         [](Settings& s, const std::string& v) { s.synth.like_rate_log_std = parse_number<double>(v, "like_rate_log_std"); },
         [=](const Settings& s) { return num(s.synth.like_rate_log_std); }},
        {"synth", "contentment_mean", "Mean target contentment index.",
         [](Settings& s, const std::string& v) { s.synth.contentment_mean = parse_number<double>(v, "contentment_mean"); },
         [=](const Settings& s) { return num(s.synth.contentment_mean); }},
        {"synth", "contentment_std", "Standard deviation of the target contentment index.",
         [](Settings& s, const std::string& v) { s.synth.contentment_std = parse_number<double>(v, "contentment_std"); },
         [=](const Settings& s) { return num(s.synth.contentment_std); }},
        {"synth", "contraction_with_views", "Tie locality and homophily to regional view levels.",
         [](Settings& s, const std::string& v) {
             s.synth.contraction_with_views = parse_bool(v, "contraction_with_views");
         },
         [](const Settings& s) { return std::string(s.synth.contraction_with_views ? "true" : "false"); }},
        {"synth", "region_size", "Ring positions per view region (contraction mode).",
         [](Settings& s, const std::string& v) { s.synth.region_size = parse_number<std::size_t>(v, "region_size"); },
         [=](const Settings& s) { return num(s.synth.region_size); }},
        {"synth", "min_window", "Locality window of the highest-view regions (contraction mode).",
         [](Settings& s, const std::string& v) { s.synth.min_window = parse_number<std::size_t>(v, "min_window"); },
         [=](const Settings& s) { return num(s.synth.min_window); }},
        {"synth", "max_window", "Locality window of the lowest-view regions (contraction mode).",
         [](Settings& s, const std::string& v) { s.synth.max_window = parse_number<std::size_t>(v, "max_window"); },
         [=](const Settings& s) { return num(s.synth.max_window); }},
        {"synth", "region_log_views_span", "Spread of regional log-view levels (contraction mode).",
         [](Settings& s, const std::string& v) {
             s.synth.region_log_views_span = parse_number<double>(v, "region_log_views_span");
         },
         [=](const Settings& s) { return num(s.synth.region_log_views_span); }},
        {"synth", "region_log_views_noise", "Per-item log-view noise around the regional level (contraction mode).",
         [](Settings& s, const std::string& v) {
             s.synth.region_log_views_noise = parse_number<double>(v, "region_log_views_noise");
         },
         [=](const Settings& s) { return num(s.synth.region_log_views_noise); }},
        {"synth", "request_interval_s", "Timestamp spacing of synthetic responses, in seconds.",
         [](Settings& s, const std::string& v) {
             s.synth.request_interval = Millis{std::llround(parse_number<double>(v, "request_interval_s") * 1000.0)};
         },
         [=](const Settings& s) { return num(static_cast<double>(s.synth.request_interval.count()) / 1000.0); }},
    };
    return keys;
}

/// Applies `section.key = value`; unknown keys are errors.
inline void apply_setting(Settings& settings, const std::string& section, const std::string& key,
                          const std::string& value) {
    for (const auto& k : config_keys()) {
        if (k.section == section && k.key == key) {
            k.apply(settings, value);
            return;
        }
    }
    throw ConfigError("unknown configuration key [" + section + "] " + key);
}

inline void load_settings(Settings& settings, std::istream& in, const std::string& origin = "<config>") {
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(origin + ": " + e.message() + " at line " + std::to_string(e.line()));
    }
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty()) {
            throw ConfigError(origin + ": key '" + section + "' is outside any section");
        }
        for (const auto& [key, value] : body) {
            apply_setting(settings, section, key, detail::trim(value.data()));
        }
    }
}

inline void load_settings(Settings& settings, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    load_settings(settings, in, path.string());
}

/// Writes every key with its current value in the configuration file format.
inline void write_settings(std::ostream& out, const Settings& settings) {
    std::string section;
    for (const auto& k : config_keys()) {
        if (k.section != section) {
            if (!section.empty()) out << '\n';
            section = k.section;
            out << '[' << section << "]\n";
        }
        out << k.key << " = " << k.show(settings) << '\n';
    }
}

} // namespace recgraph
