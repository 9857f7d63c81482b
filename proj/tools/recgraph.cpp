#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <fstream>
#include <iostream>

#include "recgraph/recgraph.hpp"

namespace {

using namespace recgraph;
namespace fs = std::filesystem;

int exit_code(ErrorCategory category) {
    switch (category) {
        case ErrorCategory::config: return 2;
        case ErrorCategory::io: return 3;
        case ErrorCategory::provider: return 4;
        case ErrorCategory::analysis: return 5;
    }
    return 1;
}

/// Options shared by every command.
struct Common {
    std::string config;
    std::vector<std::string> overrides;
    std::string output;
    std::string format = "csv";
    std::optional<std::uint64_t> rng_seed;
    unsigned jobs = detail::default_jobs();
    std::string log_level = "warn";

    void attach(CLI::App& app) {
        app.add_option("--config", config, "Configuration file (INI sections: source, longcrawl, graphcrawl, walk, "
                                           "analysis, clock, synth)");
        app.add_option("--set", overrides, "Override one configuration key, as section.key=value (repeatable)");
        app.add_option("--output,-o", output, "Output path for the result table (default: stdout)");
        app.add_option("--format", format, "Table format: csv or jsonl")->capture_default_str();
        app.add_option("--rng-seed", rng_seed, "Seed for the command's random streams");
        app.add_option("--jobs,-j", jobs, "Worker thread cap")->capture_default_str();
        app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off")->capture_default_str();
    }

    TableFormat table_format() const { return parse_table_format(format); }

    Settings load() const {
        Settings s;
        if (!config.empty()) load_settings(s, fs::path(config));
        for (const auto& o : overrides) {
            const auto eq = o.find('=');
            const auto dot = o.find('.');
            if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
                throw ConfigError("--set expects section.key=value, got '" + o + "'");
            }
            apply_setting(s, o.substr(0, dot), o.substr(dot + 1, eq - dot - 1), o.substr(eq + 1));
        }
        if (jobs < 1) throw ConfigError("--jobs must be >= 1");
        table_format();
        const auto level = spdlog::level::from_str(log_level);
        if (level == spdlog::level::off && log_level != "off") throw ConfigError("unknown log level " + log_level);
        spdlog::set_level(level);
        return s;
    }

    void emit(const Table& table) const {
        if (output.empty()) {
            write_table(std::cout, table, table_format());
            std::cout.flush();
            return;
        }
        std::ofstream out(output, std::ios::trunc);
        if (!out) throw IoError("cannot open " + output + " for writing");
        write_table(out, table, table_format());
    }
};

std::vector<fs::path> expand_graph_inputs(const std::vector<std::string>& inputs) {
    std::vector<fs::path> out;
    for (const auto& in : inputs) {
        const fs::path p(in);
        if (fs::is_directory(p)) {
            std::vector<fs::path> files;
            for (const auto& entry : fs::directory_iterator(p)) {
                if (entry.path().extension() == ".graph") files.push_back(entry.path());
            }
            std::sort(files.begin(), files.end());
            out.insert(out.end(), files.begin(), files.end());
        } else {
            out.push_back(p);
        }
    }
    if (out.empty()) throw ConfigError("no graph inputs given");
    return out;
}

std::vector<RecommendationGraph> load_graphs(const std::vector<std::string>& inputs) {
    std::vector<RecommendationGraph> graphs;
    for (const auto& p : expand_graph_inputs(inputs)) graphs.push_back(import_graph(p));
    return graphs;
}

std::vector<VideoId> gather_seeds(const std::vector<std::string>& ids, const std::string& seeds_file) {
    std::vector<VideoId> seeds;
    for (const auto& id : ids) seeds.emplace_back(id);
    if (!seeds_file.empty()) {
        const auto more = seeds_from_table(read_table(fs::path(seeds_file)));
        seeds.insert(seeds.end(), more.begin(), more.end());
    }
    if (seeds.empty()) throw ConfigError("no seeds given (use --seed or --seeds-file)");
    return seeds;
}

std::string graph_file_name(const VideoId& ego) {
    std::string name = ego.str();
    for (auto& ch : name) {
        if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '-' && ch != '_' && ch != '.') ch = '_';
    }
    return name + ".graph";
}

/// The configured provider, wrapped in the in-flight cap, plus its clock.
struct Backend {
    std::unique_ptr<Provider> provider;
    std::unique_ptr<InFlightLimiter> limited;
    std::unique_ptr<Clock> clock;
    SampleLog replay_log;

    explicit Backend(const Settings& s) {
        switch (s.source) {
            case SourceKind::synth: provider = std::make_unique<SynthPlatform>(s.synth); break;
            case SourceKind::http: provider = std::make_unique<HttpSource>(s.http); break;
            case SourceKind::replay:
                if (s.replay_log.empty()) throw ConfigError("replay source needs [source] replay_log");
                replay_log = read_sample_log(s.replay_log);
                provider = std::make_unique<ReplaySource>(replay_log);
                break;
        }
        limited = std::make_unique<InFlightLimiter>(*provider, s.max_in_flight);
        if (s.use_simulated_clock()) {
            clock = std::make_unique<SimulatedClock>(s.clock_origin);
        } else {
            clock = std::make_unique<SystemClock>();
        }
    }

    Provider& get() { return *limited; }
};

void validate_source(const Settings& s) {
    s.synth.validate();
    if (s.source == SourceKind::http) s.http.validate();
    if (s.source == SourceKind::replay && s.replay_log.empty()) {
        throw ConfigError("replay source needs [source] replay_log");
    }
    if (s.max_in_flight < 1) throw ConfigError("max_in_flight must be >= 1");
}

// ---- commands ----

struct SynthgenCmd {
    Common common;
    std::size_t seeds = 10;
    std::uint64_t stream = 0;
    std::string ground_truth;
    RequestIndex at_request = 0;
    std::string write_config;

    void attach(CLI::App& app) {
        common.attach(app);
        app.add_option("--seeds", seeds, "Number of seed items to draw")->capture_default_str();
        app.add_option("--seed-stream", stream, "Independent seed-draw stream")->capture_default_str();
        app.add_option("--ground-truth", ground_truth, "Write latent state of every seed as line-delimited records");
        app.add_option("--at-request", at_request, "Request count at which the ground truth is taken")
            ->capture_default_str();
        app.add_option("--write-config", write_config, "Write the effective configuration to this path");
    }

    void run() {
        Settings s = common.load();
        if (common.rng_seed) s.synth.rng_seed = *common.rng_seed;
        s.synth.validate();
        if (at_request < 0) throw ConfigError("--at-request must be >= 0");
        SynthPlatform platform(s.synth);
        const auto picked = platform.pick_seeds(seeds, stream);
        if (!write_config.empty()) {
            std::ofstream out(write_config, std::ios::trunc);
            if (!out) throw IoError("cannot open " + write_config + " for writing");
            write_settings(out, s);
        }
        if (!ground_truth.empty()) {
            std::ofstream out(ground_truth, std::ios::trunc);
            if (!out) throw IoError("cannot open " + ground_truth + " for writing");
            out << Json{{"record", "header"}, {"command", "synthgen"}, {"version", kTableVersion}}.dump() << '\n';
            for (const auto& id : picked) out << to_json(platform.ground_truth(id, at_request)).dump() << '\n';
            if (!out) throw IoError("failed to write " + ground_truth);
        }
        common.emit(seed_table(picked));
    }
};

struct LongcrawlCmd {
    Common common;
    std::vector<std::string> seed_ids;
    std::string seeds_file;
    std::string log;
    bool resume = false;
    std::optional<std::int64_t> requests;
    std::optional<double> interval_s;
    std::optional<double> jitter;
    std::optional<std::int64_t> meta_every;

    void attach(CLI::App& app) {
        common.attach(app);
        app.add_option("--seed", seed_ids, "Seed id (repeatable)");
        app.add_option("--seeds-file", seeds_file, "Seed table, as written by synthgen");
        app.add_option("--log", log, "Sample log to write")->required();
        app.add_flag("--resume", resume, "Continue an interrupted crawl recorded in --log");
        app.add_option("--requests", requests, "Requests per seed");
        app.add_option("--interval-s", interval_s, "Mean request spacing in seconds");
        app.add_option("--jitter", jitter, "Spacing jitter as a fraction of the mean");
        app.add_option("--meta-every", meta_every, "Metadata snapshot stride; 0 disables");
    }

    void run() {
        Settings s = common.load();
        CrawlPlan plan = s.plan;
        plan.seeds = gather_seeds(seed_ids, seeds_file);
        if (requests) plan.requests_per_seed = *requests;
        if (interval_s) plan.mean_interval = Millis{std::llround(*interval_s * 1000.0)};
        if (jitter) plan.jitter_fraction = *jitter;
        if (meta_every) plan.fetch_meta_every = *meta_every;
        if (common.rng_seed) plan.rng_seed = *common.rng_seed;
        validate_plan(plan);
        validate_source(s);

        Backend backend(s);
        CrawlSummary summary;
        if (resume) {
            if (!fs::exists(log)) throw IoError("--resume: no log at " + log);
            repair_log_tail(log);
            const auto existing = read_sample_log(fs::path(log));
            FileSampleSink sink(log, FileSampleSink::Mode::append);
            summary = resume_long_crawl(plan, existing, backend.get(), sink, *backend.clock, common.jobs);
        } else {
            FileSampleSink sink(log, FileSampleSink::Mode::truncate);
            summary = run_long_crawl(plan, backend.get(), sink, *backend.clock, common.jobs);
        }
        common.emit(crawl_summary_table(summary));
    }
};

std::vector<VideoId> selected_sources(const SampleLog& log, const std::vector<std::string>& filter) {
    if (filter.empty()) return log.sources();
    std::vector<VideoId> out;
    for (const auto& f : filter) out.emplace_back(f);
    return out;
}

struct PlateauCmd {
    Common common;
    std::string input;
    std::size_t window = kDefaultLifespanWindow;
    bool tail = false;
    std::optional<double> floor;
    bool frequencies = false;
    std::vector<std::string> sources;

    void attach(CLI::App& app) {
        common.attach(app);
        app.add_option("--input,-i", input, "Sample log")->required();
        app.add_option("--window", window, "Samples per frequency window")->capture_default_str();
        app.add_flag("--tail", tail, "Use the final window instead of the first");
        app.add_option("--floor", floor, "Frequency floor for change-point detection");
        app.add_flag("--frequencies", frequencies, "Emit the full rank-frequency table instead of plateaus");
        app.add_option("--source-id", sources, "Restrict to these sources (repeatable)");
    }

    void run() {
        Settings s = common.load();
        const double f = floor.value_or(s.novelty.floor);
        if (window < 1) throw ConfigError("--window must be >= 1");
        const auto log = read_sample_log(fs::path(input));
        std::vector<FrequencyTable> tables;
        for (const auto& id : selected_sources(log, sources)) {
            const auto samples = log.samples_for(id);
            tables.push_back(tail ? build_tail_frequency_table(samples, window) : build_frequency_table(samples, window));
        }
        if (frequencies) {
            common.emit(frequency_rank_table(tables));
            return;
        }
        std::vector<Plateau> plateaus;
        for (const auto& t : tables) plateaus.push_back(detect_plateau(t, f));
        common.emit(plateau_table(plateaus));
    }
};

struct LifespanCmd {
    Common common;
    std::string input;
    std::optional<std::size_t> window;
    std::vector<double> thresholds{0.0, 0.5, 0.9};
    bool survival = false;
    std::vector<std::string> sources;

    void attach(CLI::App& app) {
        common.attach(app);
        app.add_option("--input,-i", input, "Sample log")->required();
        app.add_option("--window", window, "Sliding-window length (default from [analysis] lifespan_window)");
        app.add_option("--threshold", thresholds, "Presence thresholds (repeatable)")->capture_default_str();
        app.add_flag("--survival", survival, "Emit survival counts (T, count, threshold) instead of records");
        app.add_option("--source-id", sources, "Restrict to these sources (repeatable)");
    }

    void run() {
        Settings s = common.load();
        const std::size_t slide = window.value_or(s.lifespan_window);
        if (slide < 1) throw ConfigError("--window must be >= 1");
        for (double t : thresholds) {
            if (!(t >= 0.0 && t <= 1.0)) throw ConfigError("thresholds must lie in [0, 1]");
        }
        const auto log = read_sample_log(fs::path(input));
        Table records{"lifespan", {}, {}};
        std::vector<LifespanRecord> all;
        bool first = true;
        for (const auto& id : selected_sources(log, sources)) {
            const auto r = compute_lifespans(log.samples_for(id), slide, thresholds);
            if (first) {
                records = lifespan_table(id, r);
                first = false;
            } else {
                lifespan_table(id, r, &records);
            }
            all.insert(all.end(), r.begin(), r.end());
        }
        if (survival) {
            common.emit(survival_table(lifespan_survival(all)));
        } else {
            if (first) records = lifespan_table(VideoId("-"), {});
            common.emit(records);
        }
    }
};

struct GraphcrawlCmd {
    Common common;
    std::vector<std::string> egos;
    std::string seeds_file;
    std::string output_dir;
    std::optional<std::size_t> probe_requests;
    std::optional<int> max_depth;
    std::optional<std::int64_t> probe_interval_ms;
    std::optional<std::int64_t> first_request_index;
    std::optional<double> floor;

    void attach(CLI::App& app) {
        common.attach(app);
        app.add_option("--ego", egos, "Ego id (repeatable)");
        app.add_option("--seeds-file", seeds_file, "Seed table, as written by synthgen");
        app.add_option("--output-dir", output_dir, "Directory for the graph files")->required();
        app.add_option("--probe-requests", probe_requests, "Requests per node for plateau detection");
        app.add_option("--max-depth", max_depth, "Depth horizon");
        app.add_option("--probe-interval-ms", probe_interval_ms, "Spacing between probes of one node");
        app.add_option("--first-request-index", first_request_index, "Request index of each node's first probe");
        app.add_option("--floor", floor, "Frequency floor for change-point detection");
    }

    void run() {
        Settings s = common.load();
        GraphCrawlConfig cfg = s.graph;
        cfg.probe_interval = s.effective_probe_interval();
        if (probe_requests) cfg.probe_requests = *probe_requests;
        if (max_depth) cfg.max_depth = *max_depth;
        if (probe_interval_ms) cfg.probe_interval = Millis{*probe_interval_ms};
        if (first_request_index) cfg.first_request_index = *first_request_index;
        if (floor) cfg.floor = *floor;
        cfg.jobs = common.jobs;
        cfg.validate();
        validate_source(s);
        const auto seeds = gather_seeds(egos, seeds_file);

        Backend backend(s);
        std::error_code ec;
        fs::create_directories(output_dir, ec);
        if (ec) throw IoError("cannot create " + output_dir + ": " + ec.message());
        std::vector<RecommendationGraph> graphs;
        for (const auto& ego : seeds) {
            auto g = crawl_recommendation_graph(ego, backend.get(), cfg, *backend.clock);
            export_graph(g, fs::path(output_dir) / graph_file_name(ego));
            graphs.push_back(std::move(g));
        }
        common.emit(graph_summary_table(graphs));
    }
};

struct MetricsCmd {
    Common common;
    std::vector<std::string> graphs;
    std::optional<std::size_t> walks;
    std::optional<std::size_t> walk_length;

    void attach(CLI::App& app) {
        common.attach(app);
        app.add_option("--graph,-g", graphs, "Graph file or directory of .graph files (repeatable)")->required();
        app.add_option("--walks", walks, "Random walks per graph");
        app.add_option("--walk-length", walk_length, "Edge traversals per walk");
    }

    void run() {
        Settings s = common.load();
        WalkConfig cfg = s.walk;
        if (walks) cfg.walks = *walks;
        if (walk_length) cfg.walk_length = *walk_length;
        if (common.rng_seed) cfg.rng_seed = *common.rng_seed;
        cfg.validate();
        std::vector<GraphMetrics> out;
        for (const auto& path : expand_graph_inputs(graphs)) {
            out.push_back(compute_graph_metrics(import_graph(path), cfg, common.jobs));
        }
        common.emit(metrics_table(out));
    }
};

struct CorrelateCmd {
    Common common;
    std::string input;

    void attach(CLI::App& app) {
        common.attach(app);
        app.add_option("--input,-i", input, "Metrics table, as written by the metrics command")->required();
    }

    void run() {
        common.load();
        const auto metrics = metrics_from_table(read_table(fs::path(input)));
        common.emit(correlation_table(correlation_report(metrics)));
    }
};

ViewBoundaries parse_boundaries(const std::string& text, const std::vector<RecommendationGraph>& graphs) {
    if (text.empty()) return kDefaultViewBoundaries;
    if (text == "auto") {
        std::vector<std::uint64_t> views;
        std::set<VideoId> seen;
        for (const auto& g : graphs) {
            for (const auto& [id, n] : g.nodes) {
                if (n.meta && seen.insert(id).second) views.push_back(n.meta->views);
            }
        }
        return view_quartile_boundaries(std::move(views));
    }
    ViewBoundaries b{};
    std::stringstream ss(text);
    std::string part;
    std::size_t i = 0;
    while (std::getline(ss, part, ',')) {
        if (i >= 3) throw ConfigError("--view-boundaries takes three values");
        b[i++] = detail::parse_number<std::uint64_t>(detail::trim(part), "--view-boundaries");
    }
    if (i != 3 || !(b[0] <= b[1] && b[1] <= b[2])) {
        throw ConfigError("--view-boundaries takes three non-decreasing values");
    }
    return b;
}

struct TransitionsCmd {
    Common common;
    std::vector<std::string> graphs;
    std::string bins = "all";
    std::string novelty;
    std::string view_boundaries;
    std::vector<std::string> top_categories;

    void attach(CLI::App& app) {
        common.attach(app);
        app.add_option("--graph,-g", graphs, "Graph file or directory of .graph files (repeatable)")->required();
        app.add_option("--bins", bins, "category, contentment, views or all")->capture_default_str();
        app.add_option("--novelty", novelty, "Novelty table; restricts edges to (ego -> novel item)");
        app.add_option("--view-boundaries", view_boundaries,
                       "Three view-quartile boundaries a,b,c, or 'auto' for quartiles of the input graphs");
        app.add_option("--top-category", top_categories, "Category kept as its own bin (repeatable)");
    }

    void run() {
        common.load();
        std::vector<BinKind> kinds;
        if (bins == "all") kinds = {BinKind::category, BinKind::contentment, BinKind::views};
        else if (bins == "category") kinds = {BinKind::category};
        else if (bins == "contentment") kinds = {BinKind::contentment};
        else if (bins == "views") kinds = {BinKind::views};
        else throw ConfigError("--bins must be category, contentment, views or all");
        if (view_boundaries != "auto") parse_boundaries(view_boundaries, {});

        const auto loaded = load_graphs(graphs);
        std::vector<NoveltyReport> reports;
        if (!novelty.empty()) reports = novelty_from_table(read_table(fs::path(novelty)));
        const auto filter = novelty.empty() ? TransitionFilter::all() : TransitionFilter::novel_only(reports);

        Table out{"transitions", {}, {}};
        for (auto kind : kinds) {
            BinScheme scheme = kind == BinKind::category
                                   ? category_scheme(top_categories.empty() ? default_top_categories() : top_categories)
                               : kind == BinKind::contentment ? contentment_scheme()
                                                              : view_scheme(parse_boundaries(view_boundaries, loaded));
            const auto m = build_transition_matrix(loaded, scheme, filter);
            spdlog::info("{} transitions: {} source nodes, {} edges without metadata", to_string(kind), m.source_nodes,
                         m.excluded_edges);
            auto t = transition_table(m);
            if (out.columns.empty()) out.columns = t.columns;
            for (auto& row : t.rows) out.rows.push_back(std::move(row));
        }
        common.emit(out);
    }
};

struct NoveltyCmd {
    Common common;
    std::vector<std::string> graphs;
    std::string input;
    std::optional<std::size_t> tail_window;
    std::optional<double> floor;
    bool summary = false;
    std::size_t bins = 10;

    void attach(CLI::App& app) {
        common.attach(app);
        app.add_option("--graph,-g", graphs, "Graph file or directory of .graph files (repeatable)")->required();
        app.add_option("--input,-i", input, "Long-crawl sample log covering the graph egos")->required();
        app.add_option("--tail-window", tail_window, "Final samples used for the late plateau");
        app.add_option("--floor", floor, "Frequency floor for change-point detection");
        app.add_flag("--summary", summary, "Emit the cohort summary instead of per-item rows");
        app.add_option("--bins", bins, "Histogram bins for --summary")->capture_default_str();
    }

    void run() {
        Settings s = common.load();
        NoveltyConfig cfg = s.novelty;
        if (tail_window) cfg.tail_window = *tail_window;
        if (floor) cfg.floor = *floor;
        if (cfg.tail_window < 1 || bins < 1) throw ConfigError("--tail-window and --bins must be >= 1");
        const auto loaded = load_graphs(graphs);
        const auto log = read_sample_log(fs::path(input));
        std::vector<NoveltyReport> reports;
        for (const auto& g : loaded) reports.push_back(analyze_novelty(g, log.samples_for(g.ego), cfg));
        if (summary) {
            common.emit(novelty_summary_table(summarize_novelty(reports, bins)));
        } else {
            common.emit(novelty_table(reports));
        }
    }
};

struct ValidateCmd {
    Common common;
    std::vector<std::string> graphs;
    std::vector<std::string> logs;
    std::vector<std::string> tables;

    void attach(CLI::App& app) {
        common.attach(app);
        app.add_option("--graph,-g", graphs, "Graph file or directory (repeatable)");
        app.add_option("--log", logs, "Sample log (repeatable)");
        app.add_option("--table", tables, "Result table in either format (repeatable)");
    }

    /// Returns true when every artifact is valid.
    bool run() {
        common.load();
        if (graphs.empty() && logs.empty() && tables.empty()) throw ConfigError("nothing to validate");
        Table out{"validate", {"artifact", "kind", "message"}, {}};
        auto fail = [&](const std::string& artifact, const std::string& kind, const std::string& message) {
            out.add({artifact, kind, message});
        };
        if (!graphs.empty()) {
            for (const auto& path : expand_graph_inputs(graphs)) {
                try {
                    violation_table(path.string(), validate_graph(import_graph(path)), &out);
                } catch (const InvalidGraphError& e) {
                    violation_table(path.string(), e.report(), &out);
                } catch (const FormatError& e) {
                    fail(path.string(), "format", e.what());
                }
            }
        }
        for (const auto& path : logs) {
            try {
                for (const auto& v : validate_sample_log(read_sample_log(fs::path(path)))) fail(path, v.kind, v.message);
            } catch (const FormatError& e) {
                fail(path, "format", e.what());
            }
        }
        for (const auto& path : tables) {
            try {
                read_table(fs::path(path));
            } catch (const FormatError& e) {
                fail(path, "format", e.what());
            }
        }
        common.emit(out);
        return out.rows.empty();
    }
};

std::string markdown_escape(std::string s) {
    std::string out;
    for (char ch : s) {
        if (ch == '|') out += "\\|";
        else out += ch;
    }
    return out;
}

void write_reference(std::ostream& out, const CLI::App& app) {
    out << "# recgraph command reference\n\n"
        << "Generated by `recgraph reference`. Every command accepts the common options and exits with "
           "0 on success, 2 for configuration errors, 3 for I/O and format errors, 4 for provider errors "
           "and 5 for analysis errors (including failed validation).\n\n";
    for (const auto* sub : app.get_subcommands([](const CLI::App*) { return true; })) {
        out << "## " << sub->get_name() << "\n\n" << sub->get_description() << "\n\n"
            << "| Option | Description | Default |\n|---|---|---|\n";
        for (const auto* opt : sub->get_options()) {
            if (opt->get_name() == "--help" || opt->get_name() == "--help-all") continue;
            out << "| `" << opt->get_name(false, true) << "` | " << markdown_escape(opt->get_description()) << " | "
                << markdown_escape(opt->get_default_str()) << " |\n";
        }
        out << '\n';
    }
    out << "## Configuration keys\n\nINI file passed with `--config`; any key can also be set with "
           "`--set section.key=value`. Unknown sections or keys are rejected.\n\n"
        << "| Section | Key | Description | Default |\n|---|---|---|---|\n";
    const Settings defaults;
    for (const auto& k : config_keys()) {
        out << "| " << k.section << " | `" << k.key << "` | " << markdown_escape(k.description) << " | `"
            << markdown_escape(k.show(defaults)) << "` |\n";
    }
}

} // namespace

int main(int argc, char** argv) {
    spdlog::set_default_logger(spdlog::stderr_color_mt("recgraph"));
    spdlog::set_level(spdlog::level::warn);

    CLI::App app{"Measure confinement in recommendation graphs: sample suggestions, detect plateaus, crawl "
                 "graphs and analyse them."};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for every command");

    SynthgenCmd synthgen;
    LongcrawlCmd longcrawl;
    PlateauCmd plateau;
    LifespanCmd lifespan;
    GraphcrawlCmd graphcrawl;
    MetricsCmd metrics;
    CorrelateCmd correlate;
    TransitionsCmd transitions;
    NoveltyCmd novelty;
    ValidateCmd validate;
    std::string reference_output;

    auto* c_synthgen = app.add_subcommand("synthgen", "Draw seed items from the synthetic platform and dump their ground truth.");
    synthgen.attach(*c_synthgen);
    auto* c_longcrawl = app.add_subcommand("longcrawl", "Repeatedly sample the suggestions of each seed into a sample log.");
    longcrawl.attach(*c_longcrawl);
    auto* c_plateau = app.add_subcommand("plateau", "Detect plateaus (or list rank frequencies) from a sample log.");
    plateau.attach(*c_plateau);
    auto* c_lifespan = app.add_subcommand("lifespan", "Suggestion lifespans over sliding windows of a sample log.");
    lifespan.attach(*c_lifespan);
    auto* c_graphcrawl = app.add_subcommand("graphcrawl", "Crawl depth-bounded recommendation graphs from egos.");
    graphcrawl.attach(*c_graphcrawl);
    auto* c_metrics = app.add_subcommand("metrics", "Random-walk entropies and size metrics of graphs.");
    metrics.attach(*c_metrics);
    auto* c_correlate = app.add_subcommand("correlate", "Pearson correlation matrix of a metrics table.");
    correlate.attach(*c_correlate);
    auto* c_transitions = app.add_subcommand("transitions", "Transition matrices between category, contentment or view bins.");
    transitions.attach(*c_transitions);
    auto* c_novelty = app.add_subcommand("novelty", "Novel plateau members after a long crawl and where they came from.");
    novelty.attach(*c_novelty);
    auto* c_validate = app.add_subcommand("validate", "Check graph files, sample logs and result tables.");
    validate.attach(*c_validate);
    auto* c_reference = app.add_subcommand("reference", "Write the Markdown command and configuration reference.");
    c_reference->add_option("--output,-o", reference_output, "Output path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << "error [config]: " << e.what() << '\n';
        return exit_code(ErrorCategory::config);
    }

    try {
        if (c_synthgen->parsed()) synthgen.run();
        else if (c_longcrawl->parsed()) longcrawl.run();
        else if (c_plateau->parsed()) plateau.run();
        else if (c_lifespan->parsed()) lifespan.run();
        else if (c_graphcrawl->parsed()) graphcrawl.run();
        else if (c_metrics->parsed()) metrics.run();
        else if (c_correlate->parsed()) correlate.run();
        else if (c_transitions->parsed()) transitions.run();
        else if (c_novelty->parsed()) novelty.run();
        else if (c_validate->parsed()) {
            if (!validate.run()) {
                std::cerr << "error [analysis]: validation found violations\n";
                return exit_code(ErrorCategory::analysis);
            }
        } else if (c_reference->parsed()) {
            if (reference_output.empty()) {
                write_reference(std::cout, app);
            } else {
                std::ofstream out(reference_output, std::ios::trunc);
                if (!out) throw IoError("cannot open " + reference_output + " for writing");
                write_reference(out, app);
            }
        }
    } catch (const Error& e) {
        std::cerr << "error [" << to_string(e.category()) << "]: " << e.what() << '\n';
        return exit_code(e.category());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
