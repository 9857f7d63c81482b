#pragma once

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <variant>

#include "recgraph/correlation.hpp"
#include "recgraph/evolution.hpp"
#include "recgraph/sampler.hpp"
#include "recgraph/transitions.hpp"

namespace recgraph {

inline constexpr int kTableVersion = 1;

using Cell = std::variant<std::monostate, std::string, std::int64_t, double>;

/// A named, versioned table; every command output is one of these.
struct Table {
    std::string command;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    std::size_t column(std::string_view name) const {
        const auto it = std::find(columns.begin(), columns.end(), name);
        if (it == columns.end()) throw FormatError("table '" + command + "' has no column '" + std::string(name) + "'");
        return static_cast<std::size_t>(it - columns.begin());
    }

    void add(std::vector<Cell> row) {
        if (row.size() != columns.size()) throw AnalysisError("row width does not match the table columns");
        rows.push_back(std::move(row));
    }
};

enum class TableFormat { csv, jsonl };

inline TableFormat parse_table_format(std::string_view text) {
    if (text == "csv") return TableFormat::csv;
    if (text == "jsonl") return TableFormat::jsonl;
    throw ConfigError("unknown format '" + std::string(text) + "' (expected csv or jsonl)");
}

inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

inline Cell optional_cell(const std::optional<double>& v) {
    return v ? Cell{*v} : Cell{};
}

inline std::string cell_string(const Cell& c) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::monostate>) return "";
            else if constexpr (std::is_same_v<T, std::string>) return v;
            else if constexpr (std::is_same_v<T, std::int64_t>) return std::to_string(v);
            else return format_double(v);
        },
        c);
}

/// Numeric view of a cell; empty cells read as NaN.
inline double cell_double(const Cell& c) {
    if (std::holds_alternative<std::monostate>(c)) return std::numeric_limits<double>::quiet_NaN();
    if (const auto* d = std::get_if<double>(&c)) return *d;
    if (const auto* i = std::get_if<std::int64_t>(&c)) return static_cast<double>(*i);
    const auto& s = std::get<std::string>(c);
    if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) throw FormatError("not a number: '" + s + "'");
    return v;
}

inline std::int64_t cell_int(const Cell& c) {
    if (const auto* i = std::get_if<std::int64_t>(&c)) return *i;
    if (const auto* s = std::get_if<std::string>(&c)) {
        std::int64_t v = 0;
        const auto [ptr, ec] = std::from_chars(s->data(), s->data() + s->size(), v);
        if (ec == std::errc{} && ptr == s->data() + s->size()) return v;
    }
    throw FormatError("not an integer: '" + cell_string(c) + "'");
}

inline std::optional<double> cell_optional(const Cell& c) {
    const double v = cell_double(c);
    if (std::isnan(v)) return std::nullopt;
    return v;
}

namespace detail {

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + '"';
}

/// Splits one CSV record; quoted fields may contain separators and doubled quotes.
inline std::vector<std::string> csv_split(std::string_view line) {
    std::vector<std::string> out(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                out.back() += '"';
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                out.back() += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            out.emplace_back();
        } else {
            out.back() += ch;
        }
    }
    if (quoted) throw FormatError("unterminated quoted CSV field");
    return out;
}

inline Json cell_json(const Cell& c) {
    return std::visit(
        [](const auto& v) -> Json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::monostate>) return nullptr;
            else if constexpr (std::is_same_v<T, double>) return std::isfinite(v) ? Json(v) : Json(nullptr);
            else return Json(v);
        },
        c);
}

inline Cell json_cell(const Json& j) {
    if (j.is_null()) return {};
    if (j.is_string()) return j.get<std::string>();
    if (j.is_number_integer()) return j.get<std::int64_t>();
    if (j.is_number()) return j.get<double>();
    if (j.is_boolean()) return static_cast<std::int64_t>(j.get<bool>());
    throw FormatError("unsupported JSON value in table row");
}

} // namespace detail

inline void write_table(std::ostream& out, const Table& table, TableFormat format) {
    if (format == TableFormat::csv) {
        out << "# recgraph " << table.command << " v" << kTableVersion << '\n';
        for (std::size_t i = 0; i < table.columns.size(); ++i) {
            out << (i ? "," : "") << detail::csv_field(table.columns[i]);
        }
        out << '\n';
        for (const auto& row : table.rows) {
            for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << detail::csv_field(cell_string(row[i]));
            out << '\n';
        }
    } else {
        Json header{{"record", "header"}, {"command", table.command}, {"version", kTableVersion},
                    {"columns", table.columns}};
        out << header.dump() << '\n';
        for (const auto& row : table.rows) {
            Json j = Json::object();
            for (std::size_t i = 0; i < row.size(); ++i) j[table.columns[i]] = detail::cell_json(row[i]);
            out << j.dump() << '\n';
        }
    }
    if (!out) throw IoError("failed to write table '" + table.command + "'");
}

inline std::string table_to_string(const Table& table, TableFormat format) {
    std::ostringstream out;
    write_table(out, table, format);
    return out.str();
}

/// Reads a table in either format (detected from the header line). CSV cells
/// come back as strings; use the cell_* accessors for typed access.
inline Table read_table(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw FormatError("empty table input");
    Table t;
    if (line.starts_with("# recgraph ")) {
        const auto rest = std::string_view(line).substr(11);
        const auto space = rest.rfind(' ');
        if (space == std::string_view::npos || rest.substr(space + 1) != "v" + std::to_string(kTableVersion)) {
            throw FormatError("unsupported table header '" + line + "'");
        }
        t.command = std::string(rest.substr(0, space));
        if (!std::getline(in, line)) throw FormatError("table has no column line");
        t.columns = detail::csv_split(line);
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            auto fields = detail::csv_split(line);
            if (fields.size() != t.columns.size()) throw FormatError("CSV row width mismatch: '" + line + "'");
            std::vector<Cell> row;
            for (auto& f : fields) row.push_back(f.empty() ? Cell{} : Cell{std::move(f)});
            t.rows.push_back(std::move(row));
        }
        return t;
    }
    Json header;
    try {
        header = Json::parse(line);
    } catch (const Json::exception& e) {
        throw FormatError(std::string("table header is neither CSV nor JSON: ") + e.what());
    }
    if (header.value("record", "") != "header" || header.value("version", 0) != kTableVersion) {
        throw FormatError("unsupported table header '" + line + "'");
    }
    t.command = header.at("command").get<std::string>();
    t.columns = header.at("columns").get<std::vector<std::string>>();
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        Json j;
        try {
            j = Json::parse(line);
        } catch (const Json::exception& e) {
            throw FormatError(std::string("malformed table row: ") + e.what());
        }
        std::vector<Cell> row;
        for (const auto& c : t.columns) row.push_back(j.contains(c) ? detail::json_cell(j.at(c)) : Cell{});
        t.rows.push_back(std::move(row));
    }
    return t;
}

inline Table read_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return read_table(in);
}

inline Cell count_cell(std::size_t n) { return static_cast<std::int64_t>(n); }

// ---- per-command tables ----

inline Table plateau_table(std::span<const Plateau> plateaus) {
    Table t{"plateau", {"source_id", "window", "changepoint_rank", "rank", "id", "frequency"}, {}};
    for (const auto& p : plateaus) {
        for (std::size_t r = 0; r < p.members.size(); ++r) {
            const auto& m = p.members[r];
            t.add({p.source_id.str(), count_cell(p.window), count_cell(p.changepoint_rank), count_cell(r + 1), m.id.str(),
                   m.frequency});
        }
    }
    return t;
}

inline Table frequency_rank_table(std::span<const FrequencyTable> tables) {
    Table t{"plateau", {"source_id", "window", "rank", "id", "frequency"}, {}};
    for (const auto& f : tables) {
        for (std::size_t r = 0; r < f.entries.size(); ++r) {
            const auto& e = f.entries[r];
            t.add({f.source_id.str(), count_cell(f.window), count_cell(r + 1), e.id.str(), e.frequency});
        }
    }
    return t;
}

inline Table lifespan_table(const VideoId& source, std::span<const LifespanRecord> records, Table* append = nullptr) {
    Table t{"lifespan",
            {"source_id", "suggestion", "threshold", "first_window", "last_window", "lifespan", "mean_presence"},
            {}};
    Table& out = append ? *append : t;
    for (const auto& r : records) {
        out.add({source.str(), r.suggestion.str(), r.threshold, r.first_window, r.last_window, r.lifespan,
                 r.mean_presence_over_lifespan});
    }
    return t;
}

inline Table survival_table(std::span<const SurvivalPoint> points) {
    Table t{"lifespan", {"T", "count", "threshold"}, {}};
    for (const auto& p : points) {
        t.add({p.lifespan, p.count, p.threshold});
    }
    return t;
}

inline Table graph_summary_table(std::span<const RecommendationGraph> graphs) {
    Table t{"graphcrawl",
            {"ego", "nodes", "edges", "depth1", "depth2", "depth3", "expanded", "no_plateau", "unresolved",
             "crawl_started", "crawl_finished"},
            {}};
    for (const auto& g : graphs) {
        std::array<std::size_t, 4> depth{};
        std::size_t expanded = 0, no_plateau = 0, unresolved = 0;
        for (const auto& [id, n] : g.nodes) {
            if (n.depth >= 0 && n.depth < 4) ++depth[static_cast<std::size_t>(n.depth)];
            expanded += n.status == NodeStatus::expanded;
            no_plateau += n.status == NodeStatus::no_plateau;
            unresolved += n.status == NodeStatus::unresolved;
        }
        t.add({g.ego.str(), count_cell(g.nodes.size()), count_cell(g.edges.size()), count_cell(depth[1]),
               count_cell(depth[2]), count_cell(depth[3]), count_cell(expanded), count_cell(no_plateau),
               count_cell(unresolved), format_timestamp(g.crawl_started), format_timestamp(g.crawl_finished)});
    }
    return t;
}

inline const std::vector<std::string>& metrics_columns() {
    static const std::vector<std::string> cols{
        "ego",   "eta",       "eta_c",   "eta_a",       "eta_stderr", "N",          "edges", "N_V", "k",
        "views", "likes",     "dislikes", "subscribers", "age",        "contentment"};
    return cols;
}

inline Table metrics_table(std::span<const GraphMetrics> metrics) {
    Table t{"metrics", metrics_columns(), {}};
    for (const auto& m : metrics) {
        t.add({m.ego.str(), m.mean_walk_entropy, m.mean_category_entropy, m.mean_author_entropy,
               m.walk_entropy_stderr, count_cell(m.node_count), count_cell(m.edge_count), m.mean_distinct_visited,
               m.mean_degree, m.views, m.likes, m.dislikes, m.subscribers, m.age, m.contentment});
    }
    return t;
}

inline std::vector<GraphMetrics> metrics_from_table(const Table& t) {
    std::vector<std::size_t> idx;
    for (const auto& c : metrics_columns()) idx.push_back(t.column(c));
    std::vector<GraphMetrics> out;
    for (const auto& row : t.rows) {
        GraphMetrics m{VideoId(cell_string(row[idx[0]]))};
        m.mean_walk_entropy = cell_double(row[idx[1]]);
        m.mean_category_entropy = cell_double(row[idx[2]]);
        m.mean_author_entropy = cell_double(row[idx[3]]);
        m.walk_entropy_stderr = cell_double(row[idx[4]]);
        m.node_count = static_cast<std::size_t>(cell_int(row[idx[5]]));
        m.edge_count = static_cast<std::size_t>(cell_int(row[idx[6]]));
        m.mean_distinct_visited = cell_double(row[idx[7]]);
        m.mean_degree = cell_double(row[idx[8]]);
        m.views = cell_double(row[idx[9]]);
        m.likes = cell_double(row[idx[10]]);
        m.dislikes = cell_double(row[idx[11]]);
        m.subscribers = cell_double(row[idx[12]]);
        m.age = cell_double(row[idx[13]]);
        m.contentment = cell_double(row[idx[14]]);
        out.push_back(std::move(m));
    }
    return out;
}

inline Table correlation_table(const CorrelationReport& report) {
    Table t{"correlate", {"var_a", "var_b", "rho", "p_value", "stars", "n"}, {}};
    const auto k = report.variables.size();
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            const auto& c = report.at(i, j);
            t.add({report.variables[i], report.variables[j], optional_cell(c.rho), optional_cell(c.p_value),
                   significance_stars(c.p_value), count_cell(c.n)});
        }
    }
    return t;
}

inline Table transition_table(const TransitionMatrix& m) {
    Table t{"transitions", {"bins", "from", "to", "count", "probability", "row_empty"}, {}};
    for (std::size_t i = 0; i < m.labels.size(); ++i) {
        for (std::size_t j = 0; j < m.labels.size(); ++j) {
            t.add({std::string(to_string(m.kind)), m.labels[i], m.labels[j], static_cast<std::int64_t>(m.counts[i][j]),
                   m.probabilities[i][j], static_cast<std::int64_t>(m.empty_rows[i])});
        }
    }
    return t;
}

/// One row per novel item; an ego without novelty gets one row with no item.
inline Table novelty_table(std::span<const NoveltyReport> reports) {
    Table t{"novelty",
            {"ego", "plateau_before", "plateau_after", "novelty_fraction", "inside_fraction", "item", "provenance"},
            {}};
    for (const auto& r : reports) {
        auto base = [&]() -> std::vector<Cell> {
            return {r.ego.str(), count_cell(r.plateau_before.size()), count_cell(r.plateau_after.size()),
                    r.novelty_fraction, r.inside_fraction};
        };
        if (r.provenance.empty()) {
            auto row = base();
            row.insert(row.end(), {Cell{}, Cell{}});
            t.add(std::move(row));
        }
        for (const auto& [id, p] : r.provenance) {
            auto row = base();
            row.insert(row.end(), {id.str(), std::string(to_string(p))});
            t.add(std::move(row));
        }
    }
    return t;
}

/// Reconstructs the per-ego fields needed downstream (ego, fractions, provenance).
inline std::vector<NoveltyReport> novelty_from_table(const Table& t) {
    const auto ego = t.column("ego"), nov = t.column("novelty_fraction"), ins = t.column("inside_fraction"),
               item = t.column("item"), prov = t.column("provenance");
    std::vector<NoveltyReport> out;
    for (const auto& row : t.rows) {
        const VideoId id(cell_string(row[ego]));
        if (out.empty() || out.back().ego != id) {
            out.push_back(NoveltyReport{id});
            out.back().novelty_fraction = cell_double(row[nov]);
            out.back().inside_fraction = cell_double(row[ins]);
        }
        const auto novel = cell_string(row[item]);
        if (!novel.empty()) out.back().provenance.emplace(VideoId(novel), parse_provenance(cell_string(row[prov])));
    }
    return out;
}

inline Table novelty_summary_table(const NoveltyCohortSummary& s) {
    Table t{"novelty", {"statistic", "key", "value"}, {}};
    t.add({std::string("egos"), Cell{}, count_cell(s.egos)});
    t.add({std::string("egos_with_novelty"), Cell{}, count_cell(s.egos_with_novelty)});
    t.add({std::string("mean_novelty_fraction"), Cell{}, s.mean_novelty_fraction});
    t.add({std::string("mean_inside_fraction"), Cell{}, s.mean_inside_fraction});
    for (const auto& [p, v] : s.provenance_mean) t.add({std::string("provenance_mean"), std::string(to_string(p)), v});
    for (const auto& [p, v] : s.provenance_stddev) {
        t.add({std::string("provenance_stddev"), std::string(to_string(p)), v});
    }
    const auto bins = s.novelty_histogram.bins.size();
    for (std::size_t i = 0; i < bins; ++i) {
        const auto label = format_double(static_cast<double>(i) / static_cast<double>(bins));
        t.add({std::string("novelty_histogram"), label, count_cell(s.novelty_histogram.bins[i])});
    }
    for (std::size_t i = 0; i < s.inside_histogram.bins.size(); ++i) {
        const auto label = format_double(static_cast<double>(i) / static_cast<double>(s.inside_histogram.bins.size()));
        t.add({std::string("inside_histogram"), label, count_cell(s.inside_histogram.bins[i])});
    }
    return t;
}

inline Table crawl_summary_table(const CrawlSummary& summary) {
    Table t{"longcrawl", {"seed", "ok", "item_gone", "transport_error", "parse_error", "total"}, {}};
    for (const auto& [seed, c] : summary.per_seed) {
        t.add({seed.str(), c.ok, c.item_gone, c.transport_error, c.parse_error, c.total()});
    }
    return t;
}

inline Table seed_table(std::span<const VideoId> seeds) {
    Table t{"synthgen", {"seed"}, {}};
    for (const auto& s : seeds) t.add({s.str()});
    return t;
}

inline std::vector<VideoId> seeds_from_table(const Table& t) {
    const auto col = t.column("seed");
    std::vector<VideoId> out;
    for (const auto& row : t.rows) out.emplace_back(cell_string(row[col]));
    return out;
}

inline Table violation_table(const std::string& artifact, const ValidationReport& report, Table* append = nullptr) {
    Table t{"validate", {"artifact", "kind", "message"}, {}};
    Table& out = append ? *append : t;
    for (const auto& v : report) out.add({artifact, std::string(to_string(v.kind)), v.message});
    return t;
}

} // namespace recgraph
