#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "recgraph/core.hpp"

namespace recgraph {

inline constexpr std::string_view kGraphFormat = "recgraph-graph";
inline constexpr int kGraphFormatVersion = 1;

class InvalidGraphError : public AnalysisError {
public:
    InvalidGraphError(const std::string& what, ValidationReport report)
        : AnalysisError(what), report_(std::move(report)) {}
    const ValidationReport& report() const noexcept { return report_; }

private:
    ValidationReport report_;
};

namespace detail {

inline std::string escape_field(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (const char c : text) {
        switch (c) {
            case '\\': out += "\\\\"; break;
            case '\t': out += "\\t"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            default: out += c;
        }
    }
    return out;
}

inline std::string unescape_field(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '\\') {
            out += text[i];
            continue;
        }
        if (++i == text.size()) throw FormatError("dangling escape in graph file");
        switch (text[i]) {
            case '\\': out += '\\'; break;
            case 't': out += '\t'; break;
            case 'n': out += '\n'; break;
            case 'r': out += '\r'; break;
            default: throw FormatError("unknown escape in graph file");
        }
    }
    return out;
}

inline std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto tab = line.find('\t', start);
        out.push_back(line.substr(start, tab - start));
        if (tab == std::string_view::npos) break;
        start = tab + 1;
    }
    return out;
}

template <class Int>
Int parse_int(std::string_view text, const char* what) {
    Int value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw FormatError(std::string("graph file: bad ") + what + " '" + std::string(text) + "'");
    }
    return value;
}

} // namespace detail

/// Writes the canonical text form: nodes ordered by (depth, id), edges by
/// (src, dst). Equal graphs produce byte-identical files. Refuses graphs with
/// validation violations.
inline void export_graph(const RecommendationGraph& graph, std::ostream& out) {
    if (auto report = validate_graph(graph); !report.empty()) {
        std::string message = "refusing to export invalid graph (" + report.front().message + ")";
        throw InvalidGraphError(std::move(message), std::move(report));
    }
    using detail::escape_field;
    out << kGraphFormat << '\t' << kGraphFormatVersion << '\n';
    out << "ego\t" << escape_field(graph.ego.str()) << '\n';
    out << "max_depth\t" << graph.max_depth << '\n';
    out << "crawl_started\t" << format_timestamp(graph.crawl_started) << '\n';
    out << "crawl_finished\t" << format_timestamp(graph.crawl_finished) << '\n';

    std::vector<const std::pair<const VideoId, GraphNode>*> ordered;
    for (const auto& entry : graph.nodes) ordered.push_back(&entry);
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const auto* a, const auto* b) { return a->second.depth < b->second.depth; });

    out << "nodes\t" << ordered.size() << '\n';
    for (const auto* entry : ordered) {
        const auto& [id, node] = *entry;
        out << escape_field(id.str()) << '\t' << node.depth << '\t' << to_string(node.status);
        if (node.meta) {
            const auto& m = *node.meta;
            out << "\t1\t" << m.views << '\t' << m.likes << '\t' << m.dislikes << '\t' << m.subscribers
                << '\t' << m.age_seconds << '\t' << escape_field(m.category) << '\t'
                << escape_field(m.author) << '\t' << format_timestamp(m.fetched_at);
        } else {
            out << "\t0";
        }
        out << '\n';
    }
    out << "edges\t" << graph.edges.size() << '\n';
    for (const auto& e : graph.edges) {
        out << escape_field(e.src.str()) << '\t' << escape_field(e.dst.str()) << '\n';
    }
    if (!out) throw IoError("graph write failed");
}

inline RecommendationGraph import_graph(std::istream& in) {
    using namespace detail;
    std::string line;
    std::size_t line_no = 0;
    auto next_line = [&]() -> std::string_view {
        if (!std::getline(in, line)) {
            throw FormatError("graph file truncated after line " + std::to_string(line_no));
        }
        ++line_no;
        return line;
    };
    auto keyed = [&](std::string_view key) {
        const auto fields = split_tabs(next_line());
        if (fields.size() != 2 || fields[0] != key) {
            throw FormatError("graph file line " + std::to_string(line_no) + ": expected '" +
                              std::string(key) + "'");
        }
        return std::string(fields[1]);
    };

    const auto header = split_tabs(next_line());
    if (header.size() != 2 || header[0] != kGraphFormat) throw FormatError("not a recgraph graph file");
    if (parse_int<int>(header[1], "version") != kGraphFormatVersion) {
        throw FormatError("unsupported graph format version");
    }
    RecommendationGraph graph{VideoId(unescape_field(keyed("ego")))};
    graph.max_depth = parse_int<int>(keyed("max_depth"), "max_depth");
    graph.crawl_started = parse_timestamp(keyed("crawl_started"));
    graph.crawl_finished = parse_timestamp(keyed("crawl_finished"));

    const auto node_count = parse_int<std::size_t>(keyed("nodes"), "node count");
    for (std::size_t i = 0; i < node_count; ++i) {
        const auto f = split_tabs(next_line());
        if (f.size() != 4 && f.size() != 12) {
            throw FormatError("graph file line " + std::to_string(line_no) + ": bad node row");
        }
        VideoId id(unescape_field(f[0]));
        GraphNode node;
        node.depth = parse_int<int>(f[1], "depth");
        node.status = parse_node_status(f[2]);
        const int has_meta = parse_int<int>(f[3], "meta flag");
        if ((has_meta == 1) != (f.size() == 12) || has_meta > 1) {
            throw FormatError("graph file line " + std::to_string(line_no) + ": meta flag mismatch");
        }
        if (has_meta == 1) {
            VideoMeta m{id};
            m.views = parse_int<std::uint64_t>(f[4], "views");
            m.likes = parse_int<std::uint64_t>(f[5], "likes");
            m.dislikes = parse_int<std::uint64_t>(f[6], "dislikes");
            m.subscribers = parse_int<std::uint64_t>(f[7], "subscribers");
            m.age_seconds = parse_int<std::uint64_t>(f[8], "age");
            m.category = unescape_field(f[9]);
            m.author = unescape_field(f[10]);
            m.fetched_at = parse_timestamp(f[11]);
            node.meta = std::move(m);
        }
        if (!graph.nodes.emplace(std::move(id), std::move(node)).second) {
            throw FormatError("graph file line " + std::to_string(line_no) + ": duplicate node");
        }
    }
    const auto edge_count = parse_int<std::size_t>(keyed("edges"), "edge count");
    for (std::size_t i = 0; i < edge_count; ++i) {
        const auto f = split_tabs(next_line());
        if (f.size() != 2) throw FormatError("graph file line " + std::to_string(line_no) + ": bad edge row");
        if (!graph.edges.insert(Edge{VideoId(unescape_field(f[0])), VideoId(unescape_field(f[1]))}).second) {
            throw FormatError("graph file line " + std::to_string(line_no) + ": duplicate edge");
        }
    }
    if (std::getline(in, line) && !line.empty()) throw FormatError("graph file has trailing content");
    return graph;
}

inline void export_graph(const RecommendationGraph& graph, const std::filesystem::path& path) {
    std::ostringstream buffer;
    export_graph(graph, buffer);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << buffer.str();
    if (!out) throw IoError("write failed: " + path.string());
}

inline RecommendationGraph import_graph(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open graph file " + path.string());
    return import_graph(in);
}

} // namespace recgraph
