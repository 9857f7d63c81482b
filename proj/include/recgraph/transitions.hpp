#pragma once

#include <array>
#include <functional>
#include <span>
#include <unordered_map>
#include <unordered_set>

#include "recgraph/evolution.hpp"

namespace recgraph {

enum class BinKind { category, contentment, views };

inline std::string_view to_string(BinKind kind) noexcept {
    switch (kind) {
        case BinKind::category: return "category";
        case BinKind::contentment: return "contentment";
        case BinKind::views: return "views";
    }
    return "?";
}

inline constexpr std::string_view kOtherBin = "[Other]";

/// The six most frequent categories of the reference corpus, in YouTube's spelling.
inline const std::vector<std::string>& default_top_categories() {
    static const std::vector<std::string> top{"News & Politics", "Entertainment",        "Music",
                                              "People & Blogs",  "Science & Technology", "Howto & Style"};
    return top;
}

using ViewBoundaries = std::array<std::uint64_t, 3>;
inline constexpr ViewBoundaries kDefaultViewBoundaries{143000, 960000, 5310000};

inline std::string assign_category_bin(const VideoMeta& meta,
                                       std::span<const std::string> top = default_top_categories()) {
    for (const auto& c : top) {
        if (c == meta.category) return c;
    }
    return std::string(kOtherBin);
}

/// negative | "0".."4" for [i, i+1) | [Other] for c >= 5.
inline std::string assign_contentment_bin(ContentmentIndex c) {
    if (c.value < 0.0) return "negative";
    if (c.value >= 5.0) return std::string(kOtherBin);
    return std::to_string(static_cast<int>(std::floor(c.value)));
}

/// Q1 .. Q4; a value equal to a boundary belongs to the lower bin.
inline std::string assign_view_quartile(std::uint64_t views, const ViewBoundaries& b = kDefaultViewBoundaries) {
    if (views <= b[0]) return "Q1";
    if (views <= b[1]) return "Q2";
    if (views <= b[2]) return "Q3";
    return "Q4";
}

/// Quartile boundaries of a view distribution (linear interpolation between
/// order statistics, rounded to the nearest integer).
inline ViewBoundaries view_quartile_boundaries(std::vector<std::uint64_t> views) {
    if (views.empty()) throw AnalysisError("cannot derive quartiles from no views");
    std::sort(views.begin(), views.end());
    ViewBoundaries out{};
    const double last = static_cast<double>(views.size() - 1);
    for (std::size_t q = 0; q < 3; ++q) {
        const double pos = last * static_cast<double>(q + 1) / 4.0;
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = std::min(lo + 1, views.size() - 1);
        const double frac = pos - static_cast<double>(lo);
        out[q] = static_cast<std::uint64_t>(std::llround(static_cast<double>(views[lo]) * (1.0 - frac) +
                                                         static_cast<double>(views[hi]) * frac));
    }
    return out;
}

struct BinScheme {
    BinKind kind;
    std::vector<std::string> labels;
    std::function<std::string(const VideoMeta&)> assign;

    std::size_t index_of(const std::string& label) const {
        const auto it = std::find(labels.begin(), labels.end(), label);
        if (it == labels.end()) throw AnalysisError("bin label '" + label + "' is not in the scheme");
        return static_cast<std::size_t>(it - labels.begin());
    }
};

inline BinScheme category_scheme(std::vector<std::string> top = default_top_categories()) {
    BinScheme s{BinKind::category, top, {}};
    s.labels.emplace_back(kOtherBin);
    s.assign = [top = std::move(top)](const VideoMeta& m) { return assign_category_bin(m, top); };
    return s;
}

inline BinScheme contentment_scheme() {
    return {BinKind::contentment,
            {"negative", "0", "1", "2", "3", "4", std::string(kOtherBin)},
            [](const VideoMeta& m) { return assign_contentment_bin(compute_contentment(m.likes, m.dislikes)); }};
}

inline BinScheme view_scheme(ViewBoundaries boundaries = kDefaultViewBoundaries) {
    return {BinKind::views,
            {"Q1", "Q2", "Q3", "Q4"},
            [boundaries](const VideoMeta& m) { return assign_view_quartile(m.views, boundaries); }};
}

struct TransitionMatrix {
    BinKind kind;
    std::vector<std::string> labels;
    std::vector<std::vector<std::uint64_t>> counts;
    /// Row-normalized counts; all-zero rows stay zero and are flagged in empty_rows.
    std::vector<std::vector<double>> probabilities;
    std::vector<bool> empty_rows;
    std::size_t source_nodes = 0;
    /// Edges skipped because an endpoint has no metadata.
    std::size_t excluded_edges = 0;
};

struct TransitionFilter {
    enum class Mode { all, novel_only } mode = Mode::all;
    std::span<const NoveltyReport> novelty;

    static TransitionFilter all() { return {}; }
    static TransitionFilter novel_only(std::span<const NoveltyReport> reports) {
        return {Mode::novel_only, reports};
    }
};

/// Aggregates directed plateau edges (u -> v) into counts over (bin(u), bin(v)).
/// Each source node contributes its out-edges once, from the first input graph
/// in which it was expanded. In novel-only mode the edges are (ego -> novel item)
/// from the novelty reports instead.
inline TransitionMatrix build_transition_matrix(std::span<const RecommendationGraph> graphs, const BinScheme& scheme,
                                                const TransitionFilter& filter = TransitionFilter::all()) {
    const std::size_t k = scheme.labels.size();
    TransitionMatrix m{scheme.kind, scheme.labels,
                       std::vector<std::vector<std::uint64_t>>(k, std::vector<std::uint64_t>(k, 0)),
                       std::vector<std::vector<double>>(k, std::vector<double>(k, 0.0)),
                       std::vector<bool>(k, true), 0, 0};

    std::unordered_map<std::string_view, const VideoMeta*> meta;
    for (const auto& g : graphs) {
        for (const auto& [id, node] : g.nodes) {
            if (node.meta) meta.emplace(id.str(), &*node.meta);
        }
    }
    auto lookup = [&](const VideoId& id) -> const VideoMeta* {
        const auto it = meta.find(id.str());
        return it == meta.end() ? nullptr : it->second;
    };
    auto count_edge = [&](const VideoMeta* src, const VideoMeta* dst) {
        if (!src || !dst) {
            ++m.excluded_edges;
            return;
        }
        ++m.counts[scheme.index_of(scheme.assign(*src))][scheme.index_of(scheme.assign(*dst))];
    };

    std::unordered_set<std::string_view> seen_sources;
    if (filter.mode == TransitionFilter::Mode::all) {
        for (const auto& g : graphs) {
            // Edges are ordered by source, so each source's out-edges form one run.
            const VideoId* current = nullptr;
            bool active = false;
            for (const auto& e : g.edges) {
                if (!current || e.src != *current) {
                    current = &e.src;
                    active = seen_sources.insert(current->str()).second;
                    if (active) ++m.source_nodes;
                }
                if (active) count_edge(lookup(e.src), lookup(e.dst));
            }
        }
    } else {
        for (const auto& report : filter.novelty) {
            if (!seen_sources.insert(report.ego.str()).second) continue;
            ++m.source_nodes;
            const VideoMeta* src = lookup(report.ego);
            for (const auto& [id, _] : report.provenance) {
                const VideoMeta* dst = lookup(id);
                if (!dst) {
                    const auto it = report.novel_meta.find(id);
                    if (it != report.novel_meta.end()) dst = &it->second;
                }
                count_edge(src, dst);
            }
        }
    }

    for (std::size_t i = 0; i < k; ++i) {
        std::uint64_t row = 0;
        for (auto c : m.counts[i]) row += c;
        m.empty_rows[i] = row == 0;
        if (row == 0) continue;
        for (std::size_t j = 0; j < k; ++j) {
            m.probabilities[i][j] = static_cast<double>(m.counts[i][j]) / static_cast<double>(row);
        }
    }
    return m;
}

} // namespace recgraph
