#pragma once

#include <map>
#include <set>
#include <span>

#include "recgraph/plateau.hpp"

namespace recgraph {

enum class Provenance { depth1, depth2, depth3, outside };

inline std::string_view to_string(Provenance p) noexcept {
    switch (p) {
        case Provenance::depth1: return "depth1";
        case Provenance::depth2: return "depth2";
        case Provenance::depth3: return "depth3";
        case Provenance::outside: return "outside";
    }
    return "?";
}

inline Provenance parse_provenance(std::string_view text) {
    if (text == "depth1") return Provenance::depth1;
    if (text == "depth2") return Provenance::depth2;
    if (text == "depth3") return Provenance::depth3;
    if (text == "outside") return Provenance::outside;
    throw FormatError("unknown provenance '" + std::string(text) + "'");
}

struct NoveltyConfig {
    /// The late plateau is detected over this many final samples.
    std::size_t tail_window = 20;
    double floor = kDefaultFrequencyFloor;
};

struct NoveltyReport {
    VideoId ego;
    std::set<VideoId> plateau_before;
    std::set<VideoId> plateau_after;
    double novelty_fraction = 0.0;
    std::map<VideoId, Provenance> provenance;
    /// Share of novel items already in the graph (depth 1-3); 0 when nothing is novel.
    double inside_fraction = 0.0;
    /// Metadata for novel items, when known; used by novel-only transition matrices.
    std::map<VideoId, VideoMeta> novel_meta;

    std::size_t novel_count() const noexcept { return provenance.size(); }

    std::size_t count(Provenance p) const {
        return static_cast<std::size_t>(std::count_if(provenance.begin(), provenance.end(),
                                                      [&](const auto& kv) { return kv.second == p; }));
    }

    friend bool operator==(const NoveltyReport&, const NoveltyReport&) = default;
};

/// Compares the ego's plateau at graph-crawl time (its out-neighbours in the
/// stored graph) with the plateau detected over the final `tail_window`
/// samples of a later long crawl, and locates every novel item in the graph.
inline NoveltyReport analyze_novelty(const RecommendationGraph& graph, std::span<const SuggestionSample> late_samples,
                                     const NoveltyConfig& cfg = {}) {
    if (late_samples.empty()) throw InsufficientSamplesError("no late samples for " + graph.ego.str());
    if (late_samples.front().source_id != graph.ego) {
        throw AnalysisError("late samples belong to " + late_samples.front().source_id.str() + ", not ego " +
                            graph.ego.str());
    }
    NoveltyReport report{graph.ego};
    for (const auto& e : graph.edges) {
        if (e.src == graph.ego) report.plateau_before.insert(e.dst);
    }
    const auto after = detect_plateau(build_tail_frequency_table(late_samples, cfg.tail_window), cfg.floor);
    for (const auto& m : after.members) report.plateau_after.insert(m.id);

    std::size_t inside = 0;
    for (const auto& id : report.plateau_after) {
        if (report.plateau_before.contains(id)) continue;
        Provenance where = Provenance::outside;
        if (const auto it = graph.nodes.find(id); it != graph.nodes.end()) {
            switch (it->second.depth) {
                case 1: where = Provenance::depth1; break;
                case 2: where = Provenance::depth2; break;
                case 3: where = Provenance::depth3; break;
                default: where = Provenance::outside; break; // ego suggesting itself is dropped upstream
            }
            if (it->second.meta) report.novel_meta.emplace(id, *it->second.meta);
        }
        if (where != Provenance::outside) ++inside;
        report.provenance.emplace(id, where);
    }
    const auto novel = report.provenance.size();
    report.novelty_fraction = static_cast<double>(novel) / static_cast<double>(report.plateau_after.size());
    report.inside_fraction = novel == 0 ? 0.0 : static_cast<double>(inside) / static_cast<double>(novel);
    return report;
}

struct Histogram {
    /// bins[i] counts values in [i/b, (i+1)/b); 1.0 falls in the last bin.
    std::vector<std::size_t> bins;
};

inline Histogram unit_histogram(std::span<const double> values, std::size_t bin_count) {
    Histogram h{std::vector<std::size_t>(bin_count, 0)};
    for (double v : values) {
        auto i = static_cast<std::size_t>(std::clamp(v, 0.0, 1.0) * static_cast<double>(bin_count));
        ++h.bins[std::min(i, bin_count - 1)];
    }
    return h;
}

struct NoveltyCohortSummary {
    std::size_t egos = 0;
    std::size_t egos_with_novelty = 0;
    double mean_novelty_fraction = 0.0;
    /// Averaged over egos that have at least one novel item.
    double mean_inside_fraction = 0.0;
    Histogram novelty_histogram;
    Histogram inside_histogram;
    /// Per-ego share of novel items by provenance, averaged over egos with novelty.
    std::map<Provenance, double> provenance_mean;
    std::map<Provenance, double> provenance_stddev;
};

inline NoveltyCohortSummary summarize_novelty(std::span<const NoveltyReport> reports, std::size_t bins = 10) {
    NoveltyCohortSummary s;
    s.egos = reports.size();
    std::vector<double> novelty, inside;
    std::map<Provenance, std::vector<double>> shares;
    for (const auto& r : reports) {
        novelty.push_back(r.novelty_fraction);
        if (r.novel_count() == 0) continue;
        inside.push_back(r.inside_fraction);
        for (auto p : {Provenance::depth1, Provenance::depth2, Provenance::depth3, Provenance::outside}) {
            shares[p].push_back(static_cast<double>(r.count(p)) / static_cast<double>(r.novel_count()));
        }
    }
    s.egos_with_novelty = inside.size();
    auto mean = [](const std::vector<double>& v) {
        if (v.empty()) return 0.0;
        double sum = 0.0;
        for (double x : v) sum += x;
        return sum / static_cast<double>(v.size());
    };
    s.mean_novelty_fraction = mean(novelty);
    s.mean_inside_fraction = mean(inside);
    s.novelty_histogram = unit_histogram(novelty, bins);
    s.inside_histogram = unit_histogram(inside, bins);
    for (const auto& [p, v] : shares) {
        const double m = mean(v);
        double ss = 0.0;
        for (double x : v) ss += (x - m) * (x - m);
        s.provenance_mean[p] = m;
        s.provenance_stddev[p] = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
    }
    return s;
}

} // namespace recgraph
