#pragma once

#include "recgraph/detail/parallel.hpp"
#include "recgraph/plateau.hpp"
#include "recgraph/source.hpp"

namespace recgraph {

struct GraphCrawlConfig {
    std::size_t probe_requests = 20;
    int max_depth = kDefaultMaxDepth;
    double floor = kDefaultFrequencyFloor;
    /// Request index of each node's first probe.
    RequestIndex first_request_index = 0;
    /// Spacing between successive probes of one node.
    Millis probe_interval{1000};
    unsigned jobs = 1;

    void validate() const {
        if (probe_requests < 1) throw ConfigError("probe_requests must be >= 1");
        if (max_depth < 0) throw ConfigError("max_depth must be >= 0");
        if (!(floor >= 0.0 && floor <= 1.0)) throw ConfigError("floor must lie in [0, 1]");
        if (probe_interval < Millis::zero()) throw ConfigError("probe_interval must be >= 0");
    }
};

class EgoUnreachableError : public ProviderError {
public:
    explicit EgoUnreachableError(const VideoId& ego)
        : ProviderError("ego " + ego.str() + " is unreachable: every probe failed") {}
};

struct ProbeResult {
    NodeStatus status = NodeStatus::frontier;
    std::vector<VideoId> plateau;
    std::optional<VideoMeta> meta;
};

/// Probes one node `probe_requests` times and detects its plateau.
inline ProbeResult probe_node(const VideoId& id, Provider& provider, const GraphCrawlConfig& cfg,
                              const Clock& clock, Timestamp start) {
    ProbeResult result;
    std::vector<SuggestionSample> samples;
    samples.reserve(cfg.probe_requests);
    for (std::size_t k = 0; k < cfg.probe_requests; ++k) {
        const Timestamp stamp = clock.wait_until(start + cfg.probe_interval * static_cast<std::int64_t>(k));
        auto sample = provider.fetch_suggestions(id, cfg.first_request_index + static_cast<RequestIndex>(k));
        sample.timestamp = stamp;
        samples.push_back(std::move(sample));
    }
    result.meta = provider.fetch_meta(id);
    try {
        result.plateau = detect_plateau(build_frequency_table(samples, cfg.probe_requests), cfg.floor).member_ids();
        result.status = NodeStatus::expanded;
    } catch (const EmptyWindowError&) {
        result.status = NodeStatus::unresolved;
        spdlog::warn("{}: every probe failed; keeping node unresolved", id.str());
    } catch (const TooFewEntriesError& e) {
        result.status = NodeStatus::no_plateau;
        spdlog::warn("{}: no plateau ({}); keeping node as a sink", id.str(), e.what());
    }
    return result;
}

/// Builds the ego-rooted recommendation graph breadth-first. Every node above
/// the depth horizon is probed and linked to each member of its plateau; a
/// member seen for the first time takes depth parent + 1, an already known one
/// only gains the edge. Nodes of one layer are probed concurrently and merged
/// in id order, so the result does not depend on scheduling.
inline RecommendationGraph crawl_recommendation_graph(const VideoId& ego, Provider& provider,
                                                      const GraphCrawlConfig& cfg, const Clock& clock) {
    cfg.validate();
    RecommendationGraph graph{ego};
    graph.max_depth = cfg.max_depth;
    graph.crawl_started = clock.now();
    graph.nodes.emplace(ego, GraphNode{0, NodeStatus::frontier, std::nullopt});

    Timestamp layer_start = graph.crawl_started;
    std::vector<VideoId> layer{ego};
    for (int depth = 0; !layer.empty(); ++depth) {
        std::sort(layer.begin(), layer.end());
        std::vector<ProbeResult> results(layer.size());
        const bool expand = depth < cfg.max_depth;
        detail::parallel_for(layer.size(), cfg.jobs, [&](std::size_t i) {
            if (expand) {
                results[i] = probe_node(layer[i], provider, cfg, clock, layer_start);
            } else {
                results[i].meta = provider.fetch_meta(layer[i]);
            }
        });
        if (expand) layer_start += cfg.probe_interval * static_cast<std::int64_t>(cfg.probe_requests);

        if (depth == 0 && results[0].status == NodeStatus::unresolved) throw EgoUnreachableError(ego);

        std::vector<VideoId> next;
        for (std::size_t i = 0; i < layer.size(); ++i) {
            auto& node = graph.nodes.at(layer[i]);
            node.status = results[i].status;
            node.meta = std::move(results[i].meta);
            for (const auto& member : results[i].plateau) {
                if (member == layer[i]) continue;
                if (graph.nodes.emplace(member, GraphNode{depth + 1, NodeStatus::frontier, std::nullopt}).second) {
                    next.push_back(member);
                }
                graph.edges.insert(Edge{layer[i], member});
            }
        }
        layer = std::move(next);
    }
    graph.crawl_finished = clock.simulated() ? layer_start : clock.now();
    return graph;
}

} // namespace recgraph
