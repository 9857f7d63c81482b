#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <spdlog/spdlog.h>

#include "recgraph/error.hpp"
#include "recgraph/time.hpp"

namespace recgraph {

/// Opaque, non-empty item identifier. Equality is exact string equality.
class VideoId {
public:
    explicit VideoId(std::string value) : value_(std::move(value)) {
        if (value_.empty()) throw FormatError("VideoId must be non-empty");
    }
    explicit VideoId(const char* value) : VideoId(std::string(value)) {}

    const std::string& str() const noexcept { return value_; }

    friend bool operator==(const VideoId&, const VideoId&) = default;
    friend std::strong_ordering operator<=>(const VideoId& a, const VideoId& b) noexcept {
        return a.value_.compare(b.value_) <=> 0;
    }

private:
    std::string value_;
};

using RequestIndex = std::int64_t;

/// Largest suggestion list a single response may carry.
inline constexpr std::size_t kMaxSuggestions = 20;
inline constexpr std::string_view kUnknownCategory = "[Unknown]";

struct VideoMeta {
    VideoId id;
    std::uint64_t views = 0;
    std::uint64_t likes = 0;
    std::uint64_t dislikes = 0;
    std::uint64_t subscribers = 0;
    std::uint64_t age_seconds = 0;
    std::string category{kUnknownCategory};
    std::string author;
    Timestamp fetched_at{};

    friend bool operator==(const VideoMeta&, const VideoMeta&) = default;
};

enum class SampleStatus { ok, item_gone, transport_error, parse_error };

inline std::string_view to_string(SampleStatus status) noexcept {
    switch (status) {
        case SampleStatus::ok: return "ok";
        case SampleStatus::item_gone: return "item_gone";
        case SampleStatus::transport_error: return "transport_error";
        case SampleStatus::parse_error: return "parse_error";
    }
    return "?";
}

inline SampleStatus parse_sample_status(std::string_view text) {
    if (text == "ok") return SampleStatus::ok;
    if (text == "item_gone") return SampleStatus::item_gone;
    if (text == "transport_error") return SampleStatus::transport_error;
    if (text == "parse_error") return SampleStatus::parse_error;
    throw FormatError("unknown sample status '" + std::string(text) + "'");
}

/// One request's ordered suggestion list for one item.
struct SuggestionSample {
    VideoId source_id;
    RequestIndex request_index = 0;
    Timestamp timestamp{};
    std::vector<VideoId> suggestions;
    SampleStatus status = SampleStatus::ok;

    bool ok() const noexcept { return status == SampleStatus::ok; }

    static SuggestionSample failed(VideoId source, RequestIndex index, Timestamp ts, SampleStatus status) {
        return SuggestionSample{std::move(source), index, ts, {}, status};
    }

    friend bool operator==(const SuggestionSample&, const SuggestionSample&) = default;
};

struct SanitizeStats {
    std::size_t duplicates = 0;
    std::size_t self_references = 0;
    std::size_t overflow = 0;
};

/// Enforces the sample invariants on a raw provider list: keeps the first
/// position of duplicated ids, drops the source itself and truncates to
/// kMaxSuggestions. Each correction is logged.
inline std::vector<VideoId> sanitize_suggestions(const VideoId& source, std::vector<VideoId> raw,
                                                 SanitizeStats* stats = nullptr) {
    SanitizeStats local;
    std::vector<VideoId> out;
    out.reserve(std::min(raw.size(), kMaxSuggestions));
    std::unordered_set<std::string_view> seen;
    for (auto& id : raw) {
        if (id == source) {
            ++local.self_references;
            continue;
        }
        if (!seen.insert(id.str()).second) {
            ++local.duplicates;
            continue;
        }
        if (out.size() == kMaxSuggestions) {
            ++local.overflow;
            continue;
        }
        out.push_back(id);
    }
    if (local.self_references > 0) {
        spdlog::warn("{}: dropped self-suggestion", source.str());
    }
    if (local.duplicates > 0) {
        spdlog::warn("{}: dropped {} duplicate suggestion(s)", source.str(), local.duplicates);
    }
    if (local.overflow > 0) {
        spdlog::warn("{}: truncated {} suggestion(s) beyond {}", source.str(), local.overflow,
                     kMaxSuggestions);
    }
    if (stats) {
        stats->duplicates += local.duplicates;
        stats->self_references += local.self_references;
        stats->overflow += local.overflow;
    }
    return out;
}

struct FrequencyEntry {
    VideoId id;
    double frequency = 0.0;

    friend bool operator==(const FrequencyEntry&, const FrequencyEntry&) = default;
};

/// Descending frequency, then ascending id.
inline bool frequency_order(const FrequencyEntry& a, const FrequencyEntry& b) noexcept {
    if (a.frequency != b.frequency) return a.frequency > b.frequency;
    return a.id < b.id;
}

inline void sort_frequency_entries(std::vector<FrequencyEntry>& entries) {
    std::sort(entries.begin(), entries.end(), frequency_order);
}

struct FrequencyTable {
    VideoId source_id;
    /// Number of ok samples aggregated.
    std::size_t window = 0;
    std::vector<FrequencyEntry> entries;

    friend bool operator==(const FrequencyTable&, const FrequencyTable&) = default;
};

struct Plateau {
    VideoId source_id;
    std::vector<FrequencyEntry> members;
    std::size_t changepoint_rank = 0;
    std::size_t window = 0;

    std::vector<VideoId> member_ids() const {
        std::vector<VideoId> ids;
        ids.reserve(members.size());
        for (const auto& m : members) ids.push_back(m.id);
        return ids;
    }

    friend bool operator==(const Plateau&, const Plateau&) = default;
};

/// How a node came to be in a crawled graph.
enum class NodeStatus {
    expanded,   // probed, plateau detected, out-edges recorded
    frontier,   // at the depth horizon, never probed
    unresolved, // every probe failed
    no_plateau, // probed but plateau detection failed
};

inline std::string_view to_string(NodeStatus status) noexcept {
    switch (status) {
        case NodeStatus::expanded: return "expanded";
        case NodeStatus::frontier: return "frontier";
        case NodeStatus::unresolved: return "unresolved";
        case NodeStatus::no_plateau: return "no_plateau";
    }
    return "?";
}

inline NodeStatus parse_node_status(std::string_view text) {
    if (text == "expanded") return NodeStatus::expanded;
    if (text == "frontier") return NodeStatus::frontier;
    if (text == "unresolved") return NodeStatus::unresolved;
    if (text == "no_plateau") return NodeStatus::no_plateau;
    throw FormatError("unknown node status '" + std::string(text) + "'");
}

struct GraphNode {
    int depth = 0;
    NodeStatus status = NodeStatus::expanded;
    std::optional<VideoMeta> meta;

    friend bool operator==(const GraphNode&, const GraphNode&) = default;
};

struct Edge {
    VideoId src;
    VideoId dst;

    friend bool operator==(const Edge&, const Edge&) = default;
    friend std::strong_ordering operator<=>(const Edge&, const Edge&) = default;
};

inline constexpr int kDefaultMaxDepth = 3;

/// Ego-rooted directed recommendation graph. Edges are kept in (src, dst)
/// order, so the edge set is duplicate-free by construction.
struct RecommendationGraph {
    VideoId ego;
    int max_depth = kDefaultMaxDepth;
    std::map<VideoId, GraphNode> nodes;
    std::set<Edge> edges;
    Timestamp crawl_started{};
    Timestamp crawl_finished{};

    explicit RecommendationGraph(VideoId ego_id) : ego(std::move(ego_id)) {}

    std::size_t out_degree(const VideoId& id) const {
        return static_cast<std::size_t>(
            std::count_if(edges.begin(), edges.end(), [&](const Edge& e) { return e.src == id; }));
    }

    friend bool operator==(const RecommendationGraph&, const RecommendationGraph&) = default;
};

struct ContentmentIndex {
    double value = 0.0;
    friend bool operator==(const ContentmentIndex&, const ContentmentIndex&) = default;
};

/// c = ln((likes + 1) / (dislikes + 1)), evaluated as a difference of log1p
/// terms so that swapping the arguments negates the result exactly.
inline ContentmentIndex compute_contentment(std::uint64_t likes, std::uint64_t dislikes) noexcept {
    return {std::log1p(static_cast<double>(likes)) - std::log1p(static_cast<double>(dislikes))};
}

enum class ViolationKind {
    missing_ego,
    ego_depth,
    depth_out_of_range,
    dangling_edge,
    self_edge,
    sink_has_out_edge,
    depth_mismatch,
    unreachable,
};

inline std::string_view to_string(ViolationKind kind) noexcept {
    switch (kind) {
        case ViolationKind::missing_ego: return "missing_ego";
        case ViolationKind::ego_depth: return "ego_depth";
        case ViolationKind::depth_out_of_range: return "depth_out_of_range";
        case ViolationKind::dangling_edge: return "dangling_edge";
        case ViolationKind::self_edge: return "self_edge";
        case ViolationKind::sink_has_out_edge: return "sink_has_out_edge";
        case ViolationKind::depth_mismatch: return "depth_mismatch";
        case ViolationKind::unreachable: return "unreachable";
    }
    return "?";
}

struct Violation {
    ViolationKind kind;
    std::string message;
    std::optional<VideoId> node;
    std::optional<Edge> edge;
};

using ValidationReport = std::vector<Violation>;

/// Checks every structural invariant of a recommendation graph. Malformed
/// graphs produce a non-empty report; this never throws.
inline ValidationReport validate_graph(const RecommendationGraph& graph) {
    ValidationReport report;
    const auto ego_it = graph.nodes.find(graph.ego);
    if (ego_it == graph.nodes.end()) {
        report.push_back({ViolationKind::missing_ego, "ego " + graph.ego.str() + " is not a node",
                          graph.ego, std::nullopt});
    } else if (ego_it->second.depth != 0) {
        report.push_back({ViolationKind::ego_depth,
                          "ego has depth " + std::to_string(ego_it->second.depth), graph.ego,
                          std::nullopt});
    }

    for (const auto& [id, node] : graph.nodes) {
        if (node.depth < 0 || node.depth > graph.max_depth) {
            report.push_back({ViolationKind::depth_out_of_range,
                              id.str() + " has depth " + std::to_string(node.depth), id,
                              std::nullopt});
        }
    }

    std::map<VideoId, std::vector<VideoId>> adjacency;
    for (const auto& edge : graph.edges) {
        const std::string label = edge.src.str() + " -> " + edge.dst.str();
        if (edge.src == edge.dst) {
            report.push_back({ViolationKind::self_edge, "self edge " + label, std::nullopt, edge});
            continue;
        }
        const auto src = graph.nodes.find(edge.src);
        const auto dst = graph.nodes.find(edge.dst);
        if (src == graph.nodes.end() || dst == graph.nodes.end()) {
            report.push_back({ViolationKind::dangling_edge, "edge " + label + " references a missing node",
                              std::nullopt, edge});
            continue;
        }
        if (src->second.depth >= graph.max_depth) {
            report.push_back({ViolationKind::sink_has_out_edge,
                              "edge " + label + " leaves depth-" + std::to_string(src->second.depth) +
                                  " node",
                              std::nullopt, edge});
        }
        adjacency[edge.src].push_back(edge.dst);
    }

    if (ego_it == graph.nodes.end()) return report;

    // Shortest-path depths from ego over the recorded edges.
    std::map<VideoId, int> distance;
    std::deque<VideoId> queue;
    distance.emplace(graph.ego, 0);
    queue.push_back(graph.ego);
    while (!queue.empty()) {
        const VideoId current = queue.front();
        queue.pop_front();
        const int next = distance.at(current) + 1;
        if (auto adj = adjacency.find(current); adj != adjacency.end()) {
            for (const auto& dst : adj->second) {
                if (distance.emplace(dst, next).second) queue.push_back(dst);
            }
        }
    }
    for (const auto& [id, node] : graph.nodes) {
        const auto found = distance.find(id);
        if (found == distance.end()) {
            report.push_back({ViolationKind::unreachable, id.str() + " is unreachable from ego", id,
                              std::nullopt});
        } else if (found->second != node.depth && id != graph.ego) {
            report.push_back({ViolationKind::depth_mismatch,
                              id.str() + " labelled depth " + std::to_string(node.depth) +
                                  " but lies at distance " + std::to_string(found->second),
                              id, std::nullopt});
        }
    }
    return report;
}

} // namespace recgraph

template <>
struct std::hash<recgraph::VideoId> {
    std::size_t operator()(const recgraph::VideoId& id) const noexcept {
        return std::hash<std::string>{}(id.str());
    }
};
