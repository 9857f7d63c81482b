#pragma once

#include <deque>
#include <initializer_list>
#include <utility>

#include "recgraph/recgraph.hpp"

namespace testing_helpers {

using namespace recgraph;

inline VideoId vid(const std::string& s) { return VideoId(s); }

inline std::vector<VideoId> ids(std::initializer_list<const char*> list) {
    std::vector<VideoId> out;
    for (const char* s : list) out.emplace_back(s);
    return out;
}

inline std::vector<VideoId> ids(const std::vector<std::string>& list) {
    return {list.begin(), list.end()};
}

inline VideoMeta meta(const std::string& id, std::string category, std::uint64_t views = 1000,
                      std::uint64_t likes = 10, std::uint64_t dislikes = 1, std::string author = "a") {
    VideoMeta m{VideoId(id)};
    m.category = std::move(category);
    m.views = views;
    m.likes = likes;
    m.dislikes = dislikes;
    m.author = std::move(author);
    return m;
}

/// Builds a graph from an edge list, labelling depths by BFS from the ego.
/// Nodes at max_depth become frontier sinks; others are expanded.
inline RecommendationGraph make_graph(const std::string& ego, std::vector<std::pair<std::string, std::string>> edges,
                                      int max_depth = kDefaultMaxDepth) {
    RecommendationGraph g{VideoId(ego)};
    g.max_depth = max_depth;
    std::map<std::string, std::vector<std::string>> adj;
    for (const auto& [a, b] : edges) adj[a].push_back(b);
    std::map<std::string, int> depth{{ego, 0}};
    std::deque<std::string> queue{ego};
    while (!queue.empty()) {
        auto cur = queue.front();
        queue.pop_front();
        for (const auto& n : adj[cur]) {
            if (depth.emplace(n, depth[cur] + 1).second) queue.push_back(n);
        }
    }
    for (const auto& [id, d] : depth) {
        g.nodes.emplace(VideoId(id), GraphNode{d, d >= max_depth ? NodeStatus::frontier : NodeStatus::expanded,
                                               std::nullopt});
    }
    for (const auto& [a, b] : edges) g.edges.insert(Edge{VideoId(a), VideoId(b)});
    return g;
}

inline SuggestionSample ok_sample(const std::string& source, RequestIndex index, std::vector<VideoId> suggestions) {
    return SuggestionSample{VideoId(source), index, default_simulation_origin(), std::move(suggestions),
                            SampleStatus::ok};
}

/// Deterministic scripted provider: responses come from a callback.
class ScriptedProvider : public Provider {
public:
    using Fn = std::function<SuggestionSample(const VideoId&, RequestIndex)>;
    explicit ScriptedProvider(Fn fn) : fn_(std::move(fn)) {}

    SuggestionSample fetch_suggestions(const VideoId& id, RequestIndex index) override {
        ++calls;
        return fn_(id, index);
    }
    std::optional<VideoMeta> fetch_meta(const VideoId& id) override {
        VideoMeta m{id};
        m.category = "Music";
        return m;
    }

    std::atomic<int> calls{0};

private:
    Fn fn_;
};

} // namespace testing_helpers
