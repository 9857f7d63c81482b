#pragma once

#include <array>
#include <cmath>
#include <cstring>
#include <limits>
#include <span>
#include <unordered_map>

#include "recgraph/detail/parallel.hpp"
#include "recgraph/graph_io.hpp"
#include "recgraph/random.hpp"

namespace recgraph {

struct WalkConfig {
    /// Edge traversals per walk; a full walk visits walk_length + 1 nodes.
    std::size_t walk_length = 20;
    std::size_t walks = 100000;
    std::uint64_t rng_seed = 0;

    void validate() const {
        if (walk_length < 1) throw ConfigError("walk_length must be >= 1");
        if (walks < 1) throw ConfigError("walks must be >= 1");
    }
};

enum class Labeling { identity, category, author };

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            carry_ += (sum_ - t) + x;
        } else {
            carry_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const noexcept { return sum_ + carry_; }

private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

/// Compact adjacency view of a recommendation graph for walking. Nodes are
/// indexed in id order; out-neighbours keep (src, dst) edge order.
class WalkGraph {
public:
    explicit WalkGraph(const RecommendationGraph& graph) {
        std::unordered_map<std::string_view, std::uint32_t> index;
        ids_.reserve(graph.nodes.size());
        for (const auto& [id, node] : graph.nodes) {
            index.emplace(id.str(), static_cast<std::uint32_t>(ids_.size()));
            ids_.push_back(id);
        }
        const auto ego = index.find(graph.ego.str());
        if (ego == index.end()) throw AnalysisError("ego " + graph.ego.str() + " is not in the graph");
        ego_ = ego->second;

        offsets_.assign(ids_.size() + 1, 0);
        for (const auto& e : graph.edges) ++offsets_[index.at(e.src.str()) + 1];
        for (std::size_t i = 0; i < ids_.size(); ++i) offsets_[i + 1] += offsets_[i];
        targets_.resize(graph.edges.size());
        std::vector<std::uint32_t> fill(offsets_.begin(), offsets_.end() - 1);
        for (const auto& e : graph.edges) targets_[fill[index.at(e.src.str())]++] = index.at(e.dst.str());

        std::unordered_map<std::string, std::uint32_t> categories, authors;
        category_.reserve(ids_.size());
        author_.reserve(ids_.size());
        for (const auto& [id, node] : graph.nodes) {
            const std::string cat = node.meta ? node.meta->category : std::string(kUnknownCategory);
            const std::string author = node.meta && !node.meta->author.empty() ? node.meta->author
                                                                                : std::string(kUnknownCategory);
            category_.push_back(categories.emplace(cat, static_cast<std::uint32_t>(categories.size())).first->second);
            author_.push_back(authors.emplace(author, static_cast<std::uint32_t>(authors.size())).first->second);
        }
    }

    std::size_t size() const noexcept { return ids_.size(); }
    std::size_t edge_count() const noexcept { return targets_.size(); }
    std::uint32_t ego() const noexcept { return ego_; }
    const VideoId& id(std::uint32_t node) const { return ids_[node]; }

    std::span<const std::uint32_t> out(std::uint32_t node) const noexcept {
        return {targets_.data() + offsets_[node], targets_.data() + offsets_[node + 1]};
    }

    std::uint32_t label(std::uint32_t node, Labeling labeling) const noexcept {
        switch (labeling) {
            case Labeling::category: return category_[node];
            case Labeling::author: return author_[node];
            case Labeling::identity: break;
        }
        return node;
    }

    /// Walk from ego: each step follows a uniformly chosen out-edge; stops
    /// after `walk_length` steps or at the first node without out-edges.
    template <class Rng>
    void walk(Rng& rng, std::size_t walk_length, std::vector<std::uint32_t>& visits) const {
        visits.clear();
        std::uint32_t current = ego_;
        visits.push_back(current);
        for (std::size_t step = 0; step < walk_length; ++step) {
            const auto next = out(current);
            if (next.empty()) break;
            current = next[rng.below(next.size())];
            visits.push_back(current);
        }
    }

private:
    std::vector<VideoId> ids_;
    std::uint32_t ego_ = 0;
    std::vector<std::uint32_t> offsets_;
    std::vector<std::uint32_t> targets_;
    std::vector<std::uint32_t> category_;
    std::vector<std::uint32_t> author_;
};

/// Random-walk stream for walk `walk_index` of a run seeded with `rng_seed`.
inline SplitMix64 walk_stream(std::uint64_t rng_seed, std::uint64_t walk_index) noexcept {
    return SplitMix64(derive_key(rng_seed, {walk_index}));
}

inline std::vector<VideoId> random_walk(const RecommendationGraph& graph, SplitMix64& rng,
                                        std::size_t walk_length = 20) {
    const WalkGraph walker(graph);
    std::vector<std::uint32_t> visits;
    walker.walk(rng, walk_length, visits);
    std::vector<VideoId> out;
    out.reserve(visits.size());
    for (auto v : visits) out.push_back(walker.id(v));
    return out;
}

namespace detail {

/// Entropy of an already sorted label sequence, H = ln n - (1/n) sum c ln c.
template <class Label>
double sorted_entropy(std::span<const Label> sorted) {
    if (sorted.empty()) return 0.0;
    const double n = static_cast<double>(sorted.size());
    double weighted = 0.0;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        const double c = static_cast<double>(j - i);
        weighted += c * std::log(c);
        i = j;
    }
    const double h = std::log(n) - weighted / n;
    return h < 0.0 ? 0.0 : h;
}

} // namespace detail

/// Shannon entropy (nats) of the label frequencies in a visit sequence.
template <class Label>
double label_entropy(std::span<const Label> labels) {
    std::vector<Label> sorted(labels.begin(), labels.end());
    std::sort(sorted.begin(), sorted.end());
    return detail::sorted_entropy<Label>(sorted);
}

/// Entropy of a visit sequence under a labelling of the graph's nodes.
inline double walk_entropy(std::span<const VideoId> sequence, const RecommendationGraph& graph,
                           Labeling labeling = Labeling::identity) {
    if (labeling == Labeling::identity) return label_entropy(sequence);
    std::vector<std::string> labels;
    labels.reserve(sequence.size());
    for (const auto& id : sequence) {
        const auto it = graph.nodes.find(id);
        const auto* meta = it != graph.nodes.end() && it->second.meta ? &*it->second.meta : nullptr;
        if (labeling == Labeling::category) {
            labels.push_back(meta ? meta->category : std::string(kUnknownCategory));
        } else {
            labels.push_back(meta && !meta->author.empty() ? meta->author : std::string(kUnknownCategory));
        }
    }
    return label_entropy<std::string>(labels);
}

struct GraphMetrics {
    VideoId ego;
    double mean_walk_entropy = 0.0;     // identity labels
    double mean_category_entropy = 0.0;
    double mean_author_entropy = 0.0;
    double walk_entropy_stderr = 0.0;   // standard error of mean_walk_entropy
    std::size_t node_count = 0;
    std::size_t edge_count = 0;
    double mean_distinct_visited = 0.0;
    double mean_degree = 0.0;
    // Seed covariates; NaN when the ego has no metadata.
    double views = std::numeric_limits<double>::quiet_NaN();
    double likes = std::numeric_limits<double>::quiet_NaN();
    double dislikes = std::numeric_limits<double>::quiet_NaN();
    double subscribers = std::numeric_limits<double>::quiet_NaN();
    double age = std::numeric_limits<double>::quiet_NaN();
    double contentment = std::numeric_limits<double>::quiet_NaN();

    bool operator==(const GraphMetrics& o) const {
        // Bitwise comparison so that NaN covariates compare equal to themselves.
        auto same = [](double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; };
        return ego == o.ego && same(mean_walk_entropy, o.mean_walk_entropy) &&
               same(mean_category_entropy, o.mean_category_entropy) &&
               same(mean_author_entropy, o.mean_author_entropy) &&
               same(walk_entropy_stderr, o.walk_entropy_stderr) && node_count == o.node_count &&
               edge_count == o.edge_count && same(mean_distinct_visited, o.mean_distinct_visited) &&
               same(mean_degree, o.mean_degree) && same(views, o.views) && same(likes, o.likes) &&
               same(dislikes, o.dislikes) && same(subscribers, o.subscribers) && same(age, o.age) &&
               same(contentment, o.contentment);
    }
};

namespace detail {

inline constexpr std::size_t kWalkBlock = 1024;

struct WalkBlock {
    CompensatedSum eta, eta_sq, eta_c, eta_a, distinct;
};

} // namespace detail

/// Monte Carlo confinement metrics. Walk i draws from its own stream keyed on
/// (rng_seed, i) and partial sums are combined in fixed block order, so the
/// result depends only on the graph and the config, not on `jobs`.
inline GraphMetrics compute_graph_metrics(const RecommendationGraph& graph, const WalkConfig& cfg,
                                          unsigned jobs = 1) {
    cfg.validate();
    if (auto report = validate_graph(graph); !report.empty()) {
        std::string message = "cannot compute metrics on an invalid graph (" + report.front().message + ")";
        throw InvalidGraphError(std::move(message), std::move(report));
    }
    const WalkGraph walker(graph);
    const std::size_t blocks = (cfg.walks + detail::kWalkBlock - 1) / detail::kWalkBlock;
    std::vector<detail::WalkBlock> partial(blocks);

    detail::parallel_for(blocks, jobs, [&](std::size_t b) {
        std::vector<std::uint32_t> visits, labels;
        auto& acc = partial[b];
        const std::size_t end = std::min(cfg.walks, (b + 1) * detail::kWalkBlock);
        for (std::size_t w = b * detail::kWalkBlock; w < end; ++w) {
            auto rng = walk_stream(cfg.rng_seed, w);
            walker.walk(rng, cfg.walk_length, visits);

            labels = visits;
            std::sort(labels.begin(), labels.end());
            const double eta = detail::sorted_entropy<std::uint32_t>(labels);
            const auto distinct = static_cast<double>(std::unique(labels.begin(), labels.end()) - labels.begin());

            labels.resize(visits.size());
            for (std::size_t i = 0; i < visits.size(); ++i) labels[i] = walker.label(visits[i], Labeling::category);
            std::sort(labels.begin(), labels.end());
            const double eta_c = detail::sorted_entropy<std::uint32_t>(labels);
            for (std::size_t i = 0; i < visits.size(); ++i) labels[i] = walker.label(visits[i], Labeling::author);
            std::sort(labels.begin(), labels.end());
            const double eta_a = detail::sorted_entropy<std::uint32_t>(labels);

            acc.eta.add(eta);
            acc.eta_sq.add(eta * eta);
            acc.eta_c.add(eta_c);
            acc.eta_a.add(eta_a);
            acc.distinct.add(distinct);
        }
    });

    detail::WalkBlock total;
    for (const auto& p : partial) {
        total.eta.add(p.eta.value());
        total.eta_sq.add(p.eta_sq.value());
        total.eta_c.add(p.eta_c.value());
        total.eta_a.add(p.eta_a.value());
        total.distinct.add(p.distinct.value());
    }
    const double n = static_cast<double>(cfg.walks);
    GraphMetrics m{graph.ego};
    m.mean_walk_entropy = total.eta.value() / n;
    m.mean_category_entropy = total.eta_c.value() / n;
    m.mean_author_entropy = total.eta_a.value() / n;
    m.mean_distinct_visited = total.distinct.value() / n;
    if (cfg.walks > 1) {
        const double var = std::max(0.0, (total.eta_sq.value() - n * m.mean_walk_entropy * m.mean_walk_entropy) / (n - 1.0));
        m.walk_entropy_stderr = std::sqrt(var / n);
    }
    m.node_count = walker.size();
    m.edge_count = walker.edge_count();
    m.mean_degree = static_cast<double>(walker.edge_count()) / static_cast<double>(walker.size());

    if (const auto& meta = graph.nodes.at(graph.ego).meta) {
        m.views = static_cast<double>(meta->views);
        m.likes = static_cast<double>(meta->likes);
        m.dislikes = static_cast<double>(meta->dislikes);
        m.subscribers = static_cast<double>(meta->subscribers);
        m.age = static_cast<double>(meta->age_seconds);
        m.contentment = compute_contentment(meta->likes, meta->dislikes).value;
    }
    return m;
}

} // namespace recgraph
