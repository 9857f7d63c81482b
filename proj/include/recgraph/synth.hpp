#pragma once

#include <cmath>
#include <mutex>
#include <unordered_set>
#include <random>
#include <unordered_map>

#include "recgraph/sample_log.hpp"
#include "recgraph/source.hpp"
#include "recgraph/random.hpp"
#include "recgraph/transitions.hpp"

namespace recgraph {

struct CategorySpec {
    std::string name;
    double weight = 1.0;

    friend bool operator==(const CategorySpec&, const CategorySpec&) = default;
};

inline std::vector<CategorySpec> default_synth_categories() {
    return {{"Music", 0.22},          {"Entertainment", 0.20},        {"News & Politics", 0.18},
            {"People & Blogs", 0.12}, {"Science & Technology", 0.08}, {"Howto & Style", 0.08},
            {"Gaming", 0.05},         {"Sports", 0.04},               {"Education", 0.03}};
}

/// Generative parameters of the synthetic platform. Items live on one ring
/// per category; an item's latent plateau draws same-category members from a
/// window around its ring position (with probability `homophily`) and other
/// members uniformly from other categories. Responses mix a weighted subset
/// of the current plateau with draws from a power-law tail pool, and the
/// plateau slowly renews.
struct SynthConfig {
    enum class Topology { ring, tree };

    std::uint64_t rng_seed = 1;
    Topology topology = Topology::ring;
    std::size_t universe_size = 200000;
    /// Tree topology: the children of item i are items b*i+1 .. b*i+b.
    std::size_t tree_branching = 20;

    double plateau_size_mean = 23.6;
    double plateau_size_std = 5.15;
    int plateau_size_min = 5;
    int plateau_size_max = 40;
    /// Member r of a plateau of size P is drawn with weight exp(-skew * r / P).
    double plateau_weight_skew = 0.5;

    double short_response_probability = 0.2;
    /// Probability that a response slot is filled from the plateau.
    double plateau_hit_rate = 0.8;
    std::size_t tail_pool_size = 2000;
    double tail_exponent = 0.5;

    /// Per-request probability that one plateau member is replaced.
    double renewal_rate = 0.0102;
    /// Share of replacements drawn from the item's 2- and 3-hop latent neighbourhood.
    double renewal_locality = 0.8;
    /// Among local replacements, share drawn from exactly 3 hops away.
    double renewal_depth3_share = 0.3;

    double homophily = 0.9;
    std::size_t locality_window = 100;
    std::size_t author_block = 20;
    std::vector<CategorySpec> categories = default_synth_categories();

    double log_views_mean = 13.2;
    double log_views_std = 2.6;
    double like_rate_log_mean = -4.2;
    double like_rate_log_std = 0.6;
    double contentment_mean = 2.6;
    double contentment_std = 1.1;

    /// Ties an item's locality window inversely to the view level of its ring
    /// region, and its homophily directly: high-view regions get tight, closed
    /// neighbourhoods and thus contracted graphs.
    bool contraction_with_views = false;
    std::size_t region_size = 2000;
    std::size_t min_window = 14;
    std::size_t max_window = 400;
    /// Spread of region view levels, in natural-log units.
    double region_log_views_span = 6.0;
    double region_log_views_noise = 0.5;

    Timestamp epoch = default_simulation_origin();
    Millis request_interval = std::chrono::minutes(10);

    void validate() const {
        auto prob = [](double p, const char* name) {
            if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(std::string("synth ") + name + " must lie in [0, 1]");
        };
        prob(short_response_probability, "short_response_probability");
        prob(plateau_hit_rate, "plateau_hit_rate");
        prob(renewal_rate, "renewal_rate");
        prob(renewal_locality, "renewal_locality");
        prob(renewal_depth3_share, "renewal_depth3_share");
        prob(homophily, "homophily");
        if (universe_size < 2) throw ConfigError("synth universe_size must be >= 2");
        if (plateau_size_min < 1 || plateau_size_min > plateau_size_max) {
            throw ConfigError("synth plateau size bounds are inconsistent");
        }
        if (plateau_size_std < 0.0) throw ConfigError("synth plateau_size_std must be >= 0");
        if (categories.empty()) throw ConfigError("synth needs at least one category");
        for (const auto& c : categories) {
            if (!(c.weight > 0.0)) throw ConfigError("synth category weights must be positive");
        }
        if (topology == Topology::tree) {
            if (tree_branching < 1) throw ConfigError("synth tree_branching must be >= 1");
        }
        if (locality_window < 1 || min_window < 1 || max_window < min_window) {
            throw ConfigError("synth locality windows are inconsistent");
        }
        if (tail_exponent < 0.0) throw ConfigError("synth tail_exponent must be >= 0");
        if (author_block < 1 || region_size < 1) throw ConfigError("synth block sizes must be >= 1");
    }

    /// Defaults, tuned so that pipeline statistics land near the reference
    /// corpus: plateau size, response sizes, rank-frequency head, per-depth
    /// node counts and long-crawl novelty.
    static SynthConfig calibrated() { return SynthConfig{}; }

    /// A static world: every response is exactly the latent plateau.
    static SynthConfig deterministic(std::size_t plateau_size) {
        SynthConfig c;
        c.plateau_size_mean = static_cast<double>(plateau_size);
        c.plateau_size_std = 0.0;
        c.plateau_size_min = 1;
        c.plateau_size_max = static_cast<int>(plateau_size);
        c.short_response_probability = 0.0;
        c.plateau_hit_rate = 1.0;
        c.tail_pool_size = 0;
        c.renewal_rate = 0.0;
        return c;
    }

    /// A non-overlapping tree: every item recommends its b children.
    static SynthConfig tree(std::size_t branching, int depth) {
        SynthConfig c = deterministic(branching);
        c.topology = Topology::tree;
        c.tree_branching = branching;
        std::size_t size = 1, layer = 1;
        for (int d = 0; d < depth; ++d) {
            layer *= branching;
            size += layer;
        }
        c.universe_size = size;
        return c;
    }
};

struct RenewalEvent {
    RequestIndex request_index = 0;
    VideoId removed;
    VideoId added;

    friend bool operator==(const RenewalEvent&, const RenewalEvent&) = default;
};

struct SynthGroundTruth {
    VideoId id;
    RequestIndex at_request = 0;
    std::vector<VideoId> initial_plateau;
    std::vector<VideoId> plateau;
    VideoMeta meta;
    std::string category_bin;
    std::string contentment_bin;
    std::string view_bin;
    std::vector<RenewalEvent> renewals;
};

inline Json to_json(const SynthGroundTruth& t) {
    Json j;
    j["record"] = "ground_truth";
    j["id"] = t.id.str();
    j["at_request"] = t.at_request;
    auto ids = [](const std::vector<VideoId>& v) {
        Json a = Json::array();
        for (const auto& id : v) a.push_back(id.str());
        return a;
    };
    j["initial_plateau"] = ids(t.initial_plateau);
    j["plateau"] = ids(t.plateau);
    j["meta"] = to_json(t.meta);
    j["bins"] = {{"category", t.category_bin}, {"contentment", t.contentment_bin}, {"views", t.view_bin}};
    Json events = Json::array();
    for (const auto& e : t.renewals) {
        events.push_back({{"request_index", e.request_index}, {"removed", e.removed.str()}, {"added", e.added.str()}});
    }
    j["renewals"] = std::move(events);
    return j;
}

class UnknownItemError : public AnalysisError {
public:
    explicit UnknownItemError(const std::string& id) : AnalysisError("unknown synthetic item '" + id + "'") {}
};

/// The synthetic platform. Responses are a pure function of (rng_seed, item,
/// request index) plus the item's renewal history, itself a pure function of
/// the same coordinates; lazily computed state is cached behind a mutex.
class SynthPlatform final : public Provider {
public:
    explicit SynthPlatform(SynthConfig config) : cfg_(std::move(config)) {
        cfg_.validate();
        width_ = std::max<std::size_t>(6, std::to_string(cfg_.universe_size - 1).size());
        build_categories();
        build_tail_cdf();
    }

    const SynthConfig& config() const noexcept { return cfg_; }
    std::size_t universe_size() const noexcept { return cfg_.universe_size; }

    VideoId id_of(std::uint32_t item) const {
        std::string digits = std::to_string(item);
        return VideoId("v" + std::string(width_ - std::min(width_, digits.size()), '0') + digits);
    }

    std::optional<std::uint32_t> item_of(const VideoId& id) const {
        const auto& s = id.str();
        if (s.size() != width_ + 1 || s[0] != 'v') return std::nullopt;
        std::uint64_t value = 0;
        for (std::size_t i = 1; i < s.size(); ++i) {
            if (s[i] < '0' || s[i] > '9') return std::nullopt;
            value = value * 10 + static_cast<std::uint64_t>(s[i] - '0');
        }
        if (value >= cfg_.universe_size) return std::nullopt;
        return static_cast<std::uint32_t>(value);
    }

    SuggestionSample fetch_suggestions(const VideoId& id, RequestIndex request_index) override {
        const Timestamp stamp = cfg_.epoch + cfg_.request_interval * request_index;
        const auto item = item_of(id);
        if (!item || request_index < 0) {
            return SuggestionSample::failed(id, request_index, stamp, SampleStatus::item_gone);
        }
        std::vector<std::uint32_t> plateau;
        {
            std::lock_guard lock(mutex_);
            plateau = plateau_at(*item, request_index);
            auto& served = served_[*item];
            served = std::max(served, request_index + 1);
        }
        auto response = draw_response(*item, request_index, plateau);
        std::vector<VideoId> ids;
        ids.reserve(response.size());
        for (auto r : response) ids.push_back(id_of(r));
        return SuggestionSample{id, request_index, stamp, sanitize_suggestions(id, std::move(ids)), SampleStatus::ok};
    }

    std::optional<VideoMeta> fetch_meta(const VideoId& id) override {
        const auto item = item_of(id);
        if (!item) return std::nullopt;
        return meta_of(*item);
    }

    VideoMeta meta_of(std::uint32_t item) const {
        SplitMix64 rng(key(item, 0, Tag::meta));
        std::normal_distribution<double> normal;
        VideoMeta m{id_of(item)};
        const std::uint32_t cat = category_[item];
        m.category = cfg_.categories[cat].name;
        double log_views = cfg_.log_views_mean + cfg_.log_views_std * normal(rng);
        if (cfg_.contraction_with_views) {
            log_views = cfg_.log_views_mean + cfg_.region_log_views_span * (region_level(item) - 0.5) +
                        cfg_.region_log_views_noise * normal(rng);
        }
        const double views = std::floor(std::exp(std::clamp(log_views, 0.0, 23.0)));
        m.views = static_cast<std::uint64_t>(views);
        const double like_rate = std::min(1.0, std::exp(cfg_.like_rate_log_mean + cfg_.like_rate_log_std * normal(rng)));
        m.likes = static_cast<std::uint64_t>(std::llround(views * like_rate));
        const double c = cfg_.contentment_mean + cfg_.contentment_std * normal(rng);
        const double dislikes = (static_cast<double>(m.likes) + 1.0) / std::exp(c) - 1.0;
        m.dislikes = static_cast<std::uint64_t>(std::max(0.0, std::round(dislikes)));
        m.subscribers = static_cast<std::uint64_t>(std::llround(views * std::exp(-1.0 + normal(rng))));
        m.age_seconds = 86400 + rng.below(12ULL * 365 * 86400);
        m.author = "ch" + std::to_string(cat) + "-" + std::to_string(position_[item] / cfg_.author_block);
        m.fetched_at = cfg_.epoch;
        return m;
    }

    /// Latent state of an item after `at_request` requests (default: as many
    /// requests as this platform has served for it).
    SynthGroundTruth ground_truth(const VideoId& id, std::optional<RequestIndex> at_request = std::nullopt) {
        const auto item = item_of(id);
        if (!item) throw UnknownItemError(id.str());
        SynthGroundTruth t{id, 0, {}, {}, meta_of(*item), {}, {}, {}, {}};
        std::vector<std::uint32_t> initial, current;
        {
            std::lock_guard lock(mutex_);
            const RequestIndex at = at_request ? *at_request : served_[*item];
            t.at_request = at;
            initial = initial_plateau(*item);
            current = plateau_at(*item, at);
            for (const auto& e : state(*item).events) {
                if (e.index < at) t.renewals.push_back({e.index, id_of(e.removed), id_of(e.added)});
            }
        }
        for (auto r : initial) t.initial_plateau.push_back(id_of(r));
        for (auto r : current) t.plateau.push_back(id_of(r));
        t.category_bin = assign_category_bin(t.meta);
        t.contentment_bin = assign_contentment_bin(compute_contentment(t.meta.likes, t.meta.dislikes));
        t.view_bin = assign_view_quartile(t.meta.views);
        return t;
    }

    /// `count` distinct items drawn uniformly, in draw order.
    std::vector<VideoId> pick_seeds(std::size_t count, std::uint64_t stream = 0) const {
        if (count > cfg_.universe_size) throw ConfigError("more seeds requested than items exist");
        SplitMix64 rng(derive_key(cfg_.rng_seed, {0x5eed, stream}));
        std::vector<VideoId> out;
        std::unordered_set<std::uint32_t> used;
        while (out.size() < count) {
            const auto item = static_cast<std::uint32_t>(rng.below(cfg_.universe_size));
            if (used.insert(item).second) out.push_back(id_of(item));
        }
        return out;
    }

    /// Window half-width used for an item's same-category draws.
    std::size_t locality_window(std::uint32_t item) const {
        if (!cfg_.contraction_with_views) return cfg_.locality_window;
        const double z = region_level(item);
        const double w = static_cast<double>(cfg_.min_window) +
                         static_cast<double>(cfg_.max_window - cfg_.min_window) * (1.0 - z);
        return static_cast<std::size_t>(std::llround(w));
    }

    /// Probability that a plateau member shares the item's category.
    double homophily(std::uint32_t item) const {
        if (!cfg_.contraction_with_views) return cfg_.homophily;
        return 1.0 - (1.0 - cfg_.homophily) * (1.0 - region_level(item));
    }

private:
    enum class Tag : std::uint64_t { meta = 1, category, plateau_size, plateau, response, tail, renewal, region };

    struct Event {
        RequestIndex index;
        std::size_t slot;
        std::uint32_t removed;
        std::uint32_t added;
    };

    struct ItemState {
        std::vector<std::uint32_t> plateau; // state after `upto` requests
        RequestIndex upto = 0;
        std::vector<Event> events;
        bool initialised = false;
    };

    std::uint64_t key(std::uint64_t a, std::uint64_t b, Tag tag) const noexcept {
        return derive_key(cfg_.rng_seed, {a, b, static_cast<std::uint64_t>(tag)});
    }

    void build_categories() {
        const std::size_t n = cfg_.universe_size;
        category_.resize(n);
        position_.resize(n);
        lists_.assign(cfg_.categories.size(), {});
        double total = 0.0;
        for (const auto& c : cfg_.categories) total += c.weight;
        for (std::size_t i = 0; i < n; ++i) {
            SplitMix64 rng(key(i, 0, Tag::category));
            double u = rng.uniform() * total;
            std::uint32_t cat = 0;
            while (cat + 1 < cfg_.categories.size() && u >= cfg_.categories[cat].weight) {
                u -= cfg_.categories[cat].weight;
                ++cat;
            }
            category_[i] = cat;
            position_[i] = static_cast<std::uint32_t>(lists_[cat].size());
            lists_[cat].push_back(static_cast<std::uint32_t>(i));
        }
    }

    void build_tail_cdf() {
        tail_cdf_.resize(cfg_.tail_pool_size);
        double acc = 0.0;
        for (std::size_t j = 0; j < cfg_.tail_pool_size; ++j) {
            acc += std::pow(static_cast<double>(j + 1), -cfg_.tail_exponent);
            tail_cdf_[j] = acc;
        }
    }

    double region_level(std::uint32_t item) const {
        SplitMix64 rng(key(category_[item], position_[item] / cfg_.region_size, Tag::region));
        return rng.uniform();
    }

    std::uint32_t other_category(std::uint32_t own, SplitMix64& rng) const {
        if (cfg_.categories.size() == 1) return own;
        double total = 0.0;
        for (std::uint32_t c = 0; c < cfg_.categories.size(); ++c) {
            if (c != own) total += cfg_.categories[c].weight;
        }
        double u = rng.uniform() * total;
        for (std::uint32_t c = 0; c < cfg_.categories.size(); ++c) {
            if (c == own) continue;
            if (u < cfg_.categories[c].weight) return c;
            u -= cfg_.categories[c].weight;
        }
        return own == 0 ? 1 : 0;
    }

    std::uint32_t near_member(std::uint32_t item, SplitMix64& rng) const {
        const auto& list = lists_[category_[item]];
        const auto len = static_cast<std::int64_t>(list.size());
        const auto w = static_cast<std::int64_t>(locality_window(item));
        const std::int64_t offset = 1 + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(w)));
        const std::int64_t signed_offset = rng.bernoulli(0.5) ? offset : -offset;
        const std::int64_t pos = ((static_cast<std::int64_t>(position_[item]) + signed_offset) % len + len) % len;
        return list[static_cast<std::size_t>(pos)];
    }

    std::uint32_t far_member(std::uint32_t category, SplitMix64& rng) const {
        const auto& list = lists_[category];
        return list[rng.below(list.size())];
    }

    std::vector<std::uint32_t> initial_plateau(std::uint32_t item) {
        if (auto it = initial_cache_.find(item); it != initial_cache_.end()) return it->second;
        std::vector<std::uint32_t> members;
        if (cfg_.topology == SynthConfig::Topology::tree) {
            for (std::size_t j = 1; j <= cfg_.tree_branching; ++j) {
                members.push_back(static_cast<std::uint32_t>((cfg_.tree_branching * item + j) % cfg_.universe_size));
            }
        } else {
            SplitMix64 size_rng(key(item, 0, Tag::plateau_size));
            std::normal_distribution<double> normal(cfg_.plateau_size_mean, cfg_.plateau_size_std);
            const double raw = cfg_.plateau_size_std > 0.0 ? normal(size_rng) : cfg_.plateau_size_mean;
            const auto size = static_cast<std::size_t>(
                std::clamp<long long>(std::llround(raw), cfg_.plateau_size_min, cfg_.plateau_size_max));
            SplitMix64 rng(key(item, 0, Tag::plateau));
            std::unordered_set<std::uint32_t> used{item};
            for (std::size_t attempt = 0; members.size() < size && attempt < 64 * size; ++attempt) {
                const std::uint32_t own = category_[item];
                const std::uint32_t candidate = rng.bernoulli(homophily(item)) || cfg_.categories.size() == 1
                                                    ? near_member(item, rng)
                                                    : far_member(other_category(own, rng), rng);
                if (used.insert(candidate).second) members.push_back(candidate);
            }
        }
        initial_cache_.emplace(item, members);
        return members;
    }

    ItemState& state(std::uint32_t item) {
        auto& s = states_[item];
        if (!s.initialised) {
            s.plateau = initial_plateau(item);
            s.initialised = true;
        }
        return s;
    }

    /// Items exactly 2 and 3 hops away over initial plateaus.
    const std::pair<std::vector<std::uint32_t>, std::vector<std::uint32_t>>& hop_sets(std::uint32_t item) {
        if (auto it = hop_cache_.find(item); it != hop_cache_.end()) return it->second;
        std::unordered_set<std::uint32_t> seen{item};
        std::vector<std::uint32_t> frontier = initial_plateau(item);
        for (auto m : frontier) seen.insert(m);
        std::pair<std::vector<std::uint32_t>, std::vector<std::uint32_t>> hops;
        for (int hop = 2; hop <= 3; ++hop) {
            std::vector<std::uint32_t> next;
            for (auto f : frontier) {
                for (auto m : initial_plateau(f)) {
                    if (seen.insert(m).second) next.push_back(m);
                }
            }
            std::sort(next.begin(), next.end());
            (hop == 2 ? hops.first : hops.second) = next;
            frontier = std::move(next);
        }
        return hop_cache_.emplace(item, std::move(hops)).first->second;
    }

    std::uint32_t replacement(std::uint32_t item, const std::vector<std::uint32_t>& current, SplitMix64& rng) {
        const std::uint32_t own = category_[item];
        const bool same = rng.bernoulli(homophily(item)) || cfg_.categories.size() == 1;
        auto eligible = [&](std::uint32_t c) {
            if (c == item || std::find(current.begin(), current.end(), c) != current.end()) return false;
            return (category_[c] == own) == same;
        };
        if (rng.bernoulli(cfg_.renewal_locality)) {
            const auto& hops = hop_sets(item);
            const bool deep = rng.bernoulli(cfg_.renewal_depth3_share);
            for (const auto* pool : {deep ? &hops.second : &hops.first, deep ? &hops.first : &hops.second}) {
                std::vector<std::uint32_t> candidates;
                for (auto c : *pool) {
                    if (eligible(c)) candidates.push_back(c);
                }
                if (!candidates.empty()) return candidates[rng.below(candidates.size())];
            }
        }
        for (int attempt = 0; attempt < 256; ++attempt) {
            const std::uint32_t c = far_member(same ? own : other_category(own, rng), rng);
            if (eligible(c)) return c;
        }
        return current.front();
    }

    /// Latent plateau after `at` requests for the item. Caller holds mutex_.
    std::vector<std::uint32_t> plateau_at(std::uint32_t item, RequestIndex at) {
        auto& s = state(item);
        if (cfg_.renewal_rate > 0.0 && cfg_.topology == SynthConfig::Topology::ring) {
            while (s.upto < at) {
                const RequestIndex j = s.upto++;
                SplitMix64 rng(key(item, static_cast<std::uint64_t>(j), Tag::renewal));
                if (!rng.bernoulli(cfg_.renewal_rate) || s.plateau.empty()) continue;
                const std::size_t slot = rng.below(s.plateau.size());
                const std::uint32_t added = replacement(item, s.plateau, rng);
                if (added == s.plateau[slot]) continue;
                s.events.push_back({j, slot, s.plateau[slot], added});
                s.plateau[slot] = added;
            }
        }
        if (s.events.empty() || at >= s.upto) return s.plateau;
        std::vector<std::uint32_t> replay = initial_plateau(item);
        for (const auto& e : s.events) {
            if (e.index >= at) break;
            replay[e.slot] = e.added;
        }
        return replay;
    }

    std::vector<std::uint32_t> draw_response(std::uint32_t item, RequestIndex index,
                                             const std::vector<std::uint32_t>& plateau) const {
        SplitMix64 rng(key(item, static_cast<std::uint64_t>(index), Tag::response));
        const std::size_t slots = rng.bernoulli(cfg_.short_response_probability) ? kMaxSuggestions - 1 : kMaxSuggestions;
        std::size_t hits = 0;
        for (std::size_t s = 0; s < slots; ++s) hits += rng.bernoulli(cfg_.plateau_hit_rate) ? 1 : 0;
        hits = std::min(hits, plateau.size());
        if (cfg_.tail_pool_size == 0) hits = std::min(slots, plateau.size());
        if (hits == 0 && !plateau.empty() && cfg_.tail_pool_size == 0) hits = 1;

        // Weighted sampling without replacement (exponential keys).
        const double size = static_cast<double>(plateau.size());
        std::vector<std::pair<double, std::size_t>> keys;
        keys.reserve(plateau.size());
        for (std::size_t r = 0; r < plateau.size(); ++r) {
            const double weight = std::exp(-cfg_.plateau_weight_skew * static_cast<double>(r) / size);
            keys.emplace_back(std::log(1.0 - rng.uniform()) / weight, r);
        }
        std::partial_sort(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(hits), keys.end(),
                          [](const auto& a, const auto& b) { return a.first > b.first || (a.first == b.first && a.second < b.second); });
        std::vector<std::uint32_t> out;
        out.reserve(slots);
        for (std::size_t i = 0; i < hits; ++i) out.push_back(plateau[keys[i].second]);

        if (cfg_.tail_pool_size > 0) {
            std::unordered_set<std::uint32_t> used(plateau.begin(), plateau.end());
            used.insert(item);
            for (auto o : out) used.insert(o);
            for (std::size_t attempt = 0; out.size() < slots && attempt < 64 * slots; ++attempt) {
                const double u = rng.uniform() * tail_cdf_.back();
                const auto rank = static_cast<std::uint64_t>(
                    std::upper_bound(tail_cdf_.begin(), tail_cdf_.end(), u) - tail_cdf_.begin());
                SplitMix64 pick(key(item, rank, Tag::tail));
                const auto candidate = static_cast<std::uint32_t>(pick.below(cfg_.universe_size));
                if (used.insert(candidate).second) out.push_back(candidate);
            }
        }
        for (std::size_t i = out.size(); i > 1; --i) std::swap(out[i - 1], out[rng.below(i)]);
        return out;
    }

    SynthConfig cfg_;
    std::size_t width_ = 6;
    std::vector<std::uint32_t> category_;
    std::vector<std::uint32_t> position_;
    std::vector<std::vector<std::uint32_t>> lists_;
    std::vector<double> tail_cdf_;

    std::mutex mutex_;
    std::unordered_map<std::uint32_t, std::vector<std::uint32_t>> initial_cache_;
    std::unordered_map<std::uint32_t, ItemState> states_;
    std::unordered_map<std::uint32_t, std::pair<std::vector<std::uint32_t>, std::vector<std::uint32_t>>> hop_cache_;
    std::unordered_map<std::uint32_t, RequestIndex> served_;
};

} // namespace recgraph
