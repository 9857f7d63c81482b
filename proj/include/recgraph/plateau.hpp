#pragma once

#include <map>
#include <span>
#include <unordered_map>

#include "recgraph/core.hpp"

namespace recgraph {

inline constexpr double kDefaultFrequencyFloor = 0.01;
/// A split must cut the single-segment SSE by at least this fraction.
inline constexpr double kMinSseImprovement = 0.05;
inline constexpr std::size_t kDefaultLifespanWindow = 20;

class EmptyWindowError : public AnalysisError {
public:
    using AnalysisError::AnalysisError;
};

class TooFewEntriesError : public AnalysisError {
public:
    using AnalysisError::AnalysisError;
};

class InsufficientSamplesError : public AnalysisError {
public:
    using AnalysisError::AnalysisError;
};

namespace detail {

inline std::vector<const SuggestionSample*> ordered_samples(std::span<const SuggestionSample> samples) {
    std::vector<const SuggestionSample*> out;
    out.reserve(samples.size());
    for (const auto& s : samples) {
        if (s.source_id != samples.front().source_id) {
            throw AnalysisError("samples mix sources " + samples.front().source_id.str() + " and " +
                                s.source_id.str());
        }
        out.push_back(&s);
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const auto* a, const auto* b) { return a->request_index < b->request_index; });
    return out;
}

} // namespace detail

/// Occurrence frequencies over the first `window` samples (by request index).
/// Failed samples count toward the window but not the denominator.
inline FrequencyTable build_frequency_table(std::span<const SuggestionSample> samples, std::size_t window) {
    if (samples.empty() || window == 0) throw EmptyWindowError("no samples in window");
    const auto ordered = detail::ordered_samples(samples);
    const std::size_t take = std::min(window, ordered.size());

    std::unordered_map<std::string_view, std::pair<const VideoId*, std::size_t>> counts;
    std::size_t ok = 0;
    for (std::size_t i = 0; i < take; ++i) {
        const auto& s = *ordered[i];
        if (!s.ok()) continue;
        ++ok;
        for (const auto& id : s.suggestions) {
            auto& slot = counts[id.str()];
            slot.first = &id;
            ++slot.second;
        }
    }
    if (ok == 0) {
        throw EmptyWindowError("no ok samples among the first " + std::to_string(take) + " for " +
                               samples.front().source_id.str());
    }
    FrequencyTable table{samples.front().source_id, ok, {}};
    table.entries.reserve(counts.size());
    for (const auto& [_, slot] : counts) {
        table.entries.push_back({*slot.first, static_cast<double>(slot.second) / static_cast<double>(ok)});
    }
    sort_frequency_entries(table.entries);
    return table;
}

/// Frequencies over the last `window` samples.
inline FrequencyTable build_tail_frequency_table(std::span<const SuggestionSample> samples, std::size_t window) {
    if (samples.empty() || window == 0) throw EmptyWindowError("no samples in window");
    const auto ordered = detail::ordered_samples(samples);
    const std::size_t start = ordered.size() > window ? ordered.size() - window : 0;
    std::vector<SuggestionSample> tail;
    tail.reserve(ordered.size() - start);
    for (std::size_t i = start; i < ordered.size(); ++i) tail.push_back(*ordered[i]);
    return build_frequency_table(tail, window);
}

/// Within-segment sum of squared deviations for every split of a sequence:
/// result[k] = SSE(f[0..k)) + SSE(f[k..n)), for k in [1, n). result[0] is the
/// single-segment SSE.
inline std::vector<double> split_sse(std::span<const double> f) {
    const std::size_t n = f.size();
    std::vector<double> out(n, 0.0);
    if (n == 0) return out;
    double shift = 0.0;
    for (double x : f) shift += x;
    shift /= static_cast<double>(n);

    // Centred prefix sums keep the sum-of-squares identity well conditioned.
    std::vector<double> s1(n + 1, 0.0), s2(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = f[i] - shift;
        s1[i + 1] = s1[i] + x;
        s2[i + 1] = s2[i] + x * x;
    }
    auto segment = [&](std::size_t a, std::size_t b) {
        const double m = static_cast<double>(b - a);
        const double sum = s1[b] - s1[a];
        return std::max(0.0, (s2[b] - s2[a]) - sum * sum / m);
    };
    out[0] = segment(0, n);
    for (std::size_t k = 1; k < n; ++k) out[k] = segment(0, k) + segment(k, n);
    return out;
}

/// Detects the stable head of a frequency table with a single two-segment
/// least-squares changepoint over entries at or above `floor`. When no split
/// improves on the single segment by kMinSseImprovement, every surviving
/// entry is a member.
inline Plateau detect_plateau(const FrequencyTable& table, double floor = kDefaultFrequencyFloor) {
    std::vector<double> f;
    for (const auto& e : table.entries) {
        if (e.frequency >= floor) f.push_back(e.frequency);
    }
    if (f.size() < 2) {
        throw TooFewEntriesError(table.source_id.str() + ": " + std::to_string(f.size()) +
                                 " entries at or above the floor");
    }
    // Entries are sorted by descending frequency, so the survivors are a prefix.
    const auto sse = split_sse(f);
    std::size_t best = 1;
    for (std::size_t k = 2; k < f.size(); ++k) {
        if (sse[k] < sse[best]) best = k;
    }
    std::size_t rank = best;
    if (!(sse[0] > 0.0 && sse[best] <= (1.0 - kMinSseImprovement) * sse[0])) rank = f.size();

    Plateau plateau{table.source_id, {}, rank, table.window};
    plateau.members.assign(table.entries.begin(), table.entries.begin() + static_cast<std::ptrdiff_t>(rank));
    return plateau;
}

struct LifespanRecord {
    VideoId suggestion;
    double threshold = 0.0;
    std::int64_t first_window = 0;
    std::int64_t last_window = 0;
    std::int64_t lifespan = 0;
    double mean_presence_over_lifespan = 0.0;

    friend bool operator==(const LifespanRecord&, const LifespanRecord&) = default;
};

/// Lifespans over sliding windows of `slide` consecutive ok samples, stepping
/// by one sample. A suggestion qualifies for threshold theta in window t when
/// its in-window frequency is strictly above theta. Records are ordered by
/// threshold (as given), then suggestion id.
inline std::vector<LifespanRecord> compute_lifespans(std::span<const SuggestionSample> samples,
                                                     std::size_t slide, std::span<const double> thresholds) {
    if (slide == 0) throw AnalysisError("lifespan window must be >= 1");
    std::vector<const SuggestionSample*> ok;
    if (!samples.empty()) {
        for (const auto* s : detail::ordered_samples(samples)) {
            if (s->ok()) ok.push_back(s);
        }
    }
    if (ok.size() < slide) {
        throw InsufficientSamplesError("need " + std::to_string(slide) + " ok samples, have " +
                                       std::to_string(ok.size()));
    }
    const std::size_t n = ok.size();
    const std::size_t windows = n - slide + 1;

    // Presence positions per suggestion.
    std::map<VideoId, std::vector<std::size_t>> positions;
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& id : ok[i]->suggestions) positions[id].push_back(i);
    }

    std::vector<LifespanRecord> records;
    std::vector<std::uint32_t> counts(windows);
    std::vector<std::uint32_t> prefix(n + 1);
    for (const double theta : thresholds) {
        for (const auto& [id, pos] : positions) {
            std::fill(prefix.begin(), prefix.end(), 0u);
            for (auto p : pos) prefix[p + 1] = 1;
            for (std::size_t i = 0; i < n; ++i) prefix[i + 1] += prefix[i];
            std::int64_t first = -1, last = -1;
            for (std::size_t t = 0; t < windows; ++t) {
                counts[t] = prefix[t + slide] - prefix[t];
                if (static_cast<double>(counts[t]) / static_cast<double>(slide) > theta) {
                    if (first < 0) first = static_cast<std::int64_t>(t);
                    last = static_cast<std::int64_t>(t);
                }
            }
            if (first < 0) continue;
            std::uint64_t sum = 0;
            for (auto t = first; t <= last; ++t) sum += counts[static_cast<std::size_t>(t)];
            const double spans = static_cast<double>(last - first + 1);
            records.push_back({id, theta, first, last, last - first,
                               static_cast<double>(sum) / (static_cast<double>(slide) * spans)});
        }
    }
    return records;
}

struct SurvivalPoint {
    double threshold = 0.0;
    std::int64_t lifespan = 0;
    std::int64_t count = 0;

    friend bool operator==(const SurvivalPoint&, const SurvivalPoint&) = default;
};

/// Number of records with lifespan >= T, for T = 0 .. max lifespan, per threshold.
inline std::vector<SurvivalPoint> lifespan_survival(std::span<const LifespanRecord> records) {
    std::map<double, std::map<std::int64_t, std::int64_t>> histogram;
    for (const auto& r : records) ++histogram[r.threshold][r.lifespan];
    std::vector<SurvivalPoint> out;
    for (const auto& [theta, hist] : histogram) {
        const auto max_t = hist.rbegin()->first;
        std::vector<std::int64_t> at_least(static_cast<std::size_t>(max_t) + 2, 0);
        for (const auto& [t, c] : hist) at_least[static_cast<std::size_t>(t)] += c;
        for (auto t = max_t; t >= 0; --t) {
            at_least[static_cast<std::size_t>(t)] += at_least[static_cast<std::size_t>(t) + 1];
        }
        for (std::int64_t t = 0; t <= max_t; ++t) {
            out.push_back({theta, t, at_least[static_cast<std::size_t>(t)]});
        }
    }
    return out;
}

} // namespace recgraph
