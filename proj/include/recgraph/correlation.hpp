#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "recgraph/metrics.hpp"

namespace recgraph {

struct PairCorrelation {
    /// Nullopt when either variable is constant over the paired observations
    /// or fewer than three pairs exist; this is distinct from rho == 0.
    std::optional<double> rho;
    std::optional<double> p_value;
    std::size_t n = 0;
};

struct CorrelationReport {
    std::vector<std::string> variables;
    /// Row-major |variables| x |variables|.
    std::vector<PairCorrelation> cells;

    const PairCorrelation& at(std::size_t i, std::size_t j) const { return cells[i * variables.size() + j]; }
    PairCorrelation& at(std::size_t i, std::size_t j) { return cells[i * variables.size() + j]; }
};

/// Stars for two-sided p-values: *** < 1e-4, ** < 1e-3, * < 1e-2.
inline std::string significance_stars(std::optional<double> p) {
    if (!p) return "";
    if (*p < 0.0001) return "***";
    if (*p < 0.001) return "**";
    if (*p < 0.01) return "*";
    return "";
}

/// Two-sided p-value of a Pearson coefficient from the t statistic with n - 2
/// degrees of freedom.
inline double pearson_p_value(double rho, std::size_t n) {
    if (n < 3) return 1.0;
    const double r = std::clamp(rho, -1.0, 1.0);
    const double denom = 1.0 - r * r;
    if (denom <= 0.0) return 0.0;
    const double dof = static_cast<double>(n - 2);
    const double t = std::abs(r) * std::sqrt(dof / denom);
    const boost::math::students_t dist(dof);
    return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, t)));
}

/// Pearson coefficient over pairs where both values are finite.
inline PairCorrelation pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw AnalysisError("pearson: length mismatch");
    std::vector<double> a, b;
    a.reserve(x.size());
    b.reserve(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (std::isfinite(x[i]) && std::isfinite(y[i])) {
            a.push_back(x[i]);
            b.push_back(y[i]);
        }
    }
    PairCorrelation out;
    out.n = a.size();
    if (out.n < 3) return out;
    CompensatedSum sa, sb;
    for (std::size_t i = 0; i < out.n; ++i) {
        sa.add(a[i]);
        sb.add(b[i]);
    }
    const double ma = sa.value() / static_cast<double>(out.n);
    const double mb = sb.value() / static_cast<double>(out.n);
    CompensatedSum sab, saa, sbb;
    for (std::size_t i = 0; i < out.n; ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        sab.add(da * db);
        saa.add(da * da);
        sbb.add(db * db);
    }
    if (saa.value() <= 0.0 || sbb.value() <= 0.0) return out;
    const double rho = std::clamp(sab.value() / std::sqrt(saa.value() * sbb.value()), -1.0, 1.0);
    out.rho = rho;
    out.p_value = pearson_p_value(rho, out.n);
    return out;
}

/// Pairwise correlation matrix over named columns of equal length.
inline CorrelationReport correlation_report(std::vector<std::string> names,
                                            const std::vector<std::vector<double>>& columns) {
    if (names.size() != columns.size()) throw AnalysisError("correlation: names/columns mismatch");
    const std::size_t k = columns.size();
    if (k > 0 && columns.front().size() < 3) throw AnalysisError("correlation needs at least 3 observations");
    CorrelationReport report{std::move(names), std::vector<PairCorrelation>(k * k)};
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i; j < k; ++j) {
            auto cell = pearson(columns[i], columns[j]);
            if (i == j && cell.rho) {
                cell.rho = 1.0;
                cell.p_value = 0.0;
            }
            report.at(i, j) = cell;
            report.at(j, i) = cell;
        }
    }
    return report;
}

/// Variable order used for metric reports.
inline const std::vector<std::string>& metric_variable_names() {
    static const std::vector<std::string> names{"eta",      "eta_c", "eta_a", "N", "N_V", "k",
                                                "v",        "l",     "d",     "s", "a",   "c"};
    return names;
}

inline std::vector<double> metric_values(const GraphMetrics& m) {
    return {m.mean_walk_entropy,
            m.mean_category_entropy,
            m.mean_author_entropy,
            static_cast<double>(m.node_count),
            m.mean_distinct_visited,
            m.mean_degree,
            m.views,
            m.likes,
            m.dislikes,
            m.subscribers,
            m.age,
            m.contentment};
}

inline CorrelationReport correlation_report(std::span<const GraphMetrics> metrics) {
    if (metrics.size() < 3) throw AnalysisError("correlation needs at least 3 graphs");
    const auto& names = metric_variable_names();
    std::vector<std::vector<double>> columns(names.size());
    for (const auto& m : metrics) {
        const auto values = metric_values(m);
        for (std::size_t i = 0; i < values.size(); ++i) columns[i].push_back(values[i]);
    }
    return correlation_report(names, columns);
}

} // namespace recgraph
