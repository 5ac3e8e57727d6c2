#pragma once

// Similarity functions between pattern vectors and a comparator that hides
// whether a metric is a distance or a similarity.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dtnspace {

enum class MetricId { euclidean, canberra, angle, matching };

enum class Orientation { lower_is_better, higher_is_better };

inline constexpr double kDefaultMatchingDelta = 2e-8;

struct MetricKind {
    MetricId id = MetricId::euclidean;
    double delta = kDefaultMatchingDelta;  // matching only

    static MetricKind euclidean() { return {MetricId::euclidean, 0.0}; }
    static MetricKind canberra() { return {MetricId::canberra, 0.0}; }
    static MetricKind angle() { return {MetricId::angle, 0.0}; }
    static MetricKind matching(double delta = kDefaultMatchingDelta) {
        if (!(delta >= 0.0) || !std::isfinite(delta))
            throw std::invalid_argument("matching delta must be finite and >= 0");
        return {MetricId::matching, delta};
    }

    Orientation orientation() const {
        return (id == MetricId::euclidean || id == MetricId::canberra)
                   ? Orientation::lower_is_better
                   : Orientation::higher_is_better;
    }
};

inline std::string_view metric_name(MetricId id) {
    switch (id) {
        case MetricId::euclidean: return "euclidean";
        case MetricId::canberra: return "canberra";
        case MetricId::angle: return "angle";
        case MetricId::matching: return "matching";
    }
    return "?";
}

inline std::optional<MetricId> parse_metric(std::string_view s) {
    if (s == "euclidean") return MetricId::euclidean;
    if (s == "canberra") return MetricId::canberra;
    if (s == "angle") return MetricId::angle;
    if (s == "matching") return MetricId::matching;
    return std::nullopt;
}

struct Score {
    double value = 0.0;
    Orientation orientation = Orientation::lower_is_better;
};

namespace detail {
inline void require_same_length(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("metric operands differ in length");
}
}  // namespace detail

inline double euclidean_distance(std::span<const double> a, std::span<const double> b) {
    detail::require_same_length(a, b);
    double sum = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double diff = a[k] - b[k];
        sum += diff * diff;
    }
    return std::sqrt(sum);
}

// A coordinate that is zero on exactly one side contributes 1; zero on both
// sides contributes 0.
inline double canberra_distance(std::span<const double> a, std::span<const double> b) {
    detail::require_same_length(a, b);
    double sum = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const bool za = a[k] == 0.0;
        const bool zb = b[k] == 0.0;
        if (za && zb) continue;
        if (za || zb) {
            sum += 1.0;
            continue;
        }
        sum += std::abs(a[k] - b[k]) / (std::abs(a[k]) + std::abs(b[k]));
    }
    return sum;
}

inline double cosine_similarity(std::span<const double> a, std::span<const double> b) {
    detail::require_same_length(a, b);
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        dot += a[k] * b[k];
        na += a[k] * a[k];
        nb += b[k] * b[k];
    }
    if (na == 0.0 || nb == 0.0) throw std::invalid_argument("cosine similarity of a zero vector");
    return std::clamp(dot / std::sqrt(na * nb), 0.0, 1.0);
}

inline int matching_similarity(std::span<const double> a, std::span<const double> b, double delta) {
    detail::require_same_length(a, b);
    if (!(delta >= 0.0)) throw std::invalid_argument("matching delta must be >= 0");
    int count = 0;
    for (std::size_t k = 0; k < a.size(); ++k)
        if (std::abs(a[k] - b[k]) <= delta) ++count;
    return count;
}

inline Score score(const MetricKind& metric, std::span<const double> a, std::span<const double> b) {
    switch (metric.id) {
        case MetricId::euclidean: return {euclidean_distance(a, b), Orientation::lower_is_better};
        case MetricId::canberra: return {canberra_distance(a, b), Orientation::lower_is_better};
        case MetricId::angle: return {cosine_similarity(a, b), Orientation::higher_is_better};
        case MetricId::matching:
            return {static_cast<double>(matching_similarity(a, b, metric.delta)),
                    Orientation::higher_is_better};
    }
    throw std::invalid_argument("unknown metric");
}

/// True iff x is strictly more similar than y.
inline bool better(Score x, Score y) {
    if (x.orientation != y.orientation)
        throw std::invalid_argument("comparing scores of different orientation");
    return x.orientation == Orientation::lower_is_better ? x.value < y.value : x.value > y.value;
}

}  // namespace dtnspace
