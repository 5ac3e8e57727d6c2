#pragma once

// Mobility patterns: probability vectors over N locations built from a
// geometric preference law, plus top-l truncation for partial knowledge.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rng.hpp"
#include "types.hpp"

namespace dtnspace {

/// Preference rank of every location; rank 0 is the preferred location.
class RankAssignment {
public:
    explicit RankAssignment(std::vector<std::uint32_t> ranks) : ranks_(std::move(ranks)) {
        if (ranks_.empty()) throw std::invalid_argument("rank assignment is empty");
        std::vector<bool> seen(ranks_.size(), false);
        for (auto r : ranks_) {
            if (r >= ranks_.size() || seen[r])
                throw std::invalid_argument("ranks are not a permutation of 0..N-1");
            seen[r] = true;
        }
    }

    std::size_t size() const { return ranks_.size(); }
    std::uint32_t operator[](std::size_t i) const { return ranks_[i]; }
    std::span<const std::uint32_t> ranks() const { return ranks_; }

    friend bool operator==(const RankAssignment&, const RankAssignment&) = default;

private:
    std::vector<std::uint32_t> ranks_;
};

/// Probability of being found at each location.
class MobilityPattern {
public:
    static constexpr double kSumTolerance = 1e-12;

    static MobilityPattern from_probabilities(std::vector<double> probs) {
        if (probs.empty()) throw std::invalid_argument("pattern is empty");
        double sum = 0.0;
        for (double p : probs) {
            if (!(p >= 0.0 && p <= 1.0))
                throw std::invalid_argument("pattern entry outside [0, 1]");
            sum += p;
        }
        if (std::abs(sum - 1.0) > kSumTolerance)
            throw std::invalid_argument("pattern does not sum to 1 (sum = " +
                                        std::to_string(sum) + ")");
        return MobilityPattern(std::move(probs));
    }

    std::size_t size() const { return probs_.size(); }
    double operator[](std::size_t i) const { return probs_[i]; }
    double operator[](LocationId loc) const { return probs_[loc.value]; }
    std::span<const double> probs() const { return probs_; }

    friend bool operator==(const MobilityPattern&, const MobilityPattern&) = default;

private:
    explicit MobilityPattern(std::vector<double> probs) : probs_(std::move(probs)) {}

    std::vector<double> probs_;
};

/// The l largest components of a pattern, ordered by decreasing probability.
struct PartialPattern {
    std::vector<std::pair<LocationId, double>> entries;
    std::size_t n_locations = 0;
};

/// Normalizer K of the truncated geometric law P(i) = K d^-rank(i).
inline double normalization_constant(double d, std::size_t n_locations) {
    if (!(d > 1.0)) throw std::invalid_argument("normalization constant needs d > 1");
    if (n_locations == 0) throw std::invalid_argument("normalization constant needs N >= 1");
    return (1.0 - 1.0 / d) / (1.0 - std::pow(d, -static_cast<double>(n_locations)));
}

/// P(i) = K (1/d)^rank(i); d = 1 is the uniform pattern.
inline MobilityPattern build_pattern(double d, const RankAssignment& ranks) {
    if (!(d >= 1.0) || !std::isfinite(d)) throw std::invalid_argument("pattern exponent d must be >= 1");
    const std::size_t n = ranks.size();
    std::vector<double> probs(n);
    if (d == 1.0) {
        std::fill(probs.begin(), probs.end(), 1.0 / static_cast<double>(n));
    } else {
        const double k = normalization_constant(d, n);
        for (std::size_t i = 0; i < n; ++i)
            probs[i] = k * std::pow(1.0 / d, static_cast<double>(ranks[i]));
    }
    return MobilityPattern::from_probabilities(std::move(probs));
}

/// Uniformly random permutation of ranks (Fisher-Yates).
inline RankAssignment random_rank_assignment(std::size_t n_locations, RandomStream& rng) {
    if (n_locations == 0) throw std::invalid_argument("rank assignment needs N >= 1");
    std::vector<std::uint32_t> ranks(n_locations);
    std::iota(ranks.begin(), ranks.end(), 0u);
    for (std::size_t i = n_locations - 1; i > 0; --i) {
        const auto j = static_cast<std::size_t>(rng.below(i + 1));
        std::swap(ranks[i], ranks[j]);
    }
    return RankAssignment(std::move(ranks));
}

/// Keeps the l most probable components; ties go to the lower location index.
inline PartialPattern truncate_pattern(const MobilityPattern& p, std::size_t l) {
    if (l == 0 || l > p.size())
        throw std::invalid_argument("knowledge level l must be in [1, N]");
    std::vector<std::uint32_t> order(p.size());
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return p[a] > p[b]; });
    PartialPattern out;
    out.n_locations = p.size();
    out.entries.reserve(l);
    for (std::size_t i = 0; i < l; ++i)
        out.entries.emplace_back(LocationId(order[i]), p[order[i]]);
    return out;
}

/// Length-N vector with the known components and zeros elsewhere. The result
/// need not sum to 1.
inline std::vector<double> densify(const PartialPattern& pp, std::size_t n_locations) {
    if (pp.entries.empty()) throw std::invalid_argument("partial pattern has no components");
    std::vector<double> out(n_locations, 0.0);
    for (const auto& [loc, prob] : pp.entries) {
        if (loc.value >= n_locations)
            throw std::invalid_argument("partial pattern location out of range");
        out[loc.value] = prob;
    }
    return out;
}

}  // namespace dtnspace
