#pragma once

// Routing policies as decision procedures over one location at one instant.
//
// Every decide function looks at the nodes present at a location, the
// bundles in its work list and the current custody, and returns the transfers
// the policy wants. Nothing is mutated; apply_actions() commits a decision.
// Single-copy policies return deliveries first, then transfers, each group
// in ascending bundle id.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "metrics.hpp"
#include "patterns.hpp"
#include "rng.hpp"
#include "types.hpp"

namespace dtnspace {

enum class Policy { epidemic, opportunistic, random, pattern };

inline std::string_view policy_name(Policy p) {
    switch (p) {
        case Policy::epidemic: return "epidemic";
        case Policy::opportunistic: return "opportunistic";
        case Policy::random: return "random";
        case Policy::pattern: return "pattern";
    }
    return "?";
}

inline std::optional<Policy> parse_policy(std::string_view s) {
    if (s == "epidemic") return Policy::epidemic;
    if (s == "opportunistic") return Policy::opportunistic;
    if (s == "random") return Policy::random;
    if (s == "pattern") return Policy::pattern;
    return std::nullopt;
}

struct Bundle {
    BundleId id = 0;
    NodeId source;
    NodeId destination;
    Tick created_at = 0;
    std::uint32_t hops = 0;  // of the delivered copy, once delivered
    std::optional<Tick> delivered_at;
};

enum class TransferKind { forward, replicate, deliver };

struct TransferAction {
    BundleId bundle = 0;
    NodeId from;
    NodeId to;
    TransferKind kind = TransferKind::forward;

    friend bool operator==(const TransferAction&, const TransferAction&) = default;
};

/// Which node holds which bundle copy, and how many transfers each copy took.
class CustodyTable {
public:
    CustodyTable(std::size_t n_nodes, std::size_t n_bundles)
        : n_bundles_(n_bundles),
          words_per_node_((n_bundles + 63) / 64),
          bits_(n_nodes * words_per_node_, 0),
          hops_(n_nodes * n_bundles, 0) {}

    std::size_t n_bundles() const { return n_bundles_; }
    std::size_t words_per_node() const { return words_per_node_; }

    bool holds(NodeId n, BundleId b) const {
        return (bits_[n.value * words_per_node_ + b / 64] >> (b % 64)) & 1u;
    }
    std::uint32_t hops(NodeId n, BundleId b) const { return hops_[n.value * n_bundles_ + b]; }

    void give(NodeId n, BundleId b, std::uint32_t hops) {
        check(b);
        bits_[n.value * words_per_node_ + b / 64] |= std::uint64_t{1} << (b % 64);
        hops_[n.value * n_bundles_ + b] = hops;
    }
    void take(NodeId n, BundleId b) {
        check(b);
        bits_[n.value * words_per_node_ + b / 64] &= ~(std::uint64_t{1} << (b % 64));
    }

    std::span<const std::uint64_t> words(NodeId n) const {
        return {bits_.data() + n.value * words_per_node_, words_per_node_};
    }

private:
    void check(BundleId b) const {
        if (b >= n_bundles_) throw std::out_of_range("bundle id out of range");
    }

    std::size_t n_bundles_;
    std::size_t words_per_node_;
    std::vector<std::uint64_t> bits_;
    std::vector<std::uint32_t> hops_;
};

/// Bundles each node has already forwarded during its current location
/// visit. A node forwards a given bundle at most once per visit.
class VisitLog {
public:
    VisitLog(std::size_t n_nodes, std::size_t n_bundles)
        : n_bundles_(n_bundles), visit_(n_nodes, 1), stamp_(n_nodes * n_bundles, 0) {}

    bool handled(NodeId n, BundleId b) const {
        return stamp_[n.value * n_bundles_ + b] == visit_[n.value];
    }
    void mark(NodeId n, BundleId b) { stamp_[n.value * n_bundles_ + b] = visit_[n.value]; }

    /// Called whenever the node starts a new visit, including when it draws
    /// the location it is already at.
    void clear(NodeId n) { ++visit_[n.value]; }

private:
    std::size_t n_bundles_;
    std::vector<std::uint32_t> visit_;
    std::vector<std::uint32_t> stamp_;
};

/// Which patterns a knowledge level below N truncates.
enum class TruncationScope {
    /// Destinations are addressed by their top-l components; a node compares
    /// its own full pattern against that.
    destination,
    /// Every pattern is only known through its top-l components.
    all,
};

inline std::string_view truncation_name(TruncationScope s) {
    return s == TruncationScope::destination ? "destination" : "all";
}

inline std::optional<TruncationScope> parse_truncation(std::string_view s) {
    if (s == "destination") return TruncationScope::destination;
    if (s == "all") return TruncationScope::all;
    return std::nullopt;
}

/// Global view of every node's pattern as routing sees it. Truncated
/// patterns are zero-filled to length N.
class KnowledgeOracle {
public:
    KnowledgeOracle(std::span<const MobilityPattern> patterns, std::size_t level,
                    TruncationScope scope = TruncationScope::destination)
        : level_(level), scope_(scope) {
        if (patterns.empty()) throw std::invalid_argument("knowledge oracle needs patterns");
        full_.reserve(patterns.size());
        partial_.reserve(patterns.size());
        for (const auto& p : patterns) {
            full_.emplace_back(p.probs().begin(), p.probs().end());
            partial_.push_back(level == p.size() ? full_.back() : densify(truncate_pattern(p, level), p.size()));
        }
    }

    std::size_t level() const { return level_; }
    TruncationScope scope() const { return scope_; }
    std::size_t n_nodes() const { return full_.size(); }

    /// The pattern used for n when n is a bundle's destination.
    std::span<const double> as_destination(NodeId n) const { return partial_.at(checked(n)); }

    /// The pattern used for n when n is a custodian or a candidate.
    std::span<const double> as_carrier(NodeId n) const {
        return scope_ == TruncationScope::all ? partial_.at(checked(n)) : full_.at(checked(n));
    }

private:
    std::size_t checked(NodeId n) const {
        if (n.value >= full_.size()) throw std::out_of_range("node unknown to the oracle");
        return n.value;
    }

    std::size_t level_;
    TruncationScope scope_;
    std::vector<std::vector<double>> full_;
    std::vector<std::vector<double>> partial_;
};

inline Score score_to_destination(NodeId node, NodeId dest, const KnowledgeOracle& oracle,
                                  const MetricKind& metric) {
    return score(metric, oracle.as_carrier(node), oracle.as_destination(dest));
}

/// score_to_destination for every (node, destination) pair, computed once
/// per run.
class ScoreTable {
public:
    ScoreTable(const KnowledgeOracle& oracle, const MetricKind& metric) : n_(oracle.n_nodes()) {
        scores_.reserve(n_ * n_);
        for (std::uint32_t x = 0; x < n_; ++x)
            for (std::uint32_t t = 0; t < n_; ++t)
                scores_.push_back(score_to_destination(NodeId(x), NodeId(t), oracle, metric));
    }

    Score at(NodeId node, NodeId dest) const { return scores_.at(node.value * n_ + dest.value); }

private:
    std::size_t n_;
    std::vector<Score> scores_;
};

// ---------------------------------------------------------------------------
// Work lists

/// Every bundle held by at least one of the nodes, ascending.
inline std::vector<BundleId> bundles_at(std::span<const NodeId> nodes, const CustodyTable& custody) {
    std::vector<BundleId> out;
    for (std::size_t w = 0; w < custody.words_per_node(); ++w) {
        std::uint64_t any = 0;
        for (NodeId n : nodes) any |= custody.words(n)[w];
        while (any) {
            out.push_back(static_cast<BundleId>(w * 64 + std::countr_zero(any)));
            any &= any - 1;
        }
    }
    return out;
}

/// Bundles held by some but not all of the nodes, ascending.
inline std::vector<BundleId> unsaturated_bundles_at(std::span<const NodeId> nodes,
                                                    const CustodyTable& custody) {
    std::vector<BundleId> out;
    for (std::size_t w = 0; w < custody.words_per_node(); ++w) {
        std::uint64_t any = 0, all = ~std::uint64_t{0};
        for (NodeId n : nodes) {
            any |= custody.words(n)[w];
            all &= custody.words(n)[w];
        }
        std::uint64_t partial = any & ~all;
        while (partial) {
            out.push_back(static_cast<BundleId>(w * 64 + std::countr_zero(partial)));
            partial &= partial - 1;
        }
    }
    return out;
}

namespace detail {

inline bool contains(std::span<const NodeId> sorted_nodes, NodeId n) {
    return std::binary_search(sorted_nodes.begin(), sorted_nodes.end(), n);
}

inline std::optional<NodeId> custodian_among(std::span<const NodeId> nodes, const CustodyTable& custody,
                                             BundleId b) {
    for (NodeId n : nodes)
        if (custody.holds(n, b)) return n;
    return std::nullopt;
}

inline std::vector<TransferAction> join(std::vector<TransferAction> deliveries,
                                        const std::vector<TransferAction>& transfers) {
    deliveries.insert(deliveries.end(), transfers.begin(), transfers.end());
    return deliveries;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Decision procedures. `nodes` must be sorted by id; `work` ascending.

/// Pairwise exchange sessions between every two colocated nodes, in
/// ascending (lower id, higher id) order. A copy obtained in one session is
/// passed on in later sessions of the same instant, so its hop count grows
/// along the chain. A copy reaching the destination is a delivery.
///
/// Actions are in session order, grouped by ascending bundle id; they must
/// be applied in that order.
inline std::vector<TransferAction> epidemic_decide(std::span<const NodeId> nodes,
                                                   std::span<const BundleId> work,
                                                   const CustodyTable& custody,
                                                   std::span<const Bundle> bundles) {
    std::vector<TransferAction> out;
    std::vector<char> has(nodes.size());
    for (BundleId b : work) {
        for (std::size_t i = 0; i < nodes.size(); ++i) has[i] = custody.holds(nodes[i], b);
        const NodeId dest = bundles[b].destination;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            for (std::size_t j = i + 1; j < nodes.size(); ++j) {
                if (has[i] == has[j]) continue;
                const std::size_t from = has[i] ? i : j;
                const std::size_t to = has[i] ? j : i;
                has[to] = 1;
                out.push_back({b, nodes[from], nodes[to],
                               nodes[to] == dest ? TransferKind::deliver : TransferKind::replicate});
            }
        }
    }
    return out;
}

/// Hand the bundle over only to its destination.
inline std::vector<TransferAction> opportunistic_decide(std::span<const NodeId> nodes,
                                                        std::span<const BundleId> work,
                                                        const CustodyTable& custody,
                                                        std::span<const Bundle> bundles) {
    std::vector<TransferAction> deliveries;
    for (BundleId b : work) {
        const auto c = detail::custodian_among(nodes, custody, b);
        if (!c) continue;
        const NodeId dest = bundles[b].destination;
        if (*c != dest && detail::contains(nodes, dest))
            deliveries.push_back({b, *c, dest, TransferKind::deliver});
    }
    return deliveries;
}

/// Deliver if possible. Otherwise, unless the custodian already forwarded
/// this bundle during its current visit, pass custody to a uniformly chosen
/// colocated node, drawing among nodes that have not forwarded it during
/// their own visit when there are any.
inline std::vector<TransferAction> random_decide(std::span<const NodeId> nodes,
                                                 std::span<const BundleId> work,
                                                 const CustodyTable& custody,
                                                 std::span<const Bundle> bundles, const VisitLog& visits,
                                                 RandomStream& rng) {
    std::vector<TransferAction> deliveries, transfers;
    std::vector<NodeId> eligible;
    for (BundleId b : work) {
        const auto c = detail::custodian_among(nodes, custody, b);
        if (!c) continue;
        const NodeId dest = bundles[b].destination;
        if (*c == dest) continue;
        if (detail::contains(nodes, dest)) {
            deliveries.push_back({b, *c, dest, TransferKind::deliver});
            continue;
        }
        if (nodes.size() < 2 || visits.handled(*c, b)) continue;
        eligible.clear();
        for (NodeId n : nodes)
            if (n != *c && !visits.handled(n, b)) eligible.push_back(n);
        if (eligible.empty())
            for (NodeId n : nodes)
                if (n != *c) eligible.push_back(n);
        const NodeId to = eligible.size() == 1 ? eligible.front() : eligible[rng.below(eligible.size())];
        transfers.push_back({b, *c, to, TransferKind::forward});
    }
    return detail::join(std::move(deliveries), transfers);
}

/// Deliver if possible, otherwise pass custody to the colocated node whose
/// known pattern is most similar to the destination's, provided it is
/// strictly more similar than the custodian. Ties go to the lowest node id.
/// Nodes that already forwarded the bundle during their visit are skipped;
/// strict improvement rules them out anyway.
inline std::vector<TransferAction> pattern_greedy_decide(std::span<const NodeId> nodes,
                                                         std::span<const BundleId> work,
                                                         const CustodyTable& custody,
                                                         std::span<const Bundle> bundles,
                                                         const ScoreTable& scores, const VisitLog& visits) {
    std::vector<TransferAction> deliveries, transfers;
    for (BundleId b : work) {
        const auto c = detail::custodian_among(nodes, custody, b);
        if (!c) continue;
        const NodeId dest = bundles[b].destination;
        if (*c == dest) continue;
        if (detail::contains(nodes, dest)) {
            deliveries.push_back({b, *c, dest, TransferKind::deliver});
            continue;
        }
        Score best = scores.at(*c, dest);
        std::optional<NodeId> to;
        for (NodeId n : nodes) {
            if (n == *c || visits.handled(n, b)) continue;
            const Score s = scores.at(n, dest);
            if (better(s, best)) {
                best = s;
                to = n;
            }
        }
        if (to) transfers.push_back({b, *c, *to, TransferKind::forward});
    }
    return detail::join(std::move(deliveries), transfers);
}

// Convenience overloads that consider every bundle present at the location.

inline std::vector<TransferAction> epidemic_decide(std::span<const NodeId> nodes, const CustodyTable& custody,
                                                   std::span<const Bundle> bundles) {
    return epidemic_decide(nodes, bundles_at(nodes, custody), custody, bundles);
}
inline std::vector<TransferAction> opportunistic_decide(std::span<const NodeId> nodes,
                                                        const CustodyTable& custody,
                                                        std::span<const Bundle> bundles) {
    return opportunistic_decide(nodes, bundles_at(nodes, custody), custody, bundles);
}
inline std::vector<TransferAction> random_decide(std::span<const NodeId> nodes, const CustodyTable& custody,
                                                 std::span<const Bundle> bundles, const VisitLog& visits,
                                                 RandomStream& rng) {
    return random_decide(nodes, bundles_at(nodes, custody), custody, bundles, visits, rng);
}
inline std::vector<TransferAction> pattern_greedy_decide(std::span<const NodeId> nodes,
                                                         const CustodyTable& custody,
                                                         std::span<const Bundle> bundles,
                                                         const ScoreTable& scores, const VisitLog& visits) {
    return pattern_greedy_decide(nodes, bundles_at(nodes, custody), custody, bundles, scores, visits);
}

/// Commits a decision. Returns the bundles that changed hands other than by
/// delivery, ascending and unique.
inline std::vector<BundleId> apply_actions(std::span<const TransferAction> actions, Policy policy, Tick now,
                                           CustodyTable& custody, std::span<Bundle> bundles,
                                           VisitLog& visits) {
    const bool replicating = policy == Policy::epidemic;
    std::vector<BundleId> moved;
    for (const auto& a : actions) {
        if (a.from == a.to) throw std::logic_error("transfer to self");
        if (!custody.holds(a.from, a.bundle)) throw std::logic_error("transfer from a node without a copy");
        const std::uint32_t hops = custody.hops(a.from, a.bundle) + 1;
        Bundle& bundle = bundles[a.bundle];
        switch (a.kind) {
            case TransferKind::deliver:
                if (a.to != bundle.destination) throw std::logic_error("delivery to a non-destination");
                if (!bundle.delivered_at) {
                    bundle.delivered_at = now;
                    bundle.hops = hops;
                }
                if (replicating)
                    custody.give(a.to, a.bundle, hops);
                else
                    custody.take(a.from, a.bundle);
                break;
            case TransferKind::replicate:
                custody.give(a.to, a.bundle, hops);
                moved.push_back(a.bundle);
                break;
            case TransferKind::forward:
                custody.take(a.from, a.bundle);
                custody.give(a.to, a.bundle, hops);
                visits.mark(a.from, a.bundle);
                moved.push_back(a.bundle);
                break;
        }
    }
    std::sort(moved.begin(), moved.end());
    moved.erase(std::unique(moved.begin(), moved.end()), moved.end());
    return moved;
}

}  // namespace dtnspace
