#pragma once

// Node movement: i.i.d. location draws from a node's pattern, uniform resting
// times, and the index of which nodes share a location.

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "patterns.hpp"
#include "rng.hpp"
#include "types.hpp"

namespace dtnspace {

/// Conversion between seconds and integer ticks of a fixed time step.
struct TimeGrid {
    double step_seconds = 0.01;

    Tick to_ticks(double seconds) const { return static_cast<Tick>(std::llround(seconds / step_seconds)); }
    Tick floor_ticks(double seconds) const { return static_cast<Tick>(std::floor(seconds / step_seconds)); }
    double to_seconds(Tick t) const { return static_cast<double>(t) * step_seconds; }
};

/// Inverse-CDF draw; independent of the node's current location.
inline LocationId sample_next_location(const MobilityPattern& p, RandomStream& rng) {
    const double u = rng.uniform01();
    double cumulative = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] <= 0.0) continue;
        cumulative += p[i];
        last_positive = i;
        if (u < cumulative) return LocationId(static_cast<std::uint32_t>(i));
    }
    // u landed in the rounding slack above the final cumulative sum
    return LocationId(static_cast<std::uint32_t>(last_positive));
}

inline double sample_rest_time(double t_min, double t_max, RandomStream& rng) {
    if (!(t_min > 0.0)) throw std::invalid_argument("t_min must be positive");
    if (t_min > t_max) throw std::invalid_argument("t_min exceeds t_max");
    if (t_min == t_max) return t_min;
    return rng.uniform(t_min, t_max);
}

struct MovementModel {
    double t_min = 5.0;
    double t_max = 15.0;
    TimeGrid grid;

    /// Rest time snapped to the tick grid; never shorter than one tick.
    Tick rest_ticks(RandomStream& rng) const {
        return std::max<Tick>(1, grid.to_ticks(sample_rest_time(t_min, t_max, rng)));
    }
};

struct NodeState {
    NodeId node;
    MobilityPattern pattern;
    LocationId location;
    Tick next_move_at = 0;
};

/// Starting state: location drawn from the node's own pattern.
inline NodeState place_node(NodeId node, MobilityPattern pattern, Tick now,
                            const MovementModel& model, RandomStream& rng) {
    const LocationId loc = sample_next_location(pattern, rng);
    const Tick next = now + model.rest_ticks(rng);
    return NodeState{node, std::move(pattern), loc, next};
}

/// One instantaneous move at the node's scheduled time.
inline NodeState advance_node(const NodeState& s, Tick now, const MovementModel& model,
                              RandomStream& rng) {
    if (now != s.next_move_at)
        throw std::logic_error("advance_node called away from the node's scheduled move time");
    NodeState next = s;
    next.location = sample_next_location(s.pattern, rng);
    next.next_move_at = now + model.rest_ticks(rng);
    return next;
}

struct MoveRecord {
    Tick at = 0;
    NodeId node;
    LocationId from;
    LocationId to;
};

/// Which nodes are at which location. Per-location lists stay sorted by id.
class Colocation {
public:
    Colocation(std::size_t n_locations, std::size_t n_nodes)
        : at_(n_locations), where_(n_nodes, LocationId(kUnplaced)) {}

    std::size_t n_locations() const { return at_.size(); }
    std::size_t n_nodes() const { return where_.size(); }

    LocationId location_of(NodeId n) const { return where_.at(n.value); }

    void place(NodeId n, LocationId loc) {
        if (loc.value >= at_.size()) throw std::out_of_range("location out of range");
        auto& here = where_.at(n.value);
        if (here.value != kUnplaced) {
            auto& old = at_[here.value];
            old.erase(std::lower_bound(old.begin(), old.end(), n));
        }
        auto& list = at_[loc.value];
        list.insert(std::lower_bound(list.begin(), list.end(), n), n);
        here = loc;
    }

    std::span<const NodeId> colocated_nodes(LocationId loc) const { return at_.at(loc.value); }

private:
    static constexpr std::uint32_t kUnplaced = ~0u;

    std::vector<std::vector<NodeId>> at_;
    std::vector<LocationId> where_;
};

inline std::span<const NodeId> colocated_nodes(const Colocation& world, LocationId loc) {
    return world.colocated_nodes(loc);
}

}  // namespace dtnspace
