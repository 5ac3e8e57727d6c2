#pragma once

#include <compare>
#include <cstdint>
#include <functional>

namespace dtnspace {

/// Dense zero-based index with a tag so node and location indices cannot be
/// mixed up.
template <class Tag>
struct Index {
    std::uint32_t value = 0;

    constexpr Index() = default;
    constexpr explicit Index(std::uint32_t v) : value(v) {}

    friend constexpr auto operator<=>(Index, Index) = default;
};

using LocationId = Index<struct LocationTag>;
using NodeId = Index<struct NodeTag>;

using BundleId = std::uint32_t;

/// Simulated time in integer ticks of the scenario's time step.
using Tick = std::int64_t;

}  // namespace dtnspace

template <class Tag>
struct std::hash<dtnspace::Index<Tag>> {
    std::size_t operator()(dtnspace::Index<Tag> i) const noexcept {
        return std::hash<std::uint32_t>{}(i.value);
    }
};
