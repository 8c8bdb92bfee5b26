#ifndef SSRED_IDS_HPP
#define SSRED_IDS_HPP

#include <compare>
#include <cstdint>
#include <functional>

namespace ssred {

/// Strongly typed integer id. Vertex, edge, leg and marking ids live in
/// separate types so the various correspondence maps cannot mix them up.
template <class Tag>
struct Id {
    std::int64_t value{0};

    constexpr Id() = default;
    constexpr explicit Id(std::int64_t v) : value(v) {}

    friend constexpr bool operator==(Id a, Id b) { return a.value == b.value; }
    friend constexpr auto operator<=>(Id a, Id b) { return a.value <=> b.value; }
};

struct VertexTag {};
struct EdgeTag {};
struct LegTag {};
struct MarkingTag {};

using VertexId = Id<VertexTag>;
using EdgeId = Id<EdgeTag>;
using LegId = Id<LegTag>;
using MarkingId = Id<MarkingTag>;

} // namespace ssred

template <class Tag>
struct std::hash<ssred::Id<Tag>> {
    std::size_t operator()(ssred::Id<Tag> id) const noexcept {
        return std::hash<std::int64_t>{}(id.value);
    }
};

#endif // SSRED_IDS_HPP
