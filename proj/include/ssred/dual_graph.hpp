#ifndef SSRED_DUAL_GRAPH_HPP
#define SSRED_DUAL_GRAPH_HPP

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "ssred/diagnostics.hpp"
#include "ssred/ids.hpp"
#include "ssred/rational.hpp"

namespace ssred {

struct VertexData {
    std::int64_t genus{0};

    friend bool operator==(const VertexData&, const VertexData&) = default;
};

/// One node of the special fiber. The two entries of `ends` are the edge's
/// half-edges; ends[0] == ends[1] encodes a loop, which therefore counts
/// twice in the valence of its vertex.
struct EdgeData {
    std::array<VertexId, 2> ends{};
    std::int64_t thickness{1};

    bool is_loop() const { return ends[0] == ends[1]; }

    friend bool operator==(const EdgeData&, const EdgeData&) = default;
};

/// A marking in the metric interior of an edge. `position` is measured from
/// the `from` endpoint; for loops the anchor is the first half-edge (slot 0).
struct EdgeMarking {
    EdgeId edge{};
    VertexId from{};
    Rational position{};

    friend bool operator==(const EdgeMarking&, const EdgeMarking&) = default;
};

/// Dual graph of a semi-stable fiber: genus-labeled multigraph with integer
/// edge thicknesses, legs (markings at a vertex) and positioned edge
/// markings. Values are plain data; every operation on them is a pure
/// function returning fresh graphs, so instances can be shared freely.
class DualGraph {
public:
    // ---- construction -----------------------------------------------------

    void add_vertex(VertexId id, std::int64_t genus) {
        require_fresh(vertices_.count(id), "vertex", id.value);
        vertices_[id] = VertexData{genus};
    }

    void add_edge(EdgeId id, VertexId a, VertexId b, std::int64_t thickness) {
        require_fresh(edges_.count(id), "edge", id.value);
        // Ends are stored sorted; marking anchors carry the orientation.
        if (b < a) std::swap(a, b);
        edges_[id] = EdgeData{{a, b}, thickness};
    }

    void add_loop(EdgeId id, VertexId v, std::int64_t thickness) { add_edge(id, v, v, thickness); }

    void add_leg(LegId id, VertexId v) {
        require_fresh(legs_.count(id), "leg", id.value);
        legs_[id] = v;
    }

    void add_marking(MarkingId id, EdgeId e, VertexId from, Rational position) {
        require_fresh(markings_.count(id), "marking", id.value);
        markings_[id] = EdgeMarking{e, from, position};
    }

    void erase_vertex(VertexId v) { vertices_.erase(v); }
    void erase_edge(EdgeId e) { edges_.erase(e); }
    void erase_leg(LegId l) { legs_.erase(l); }
    void erase_marking(MarkingId m) { markings_.erase(m); }
    void move_leg(LegId l, VertexId v) { legs_.at(l) = v; }
    void set_thickness(EdgeId e, std::int64_t t) { edges_.at(e).thickness = t; }
    void set_position(MarkingId m, Rational p) { markings_.at(m).position = p; }

    // ---- access -----------------------------------------------------------

    const std::map<VertexId, VertexData>& vertices() const { return vertices_; }
    const std::map<EdgeId, EdgeData>& edges() const { return edges_; }
    const std::map<LegId, VertexId>& legs() const { return legs_; }
    const std::map<MarkingId, EdgeMarking>& markings() const { return markings_; }

    bool has_vertex(VertexId v) const { return vertices_.count(v) != 0; }
    bool has_edge(EdgeId e) const { return edges_.count(e) != 0; }

    const VertexData& vertex(VertexId v) const {
        auto it = vertices_.find(v);
        if (it == vertices_.end()) {
            throw PreconditionError("unknown-vertex", "no vertex " + std::to_string(v.value));
        }
        return it->second;
    }

    const EdgeData& edge(EdgeId e) const {
        auto it = edges_.find(e);
        if (it == edges_.end()) {
            throw PreconditionError("unknown-edge", "no edge " + std::to_string(e.value));
        }
        return it->second;
    }

    /// Number of half-edges at v; a loop contributes two.
    std::int64_t valence(VertexId v) const {
        std::int64_t n = 0;
        for (const auto& [id, e] : edges_) {
            if (e.ends[0] == v) ++n;
            if (e.ends[1] == v) ++n;
        }
        return n;
    }

    std::int64_t legs_at(VertexId v) const {
        std::int64_t n = 0;
        for (const auto& [id, at] : legs_) {
            if (at == v) ++n;
        }
        return n;
    }

    std::vector<LegId> leg_ids_at(VertexId v) const {
        std::vector<LegId> out;
        for (const auto& [id, at] : legs_) {
            if (at == v) out.push_back(id);
        }
        return out;
    }

    std::vector<EdgeId> edges_at(VertexId v) const {
        std::vector<EdgeId> out;
        for (const auto& [id, e] : edges_) {
            if (e.ends[0] == v || e.ends[1] == v) out.push_back(id);
        }
        return out;
    }

    bool has_loop_at(VertexId v) const {
        for (const auto& [id, e] : edges_) {
            if (e.is_loop() && e.ends[0] == v) return true;
        }
        return false;
    }

    std::vector<MarkingId> markings_on(EdgeId e) const {
        std::vector<MarkingId> out;
        for (const auto& [id, m] : markings_) {
            if (m.edge == e) out.push_back(id);
        }
        return out;
    }

    /// Marking position re-anchored at the edge's first half-edge (slot 0).
    Rational normalized_position(const EdgeMarking& m) const {
        const EdgeData& e = edge(m.edge);
        if (e.is_loop() || m.from == e.ends[0]) return m.position;
        return Rational(e.thickness) - m.position;
    }

    std::vector<std::set<VertexId>> connected_components() const {
        std::vector<std::set<VertexId>> comps;
        std::set<VertexId> seen;
        for (const auto& [start, data] : vertices_) {
            if (seen.count(start)) continue;
            std::set<VertexId> comp;
            std::vector<VertexId> stack{start};
            while (!stack.empty()) {
                VertexId v = stack.back();
                stack.pop_back();
                if (!comp.insert(v).second) continue;
                seen.insert(v);
                for (const auto& [id, e] : edges_) {
                    if (e.ends[0] == v && !comp.count(e.ends[1])) stack.push_back(e.ends[1]);
                    if (e.ends[1] == v && !comp.count(e.ends[0])) stack.push_back(e.ends[0]);
                }
            }
            comps.push_back(std::move(comp));
        }
        return comps;
    }

    std::set<VertexId> component_of(VertexId start) const {
        std::set<VertexId> comp;
        std::vector<VertexId> stack{start};
        while (!stack.empty()) {
            VertexId v = stack.back();
            stack.pop_back();
            if (!comp.insert(v).second) continue;
            for (const auto& [id, e] : edges_) {
                if (e.ends[0] == v && !comp.count(e.ends[1])) stack.push_back(e.ends[1]);
                if (e.ends[1] == v && !comp.count(e.ends[0])) stack.push_back(e.ends[0]);
            }
        }
        return comp;
    }

    bool is_connected() const { return connected_components().size() <= 1; }

    std::int64_t max_vertex_id() const { return vertices_.empty() ? 0 : vertices_.rbegin()->first.value; }
    std::int64_t max_edge_id() const { return edges_.empty() ? 0 : edges_.rbegin()->first.value; }

    friend bool operator==(const DualGraph&, const DualGraph&) = default;

private:
    static void require_fresh(bool taken, const char* kind, std::int64_t id) {
        if (taken) {
            Diagnostics d;
            d.add("duplicate-id", {std::string(kind) + " " + std::to_string(id)},
                  "id already in use");
            throw ValidationError(std::move(d));
        }
    }

    std::map<VertexId, VertexData> vertices_;
    std::map<EdgeId, EdgeData> edges_;
    std::map<LegId, VertexId> legs_;
    std::map<MarkingId, EdgeMarking> markings_;
};

// ---- invariants -------------------------------------------------------------

/// Reports every invariant violation; an empty (error-free) report means the
/// graph is well formed.
inline Diagnostics validate_graph(const DualGraph& g) {
    Diagnostics d;
    for (const auto& [id, v] : g.vertices()) {
        if (v.genus < 0) {
            d.add("genus-negative", {"vertex " + std::to_string(id.value)},
                  "genus must be >= 0");
        }
    }
    for (const auto& [id, e] : g.edges()) {
        for (VertexId end : e.ends) {
            if (!g.has_vertex(end)) {
                d.add("edge-endpoint-missing",
                      {"edge " + std::to_string(id.value), "vertex " + std::to_string(end.value)},
                      "edge attached to unknown vertex");
            }
        }
        if (e.thickness < 1) {
            d.add("thickness-positive", {"edge " + std::to_string(id.value)},
                  "thickness must be a positive integer");
        }
    }
    for (const auto& [id, at] : g.legs()) {
        if (!g.has_vertex(at)) {
            d.add("leg-vertex-missing",
                  {"leg " + std::to_string(id.value), "vertex " + std::to_string(at.value)},
                  "leg attached to unknown vertex");
        }
    }
    for (const auto& [id, m] : g.markings()) {
        if (!g.has_edge(m.edge)) {
            d.add("marking-edge-missing",
                  {"marking " + std::to_string(id.value), "edge " + std::to_string(m.edge.value)},
                  "marking placed on unknown edge");
            continue;
        }
        const EdgeData& e = g.edge(m.edge);
        if (m.from != e.ends[0] && m.from != e.ends[1]) {
            d.add("marking-anchor-invalid",
                  {"marking " + std::to_string(id.value), "vertex " + std::to_string(m.from.value)},
                  "orientation anchor is not an endpoint of the marked edge");
            continue;
        }
        if (!(m.position > Rational(0) && m.position < Rational(e.thickness))) {
            d.add("marking-in-interior", {"marking " + std::to_string(id.value)},
                  "position must lie strictly between 0 and the edge thickness");
        }
    }
    // Leg and marking ids share one namespace.
    for (const auto& [lid, at] : g.legs()) {
        if (g.markings().count(MarkingId(lid.value))) {
            d.add("leg-marking-id-clash",
                  {"leg " + std::to_string(lid.value), "marking " + std::to_string(lid.value)},
                  "marking ids and leg ids must be disjoint");
        }
    }
    // Two markings at one metric point cannot be separated without contact
    // order data, which the graph does not carry.
    std::map<EdgeId, std::vector<std::pair<Rational, MarkingId>>> by_edge;
    for (const auto& [id, m] : g.markings()) {
        if (!g.has_edge(m.edge)) continue;
        const EdgeData& e = g.edge(m.edge);
        if (m.from != e.ends[0] && m.from != e.ends[1]) continue;
        by_edge[m.edge].push_back({g.normalized_position(m), id});
    }
    for (auto& [eid, positions] : by_edge) {
        std::sort(positions.begin(), positions.end());
        for (std::size_t i = 1; i < positions.size(); ++i) {
            if (positions[i].first == positions[i - 1].first) {
                d.add("marking-collision",
                      {"marking " + std::to_string(positions[i - 1].second.value),
                       "marking " + std::to_string(positions[i].second.value)},
                      "two markings at the same metric point");
            }
        }
    }
    return d;
}

// ---- basic invariants of the fiber ------------------------------------------

/// Degree of the relative dualizing sheaf on the component of v:
/// 2 genus(v) - 2 + valence(v). With `include_markings`, legs at v are added
/// (edge markings must first be turned into legs by subdivision).
inline std::int64_t omega_degree(const DualGraph& g, VertexId v, bool include_markings = false) {
    const VertexData& data = g.vertex(v);
    if (include_markings && !g.markings().empty()) {
        throw PreconditionError("edge-markings-present",
                                "marked degree counts legs only; convert edge markings to legs "
                                "via base_change and desingularize first");
    }
    std::int64_t deg = 2 * data.genus - 2 + g.valence(v);
    if (include_markings) deg += g.legs_at(v);
    return deg;
}

/// First Betti number plus the sum of the vertex genera.
inline std::int64_t arithmetic_genus(const DualGraph& g) {
    if (g.vertices().empty()) {
        throw PreconditionError("empty-graph", "arithmetic genus needs at least one vertex");
    }
    if (!g.is_connected()) {
        throw PreconditionError("disconnected", "arithmetic genus requires a connected graph");
    }
    std::int64_t b1 = static_cast<std::int64_t>(g.edges().size()) -
                      static_cast<std::int64_t>(g.vertices().size()) + 1;
    std::int64_t total = b1;
    for (const auto& [id, v] : g.vertices()) total += v.genus;
    return total;
}

} // namespace ssred

#endif // SSRED_DUAL_GRAPH_HPP
