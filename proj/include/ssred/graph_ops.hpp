#ifndef SSRED_GRAPH_OPS_HPP
#define SSRED_GRAPH_OPS_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "ssred/dual_graph.hpp"

namespace ssred {

/// Image of a contracted element: either a surviving vertex or a merged edge.
using TraceTarget = std::variant<VertexId, EdgeId>;

/// Vertex/edge correspondence from a finer graph onto a coarser one, as
/// produced by a contraction (input -> output) or a desingularization
/// (output -> input). Enables round-trip and commutation tests.
struct ContractionTrace {
    std::map<VertexId, TraceTarget> vertex_image;
    std::map<EdgeId, TraceTarget> edge_image;
    /// For each merged edge of the coarse graph, the thickness of every fine
    /// edge it absorbs, listed along the chain; the sum equals the coarse
    /// thickness.
    std::map<EdgeId, std::vector<std::int64_t>> merged_thickness_witness;

    static ContractionTrace identity(const DualGraph& g) {
        ContractionTrace t;
        for (const auto& [v, data] : g.vertices()) t.vertex_image[v] = v;
        for (const auto& [e, data] : g.edges()) t.edge_image[e] = e;
        return t;
    }

    /// Composes `this` (fine -> mid) with `next` (mid -> coarse). `fine` is
    /// the graph this trace starts from; its thicknesses rebuild the merge
    /// witnesses, listed in ascending fine edge id.
    ContractionTrace compose(const DualGraph& fine, const ContractionTrace& next) const {
        auto resolve = [&next](const TraceTarget& t) -> TraceTarget {
            if (std::holds_alternative<VertexId>(t)) {
                return next.vertex_image.at(std::get<VertexId>(t));
            }
            return next.edge_image.at(std::get<EdgeId>(t));
        };
        ContractionTrace out;
        for (const auto& [v, t] : vertex_image) out.vertex_image[v] = resolve(t);
        for (const auto& [e, t] : edge_image) out.edge_image[e] = resolve(t);
        std::map<EdgeId, std::vector<std::int64_t>> absorbed;
        for (const auto& [fe, t] : out.edge_image) {
            if (std::holds_alternative<EdgeId>(t)) {
                absorbed[std::get<EdgeId>(t)].push_back(fine.edge(fe).thickness);
            }
        }
        for (auto& [ce, parts] : absorbed) {
            if (parts.size() > 1) out.merged_thickness_witness[ce] = std::move(parts);
        }
        return out;
    }
};

struct DesingularizeResult {
    DualGraph graph;
    std::set<VertexId> exceptional; ///< vertices inserted by the subdivision
    ContractionTrace trace;         ///< maps the subdivided graph onto the input
};

struct ContractResult {
    DualGraph graph;
    ContractionTrace trace; ///< maps the input onto the contracted graph
};

/// Least base-change index that makes every edge-marking position integral
/// (1 when there is nothing to split).
inline std::int64_t splitting_index(const DualGraph& g) {
    std::int64_t d = 1;
    for (const auto& [id, m] : g.markings()) {
        d = std::lcm(d, m.position.denominator());
    }
    return d;
}

/// Ramified base extension of index e: every thickness and every marking
/// position is multiplied by e; genera and legs are untouched.
inline DualGraph base_change(const DualGraph& g, std::int64_t e) {
    if (e < 1) {
        throw PreconditionError("zero-index", "base change index must be a positive integer");
    }
    DualGraph out = g;
    for (const auto& [id, data] : g.edges()) {
        out.set_thickness(id, data.thickness * e);
    }
    for (const auto& [id, m] : g.markings()) {
        out.set_position(id, m.position * e);
    }
    return out;
}

/// Replaces every edge of thickness t by a chain of t unit edges through
/// t-1 fresh genus-0 vertices (the minimal resolution of an A_{t-1} node).
/// Edge markings, which must sit at integer positions, become legs at the
/// corresponding inserted vertices.
inline DesingularizeResult desingularize(const DualGraph& g) {
    Diagnostics d = validate_graph(g);
    if (!d.ok()) throw ValidationError(std::move(d));
    for (const auto& [id, m] : g.markings()) {
        if (!is_integral(m.position)) {
            throw PreconditionError(
                "non-integral-marking",
                "marking " + std::to_string(id.value) + " at " + to_string(m.position) +
                    " needs a base change of index " + std::to_string(splitting_index(g)),
                splitting_index(g));
        }
    }

    DesingularizeResult res;
    res.trace = ContractionTrace{};
    DualGraph& out = res.graph;
    for (const auto& [v, data] : g.vertices()) {
        out.add_vertex(v, data.genus);
        res.trace.vertex_image[v] = v;
    }
    for (const auto& [l, at] : g.legs()) out.add_leg(l, at);

    std::int64_t next_vertex = g.max_vertex_id() + 1;
    std::int64_t next_edge = g.max_edge_id() + 1;

    for (const auto& [eid, e] : g.edges()) {
        if (e.thickness == 1) {
            out.add_edge(eid, e.ends[0], e.ends[1], 1);
            res.trace.edge_image[eid] = eid;
            continue;
        }
        // Chain runs from ends[0] to ends[1]; the first segment keeps the
        // original edge id.
        std::vector<VertexId> chain{e.ends[0]};
        for (std::int64_t k = 1; k < e.thickness; ++k) {
            VertexId nv{next_vertex++};
            out.add_vertex(nv, 0);
            res.exceptional.insert(nv);
            res.trace.vertex_image[nv] = eid;
            chain.push_back(nv);
        }
        chain.push_back(e.ends[1]);
        for (std::int64_t k = 0; k < e.thickness; ++k) {
            EdgeId seg = (k == 0) ? eid : EdgeId{next_edge++};
            out.add_edge(seg, chain[static_cast<std::size_t>(k)],
                         chain[static_cast<std::size_t>(k + 1)], 1);
            res.trace.edge_image[seg] = eid;
        }
        res.trace.merged_thickness_witness[eid] =
            std::vector<std::int64_t>(static_cast<std::size_t>(e.thickness), 1);
        // Integer marking positions pick out the inserted chain vertices.
        for (MarkingId mid : g.markings_on(eid)) {
            Rational pos = g.normalized_position(g.markings().at(mid));
            std::int64_t k = pos.numerator();
            out.add_leg(LegId{mid.value}, chain[static_cast<std::size_t>(k)]);
        }
    }
    return res;
}

namespace detail {

/// Victim chains as assembled by contract(): an ordered path of victims with
/// the ordered edge sequence through it and the surviving attachment
/// vertices at each end (if any).
struct VictimChain {
    std::vector<VertexId> path;
    std::vector<EdgeId> edge_sequence;   ///< includes external edges when present
    std::optional<VertexId> left_anchor; ///< survivor before path.front()
    std::optional<VertexId> right_anchor;///< survivor after path.back()
};

inline std::vector<VictimChain> victim_chains(const DualGraph& g,
                                              const std::set<VertexId>& victims) {
    std::vector<VictimChain> chains;
    std::set<VertexId> seen;
    for (VertexId start : victims) {
        if (seen.count(start)) continue;
        // Walk to one end of the victim path.
        std::vector<VertexId> path{start};
        std::set<VertexId> in_path{start};
        auto victim_neighbors = [&](VertexId v, const std::set<VertexId>& skip) {
            std::vector<std::pair<VertexId, EdgeId>> out;
            for (EdgeId eid : g.edges_at(v)) {
                const EdgeData& e = g.edge(eid);
                VertexId other = (e.ends[0] == v) ? e.ends[1] : e.ends[0];
                if (victims.count(other) && !skip.count(other)) out.push_back({other, eid});
            }
            return out;
        };
        while (true) {
            auto nb = victim_neighbors(path.front(), in_path);
            if (nb.empty()) break;
            path.insert(path.begin(), nb.front().first);
            in_path.insert(nb.front().first);
        }
        while (true) {
            auto nb = victim_neighbors(path.back(), in_path);
            if (nb.empty()) break;
            path.push_back(nb.front().first);
            in_path.insert(nb.front().first);
        }
        for (VertexId v : path) seen.insert(v);

        VictimChain chain;
        chain.path = path;
        // Edge sequence: optional left external, internal edges, optional
        // right external. Victims have valence <= 2, so each end has at most
        // one external edge.
        auto external_edge = [&](VertexId v, std::optional<EdgeId> skip) -> std::optional<std::pair<EdgeId, VertexId>> {
            for (EdgeId eid : g.edges_at(v)) {
                if (skip && eid == *skip) continue;
                const EdgeData& e = g.edge(eid);
                VertexId other = (e.ends[0] == v) ? e.ends[1] : e.ends[0];
                if (!victims.count(other)) return std::make_pair(eid, other);
            }
            return std::nullopt;
        };
        std::vector<EdgeId> internals;
        for (std::size_t i = 0; i + 1 < path.size(); ++i) {
            for (EdgeId eid : g.edges_at(path[i])) {
                const EdgeData& e = g.edge(eid);
                VertexId other = (e.ends[0] == path[i]) ? e.ends[1] : e.ends[0];
                if (other == path[i + 1] &&
                    std::find(internals.begin(), internals.end(), eid) == internals.end()) {
                    internals.push_back(eid);
                    break;
                }
            }
        }
        std::optional<EdgeId> first_internal =
            internals.empty() ? std::nullopt : std::optional<EdgeId>(internals.front());
        std::optional<EdgeId> last_internal =
            internals.empty() ? std::nullopt : std::optional<EdgeId>(internals.back());
        auto left = external_edge(path.front(), first_internal);
        std::optional<EdgeId> left_edge;
        if (left) {
            chain.left_anchor = left->second;
            left_edge = left->first;
        }
        // For a single victim with two external edges, the second external
        // must differ from the first.
        auto right = external_edge(path.back(), path.size() == 1 ? left_edge : last_internal);
        if (right) chain.right_anchor = right->second;

        if (left) chain.edge_sequence.push_back(left->first);
        chain.edge_sequence.insert(chain.edge_sequence.end(), internals.begin(), internals.end());
        if (right) chain.edge_sequence.push_back(right->first);
        chains.push_back(std::move(chain));
    }
    std::sort(chains.begin(), chains.end(), [](const VictimChain& a, const VictimChain& b) {
        return *std::min_element(a.path.begin(), a.path.end()) <
               *std::min_element(b.path.begin(), b.path.end());
    });
    return chains;
}

} // namespace detail

/// Contracts the given vertices. Genus-0 valence-2 victims are smoothed
/// (their incident edges merge, thicknesses adding up); genus-0 valence-1
/// victims are blown down with their edge. Every victim must have
/// omega-degree <= 0, no connected component may consist of victims only,
/// and no marking may touch a victim or a victim-incident edge.
inline ContractResult contract(const DualGraph& g, const std::set<VertexId>& victims) {
    Diagnostics d;
    for (VertexId v : victims) {
        if (!g.has_vertex(v)) {
            d.add("unknown-vertex", {"vertex " + std::to_string(v.value)}, "victim not in graph");
        }
    }
    if (!d.ok()) throw ValidationError(std::move(d));
    for (VertexId v : victims) {
        if (omega_degree(g, v) > 0) {
            throw PreconditionError("omega-positive",
                                    "vertex " + std::to_string(v.value) +
                                        " has positive omega-degree and cannot be contracted");
        }
    }
    for (const auto& comp : g.connected_components()) {
        bool all = !comp.empty();
        for (VertexId v : comp) {
            if (!victims.count(v)) {
                all = false;
                break;
            }
        }
        if (all) {
            throw PreconditionError("full-component",
                                    "a connected component consists entirely of victims");
        }
    }
    for (const auto& [lid, at] : g.legs()) {
        if (victims.count(at)) {
            throw PreconditionError("marked-victim", "leg " + std::to_string(lid.value) +
                                                         " is attached to victim " +
                                                         std::to_string(at.value));
        }
    }
    for (const auto& [mid, m] : g.markings()) {
        const EdgeData& e = g.edge(m.edge);
        if (victims.count(e.ends[0]) || victims.count(e.ends[1])) {
            throw PreconditionError("marked-edge",
                                    "marking " + std::to_string(mid.value) +
                                        " sits on an edge incident to a victim");
        }
    }
    // Valences <= 2 and the full-component guard leave no room for loops at
    // victims; the victim-induced subgraph is a disjoint union of paths.
    for (VertexId v : victims) {
        if (g.has_loop_at(v)) {
            throw InternalError("victim with a loop survived the full-component check");
        }
    }

    ContractResult res;
    res.trace = ContractionTrace{};
    DualGraph& out = res.graph;

    for (const auto& [v, data] : g.vertices()) {
        if (victims.count(v)) continue;
        out.add_vertex(v, data.genus);
        res.trace.vertex_image[v] = v;
    }
    for (const auto& [eid, e] : g.edges()) {
        if (victims.count(e.ends[0]) || victims.count(e.ends[1])) continue;
        out.add_edge(eid, e.ends[0], e.ends[1], e.thickness);
        res.trace.edge_image[eid] = eid;
    }
    for (const auto& [lid, at] : g.legs()) out.add_leg(lid, at);
    for (const auto& [mid, m] : g.markings()) out.add_marking(mid, m.edge, m.from, m.position);

    for (const auto& chain : detail::victim_chains(g, victims)) {
        if (chain.left_anchor && chain.right_anchor) {
            // Chain between two survivors merges into a single edge.
            VertexId u = *chain.left_anchor;
            VertexId w = *chain.right_anchor;
            EdgeId merged = *std::min_element(chain.edge_sequence.begin(), chain.edge_sequence.end());
            std::vector<std::int64_t> witness;
            for (EdgeId eid : chain.edge_sequence) witness.push_back(g.edge(eid).thickness);
            // Witness runs from the smaller-id anchor; for a loop, from the
            // end whose boundary edge has the smaller id.
            bool reversed = (u == w) ? chain.edge_sequence.back() < chain.edge_sequence.front()
                                     : w < u;
            if (reversed) {
                std::reverse(witness.begin(), witness.end());
                std::swap(u, w);
            }
            std::int64_t total = std::accumulate(witness.begin(), witness.end(), std::int64_t{0});
            out.add_edge(merged, u, w, total);
            for (EdgeId eid : chain.edge_sequence) res.trace.edge_image[eid] = merged;
            for (VertexId v : chain.path) res.trace.vertex_image[v] = merged;
            res.trace.merged_thickness_witness[merged] = std::move(witness);
        } else {
            // Tree hanging off a single survivor: the whole chain blows down.
            VertexId anchor = chain.left_anchor ? *chain.left_anchor : *chain.right_anchor;
            for (VertexId v : chain.path) res.trace.vertex_image[v] = anchor;
            for (EdgeId eid : chain.edge_sequence) res.trace.edge_image[eid] = anchor;
        }
    }
    return res;
}

namespace detail {

/// Single-vertex contraction used by the marked calculus: smooths a
/// genus-0 valence-2 vertex or blows down a genus-0 valence-<=1 vertex,
/// transporting its legs to the attachment vertex. Callers gate candidates
/// by marked omega-degree, which caps transported legs at one.
inline ContractResult contract_one_marked(const DualGraph& g, VertexId v) {
    const VertexData& data = g.vertex(v);
    if (data.genus != 0) throw InternalError("marked contraction of a positive-genus vertex");
    std::int64_t val = g.valence(v);
    if (val > 2) throw InternalError("marked contraction of a vertex of valence > 2");
    if (val == 0 || g.has_loop_at(v)) {
        throw InternalError("marked contraction would collapse a whole component");
    }
    for (EdgeId eid : g.edges_at(v)) {
        if (!g.markings_on(eid).empty()) {
            throw PreconditionError("marked-edge",
                                    "edge " + std::to_string(eid.value) +
                                        " carries a marking; convert it to a leg first");
        }
    }
    std::vector<LegId> legs = g.leg_ids_at(v);
    if (val == 2) {
        if (!legs.empty()) throw InternalError("smoothing a vertex that carries a leg");
        return contract(g, {v});
    }
    // Blow-down: the unique incident edge disappears and legs at v move to
    // the attachment vertex.
    if (legs.size() > 1) throw InternalError("blow-down would merge two markings");
    EdgeId eid = g.edges_at(v).front();
    const EdgeData& e = g.edge(eid);
    VertexId anchor = (e.ends[0] == v) ? e.ends[1] : e.ends[0];
    DualGraph work = g;
    for (LegId l : legs) work.move_leg(l, anchor);
    ContractResult res = contract(work, {v});
    return res;
}

} // namespace detail

} // namespace ssred

#endif // SSRED_GRAPH_OPS_HPP
