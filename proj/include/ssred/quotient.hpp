#ifndef SSRED_QUOTIENT_HPP
#define SSRED_QUOTIENT_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ssred/cover.hpp"
#include "ssred/dual_graph.hpp"

namespace ssred {

/// A graph automorphism at half-edge granularity: `edge_map` records the
/// image edge and whether the two half-edges swap sides. A group acting
/// through a quotient is passed as a list with repetitions (one entry per
/// group element), so stabilizer orders count kernel elements too.
struct GraphAutomorphism {
    std::map<VertexId, VertexId> vertex_map;
    std::map<EdgeId, std::pair<EdgeId, bool>> edge_map;
    std::map<LegId, LegId> leg_map;

    friend bool operator==(const GraphAutomorphism&, const GraphAutomorphism&) = default;

    static GraphAutomorphism identity(const DualGraph& g) {
        GraphAutomorphism a;
        for (const auto& [v, data] : g.vertices()) a.vertex_map[v] = v;
        for (const auto& [e, data] : g.edges()) a.edge_map[e] = {e, false};
        for (const auto& [l, at] : g.legs()) a.leg_map[l] = l;
        return a;
    }

    GraphAutomorphism compose(const GraphAutomorphism& inner) const {
        GraphAutomorphism out;
        for (const auto& [v, img] : inner.vertex_map) out.vertex_map[v] = vertex_map.at(img);
        for (const auto& [e, img] : inner.edge_map) {
            auto [e2, flip2] = edge_map.at(img.first);
            out.edge_map[e] = {e2, img.second != flip2};
        }
        for (const auto& [l, img] : inner.leg_map) out.leg_map[l] = leg_map.at(img);
        return out;
    }
};

namespace detail {

inline Diagnostics validate_automorphism(const DualGraph& g, const GraphAutomorphism& a,
                                         std::size_t index) {
    Diagnostics d;
    std::string el = "element " + std::to_string(index);
    std::set<VertexId> vimg;
    for (const auto& [v, data] : g.vertices()) {
        auto it = a.vertex_map.find(v);
        if (it == a.vertex_map.end() || !g.has_vertex(it->second)) {
            d.add("not-an-automorphism", {el, vid(v)}, "vertex map is not a permutation");
            continue;
        }
        vimg.insert(it->second);
        if (g.vertex(it->second).genus != g.vertex(v).genus) {
            d.add("genus-not-invariant", {el, vid(v)}, "action must preserve genus");
        }
    }
    if (vimg.size() != g.vertices().size()) {
        d.add("not-an-automorphism", {el}, "vertex map is not a bijection");
    }
    std::set<EdgeId> eimg;
    for (const auto& [e, data] : g.edges()) {
        auto it = a.edge_map.find(e);
        if (it == a.edge_map.end() || !g.has_edge(it->second.first)) {
            d.add("not-an-automorphism", {el, eid_str(e)}, "edge map is not a permutation");
            continue;
        }
        eimg.insert(it->second.first);
        const EdgeData& src = g.edge(e);
        const EdgeData& dst = g.edge(it->second.first);
        if (dst.thickness != src.thickness) {
            d.add("thickness-not-invariant", {el, eid_str(e)}, "action must preserve thickness");
        }
        bool flip = it->second.second;
        VertexId want0 = a.vertex_map.count(src.ends[flip ? 1 : 0])
                             ? a.vertex_map.at(src.ends[flip ? 1 : 0])
                             : VertexId{-1};
        VertexId want1 = a.vertex_map.count(src.ends[flip ? 0 : 1])
                             ? a.vertex_map.at(src.ends[flip ? 0 : 1])
                             : VertexId{-1};
        if (dst.ends[0] != want0 || dst.ends[1] != want1) {
            d.add("action-endpoint-mismatch", {el, eid_str(e)},
                  "edge image disagrees with the vertex map at half-edge level");
        }
    }
    if (eimg.size() != g.edges().size()) {
        d.add("not-an-automorphism", {el}, "edge map is not a bijection");
    }
    std::set<LegId> limg;
    for (const auto& [l, at] : g.legs()) {
        auto it = a.leg_map.find(l);
        if (it == a.leg_map.end() || !g.legs().count(it->second)) {
            d.add("not-an-automorphism", {el, lid_str(l)}, "leg map is not a permutation");
            continue;
        }
        limg.insert(it->second);
        if (a.vertex_map.count(at) && g.legs().at(it->second) != a.vertex_map.at(at)) {
            d.add("leg-not-invariant", {el, lid_str(l)}, "legs must follow the vertex map");
        }
    }
    if (limg.size() != g.legs().size()) {
        d.add("not-an-automorphism", {el}, "leg map is not a bijection");
    }
    return d;
}

} // namespace detail

/// Quotient of a fiber by a finite group action, returned as the cover
/// datum g -> g/G. Vertices and edges become orbits; an edge with
/// stabilizer of order k acquires thickness k * t (locally uv = pi^t maps
/// to u'v' = pi^{kt}) and dilation k; local vertex degrees are stabilizer
/// orders and N is the group order. The genus of a quotient component is
/// not determined by graph data: it is copied unless `quotient_genera`
/// supplies it, in which case a Riemann-Hurwitz consistency check runs.
inline CoverDatum quotient_by_action(
    const DualGraph& g, const std::vector<GraphAutomorphism>& action,
    const std::map<EdgeId, std::int64_t>& edge_stabilizer_orders,
    const std::optional<std::map<VertexId, std::int64_t>>& quotient_genera = std::nullopt) {
    Diagnostics d = validate_graph(g);
    if (!d.ok()) throw ValidationError(std::move(d));
    if (!g.markings().empty()) {
        throw PreconditionError("edge-markings-unsupported",
                                "quotients act on graphs with legs only; resolve edge markings "
                                "first");
    }
    if (action.empty()) {
        throw PreconditionError("not-a-group", "the action list must contain the identity");
    }
    Diagnostics da;
    for (std::size_t i = 0; i < action.size(); ++i) {
        da.merge(detail::validate_automorphism(g, action[i], i));
    }
    if (!da.ok()) throw ValidationError(std::move(da));

    // Edge inversions (a half-edge mapped to its partner) would fold an edge
    // onto itself and are excluded.
    Diagnostics dinv;
    for (std::size_t i = 0; i < action.size(); ++i) {
        for (const auto& [e, img] : action[i].edge_map) {
            if (img.first == e && img.second) {
                dinv.add("edge-inversion",
                         {"element " + std::to_string(i), detail::eid_str(e)},
                         "group element maps a half-edge to its partner");
            }
        }
    }
    if (!dinv.ok()) throw ValidationError(std::move(dinv));

    // Group structure: the distinct automorphisms must form a group and
    // every one must occur with the same multiplicity (the kernel order).
    std::vector<GraphAutomorphism> distinct;
    std::vector<std::size_t> multiplicity;
    for (const auto& a : action) {
        auto it = std::find(distinct.begin(), distinct.end(), a);
        if (it == distinct.end()) {
            distinct.push_back(a);
            multiplicity.push_back(1);
        } else {
            ++multiplicity[static_cast<std::size_t>(it - distinct.begin())];
        }
    }
    Diagnostics dg;
    if (std::set<std::size_t>(multiplicity.begin(), multiplicity.end()).size() > 1) {
        dg.add("not-a-group", {}, "elements occur with unequal multiplicities");
    }
    if (std::find(distinct.begin(), distinct.end(), GraphAutomorphism::identity(g)) ==
        distinct.end()) {
        dg.add("not-a-group", {}, "identity element missing");
    }
    for (const auto& a : distinct) {
        for (const auto& b : distinct) {
            if (std::find(distinct.begin(), distinct.end(), a.compose(b)) == distinct.end()) {
                dg.add("not-a-group", {}, "composition leaves the element list");
            }
        }
    }
    if (!dg.ok()) throw ValidationError(std::move(dg));

    auto vertex_stab = [&](VertexId v) {
        std::int64_t n = 0;
        for (const auto& a : action) {
            if (a.vertex_map.at(v) == v) ++n;
        }
        return n;
    };
    auto edge_stab = [&](EdgeId e) {
        std::int64_t n = 0;
        for (const auto& a : action) {
            if (a.edge_map.at(e).first == e) ++n;
        }
        return n;
    };
    auto leg_stab = [&](LegId l) {
        std::int64_t n = 0;
        for (const auto& a : action) {
            if (a.leg_map.at(l) == l) ++n;
        }
        return n;
    };

    Diagnostics dstab;
    for (const auto& [e, data] : g.edges()) {
        auto it = edge_stabilizer_orders.find(e);
        std::int64_t computed = edge_stab(e);
        if (it == edge_stabilizer_orders.end() || it->second != computed) {
            dstab.add("inconsistent-stabilizers", {detail::eid_str(e)},
                      "stated stabilizer order " +
                          (it == edge_stabilizer_orders.end() ? std::string("(missing)")
                                                              : std::to_string(it->second)) +
                          " differs from the action's " + std::to_string(computed));
        }
    }
    if (!dstab.ok()) throw ValidationError(std::move(dstab));

    // Orbits, represented by their least member.
    auto vertex_orbit_rep = [&](VertexId v) {
        VertexId rep = v;
        for (const auto& a : action) rep = std::min(rep, a.vertex_map.at(v));
        return rep;
    };
    auto edge_orbit_rep = [&](EdgeId e) {
        EdgeId rep = e;
        for (const auto& a : action) rep = std::min(rep, a.edge_map.at(e).first);
        return rep;
    };
    auto leg_orbit_rep = [&](LegId l) {
        LegId rep = l;
        for (const auto& a : action) rep = std::min(rep, a.leg_map.at(l));
        return rep;
    };

    CoverDatum out;
    out.source = g;
    out.global_degree = static_cast<std::int64_t>(action.size());

    std::map<VertexId, std::int64_t> qgenus;
    if (quotient_genera) {
        for (const auto& [v, gen] : *quotient_genera) {
            if (!g.has_vertex(v)) {
                Diagnostics dq;
                dq.add("unknown-vertex", {detail::vid(v)}, "quotient genus for unknown vertex");
                throw ValidationError(std::move(dq));
            }
            VertexId rep = vertex_orbit_rep(v);
            auto it = qgenus.find(rep);
            if (it != qgenus.end() && it->second != gen) {
                Diagnostics dq;
                dq.add("inconsistent-quotient-genus", {detail::vid(v)},
                       "two different genera supplied for one orbit");
                throw ValidationError(std::move(dq));
            }
            qgenus[rep] = gen;
        }
    }

    for (const auto& [v, data] : g.vertices()) {
        VertexId rep = vertex_orbit_rep(v);
        out.vertex_map[v] = rep;
        out.vertex_degree[v] = vertex_stab(v);
        if (!out.target.has_vertex(rep)) {
            auto it = qgenus.find(rep);
            out.target.add_vertex(rep, it == qgenus.end() ? data.genus : it->second);
        }
    }
    for (const auto& [e, data] : g.edges()) {
        EdgeId rep = edge_orbit_rep(e);
        out.edge_map[e] = rep;
        out.edge_dilation[e] = edge_stab(e);
        if (!out.target.has_edge(rep)) {
            const EdgeData& rd = g.edge(rep);
            out.target.add_edge(rep, vertex_orbit_rep(rd.ends[0]), vertex_orbit_rep(rd.ends[1]),
                                rd.thickness * edge_stab(rep));
        }
    }
    for (const auto& [l, at] : g.legs()) {
        LegId rep = leg_orbit_rep(l);
        out.leg_map[l] = rep;
        out.leg_degree[l] = leg_stab(l);
        if (!out.target.legs().count(rep)) {
            out.target.add_leg(rep, vertex_orbit_rep(g.legs().at(rep)));
        }
    }

    Diagnostics dc = validate_cover(out);
    if (!dc.ok()) {
        throw InternalError("quotient cover fails the cover laws: " + dc.summary());
    }
    if (quotient_genera) {
        Diagnostics drh;
        for (const auto& [v, data] : g.vertices()) {
            if (rh_defect(out, v) < 0) {
                drh.add("rh-negative", {detail::vid(v)},
                        "supplied quotient genus violates Riemann-Hurwitz at this vertex");
            }
        }
        if (!drh.ok()) throw ValidationError(std::move(drh));
    }
    return out;
}

} // namespace ssred

#endif // SSRED_QUOTIENT_HPP
