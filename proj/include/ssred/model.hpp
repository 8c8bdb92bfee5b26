#ifndef SSRED_MODEL_HPP
#define SSRED_MODEL_HPP

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ssred/canonical.hpp"
#include "ssred/dual_graph.hpp"
#include "ssred/graph_ops.hpp"

namespace ssred {

/// A normal model presented through its minimal desingularization: a regular
/// semi-stable top graph together with the exceptional vertex set of the
/// resolution.
struct Model {
    DualGraph top;
    std::set<VertexId> exceptional;

    friend bool operator==(const Model&, const Model&) = default;
};

struct HullResult {
    DualGraph hull;
    ContractionTrace trace;
    std::set<VertexId> kept_exceptional;
};

/// Model invariants. `require_regular` is dropped on the marked-hull path,
/// which re-regularizes by desingularizing; `allow_marked_exceptional`
/// likewise, since a marked hull may keep marked exceptional components.
/// `allow_minus_one` is for cover hulls, whose exceptional sets describe
/// vertices permitted to contract over an arbitrary dominated model, where
/// blown-up smooth points legitimately leave exceptional (-1)-curves.
inline Diagnostics validate_model(const DualGraph& top, const std::set<VertexId>& exceptional,
                                  bool require_regular = true,
                                  bool allow_marked_exceptional = false,
                                  bool allow_minus_one = false) {
    Diagnostics d = validate_graph(top);
    for (VertexId v : exceptional) {
        if (!top.has_vertex(v)) {
            d.add("unknown-exceptional", {"vertex " + std::to_string(v.value)},
                  "exceptional vertex not in graph");
        }
    }
    if (!d.ok()) return d;
    if (require_regular) {
        for (const auto& [eid, e] : top.edges()) {
            if (e.thickness != 1) {
                d.add("not-regular", {"edge " + std::to_string(eid.value)},
                      "model tops must have all thicknesses 1");
            }
        }
    }
    for (VertexId v : exceptional) {
        bool marked = top.legs_at(v) > 0;
        if (!allow_minus_one && top.vertex(v).genus == 0 && top.valence(v) == 1 && !marked) {
            d.add("(-1)-in-exceptional", {"vertex " + std::to_string(v.value)},
                  "a minimal desingularization has no exceptional (-1)-curve");
        }
        if (marked && !allow_marked_exceptional) {
            d.add("marked-exceptional", {"vertex " + std::to_string(v.value)},
                  "legs may not sit on exceptional vertices");
        }
    }
    for (const auto& comp : top.connected_components()) {
        bool all = !comp.empty();
        for (VertexId v : comp) {
            if (!exceptional.count(v)) {
                all = false;
                break;
            }
        }
        if (all) {
            d.add("full-component-exceptional",
                  {"vertex " + std::to_string(comp.begin()->value)},
                  "a connected component lies entirely in the exceptional set");
        }
    }
    return d;
}

inline Model make_model(DualGraph top, std::set<VertexId> exceptional) {
    Diagnostics d = validate_model(top, exceptional);
    if (!d.ok()) throw ValidationError(std::move(d));
    return Model{std::move(top), std::move(exceptional)};
}

/// True when no semi-stable model sits strictly between the presented top
/// and the model: every exceptional component has positive omega-degree.
inline bool is_relatively_minimal(const Model& m) {
    for (VertexId v : m.exceptional) {
        if (omega_degree(m.top, v) <= 0) return false;
    }
    return true;
}

/// Contracts the (-2)-curves in the exceptional locus; the result is the
/// minimal semi-stable model dominating the presented model.
inline HullResult stable_hull(const Model& m) {
    Diagnostics d = validate_model(m.top, m.exceptional);
    if (!d.ok()) throw ValidationError(std::move(d));
    std::set<VertexId> victims;
    for (VertexId v : m.exceptional) {
        if (m.top.vertex(v).genus == 0 && m.top.valence(v) == 2) victims.insert(v);
    }
    ContractResult c = contract(m.top, victims);
    HullResult res{std::move(c.graph), std::move(c.trace), {}};
    for (VertexId v : m.exceptional) {
        if (!victims.count(v)) res.kept_exceptional.insert(v);
    }
    for (VertexId v : res.kept_exceptional) {
        if (omega_degree(res.hull, v) <= 0) {
            throw InternalError("kept exceptional vertex with non-positive omega-degree");
        }
    }
    return res;
}

namespace detail {

inline std::int64_t omega_marked(const DualGraph& g, VertexId v) {
    return 2 * g.vertex(v).genus - 2 + g.valence(v) + g.legs_at(v);
}

/// Repeatedly contracts, in ascending id order, vertices from `pool` whose
/// marked omega-degree is <= 0, never collapsing a whole component. Returns
/// the final graph, the composed trace from `start`, and the survivors of
/// `pool`.
struct MarkedLoopResult {
    DualGraph graph;
    ContractionTrace trace;
    std::set<VertexId> kept;
};

inline MarkedLoopResult marked_contraction_loop(const DualGraph& start,
                                                std::set<VertexId> pool) {
    MarkedLoopResult res{start, ContractionTrace::identity(start), std::move(pool)};
    bool progress = true;
    while (progress) {
        progress = false;
        for (VertexId v : res.kept) {
            if (omega_marked(res.graph, v) > 0) continue;
            std::int64_t val = res.graph.valence(v);
            if (val == 0 || (val == 2 && res.graph.has_loop_at(v))) continue; // whole component
            ContractResult step = detail::contract_one_marked(res.graph, v);
            res.trace = res.trace.compose(start, step.trace);
            res.graph = std::move(step.graph);
            res.kept.erase(v);
            progress = true;
            break;
        }
    }
    return res;
}

} // namespace detail

/// Stable marked hull of a model presentation. Accepts non-regular tops
/// (e.g. after a base change): the top is desingularized first, which turns
/// integral edge markings into legs at the inserted vertices; non-integral
/// markings are rejected with the required splitting index. Exceptional
/// vertices are then contracted while their omega(M)-degree stays <= 0.
inline HullResult stable_marked_hull(const DualGraph& top, const std::set<VertexId>& exceptional) {
    Diagnostics dg = validate_graph(top);
    if (!dg.ok()) throw ValidationError(std::move(dg));
    std::int64_t d = splitting_index(top);
    if (d > 1) {
        throw PreconditionError("non-integral-marking",
                                "edge markings need a base change of index " + std::to_string(d),
                                d);
    }
    DesingularizeResult des = desingularize(top);
    std::set<VertexId> pool = exceptional;
    pool.insert(des.exceptional.begin(), des.exceptional.end());
    Diagnostics dm = validate_model(des.graph, pool, /*require_regular=*/true,
                                    /*allow_marked_exceptional=*/true);
    if (!dm.ok()) throw ValidationError(std::move(dm));

    detail::MarkedLoopResult loop = detail::marked_contraction_loop(des.graph, std::move(pool));
    for (VertexId v : loop.kept) {
        if (detail::omega_marked(loop.graph, v) <= 0) {
            throw InternalError("kept exceptional vertex with non-positive omega(M)-degree");
        }
    }
    return HullResult{std::move(loop.graph), std::move(loop.trace), std::move(loop.kept)};
}

inline HullResult stable_marked_hull(const Model& m) {
    return stable_marked_hull(m.top, m.exceptional);
}

/// Stable marked model of a semi-stable graph with legs: contracts any
/// vertex of non-positive omega(M)-degree until every component satisfies
/// deg omega(M) > 0. Requires the stable type 2g - 2 + #markings >= 1.
inline DualGraph stable_marked_model(const DualGraph& g) {
    Diagnostics dg = validate_graph(g);
    if (!dg.ok()) throw ValidationError(std::move(dg));
    std::int64_t marks =
        static_cast<std::int64_t>(g.legs().size()) + static_cast<std::int64_t>(g.markings().size());
    std::int64_t genus = arithmetic_genus(g); // also rejects disconnected graphs
    if (2 * genus - 2 + marks < 1) {
        throw PreconditionError("unstable-type",
                                "2g - 2 + #markings = " + std::to_string(2 * genus - 2 + marks) +
                                    " < 1: no stable marked model exists");
    }
    DualGraph work = g;
    if (!g.markings().empty()) {
        std::int64_t d = splitting_index(g);
        if (d > 1) {
            throw PreconditionError("non-integral-marking",
                                    "edge markings need a base change of index " + std::to_string(d),
                                    d);
        }
        work = desingularize(g).graph;
    }
    std::set<VertexId> pool;
    for (const auto& [v, data] : work.vertices()) pool.insert(v);
    detail::MarkedLoopResult loop = detail::marked_contraction_loop(work, std::move(pool));
    for (const auto& [v, data] : loop.graph.vertices()) {
        if (detail::omega_marked(loop.graph, v) < 1) {
            throw InternalError("stable marked model retains a non-positive omega(M)-degree");
        }
    }
    return loop.graph;
}

/// Smallest model dominated by the common top that dominates both inputs:
/// intersect the exceptional sets.
inline Model join_models(const Model& m1, const Model& m2) {
    if (!(m1.top == m2.top)) {
        throw PreconditionError("different-top",
                                "join is defined for models presented on one desingularization");
    }
    std::set<VertexId> meet;
    std::set_intersection(m1.exceptional.begin(), m1.exceptional.end(), m2.exceptional.begin(),
                          m2.exceptional.end(), std::inserter(meet, meet.begin()));
    return make_model(m1.top, std::move(meet));
}

} // namespace ssred

#endif // SSRED_MODEL_HPP
