#ifndef SSRED_COVER_HPP
#define SSRED_COVER_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ssred/dual_graph.hpp"
#include "ssred/graph_ops.hpp"
#include "ssred/model.hpp"

namespace ssred {

/// A finite cover of semi-stable fibers as a harmonic morphism of dual
/// graphs: vertex/edge maps, per-vertex local degrees d_v, per-edge
/// dilations d_e (the common ramification index of a node's two branches)
/// and the global degree. Legs map along for marked covers; `leg_degree`
/// optionally records local multiplicities at marked points (default 1).
struct CoverDatum {
    DualGraph source;
    DualGraph target;
    std::map<VertexId, VertexId> vertex_map;
    std::map<EdgeId, EdgeId> edge_map;
    std::map<VertexId, std::int64_t> vertex_degree;
    std::map<EdgeId, std::int64_t> edge_dilation;
    std::int64_t global_degree{1};
    std::map<LegId, LegId> leg_map;
    std::map<LegId, std::int64_t> leg_degree;

    std::set<VertexId> preimage(VertexId w) const {
        std::set<VertexId> out;
        for (const auto& [v, img] : vertex_map) {
            if (img == w) out.insert(v);
        }
        return out;
    }

    friend bool operator==(const CoverDatum&, const CoverDatum&) = default;
};

/// One simultaneous contraction: a target vertex together with its full
/// preimage, and the cover that remains.
struct CoverStep {
    VertexId contracted_target_vertex;
    std::set<VertexId> contracted_source_vertices;
    CoverDatum result;
};

namespace detail {

inline std::string vid(VertexId v) { return "vertex " + std::to_string(v.value); }
inline std::string eid_str(EdgeId e) { return "edge " + std::to_string(e.value); }
inline std::string lid_str(LegId l) { return "leg " + std::to_string(l.value); }

inline std::int64_t incidence(const EdgeData& e, VertexId v) {
    return (e.ends[0] == v ? 1 : 0) + (e.ends[1] == v ? 1 : 0);
}

} // namespace detail

/// Reports every violated cover law. The four laws (thickness, harmonicity,
/// degree, marked condition) are the combinatorial shadow of finiteness of
/// a morphism of semi-stable models.
inline Diagnostics validate_cover(const CoverDatum& c) {
    Diagnostics d;
    d.merge(validate_graph(c.source), "source:");
    d.merge(validate_graph(c.target), "target:");
    if (!d.ok()) return d;
    if (!c.source.is_connected() || c.source.vertices().empty()) {
        d.add("disconnected", {"source"}, "cover fibers must be connected");
    }
    if (!c.target.is_connected() || c.target.vertices().empty()) {
        d.add("disconnected", {"target"}, "cover fibers must be connected");
    }
    if (c.global_degree < 1) {
        d.add("degree-positive", {"cover"}, "global degree must be >= 1");
    }

    // vertex map: total, into the target, surjective, with positive degrees.
    for (const auto& [v, data] : c.source.vertices()) {
        if (!c.vertex_map.count(v)) {
            d.add("vertex-map-total", {detail::vid(v)}, "source vertex has no image");
        } else if (!c.target.has_vertex(c.vertex_map.at(v))) {
            d.add("vertex-map-unknown", {detail::vid(v)}, "image is not a target vertex");
        }
        if (!c.vertex_degree.count(v)) {
            d.add("vertex-map-total", {detail::vid(v)}, "source vertex has no local degree");
        } else if (c.vertex_degree.at(v) < 1) {
            d.add("degree-positive", {detail::vid(v)}, "local degree must be >= 1");
        }
    }
    for (const auto& [v, img] : c.vertex_map) {
        if (!c.source.has_vertex(v)) {
            d.add("vertex-map-unknown", {detail::vid(v)}, "map entry for unknown source vertex");
        }
    }
    for (const auto& [w, data] : c.target.vertices()) {
        bool hit = false;
        for (const auto& [v, img] : c.vertex_map) {
            if (img == w && c.source.has_vertex(v)) {
                hit = true;
                break;
            }
        }
        if (!hit) d.add("vertex-map-surjective", {detail::vid(w)}, "target vertex has no preimage");
    }

    // edge map: total, into the target, endpoint-compatible, with dilations.
    for (const auto& [e, data] : c.source.edges()) {
        if (!c.edge_map.count(e)) {
            d.add("edge-map-total", {detail::eid_str(e)}, "source edge has no image");
            continue;
        }
        EdgeId y = c.edge_map.at(e);
        if (!c.target.has_edge(y)) {
            d.add("edge-map-unknown", {detail::eid_str(e)}, "image is not a target edge");
            continue;
        }
        if (!c.edge_dilation.count(e)) {
            d.add("edge-map-total", {detail::eid_str(e)}, "source edge has no dilation");
        } else if (c.edge_dilation.at(e) < 1) {
            d.add("degree-positive", {detail::eid_str(e)}, "dilation must be >= 1");
        }
        if (c.vertex_map.count(data.ends[0]) && c.vertex_map.count(data.ends[1])) {
            const EdgeData& ty = c.target.edge(y);
            std::multiset<std::int64_t> got{c.vertex_map.at(data.ends[0]).value,
                                            c.vertex_map.at(data.ends[1]).value};
            std::multiset<std::int64_t> want{ty.ends[0].value, ty.ends[1].value};
            if (got != want) {
                d.add("edge-endpoint-compat", {detail::eid_str(e), detail::eid_str(y)},
                      "edge image is incompatible with the vertex map");
            }
        }
    }
    for (const auto& [e, img] : c.edge_map) {
        if (!c.source.has_edge(e)) {
            d.add("edge-map-unknown", {detail::eid_str(e)}, "map entry for unknown source edge");
        }
    }
    if (!d.ok()) return d;

    // Thickness law: thickness(f(e)) = d_e * thickness(e).
    for (const auto& [e, data] : c.source.edges()) {
        EdgeId y = c.edge_map.at(e);
        std::int64_t de = c.edge_dilation.at(e);
        if (c.target.edge(y).thickness != de * data.thickness) {
            d.add("thickness-law", {detail::eid_str(e), detail::eid_str(y)},
                  "target thickness " + std::to_string(c.target.edge(y).thickness) +
                      " != dilation " + std::to_string(de) + " * thickness " +
                      std::to_string(data.thickness));
        }
    }

    // Harmonicity: at every source vertex the dilations over each target
    // edge sum to d_v, loop incidences counting twice on both sides.
    for (const auto& [v, data] : c.source.vertices()) {
        VertexId w = c.vertex_map.at(v);
        std::int64_t dv = c.vertex_degree.at(v);
        for (EdgeId y : c.target.edges_at(w)) {
            std::int64_t m_y = detail::incidence(c.target.edge(y), w);
            std::int64_t sum = 0;
            for (EdgeId e : c.source.edges_at(v)) {
                if (c.edge_map.at(e) == y) {
                    sum += c.edge_dilation.at(e) * detail::incidence(c.source.edge(e), v);
                }
            }
            if (sum != dv * m_y) {
                d.add("harmonicity", {detail::vid(v), detail::eid_str(y)},
                      "dilation sum " + std::to_string(sum) + " != " + std::to_string(dv * m_y));
            }
        }
    }

    // Degree law: local degrees over each target vertex sum to N.
    for (const auto& [w, data] : c.target.vertices()) {
        std::int64_t sum = 0;
        for (const auto& [v, img] : c.vertex_map) {
            if (img == w) sum += c.vertex_degree.at(v);
        }
        if (sum != c.global_degree) {
            d.add("degree-law", {detail::vid(w)},
                  "local degrees over this vertex sum to " + std::to_string(sum) + ", not " +
                      std::to_string(c.global_degree));
        }
    }

    // Marked condition (f^{-1}(N) = M) when legs are present.
    bool marked = !c.source.legs().empty() || !c.target.legs().empty();
    if (marked) {
        for (const auto& [l, at] : c.source.legs()) {
            if (!c.leg_map.count(l)) {
                d.add("leg-map-total", {detail::lid_str(l)}, "source leg has no image");
                continue;
            }
            LegId n = c.leg_map.at(l);
            if (!c.target.legs().count(n)) {
                d.add("leg-map-unknown", {detail::lid_str(l)}, "image is not a target leg");
                continue;
            }
            if (c.target.legs().at(n) != c.vertex_map.at(at)) {
                d.add("leg-carrier-compat", {detail::lid_str(l), detail::lid_str(n)},
                      "leg image is incompatible with the vertex map");
            }
        }
        for (const auto& [l, deg] : c.leg_degree) {
            if (deg < 1) d.add("degree-positive", {detail::lid_str(l)}, "leg degree must be >= 1");
        }
        for (const auto& [n, at] : c.target.legs()) {
            bool hit = false;
            for (const auto& [l, img] : c.leg_map) {
                if (img == n && c.source.legs().count(l)) hit = true;
            }
            if (!hit) {
                d.add("leg-map-surjective", {detail::lid_str(n)}, "target leg has no preimage");
            }
        }
        if (!d.ok()) return d;
        bool degrees_explicit = true;
        for (const auto& [l, at] : c.source.legs()) {
            if (!c.leg_degree.count(l)) degrees_explicit = false;
        }
        for (const auto& [n, w] : c.target.legs()) {
            for (const auto& [v, img] : c.vertex_map) {
                if (img != w) continue;
                std::int64_t sum = 0;
                std::int64_t count = 0;
                for (const auto& [l, at] : c.source.legs()) {
                    if (at == v && c.leg_map.at(l) == n) {
                        ++count;
                        auto it = c.leg_degree.find(l);
                        sum += (it == c.leg_degree.end()) ? 1 : it->second;
                    }
                }
                if (count == 0) {
                    d.add("marked-condition", {detail::vid(v), detail::lid_str(n)},
                          "source vertex over a marked target vertex carries no leg over the "
                          "marking");
                } else if (sum != c.vertex_degree.at(v)) {
                    if (degrees_explicit) {
                        d.add("marked-condition", {detail::vid(v), detail::lid_str(n)},
                              "leg degrees over the marking sum to " + std::to_string(sum) +
                                  ", not d_v = " + std::to_string(c.vertex_degree.at(v)));
                    } else {
                        d.add("leg-degree-unspecified", {detail::vid(v), detail::lid_str(n)},
                              "default leg degrees sum to " + std::to_string(sum) +
                                  ", not d_v = " + std::to_string(c.vertex_degree.at(v)),
                              Severity::Warning);
                    }
                }
            }
        }
    }
    return d;
}

/// aut-stable criterion: every target component of non-positive
/// omega-degree is dominated by some source component of positive degree.
inline bool is_stable_cover(const CoverDatum& c) {
    Diagnostics d = validate_cover(c);
    if (!d.ok()) throw ValidationError(std::move(d));
    for (const auto& [w, data] : c.target.vertices()) {
        if (omega_degree(c.target, w) > 0) continue;
        bool dominated = false;
        for (VertexId v : c.preimage(w)) {
            if (omega_degree(c.source, v) > 0) {
                dominated = true;
                break;
            }
        }
        if (!dominated) return false;
    }
    return true;
}

/// Returns the first target vertex violating the stability criterion, as a
/// potential infinite-automorphism witness. No witness soundly implies the
/// cover is stable; a witness does not prove the automorphism group
/// infinite (finite groups can fail the criterion).
inline std::optional<VertexId> infinite_auto_certificate(const CoverDatum& c) {
    Diagnostics d = validate_cover(c);
    if (!d.ok()) throw ValidationError(std::move(d));
    for (const auto& [w, data] : c.target.vertices()) {
        if (omega_degree(c.target, w) > 0) continue;
        bool dominated = false;
        for (VertexId v : c.preimage(w)) {
            if (omega_degree(c.source, v) > 0) dominated = true;
        }
        if (!dominated) return w;
    }
    return std::nullopt;
}

/// Tame Riemann-Hurwitz defect of one source component: the smooth
/// ramification left after accounting for the branches at the nodes.
/// Negative values flag cover data no tame separable morphism realizes.
inline std::int64_t rh_defect(const CoverDatum& c, VertexId v) {
    Diagnostics d = validate_cover(c);
    if (!d.ok()) throw ValidationError(std::move(d));
    VertexId w = c.vertex_map.at(v);
    std::int64_t lhs = 2 * c.source.vertex(v).genus - 2;
    std::int64_t rhs = c.vertex_degree.at(v) * (2 * c.target.vertex(w).genus - 2);
    std::int64_t branch = 0;
    for (EdgeId e : c.source.edges_at(v)) {
        branch += (c.edge_dilation.at(e) - 1) * detail::incidence(c.source.edge(e), v);
    }
    return lhs - rhs - branch;
}

/// Base change of the whole cover: both fibers scale, dilations and degrees
/// are unchanged, so the thickness law is preserved.
inline CoverDatum base_change_cover(const CoverDatum& c, std::int64_t e) {
    Diagnostics d = validate_cover(c);
    if (!d.ok()) throw ValidationError(std::move(d));
    CoverDatum out = c;
    out.source = base_change(c.source, e);
    out.target = base_change(c.target, e);
    return out;
}

namespace detail {

inline std::int64_t cover_omega(const DualGraph& g, VertexId v, bool marked) {
    return marked ? omega_marked(g, v) : omega_degree(g, v);
}

/// Target vertices eligible for a simultaneous contraction, in ascending id
/// order. A vertex qualifies when its omega-degree (marked or not) is <= 0,
/// contracting it is a legal graph move on both sides, membership in the
/// exceptional sets holds (when given), and -- unless `gate_preimages` is
/// off -- all its preimages have non-positive omega-degree too.
inline std::vector<VertexId> contraction_candidates(const CoverDatum& c, bool marked,
                                                    const std::set<VertexId>* ex_source,
                                                    const std::set<VertexId>* ex_target,
                                                    bool gate_preimages = true) {
    std::vector<VertexId> out;
    for (const auto& [w, data] : c.target.vertices()) {
        if (ex_target && !ex_target->count(w)) continue;
        if (cover_omega(c.target, w, marked) > 0) continue;
        std::int64_t val = c.target.valence(w);
        if (val == 0 || val > 2 || c.target.has_loop_at(w)) continue;
        if (!marked && c.target.legs_at(w) > 0) continue;
        bool blocked = false;
        for (EdgeId y : c.target.edges_at(w)) {
            if (!c.target.markings_on(y).empty()) blocked = true;
        }
        if (blocked) continue;
        if (c.target.component_of(w).size() < 2) continue;
        std::set<VertexId> pre = c.preimage(w);
        if (ex_source) {
            for (VertexId v : pre) {
                if (!ex_source->count(v)) blocked = true;
            }
        }
        if (blocked) continue;
        if (gate_preimages) {
            for (VertexId v : pre) {
                if (cover_omega(c.source, v, marked) > 0) blocked = true;
            }
        }
        for (VertexId v : pre) {
            if (!marked && c.source.legs_at(v) > 0) blocked = true;
            for (EdgeId e : c.source.edges_at(v)) {
                if (!c.source.markings_on(e).empty()) blocked = true;
            }
            if (c.source.component_of(v).size() < 2) blocked = true;
        }
        if (!blocked) out.push_back(w);
    }
    return out;
}

/// Contracts target vertex w and its full preimage, rebuilding the maps.
/// Harmonicity makes every contracted source vertex carry exactly one edge
/// over each target edge at w, with dilation equal to its local degree;
/// data violating this never comes from an actual morphism and is rejected.
inline CoverStep cover_contract_step(const CoverDatum& c, VertexId w, bool marked) {
    std::set<VertexId> pre = c.preimage(w);
    std::vector<EdgeId> target_edges = c.target.edges_at(w);
    std::int64_t val = c.target.valence(w);
    if (val != 1 && val != 2) throw InternalError("contraction step on a vertex of bad valence");

    std::map<VertexId, std::vector<std::pair<EdgeId, EdgeId>>> merges; // v -> (e over y) pairs
    for (VertexId v : pre) {
        if (c.source.vertex(v).genus != 0) {
            throw InternalError("cover-step-inconsistent: preimage vertex " +
                                std::to_string(v.value) + " has positive genus");
        }
        std::vector<std::pair<EdgeId, EdgeId>> pairs;
        for (EdgeId y : target_edges) {
            std::vector<EdgeId> over;
            for (EdgeId e : c.source.edges_at(v)) {
                if (c.edge_map.at(e) == y) over.push_back(e);
            }
            if (over.size() != 1 || c.edge_dilation.at(over.front()) != c.vertex_degree.at(v)) {
                throw InternalError("cover-step-inconsistent: vertex " + std::to_string(v.value) +
                                    " does not carry exactly one edge of dilation d_v over " +
                                    "edge " + std::to_string(y.value));
            }
            pairs.push_back({over.front(), y});
        }
        merges[v] = std::move(pairs);
    }

    CoverStep step;
    step.contracted_target_vertex = w;
    step.contracted_source_vertices = pre;
    CoverDatum& out = step.result;

    ContractResult t_step = contract_one_marked(c.target, w);
    out.target = std::move(t_step.graph);
    DualGraph src = c.source;
    for (VertexId v : pre) {
        ContractResult s_step = contract_one_marked(src, v);
        src = std::move(s_step.graph);
    }
    out.source = std::move(src);

    out.global_degree = c.global_degree;
    for (const auto& [v, img] : c.vertex_map) {
        if (!pre.count(v)) out.vertex_map[v] = img;
    }
    for (const auto& [v, deg] : c.vertex_degree) {
        if (!pre.count(v)) out.vertex_degree[v] = deg;
    }
    out.leg_map = c.leg_map;
    out.leg_degree = c.leg_degree;

    std::set<EdgeId> consumed_source;
    for (const auto& [v, pairs] : merges) {
        for (const auto& [e, y] : pairs) consumed_source.insert(e);
    }
    for (const auto& [e, img] : c.edge_map) {
        if (!consumed_source.count(e)) {
            out.edge_map[e] = img;
            out.edge_dilation[e] = c.edge_dilation.at(e);
        }
    }
    if (val == 2) {
        // Smoothing: the two target edges merged into min(y1, y2); each
        // preimage vertex merged its own pair the same way.
        EdgeId merged_target = *std::min_element(target_edges.begin(), target_edges.end());
        for (const auto& [v, pairs] : merges) {
            EdgeId merged_source = std::min(pairs[0].first, pairs[1].first);
            out.edge_map[merged_source] = merged_target;
            out.edge_dilation[merged_source] = c.vertex_degree.at(v);
        }
    }

    Diagnostics dv = validate_cover(out);
    if (!dv.ok()) {
        throw InternalError("cover law violated mid-run: " + dv.summary());
    }
    if (arithmetic_genus(out.source) != arithmetic_genus(c.source) ||
        arithmetic_genus(out.target) != arithmetic_genus(c.target)) {
        throw InternalError("arithmetic genus not conserved by a cover step");
    }
    return step;
}

} // namespace detail

struct CoverContraction {
    CoverDatum datum;
    std::vector<CoverStep> steps;
};

/// Stable model of a cover: repeatedly contracts the smallest-id target
/// vertex of non-positive omega-degree all of whose preimages also have
/// non-positive omega-degree, together with its full preimage, until the
/// stability criterion holds. Requires source genus >= 2; genus 1 is
/// accepted only with the caller asserting potentially good reduction,
/// which the dual graph alone cannot decide.
inline CoverContraction stable_model_of_cover(const CoverDatum& c,
                                              bool genus_one_good_reduction = false) {
    Diagnostics d = validate_cover(c);
    if (!d.ok()) throw ValidationError(std::move(d));
    std::int64_t gs = arithmetic_genus(c.source);
    if (gs < 2 && !(gs == 1 && genus_one_good_reduction)) {
        throw PreconditionError("genus-too-small",
                                "stable models need source genus >= 2 (got " + std::to_string(gs) +
                                    "); genus 1 requires the good-reduction flag");
    }
    CoverContraction res{c, {}};
    while (true) {
        auto cands = detail::contraction_candidates(res.datum, false, nullptr, nullptr);
        if (cands.empty()) break;
        CoverStep step = detail::cover_contract_step(res.datum, cands.front(), false);
        res.datum = step.result;
        res.steps.push_back(std::move(step));
    }
    if (gs >= 2 && !is_stable_cover(res.datum)) {
        throw InternalError("stable model loop terminated on an unstable cover");
    }
    return res;
}

/// Stable hull of a cover relative to exceptional sets: the same loop, but a
/// target vertex qualifies only inside ex_target with its whole preimage
/// inside ex_source. Minimal among cover data dominating both models.
inline CoverContraction stable_hull_of_cover(const CoverDatum& c, std::set<VertexId> ex_source,
                                             std::set<VertexId> ex_target) {
    Diagnostics d = validate_cover(c);
    if (!d.ok()) throw ValidationError(std::move(d));
    Diagnostics ds = validate_model(c.source, ex_source, /*require_regular=*/false,
                                    /*allow_marked_exceptional=*/false, /*allow_minus_one=*/true);
    if (!ds.ok()) throw ValidationError(std::move(ds));
    Diagnostics dt = validate_model(c.target, ex_target, /*require_regular=*/false,
                                    /*allow_marked_exceptional=*/false, /*allow_minus_one=*/true);
    if (!dt.ok()) throw ValidationError(std::move(dt));
    for (const auto& [v, img] : c.vertex_map) {
        if (!ex_source.count(v) && ex_target.count(img)) {
            throw PreconditionError("domination-incompatible",
                                    "non-exceptional source vertex " + std::to_string(v.value) +
                                        " maps into the exceptional target set");
        }
    }
    CoverContraction res{c, {}};
    while (true) {
        auto cands = detail::contraction_candidates(res.datum, false, &ex_source, &ex_target);
        if (cands.empty()) break;
        CoverStep step = detail::cover_contract_step(res.datum, cands.front(), false);
        ex_target.erase(step.contracted_target_vertex);
        for (VertexId v : step.contracted_source_vertices) ex_source.erase(v);
        res.datum = step.result;
        res.steps.push_back(std::move(step));
    }
    return res;
}

/// For a marked cover with f^{-1}(N) = M and 2g(Y) - 2 + |N| > 1, computes
/// the stable marked model of the target by simultaneous contraction,
/// asserting at every step that the source preimages are contractible for
/// omega(M) as well (no source blow-up is ever needed). A verification
/// failure here would falsify the implementation, not the theorem.
inline DualGraph target_stable_marked_model(const CoverDatum& c) {
    Diagnostics d = validate_cover(c);
    if (!d.ok()) throw ValidationError(std::move(d));
    if (!c.source.markings().empty() || !c.target.markings().empty()) {
        throw PreconditionError("edge-markings-present",
                                "convert edge markings to legs before the marked calculus");
    }
    std::int64_t gt = arithmetic_genus(c.target);
    std::int64_t nt = static_cast<std::int64_t>(c.target.legs().size());
    if (2 * gt - 2 + nt <= 1) {
        throw PreconditionError("unstable-type-target",
                                "2g(Y) - 2 + |N| = " + std::to_string(2 * gt - 2 + nt) +
                                    " must exceed 1");
    }
    std::int64_t gs = arithmetic_genus(c.source);
    std::int64_t ms = static_cast<std::int64_t>(c.source.legs().size());
    if (2 * gs - 2 + ms < 1) {
        throw PreconditionError("unstable-type",
                                "source is not of stable type: 2g(X) - 2 + |M| = " +
                                    std::to_string(2 * gs - 2 + ms));
    }
    CoverDatum cur = c;
    while (true) {
        auto cands = detail::contraction_candidates(cur, true, nullptr, nullptr,
                                                    /*gate_preimages=*/false);
        if (cands.empty()) break;
        VertexId w = cands.front();
        for (VertexId v : cur.preimage(w)) {
            if (detail::omega_marked(cur.source, v) > 0) {
                throw InternalError("marked-cover-morphism: contracting target vertex " +
                                    std::to_string(w.value) + " would strand source vertex " +
                                    std::to_string(v.value) + " of positive omega(M)-degree");
            }
        }
        cur = detail::cover_contract_step(cur, w, true).result;
    }
    // The simultaneous route must land on the target's own stable marked model.
    if (canonicalize(cur.target) != canonicalize(stable_marked_model(c.target))) {
        throw InternalError("simultaneous contraction disagrees with the target's stable "
                            "marked model");
    }
    return cur.target;
}

} // namespace ssred

#endif // SSRED_COVER_HPP
