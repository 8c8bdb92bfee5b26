#ifndef SSRED_TESTS_HELPERS_HPP
#define SSRED_TESTS_HELPERS_HPP

#include <algorithm>
#include <cstdlib>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "ssred/ssred.hpp"

namespace ssred::testing {

inline VertexId V(std::int64_t v) { return VertexId{v}; }
inline EdgeId E(std::int64_t e) { return EdgeId{e}; }
inline LegId L(std::int64_t l) { return LegId{l}; }
inline MarkingId M(std::int64_t m) { return MarkingId{m}; }

/// Chain of vertices with the given genera, consecutive vertices joined by
/// edges of the given thicknesses. Vertices get ids 1..n, edges 1..n-1.
inline DualGraph chain(const std::vector<std::int64_t>& genera,
                       const std::vector<std::int64_t>& thicknesses) {
    DualGraph g;
    for (std::size_t i = 0; i < genera.size(); ++i) {
        g.add_vertex(V(static_cast<std::int64_t>(i + 1)), genera[i]);
    }
    for (std::size_t i = 0; i < thicknesses.size(); ++i) {
        g.add_edge(E(static_cast<std::int64_t>(i + 1)), V(static_cast<std::int64_t>(i + 1)),
                   V(static_cast<std::int64_t>(i + 2)), thicknesses[i]);
    }
    return g;
}

/// Cycle of genus-0 vertices with the given thicknesses.
inline DualGraph cycle(const std::vector<std::int64_t>& thicknesses,
                       const std::vector<std::int64_t>& genera = {}) {
    std::size_t n = thicknesses.size();
    DualGraph g;
    for (std::size_t i = 0; i < n; ++i) {
        g.add_vertex(V(static_cast<std::int64_t>(i + 1)), i < genera.size() ? genera[i] : 0);
    }
    for (std::size_t i = 0; i < n; ++i) {
        g.add_edge(E(static_cast<std::int64_t>(i + 1)), V(static_cast<std::int64_t>(i + 1)),
                   V(static_cast<std::int64_t>((i + 1) % n + 1)), thicknesses[i]);
    }
    return g;
}

/// Relabels every id through the given offset-and-scramble permutation,
/// preserving structure. Used to test relabeling invariance.
inline DualGraph relabel(const DualGraph& g, std::int64_t offset) {
    DualGraph out;
    auto mv = [offset](VertexId v) { return VertexId{offset + 7 * v.value}; };
    for (const auto& [v, data] : g.vertices()) out.add_vertex(mv(v), data.genus);
    for (const auto& [e, data] : g.edges()) {
        out.add_edge(EdgeId{offset + 3 * e.value}, mv(data.ends[0]), mv(data.ends[1]),
                     data.thickness);
    }
    for (const auto& [l, at] : g.legs()) out.add_leg(LegId{offset + 5 * l.value}, mv(at));
    for (const auto& [m, data] : g.markings()) {
        out.add_marking(MarkingId{offset + 11 * m.value}, EdgeId{offset + 3 * data.edge.value},
                        mv(data.from), data.position);
    }
    return out;
}

/// Brute-force isomorphism test by enumerating all genus/leg-preserving
/// vertex bijections and comparing the induced edge multisets. Independent
/// of the canonical-form machinery; usable up to ~6 vertices.
inline bool brute_force_isomorphic(const DualGraph& a, const DualGraph& b) {
    if (a.vertices().size() != b.vertices().size() || a.edges().size() != b.edges().size() ||
        a.legs().size() != b.legs().size() || a.markings().size() != b.markings().size()) {
        return false;
    }
    std::vector<VertexId> va, vb;
    for (const auto& [v, d] : a.vertices()) va.push_back(v);
    for (const auto& [v, d] : b.vertices()) vb.push_back(v);

    auto edge_shape = [](const DualGraph& g, const std::map<VertexId, std::size_t>& idx) {
        std::vector<std::string> shape;
        for (const auto& [e, d] : g.edges()) {
            std::size_t i = idx.at(d.ends[0]);
            std::size_t j = idx.at(d.ends[1]);
            if (j < i) std::swap(i, j);
            std::vector<Rational> pos;
            for (MarkingId m : g.markings_on(e)) {
                pos.push_back(g.normalized_position(g.markings().at(m)));
            }
            std::sort(pos.begin(), pos.end());
            std::vector<Rational> flipped;
            for (const auto& p : pos) flipped.push_back(Rational(d.thickness) - p);
            std::sort(flipped.begin(), flipped.end());
            // Orient positions from the smaller index; loops flip freely.
            std::vector<Rational> use;
            if (d.is_loop()) {
                use = std::min(pos, flipped);
            } else {
                use = (idx.at(d.ends[0]) <= idx.at(d.ends[1])) ? pos : flipped;
            }
            std::string s = std::to_string(i) + "-" + std::to_string(j) + ":t" +
                            std::to_string(d.thickness) + ":";
            for (const auto& p : use) s += to_string(p) + ",";
            shape.push_back(s);
        }
        std::sort(shape.begin(), shape.end());
        std::string out;
        for (const auto& s : shape) out += s + "|";
        return out;
    };

    std::vector<std::size_t> perm(vb.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::sort(perm.begin(), perm.end());
    do {
        bool ok = true;
        std::map<VertexId, std::size_t> ia, ib;
        for (std::size_t k = 0; k < va.size(); ++k) {
            VertexId x = va[k];
            VertexId y = vb[perm[k]];
            if (a.vertex(x).genus != b.vertex(y).genus || a.legs_at(x) != b.legs_at(y)) {
                ok = false;
                break;
            }
            ia[x] = k;
            ib[y] = k;
        }
        if (!ok) continue;
        if (edge_shape(a, ia) == edge_shape(b, ib)) return true;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return false;
}

inline std::string fixture_dir() {
    if (const char* env = std::getenv("SSRED_FIXTURE_DIR")) return env;
    return "tests/fixtures";
}

inline std::string fixture(const std::string& name) { return fixture_dir() + "/" + name; }

inline CoverDatum identity_cover(const DualGraph& g) {
    CoverDatum c;
    c.source = g;
    c.target = g;
    c.global_degree = 1;
    for (const auto& [v, data] : g.vertices()) {
        c.vertex_map[v] = v;
        c.vertex_degree[v] = 1;
    }
    for (const auto& [e, data] : g.edges()) {
        c.edge_map[e] = e;
        c.edge_dilation[e] = 1;
    }
    for (const auto& [l, at] : g.legs()) {
        c.leg_map[l] = l;
        c.leg_degree[l] = 1;
    }
    return c;
}

/// Two-component degree-3 cover: c1(g0) - c2(g2) over d1(g0) - d2(g1),
/// source edge of thickness 1 and dilation 3 over a target edge of
/// thickness 3, local degrees 3, totally ramified at the node.
inline CoverDatum two_component_degree3() {
    CoverDatum c;
    c.global_degree = 3;
    c.source.add_vertex(V(1), 0);
    c.source.add_vertex(V(2), 2);
    c.source.add_edge(E(1), V(1), V(2), 1);
    c.target.add_vertex(V(1), 0);
    c.target.add_vertex(V(2), 1);
    c.target.add_edge(E(1), V(1), V(2), 3);
    c.vertex_map[V(1)] = V(1);
    c.vertex_map[V(2)] = V(2);
    c.vertex_degree[V(1)] = 3;
    c.vertex_degree[V(2)] = 3;
    c.edge_map[E(1)] = E(1);
    c.edge_dilation[E(1)] = 3;
    return c;
}

/// Degree-2 cover of the chain w0(g2) - w1(g0) - w2(g2): two genus-0
/// vertices over the middle, four unit edges, local degrees 2 at the ends.
inline CoverDatum degree2_chain() {
    CoverDatum c;
    c.global_degree = 2;
    c.target = chain({2, 0, 2}, {1, 1});
    c.source.add_vertex(V(1), 2);
    c.source.add_vertex(V(2), 0);
    c.source.add_vertex(V(3), 0);
    c.source.add_vertex(V(4), 2);
    c.source.add_edge(E(1), V(1), V(2), 1);
    c.source.add_edge(E(2), V(1), V(3), 1);
    c.source.add_edge(E(3), V(2), V(4), 1);
    c.source.add_edge(E(4), V(3), V(4), 1);
    c.vertex_map[V(1)] = V(1);
    c.vertex_map[V(2)] = V(2);
    c.vertex_map[V(3)] = V(2);
    c.vertex_map[V(4)] = V(3);
    c.vertex_degree[V(1)] = 2;
    c.vertex_degree[V(2)] = 1;
    c.vertex_degree[V(3)] = 1;
    c.vertex_degree[V(4)] = 2;
    c.edge_map[E(1)] = E(1);
    c.edge_map[E(2)] = E(1);
    c.edge_map[E(3)] = E(2);
    c.edge_map[E(4)] = E(2);
    c.edge_dilation[E(1)] = 1;
    c.edge_dilation[E(2)] = 1;
    c.edge_dilation[E(3)] = 1;
    c.edge_dilation[E(4)] = 1;
    return c;
}

} // namespace ssred::testing

#endif // SSRED_TESTS_HELPERS_HPP
