#ifndef SSRED_ORACLE_HPP
#define SSRED_ORACLE_HPP

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <future>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ssred/cover.hpp"
#include "ssred/cover_canonical.hpp"
#include "ssred/model.hpp"

namespace ssred {

/// Exhaustive closure of single contractions, deduplicated by canonical
/// form. covers_relation pairs (i, j) say element i is obtained from
/// element j by one contraction; minimal elements admit none.
struct DominationPoset {
    std::vector<std::string> elements;
    std::vector<std::pair<std::size_t, std::size_t>> covers_relation;
    std::vector<std::size_t> minimal_elements;
};

struct ModelEnumeration {
    DominationPoset poset;
    std::vector<Model> models; ///< aligned with poset.elements
};

struct CoverEnumeration {
    DominationPoset poset;
    std::vector<CoverDatum> covers;
    std::vector<std::set<VertexId>> ex_sources;
    std::vector<std::set<VertexId>> ex_targets;
};

namespace detail {

/// Exceptional vertices that a single legal contraction can remove.
inline std::vector<VertexId> model_candidates(const DualGraph& g,
                                              const std::set<VertexId>& exceptional) {
    std::vector<VertexId> out;
    for (VertexId v : exceptional) {
        if (g.vertex(v).genus != 0 || g.valence(v) != 2) continue;
        if (g.has_loop_at(v)) continue;
        if (g.component_of(v).size() < 2) continue;
        if (g.legs_at(v) > 0) continue;
        bool marked_edge = false;
        for (EdgeId e : g.edges_at(v)) {
            if (!g.markings_on(e).empty()) marked_edge = true;
        }
        if (!marked_edge) out.push_back(v);
    }
    return out;
}

template <class State, class KeyFn, class ExpandFn>
DominationPoset bfs_closure(State start, KeyFn&& key_of, ExpandFn&& expand,
                            std::vector<State>& states_out, int jobs) {
    DominationPoset poset;
    std::map<std::string, std::size_t> index;
    std::vector<State> states;
    std::set<std::pair<std::size_t, std::size_t>> relation;
    std::set<std::size_t> has_successor;

    states.push_back(std::move(start));
    poset.elements.push_back(key_of(states[0]));
    index[poset.elements[0]] = 0;

    std::vector<std::size_t> frontier{0};
    while (!frontier.empty()) {
        // Successor lists are pure functions of the state; fan the frontier
        // out across jobs and merge in frontier order for determinism.
        std::vector<std::vector<std::pair<std::string, State>>> expansions(frontier.size());
        auto work = [&](std::size_t from, std::size_t to) {
            for (std::size_t i = from; i < to; ++i) {
                for (State& child : expand(states[frontier[i]])) {
                    expansions[i].push_back({key_of(child), std::move(child)});
                }
            }
        };
        if (jobs <= 1 || frontier.size() < 2) {
            work(0, frontier.size());
        } else {
            std::size_t n = frontier.size();
            std::size_t chunk = (n + static_cast<std::size_t>(jobs) - 1) /
                                static_cast<std::size_t>(jobs);
            std::vector<std::future<void>> futs;
            for (std::size_t from = 0; from < n; from += chunk) {
                std::size_t to = std::min(n, from + chunk);
                futs.push_back(std::async(std::launch::async, work, from, to));
            }
            for (auto& f : futs) f.get();
        }
        std::vector<std::size_t> next;
        for (std::size_t i = 0; i < frontier.size(); ++i) {
            std::size_t parent = frontier[i];
            for (auto& [key, child] : expansions[i]) {
                has_successor.insert(parent);
                auto it = index.find(key);
                std::size_t child_idx;
                if (it == index.end()) {
                    child_idx = states.size();
                    states.push_back(std::move(child));
                    poset.elements.push_back(key);
                    index[key] = child_idx;
                    next.push_back(child_idx);
                } else {
                    child_idx = it->second;
                }
                relation.insert({child_idx, parent});
            }
        }
        frontier = std::move(next);
    }
    poset.covers_relation.assign(relation.begin(), relation.end());
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (!has_successor.count(i)) poset.minimal_elements.push_back(i);
    }
    states_out = std::move(states);
    return poset;
}

} // namespace detail

/// Breadth-first closure of all single-vertex contractions within the
/// exceptional set; the unique minimal element is the stable hull.
inline ModelEnumeration enumerate_contractions(const Model& m, std::size_t bound = 8,
                                               int jobs = 1) {
    if (m.top.vertices().size() > bound) {
        throw PreconditionError("bound-exceeded",
                                "model has " + std::to_string(m.top.vertices().size()) +
                                    " vertices; oracle bound is " + std::to_string(bound));
    }
    Diagnostics d = validate_model(m.top, m.exceptional);
    if (!d.ok()) throw ValidationError(std::move(d));

    ModelEnumeration out;
    auto key_of = [](const Model& s) { return canonicalize_model(s.top, s.exceptional); };
    auto expand = [](const Model& s) {
        std::vector<Model> children;
        for (VertexId v : detail::model_candidates(s.top, s.exceptional)) {
            ContractResult c = contract(s.top, {v});
            std::set<VertexId> ex = s.exceptional;
            ex.erase(v);
            children.push_back(Model{std::move(c.graph), std::move(ex)});
        }
        return children;
    };
    out.poset = detail::bfs_closure(m, key_of, expand, out.models, jobs);
    return out;
}

/// Closure of all qualifying simultaneous contractions of a cover. Passing
/// the full vertex sets as exceptional sets enumerates the stable-model
/// loop; smaller sets enumerate the relative hull.
inline CoverEnumeration enumerate_cover_contractions(const CoverDatum& c,
                                                     std::set<VertexId> ex_source,
                                                     std::set<VertexId> ex_target,
                                                     std::size_t bound = 5, int jobs = 1) {
    if (c.target.vertices().size() > bound) {
        throw PreconditionError("bound-exceeded",
                                "target has " + std::to_string(c.target.vertices().size()) +
                                    " vertices; oracle bound is " + std::to_string(bound));
    }
    Diagnostics d = validate_cover(c);
    if (!d.ok()) throw ValidationError(std::move(d));

    struct State {
        CoverDatum cover;
        std::set<VertexId> ex_s, ex_t;
    };
    CoverEnumeration out;
    std::vector<State> states;
    auto key_of = [](const State& s) { return canonicalize_cover(s.cover, &s.ex_s, &s.ex_t); };
    auto expand = [](const State& s) {
        std::vector<State> children;
        for (VertexId w :
             detail::contraction_candidates(s.cover, false, &s.ex_s, &s.ex_t)) {
            CoverStep step = detail::cover_contract_step(s.cover, w, false);
            std::set<VertexId> ex_s = s.ex_s;
            std::set<VertexId> ex_t = s.ex_t;
            ex_t.erase(w);
            for (VertexId v : step.contracted_source_vertices) ex_s.erase(v);
            children.push_back(State{std::move(step.result), std::move(ex_s), std::move(ex_t)});
        }
        return children;
    };
    out.poset = detail::bfs_closure(State{c, std::move(ex_source), std::move(ex_target)}, key_of,
                                    expand, states, jobs);
    for (auto& s : states) {
        out.covers.push_back(std::move(s.cover));
        out.ex_sources.push_back(std::move(s.ex_s));
        out.ex_targets.push_back(std::move(s.ex_t));
    }
    return out;
}

/// Newman-style certification: the relation is acyclic, has exactly one
/// sink, and every maximal chain terminates there.
inline bool check_confluence(const DominationPoset& p) {
    std::size_t n = p.elements.size();
    std::vector<std::vector<std::size_t>> children(n);
    std::vector<std::size_t> outdeg(n, 0);
    for (const auto& [child, parent] : p.covers_relation) {
        if (child >= n || parent >= n || child == parent) return false;
        children[parent].push_back(child);
        ++outdeg[parent];
    }
    // Acyclicity via Kahn on parent->child edges.
    std::vector<std::size_t> indeg(n, 0);
    for (const auto& [child, parent] : p.covers_relation) ++indeg[child];
    std::vector<std::size_t> queue;
    for (std::size_t i = 0; i < n; ++i) {
        if (indeg[i] == 0) queue.push_back(i);
    }
    std::size_t seen = 0;
    while (!queue.empty()) {
        std::size_t v = queue.back();
        queue.pop_back();
        ++seen;
        for (std::size_t ch : children[v]) {
            if (--indeg[ch] == 0) queue.push_back(ch);
        }
    }
    if (seen != n) return false;

    std::vector<std::size_t> sinks;
    for (std::size_t i = 0; i < n; ++i) {
        if (outdeg[i] == 0) sinks.push_back(i);
    }
    if (sinks.size() != 1) return false;
    if (p.minimal_elements != sinks) return false;
    // Every element reaches the sink by following contractions.
    std::vector<int> reaches(n, -1);
    reaches[sinks[0]] = 1;
    auto dfs = [&](auto&& self, std::size_t v) -> bool {
        if (reaches[v] != -1) return reaches[v] == 1;
        bool ok = false;
        for (std::size_t ch : children[v]) {
            if (self(self, ch)) ok = true;
        }
        reaches[v] = ok ? 1 : 0;
        return ok;
    };
    for (std::size_t i = 0; i < n; ++i) {
        if (!dfs(dfs, i)) return false;
    }
    return true;
}

// ---- instance generation -----------------------------------------------------

/// Seed for the random suites: SSRED_SEED when set, else a fixed default
/// recorded in test output for reproducibility.
inline std::uint64_t default_seed() {
    if (const char* env = std::getenv("SSRED_SEED")) {
        return std::strtoull(env, nullptr, 10);
    }
    return 20260810ull;
}

struct RandomGraphParams {
    int max_vertices = 8;
    int max_extra_edges = 3;
    int max_genus = 3;
    int max_thickness = 4;
    int max_legs = 2;
    bool with_markings = false;
};

inline DualGraph random_connected_graph(std::mt19937_64& rng, const RandomGraphParams& p = {}) {
    auto pick = [&rng](int lo, int hi) {
        return std::uniform_int_distribution<int>(lo, hi)(rng);
    };
    int n = pick(1, p.max_vertices);
    DualGraph g;
    for (int i = 1; i <= n; ++i) g.add_vertex(VertexId{i}, pick(0, p.max_genus));
    std::int64_t next_edge = 1;
    for (int i = 2; i <= n; ++i) {
        g.add_edge(EdgeId{next_edge++}, VertexId{pick(1, i - 1)}, VertexId{i},
                   pick(1, p.max_thickness));
    }
    int extra = pick(0, p.max_extra_edges);
    for (int k = 0; k < extra; ++k) {
        VertexId a{pick(1, n)};
        VertexId b{pick(1, n)};
        g.add_edge(EdgeId{next_edge++}, a, b, pick(1, p.max_thickness));
    }
    std::int64_t next_mark = 1;
    int legs = pick(0, p.max_legs);
    for (int k = 0; k < legs; ++k) {
        g.add_leg(LegId{next_mark++}, VertexId{pick(1, n)});
    }
    if (p.with_markings && !g.edges().empty() && pick(0, 1) == 1) {
        std::vector<EdgeId> eids;
        for (const auto& [e, data] : g.edges()) eids.push_back(e);
        for (int attempt = 0, placed = 0; attempt < 8 && placed < 2; ++attempt) {
            EdgeId e = eids[static_cast<std::size_t>(pick(0, static_cast<int>(eids.size()) - 1))];
            const EdgeData& ed = g.edge(e);
            int q = pick(2, 4);
            int numer = pick(1, static_cast<int>(ed.thickness) * q - 1);
            Rational pos(numer, q);
            DualGraph probe = g;
            probe.add_marking(MarkingId{next_mark}, e, ed.ends[0], pos);
            if (validate_graph(probe).ok()) {
                g = std::move(probe);
                ++next_mark;
                ++placed;
            }
        }
    }
    return g;
}

/// Random model: a random graph presented through its desingularization,
/// with the inserted chain vertices as the exceptional set.
inline Model random_model(std::mt19937_64& rng, const RandomGraphParams& p = {}) {
    RandomGraphParams q = p;
    q.with_markings = false;
    q.max_legs = 0;
    DualGraph g = random_connected_graph(rng, q);
    DesingularizeResult res = desingularize(g);
    return Model{std::move(res.graph), std::move(res.exceptional)};
}

/// Degree-3 cover totally dilated along every edge and leg: the source is a
/// structural copy of the target with genera adjusted by Riemann-Hurwitz
/// (g_v = 3 g_w + val + legs - 2) and target thicknesses tripled. Target
/// vertices must satisfy 3 g + val + legs >= 2.
inline CoverDatum pullback_cover_degree3(const DualGraph& target_shape) {
    CoverDatum c;
    c.global_degree = 3;
    for (const auto& [w, data] : target_shape.vertices()) {
        std::int64_t gv =
            3 * data.genus + target_shape.valence(w) + target_shape.legs_at(w) - 2;
        if (gv < 0) {
            throw PreconditionError("rh-unrealizable",
                                    "target vertex " + std::to_string(w.value) +
                                        " cannot carry a totally dilated degree-3 cover");
        }
        c.source.add_vertex(w, gv);
        c.target.add_vertex(w, data.genus);
        c.vertex_map[w] = w;
        c.vertex_degree[w] = 3;
    }
    for (const auto& [e, data] : target_shape.edges()) {
        c.source.add_edge(e, data.ends[0], data.ends[1], data.thickness);
        c.target.add_edge(e, data.ends[0], data.ends[1], 3 * data.thickness);
        c.edge_map[e] = e;
        c.edge_dilation[e] = 3;
    }
    for (const auto& [l, at] : target_shape.legs()) {
        c.source.add_leg(l, at);
        c.target.add_leg(l, at);
        c.leg_map[l] = l;
        c.leg_degree[l] = 3;
    }
    return c;
}

/// Graph-etale double cover determined by Z/2 voltages on the edges: two
/// vertices of local degree 1 over every target vertex, thicknesses and
/// genera copied. The source is connected exactly when some cycle has
/// nontrivial total voltage.
inline CoverDatum etale_double_cover(const DualGraph& target,
                                     const std::map<EdgeId, int>& voltage) {
    CoverDatum c;
    c.global_degree = 2;
    auto lift = [](std::int64_t id, int sheet) { return 2 * id + sheet; };
    for (const auto& [w, data] : target.vertices()) {
        for (int s = 0; s < 2; ++s) {
            VertexId v{lift(w.value, s)};
            c.source.add_vertex(v, data.genus);
            c.vertex_map[v] = w;
            c.vertex_degree[v] = 1;
        }
        c.target.add_vertex(w, data.genus);
    }
    for (const auto& [e, data] : target.edges()) {
        c.target.add_edge(e, data.ends[0], data.ends[1], data.thickness);
        int volt = voltage.count(e) ? voltage.at(e) % 2 : 0;
        for (int s = 0; s < 2; ++s) {
            EdgeId le{lift(e.value, s)};
            c.source.add_edge(le, VertexId{lift(data.ends[0].value, s)},
                              VertexId{lift(data.ends[1].value, (s + volt) % 2)}, data.thickness);
            c.edge_map[le] = e;
            c.edge_dilation[le] = 1;
        }
    }
    for (const auto& [l, at] : target.legs()) {
        c.target.add_leg(l, at);
        for (int s = 0; s < 2; ++s) {
            LegId ll{lift(l.value, s)};
            c.source.add_leg(ll, VertexId{lift(at.value, s)});
            c.leg_map[ll] = l;
            c.leg_degree[ll] = 1;
        }
    }
    return c;
}

/// Random valid cover drawn from three families: identity covers, totally
/// dilated degree-3 pullbacks and graph-etale double covers.
inline CoverDatum random_cover(std::mt19937_64& rng, int max_vertices = 5) {
    auto pick = [&rng](int lo, int hi) {
        return std::uniform_int_distribution<int>(lo, hi)(rng);
    };
    RandomGraphParams p;
    p.max_vertices = max_vertices;
    p.max_extra_edges = 2;
    p.max_genus = 2;
    p.max_thickness = 2;
    p.max_legs = 0;
    for (int attempt = 0; attempt < 64; ++attempt) {
        DualGraph target = random_connected_graph(rng, p);
        int family = pick(0, 2);
        if (family == 0) {
            CoverDatum c;
            c.source = target;
            c.target = target;
            c.global_degree = 1;
            for (const auto& [v, data] : target.vertices()) {
                c.vertex_map[v] = v;
                c.vertex_degree[v] = 1;
            }
            for (const auto& [e, data] : target.edges()) {
                c.edge_map[e] = e;
                c.edge_dilation[e] = 1;
            }
            return c;
        }
        if (family == 1) {
            bool ok = true;
            for (const auto& [w, data] : target.vertices()) {
                if (3 * data.genus + target.valence(w) < 2) ok = false;
            }
            if (!ok) continue;
            CoverDatum c = pullback_cover_degree3(target);
            if (validate_cover(c).ok()) return c;
            continue;
        }
        if (target.edges().size() + 1 <= target.vertices().size()) continue; // need a cycle
        std::map<EdgeId, int> voltage;
        for (const auto& [e, data] : target.edges()) voltage[e] = pick(0, 1);
        CoverDatum c = etale_double_cover(target, voltage);
        if (c.source.is_connected() && validate_cover(c).ok()) return c;
    }
    // Deterministic fallback: identity on a one-vertex genus-2 graph.
    DualGraph g;
    g.add_vertex(VertexId{1}, 2);
    CoverDatum c;
    c.source = g;
    c.target = g;
    c.global_degree = 1;
    c.vertex_map[VertexId{1}] = VertexId{1};
    c.vertex_degree[VertexId{1}] = 1;
    return c;
}

// ---- exhaustive small-graph enumeration --------------------------------------

/// All connected multigraphs with exactly n vertices, at most max_edges
/// edges, pairwise multiplicity <= 2 and at most one loop per vertex, with
/// all genus assignments capped per vertex and in total; thickness 1
/// everywhere. Deduplicated up to isomorphism.
inline std::vector<DualGraph> enumerate_connected_tops(int n, int max_edges, int per_vertex_genus,
                                                       int total_genus_budget) {
    std::vector<std::pair<int, int>> slots; // (i, j) with i <= j; i == j is a loop
    for (int i = 1; i <= n; ++i) {
        for (int j = i; j <= n; ++j) slots.push_back({i, j});
    }
    std::vector<DualGraph> out;
    std::set<std::string> seen;
    std::vector<int> mult(slots.size(), 0);

    auto genus_assignments = [&]() {
        std::vector<std::vector<int>> result;
        std::vector<int> cur(static_cast<std::size_t>(n), 0);
        auto rec = [&](auto&& self, int idx, int budget) -> void {
            if (idx == n) {
                result.push_back(cur);
                return;
            }
            for (int gen = 0; gen <= std::min(per_vertex_genus, budget); ++gen) {
                cur[static_cast<std::size_t>(idx)] = gen;
                self(self, idx + 1, budget - gen);
            }
        };
        rec(rec, 0, total_genus_budget);
        return result;
    };

    auto emit = [&]() {
        int total = 0;
        for (std::size_t s = 0; s < slots.size(); ++s) total += mult[s];
        if (total > max_edges) return;
        DualGraph shape;
        for (int i = 1; i <= n; ++i) shape.add_vertex(VertexId{i}, 0);
        std::int64_t eid = 1;
        for (std::size_t s = 0; s < slots.size(); ++s) {
            for (int k = 0; k < mult[s]; ++k) {
                shape.add_edge(EdgeId{eid++}, VertexId{slots[s].first}, VertexId{slots[s].second},
                               1);
            }
        }
        if (!shape.is_connected()) return;
        for (const auto& genera : genus_assignments()) {
            DualGraph fresh;
            for (int i = 1; i <= n; ++i) {
                fresh.add_vertex(VertexId{i}, genera[static_cast<std::size_t>(i - 1)]);
            }
            std::int64_t fe = 1;
            for (std::size_t s = 0; s < slots.size(); ++s) {
                for (int k = 0; k < mult[s]; ++k) {
                    fresh.add_edge(EdgeId{fe++}, VertexId{slots[s].first},
                                   VertexId{slots[s].second}, 1);
                }
            }
            std::string key = canonicalize(fresh);
            if (seen.insert(key).second) out.push_back(std::move(fresh));
        }
    };

    auto rec = [&](auto&& self, std::size_t s, int budget) -> void {
        if (s == slots.size()) {
            emit();
            return;
        }
        int cap = (slots[s].first == slots[s].second) ? 1 : 2;
        for (int k = 0; k <= std::min(cap, budget); ++k) {
            mult[s] = k;
            self(self, s + 1, budget - k);
        }
        mult[s] = 0;
    };
    rec(rec, 0, max_edges);
    return out;
}

/// Cycle of n genus-0 vertices, unit thickness.
inline DualGraph cycle_graph(int n) {
    DualGraph g;
    for (int i = 1; i <= n; ++i) g.add_vertex(VertexId{i}, 0);
    for (int i = 1; i <= n; ++i) {
        g.add_edge(EdgeId{i}, VertexId{i}, VertexId{i % n + 1}, 1);
    }
    return g;
}

} // namespace ssred

#endif // SSRED_ORACLE_HPP
