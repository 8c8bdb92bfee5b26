#ifndef SSRED_IO_HPP
#define SSRED_IO_HPP

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ssred/cover.hpp"
#include "ssred/dual_graph.hpp"
#include "ssred/graph_ops.hpp"
#include "ssred/model.hpp"
#include "ssred/oracle.hpp"
#include "ssred/quotient.hpp"

namespace ssred {

using nlohmann::json;

namespace detail {

[[noreturn]] inline void schema_error(const std::string& what) {
    Diagnostics d;
    d.add("schema-error", {}, what);
    throw ValidationError(std::move(d));
}

inline std::int64_t get_int(const json& j, const char* key, const std::string& ctx) {
    if (!j.contains(key) || !j.at(key).is_number_integer()) {
        schema_error(ctx + ": missing integer field '" + key + "'");
    }
    return j.at(key).get<std::int64_t>();
}

inline const json& get_array(const json& j, const char* key, const std::string& ctx) {
    if (!j.contains(key) || !j.at(key).is_array()) {
        schema_error(ctx + ": missing array field '" + key + "'");
    }
    return j.at(key);
}

inline std::map<std::int64_t, std::int64_t> int_map(const json& j, const char* key,
                                                    const std::string& ctx) {
    std::map<std::int64_t, std::int64_t> out;
    if (!j.contains(key)) return out;
    const json& m = j.at(key);
    if (!m.is_object()) schema_error(ctx + ": field '" + key + "' must be an object");
    for (auto it = m.begin(); it != m.end(); ++it) {
        if (!it.value().is_number_integer()) {
            schema_error(ctx + ": values of '" + key + "' must be integers");
        }
        out[std::stoll(it.key())] = it.value().get<std::int64_t>();
    }
    return out;
}

} // namespace detail

// ---- graphs -------------------------------------------------------------------

inline json graph_to_json(const DualGraph& g) {
    json vertices = json::array();
    for (const auto& [v, data] : g.vertices()) {
        json legs = json::array();
        for (LegId l : g.leg_ids_at(v)) legs.push_back(l.value);
        vertices.push_back({{"id", v.value}, {"genus", data.genus}, {"legs", legs}});
    }
    json edges = json::array();
    for (const auto& [e, data] : g.edges()) {
        json entry;
        entry["id"] = e.value;
        if (data.is_loop()) {
            entry["loop"] = data.ends[0].value;
        } else {
            entry["ends"] = {std::min(data.ends[0].value, data.ends[1].value),
                             std::max(data.ends[0].value, data.ends[1].value)};
        }
        entry["thickness"] = data.thickness;
        edges.push_back(entry);
    }
    json markings = json::array();
    for (const auto& [m, data] : g.markings()) {
        markings.push_back({{"id", m.value},
                            {"edge", data.edge.value},
                            {"from", data.from.value},
                            {"position", to_string(data.position)}});
    }
    return json{{"vertices", vertices}, {"edges", edges}, {"edge_markings", markings}};
}

inline DualGraph graph_from_json(const json& j) {
    if (!j.is_object()) detail::schema_error("graph: expected an object");
    DualGraph g;
    for (const json& v : detail::get_array(j, "vertices", "graph")) {
        g.add_vertex(VertexId{detail::get_int(v, "id", "vertex")},
                     detail::get_int(v, "genus", "vertex"));
    }
    for (const json& v : detail::get_array(j, "vertices", "graph")) {
        if (!v.contains("legs")) continue;
        for (const json& l : v.at("legs")) {
            if (!l.is_number_integer()) detail::schema_error("vertex legs must be integer ids");
            g.add_leg(LegId{l.get<std::int64_t>()}, VertexId{detail::get_int(v, "id", "vertex")});
        }
    }
    for (const json& e : detail::get_array(j, "edges", "graph")) {
        EdgeId id{detail::get_int(e, "id", "edge")};
        std::int64_t t = detail::get_int(e, "thickness", "edge");
        if (e.contains("loop")) {
            g.add_loop(id, VertexId{detail::get_int(e, "loop", "edge")}, t);
        } else {
            const json& ends = detail::get_array(e, "ends", "edge");
            if (ends.size() != 2 || !ends[0].is_number_integer() || !ends[1].is_number_integer()) {
                detail::schema_error("edge ends must be a pair of vertex ids");
            }
            g.add_edge(id, VertexId{ends[0].get<std::int64_t>()},
                       VertexId{ends[1].get<std::int64_t>()}, t);
        }
    }
    if (j.contains("edge_markings")) {
        for (const json& m : j.at("edge_markings")) {
            if (!m.contains("position") || !m.at("position").is_string()) {
                detail::schema_error("marking position must be a string \"p/q\"");
            }
            Rational pos;
            try {
                pos = parse_rational(m.at("position").get<std::string>());
            } catch (const std::exception& ex) {
                detail::schema_error(std::string("marking position: ") + ex.what());
            }
            g.add_marking(MarkingId{detail::get_int(m, "id", "marking")},
                          EdgeId{detail::get_int(m, "edge", "marking")},
                          VertexId{detail::get_int(m, "from", "marking")}, pos);
        }
    }
    return g;
}

// ---- models -------------------------------------------------------------------

inline json model_to_json(const DualGraph& top, const std::set<VertexId>& exceptional) {
    json j = graph_to_json(top);
    json ex = json::array();
    for (VertexId v : exceptional) ex.push_back(v.value);
    j["exceptional"] = ex;
    return j;
}

inline json model_to_json(const Model& m) { return model_to_json(m.top, m.exceptional); }

/// Returns the raw presentation; callers validate via make_model or the
/// relaxed marked-hull entry as appropriate.
inline std::pair<DualGraph, std::set<VertexId>> model_from_json(const json& j) {
    DualGraph top = graph_from_json(j);
    std::set<VertexId> ex;
    if (j.contains("exceptional")) {
        for (const json& v : j.at("exceptional")) {
            if (!v.is_number_integer()) detail::schema_error("exceptional must list vertex ids");
            ex.insert(VertexId{v.get<std::int64_t>()});
        }
    }
    return {std::move(top), std::move(ex)};
}

// ---- traces and hulls -----------------------------------------------------------

inline json trace_to_json(const ContractionTrace& t) {
    auto target = [](const TraceTarget& tt) {
        if (std::holds_alternative<VertexId>(tt)) {
            return json{{"vertex", std::get<VertexId>(tt).value}};
        }
        return json{{"edge", std::get<EdgeId>(tt).value}};
    };
    json vi = json::object();
    for (const auto& [v, tt] : t.vertex_image) vi[std::to_string(v.value)] = target(tt);
    json ei = json::object();
    for (const auto& [e, tt] : t.edge_image) ei[std::to_string(e.value)] = target(tt);
    json wit = json::object();
    for (const auto& [e, parts] : t.merged_thickness_witness) {
        wit[std::to_string(e.value)] = parts;
    }
    return json{{"vertex_image", vi}, {"edge_image", ei}, {"merged_thickness_witness", wit}};
}

inline json hull_result_to_json(const HullResult& h) {
    json kept = json::array();
    for (VertexId v : h.kept_exceptional) kept.push_back(v.value);
    return json{{"hull", graph_to_json(h.hull)},
                {"kept_exceptional", kept},
                {"trace", trace_to_json(h.trace)}};
}

// ---- covers -------------------------------------------------------------------

inline json cover_to_json(const CoverDatum& c) {
    auto id_map = [](const auto& m) {
        json out = json::object();
        for (const auto& [k, v] : m) out[std::to_string(k.value)] = v.value;
        return out;
    };
    auto deg_map = [](const auto& m) {
        json out = json::object();
        for (const auto& [k, v] : m) out[std::to_string(k.value)] = v;
        return out;
    };
    json j{{"source", graph_to_json(c.source)},
           {"target", graph_to_json(c.target)},
           {"vertex_map", id_map(c.vertex_map)},
           {"edge_map", id_map(c.edge_map)},
           {"vertex_degree", deg_map(c.vertex_degree)},
           {"edge_dilation", deg_map(c.edge_dilation)},
           {"global_degree", c.global_degree},
           {"leg_map", id_map(c.leg_map)}};
    if (!c.leg_degree.empty()) j["leg_degree"] = deg_map(c.leg_degree);
    return j;
}

inline CoverDatum cover_from_json(const json& j) {
    if (!j.is_object() || !j.contains("source") || !j.contains("target")) {
        detail::schema_error("cover: expected an object with 'source' and 'target'");
    }
    CoverDatum c;
    c.source = graph_from_json(j.at("source"));
    c.target = graph_from_json(j.at("target"));
    for (const auto& [k, v] : detail::int_map(j, "vertex_map", "cover")) {
        c.vertex_map[VertexId{k}] = VertexId{v};
    }
    for (const auto& [k, v] : detail::int_map(j, "edge_map", "cover")) {
        c.edge_map[EdgeId{k}] = EdgeId{v};
    }
    for (const auto& [k, v] : detail::int_map(j, "vertex_degree", "cover")) {
        c.vertex_degree[VertexId{k}] = v;
    }
    for (const auto& [k, v] : detail::int_map(j, "edge_dilation", "cover")) {
        c.edge_dilation[EdgeId{k}] = v;
    }
    for (const auto& [k, v] : detail::int_map(j, "leg_map", "cover")) {
        c.leg_map[LegId{k}] = LegId{v};
    }
    for (const auto& [k, v] : detail::int_map(j, "leg_degree", "cover")) {
        c.leg_degree[LegId{k}] = v;
    }
    c.global_degree = detail::get_int(j, "global_degree", "cover");
    return c;
}

inline json cover_step_to_json(const CoverStep& s) {
    json src = json::array();
    for (VertexId v : s.contracted_source_vertices) src.push_back(v.value);
    return json{{"contracted_target_vertex", s.contracted_target_vertex.value},
                {"contracted_source_vertices", src},
                {"result", cover_to_json(s.result)}};
}

inline json cover_contraction_to_json(const CoverContraction& cc) {
    json steps = json::array();
    for (const auto& s : cc.steps) steps.push_back(cover_step_to_json(s));
    return json{{"cover", cover_to_json(cc.datum)}, {"steps", steps}};
}

// ---- actions ------------------------------------------------------------------

struct ActionFile {
    std::vector<GraphAutomorphism> elements;
    std::optional<std::map<EdgeId, std::int64_t>> edge_stabilizer_orders;
    std::optional<std::map<VertexId, std::int64_t>> quotient_genera;
};

inline ActionFile action_from_json(const json& j) {
    if (!j.is_object() || !j.contains("elements") || !j.at("elements").is_array()) {
        detail::schema_error("action: expected an object with an 'elements' array");
    }
    ActionFile out;
    for (const json& el : j.at("elements")) {
        GraphAutomorphism a;
        for (const auto& [k, v] : detail::int_map(el, "vertices", "action element")) {
            a.vertex_map[VertexId{k}] = VertexId{v};
        }
        if (el.contains("edges")) {
            if (!el.at("edges").is_object()) detail::schema_error("action element: bad 'edges'");
            for (auto it = el.at("edges").begin(); it != el.at("edges").end(); ++it) {
                const json& img = it.value();
                bool flip = img.contains("flip") && img.at("flip").is_boolean() &&
                            img.at("flip").get<bool>();
                a.edge_map[EdgeId{std::stoll(it.key())}] = {
                    EdgeId{detail::get_int(img, "to", "action edge image")}, flip};
            }
        }
        for (const auto& [k, v] : detail::int_map(el, "legs", "action element")) {
            a.leg_map[LegId{k}] = LegId{v};
        }
        out.elements.push_back(std::move(a));
    }
    if (j.contains("edge_stabilizer_orders")) {
        std::map<EdgeId, std::int64_t> m;
        for (const auto& [k, v] : detail::int_map(j, "edge_stabilizer_orders", "action")) {
            m[EdgeId{k}] = v;
        }
        out.edge_stabilizer_orders = std::move(m);
    }
    if (j.contains("quotient_genera")) {
        std::map<VertexId, std::int64_t> m;
        for (const auto& [k, v] : detail::int_map(j, "quotient_genera", "action")) {
            m[VertexId{k}] = v;
        }
        out.quotient_genera = std::move(m);
    }
    return out;
}

// ---- posets -------------------------------------------------------------------

inline json poset_to_json(const DominationPoset& p) {
    json rel = json::array();
    for (const auto& [child, parent] : p.covers_relation) {
        rel.push_back({child, parent});
    }
    return json{{"elements", p.elements},
                {"covers_relation", rel},
                {"minimal_elements", p.minimal_elements}};
}

// ---- diagnostics ----------------------------------------------------------------

inline json diagnostics_to_json(const Diagnostics& d) {
    json entries = json::array();
    for (const auto& e : d.entries()) {
        entries.push_back({{"rule", e.rule},
                           {"severity", severity_name(e.severity)},
                           {"elements", e.elements},
                           {"message", e.message}});
    }
    return json{{"diagnostics", entries}, {"valid", d.ok()}};
}

// ---- DOT exports ----------------------------------------------------------------

inline std::string dot_graph_body(const DualGraph& g, const std::string& prefix,
                                  const std::set<VertexId>* exceptional = nullptr) {
    std::ostringstream out;
    for (const auto& [v, data] : g.vertices()) {
        out << "  " << prefix << "v" << v.value << " [label=\"" << v.value
            << ":g=" << data.genus << "\"";
        if (exceptional && exceptional->count(v)) out << ", style=dashed";
        out << "];\n";
    }
    for (const auto& [l, at] : g.legs()) {
        out << "  " << prefix << "leg" << l.value << " [shape=diamond, label=\"leg " << l.value
            << "\"];\n";
        out << "  " << prefix << "v" << at.value << " -- " << prefix << "leg" << l.value << ";\n";
    }
    for (const auto& [e, data] : g.edges()) {
        out << "  " << prefix << "v" << data.ends[0].value << " -- " << prefix << "v"
            << data.ends[1].value << " [label=\"t=" << data.thickness;
        for (MarkingId m : g.markings_on(e)) {
            out << ", m" << m.value << "@" << to_string(g.markings().at(m).position);
        }
        out << "\"];\n";
    }
    return out.str();
}

inline std::string dot_graph(const DualGraph& g, const std::set<VertexId>* exceptional = nullptr) {
    std::ostringstream out;
    out << "graph fiber {\n  node [shape=circle];\n"
        << dot_graph_body(g, "", exceptional) << "}\n";
    return out.str();
}

/// Source rendered above the target, with dashed arrows for the vertex map.
inline std::string dot_cover(const CoverDatum& c) {
    std::ostringstream out;
    out << "graph cover {\n  node [shape=circle];\n";
    out << "  subgraph cluster_source {\n    label=\"source\";\n"
        << dot_graph_body(c.source, "s") << "  }\n";
    out << "  subgraph cluster_target {\n    label=\"target\";\n"
        << dot_graph_body(c.target, "t") << "  }\n";
    for (const auto& [v, w] : c.vertex_map) {
        out << "  sv" << v.value << " -- tv" << w.value << " [style=dashed, label=\"d="
            << c.vertex_degree.at(v) << "\"];\n";
    }
    out << "}\n";
    return out.str();
}

inline std::string dot_poset(const DominationPoset& p) {
    std::ostringstream out;
    out << "digraph hasse {\n  node [shape=box];\n";
    for (std::size_t i = 0; i < p.elements.size(); ++i) {
        out << "  n" << i << " [label=\"#" << i << "\"];\n";
    }
    for (const auto& [child, parent] : p.covers_relation) {
        out << "  n" << parent << " -> n" << child << ";\n";
    }
    out << "}\n";
    return out.str();
}

// ---- file plumbing --------------------------------------------------------------

inline std::string dump_canonical(const json& j) { return j.dump(2) + "\n"; }

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        Diagnostics d;
        d.add("file-error", {path}, "cannot open file");
        throw ValidationError(std::move(d));
    }
    json j;
    try {
        in >> j;
    } catch (const std::exception& ex) {
        Diagnostics d;
        d.add("parse-error", {path}, ex.what());
        throw ValidationError(std::move(d));
    }
    return j;
}

enum class FileKind { Graph, ModelFile, Cover, Poset };

inline FileKind sniff_kind(const json& j) {
    if (j.is_object() && j.contains("source") && j.contains("target")) return FileKind::Cover;
    if (j.is_object() && j.contains("exceptional")) return FileKind::ModelFile;
    if (j.is_object() && j.contains("elements") && j.contains("covers_relation")) {
        return FileKind::Poset;
    }
    return FileKind::Graph;
}

} // namespace ssred

#endif // SSRED_IO_HPP
