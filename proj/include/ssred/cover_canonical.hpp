#ifndef SSRED_COVER_CANONICAL_HPP
#define SSRED_COVER_CANONICAL_HPP

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ssred/canonical.hpp"
#include "ssred/cover.hpp"

namespace ssred {

namespace detail {

/// Enumerates, per group of indistinguishable objects, every assignment of
/// occurrence numbers; groups are tiny at desk scale.
template <class T, class Fn>
void for_each_group_assignment(std::vector<std::vector<T>> groups, Fn&& fn, std::size_t depth = 0) {
    if (depth == groups.size()) {
        std::map<T, std::size_t> occurrence;
        for (const auto& group : groups) {
            for (std::size_t i = 0; i < group.size(); ++i) occurrence[group[i]] = i;
        }
        fn(occurrence);
        return;
    }
    std::vector<T>& group = groups[depth];
    std::sort(group.begin(), group.end());
    do {
        for_each_group_assignment(groups, fn, depth + 1);
    } while (std::next_permutation(group.begin(), group.end()));
}

} // namespace detail

/// Canonical byte string of a cover: equal exactly for covers isomorphic as
/// pairs (source iso, target iso) commuting with all the maps. Exceptional
/// sets, when given, ride along as vertex labels. The minimum runs over all
/// canonical target labelings and over permutations of indistinguishable
/// parallel target edges and same-vertex target legs.
inline std::string canonicalize_cover(const CoverDatum& c,
                                      const std::set<VertexId>* ex_source = nullptr,
                                      const std::set<VertexId>* ex_target = nullptr) {
    CanonicalOptions topt;
    topt.collect_orderings = true;
    if (ex_target) {
        for (VertexId v : *ex_target) topt.vertex_labels[v] = "exc";
    }
    CanonicalResult tres = canonical_form(c.target, topt);

    std::optional<std::string> best;
    for (const auto& order : tres.orderings) {
        std::map<VertexId, std::size_t> ti;
        for (std::size_t i = 0; i < order.size(); ++i) ti[order[i]] = i;

        auto edge_desc = [&](EdgeId eid) {
            const EdgeData& e = c.target.edge(eid);
            std::size_t i = ti.at(e.ends[0]);
            std::size_t j = ti.at(e.ends[1]);
            if (j < i) std::swap(i, j);
            std::string out = "(" + std::to_string(i) + "," + std::to_string(j) + ";t" +
                              std::to_string(e.thickness) + ")";
            return out;
        };
        auto leg_desc = [&](LegId lid) {
            return "v" + std::to_string(ti.at(c.target.legs().at(lid)));
        };

        std::map<std::string, std::vector<EdgeId>> edge_groups;
        for (const auto& [e, data] : c.target.edges()) edge_groups[edge_desc(e)].push_back(e);
        std::map<std::string, std::vector<LegId>> leg_groups;
        for (const auto& [l, at] : c.target.legs()) leg_groups[leg_desc(l)].push_back(l);

        std::vector<std::vector<EdgeId>> egroups;
        for (auto& [desc, v] : edge_groups) egroups.push_back(v);
        std::vector<std::vector<LegId>> lgroups;
        for (auto& [desc, v] : leg_groups) lgroups.push_back(v);

        detail::for_each_group_assignment(egroups, [&](const std::map<EdgeId, std::size_t>& eocc) {
            detail::for_each_group_assignment(
                lgroups, [&](const std::map<LegId, std::size_t>& locc) {
                    auto edge_name = [&](EdgeId e) {
                        return edge_desc(e) + "#" + std::to_string(eocc.at(e));
                    };
                    auto leg_name = [&](LegId l) {
                        return leg_desc(l) + "#" + std::to_string(locc.at(l));
                    };
                    CanonicalOptions sopt;
                    for (const auto& [v, data] : c.source.vertices()) {
                        std::string label = "f" + std::to_string(ti.at(c.vertex_map.at(v))) +
                                            ";d" + std::to_string(c.vertex_degree.at(v));
                        if (ex_source && ex_source->count(v)) label += ";exc";
                        std::vector<std::string> legbits;
                        for (LegId l : c.source.leg_ids_at(v)) {
                            auto deg = c.leg_degree.find(l);
                            legbits.push_back(
                                leg_name(c.leg_map.at(l)) + "*" +
                                std::to_string(deg == c.leg_degree.end() ? 1 : deg->second));
                        }
                        std::sort(legbits.begin(), legbits.end());
                        label += ";Lm[";
                        for (const auto& s : legbits) label += s + ",";
                        label += "]";
                        sopt.vertex_labels[v] = std::move(label);
                    }
                    for (const auto& [e, data] : c.source.edges()) {
                        sopt.edge_labels[e] = "F" + edge_name(c.edge_map.at(e)) + ";d" +
                                              std::to_string(c.edge_dilation.at(e));
                    }
                    std::string candidate = tres.str + "\n====\n" +
                                            canonical_form(c.source, sopt).str +
                                            "\nN=" + std::to_string(c.global_degree);
                    if (!best || candidate < *best) best = candidate;
                });
        });
    }
    return best ? *best : "empty-cover";
}

} // namespace ssred

#endif // SSRED_COVER_CANONICAL_HPP
