#ifndef SSRED_CANONICAL_HPP
#define SSRED_CANONICAL_HPP

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ssred/dual_graph.hpp"

namespace ssred {

/// Extra payload folded into the canonical form. Vertex labels distinguish
/// e.g. exceptional vertices in a model; edge labels carry cover data.
struct CanonicalOptions {
    std::map<VertexId, std::string> vertex_labels;
    std::map<EdgeId, std::string> edge_labels;
    bool collect_orderings = false;
};

struct CanonicalResult {
    std::string str;
    /// All vertex orders realizing the canonical string (when requested);
    /// their count is the order of the labeled automorphism group.
    std::vector<std::vector<VertexId>> orderings;
};

namespace detail {

/// Canonical labeling by ordered vertex placement: at each step only
/// vertices of minimal isomorphism-invariant signature may be placed, and
/// the lexicographically least row encoding wins. Two graphs produce equal
/// strings exactly when they are isomorphic as labeled structures.
class CanonicalSearch {
public:
    CanonicalSearch(const DualGraph& g, const CanonicalOptions& opt) : g_(g), opt_(opt) {
        for (const auto& [v, data] : g.vertices()) verts_.push_back(v);
        static_sig_.reserve(verts_.size());
        for (VertexId v : verts_) static_sig_.push_back(static_signature(v));
    }

    CanonicalResult run() {
        order_.clear();
        placed_index_.clear();
        best_.reset();
        best_orders_.clear();
        std::string header = "n=" + std::to_string(verts_.size()) +
                             ";e=" + std::to_string(g_.edges().size()) +
                             ";l=" + std::to_string(g_.legs().size()) +
                             ";m=" + std::to_string(g_.markings().size());
        recurse(header);
        CanonicalResult res;
        res.str = best_ ? *best_ : std::string("n=0");
        if (opt_.collect_orderings) res.orderings = best_orders_;
        return res;
    }

private:
    std::string vertex_label(VertexId v) const {
        auto it = opt_.vertex_labels.find(v);
        return it == opt_.vertex_labels.end() ? std::string{} : it->second;
    }

    std::string edge_label(EdgeId e) const {
        auto it = opt_.edge_labels.find(e);
        return it == opt_.edge_labels.end() ? std::string{} : it->second;
    }

    /// Marking positions of an edge rendered from the given anchor endpoint;
    /// for loops the two anchors are interchangeable, so the smaller of the
    /// two sorted position lists is used.
    std::string marking_string(EdgeId eid, bool from_slot0) const {
        const EdgeData& e = g_.edge(eid);
        std::vector<MarkingId> ms = g_.markings_on(eid);
        if (ms.empty()) return "";
        std::vector<Rational> direct;
        for (MarkingId m : ms) direct.push_back(g_.normalized_position(g_.markings().at(m)));
        std::sort(direct.begin(), direct.end());
        auto render = [](const std::vector<Rational>& ps) {
            std::string out = "m[";
            for (const auto& p : ps) out += to_string(p) + ",";
            return out + "]";
        };
        std::vector<Rational> flipped;
        for (const auto& p : direct) flipped.push_back(Rational(e.thickness) - p);
        std::sort(flipped.begin(), flipped.end());
        if (e.is_loop()) return render(std::min(direct, flipped));
        return render(from_slot0 ? direct : flipped);
    }

    std::string edge_core(EdgeId eid, bool from_slot0) const {
        const EdgeData& e = g_.edge(eid);
        return "t" + std::to_string(e.thickness) + ";x" + edge_label(eid) + ";" +
               marking_string(eid, from_slot0);
    }

    std::string static_signature(VertexId v) const {
        const VertexData& data = g_.vertex(v);
        std::string sig = "g" + std::to_string(data.genus) + ";l" +
                          std::to_string(g_.legs_at(v)) + ";x" + vertex_label(v) + ";v" +
                          std::to_string(g_.valence(v));
        std::vector<std::string> incident;
        for (EdgeId eid : g_.edges_at(v)) {
            const EdgeData& e = g_.edge(eid);
            if (e.is_loop()) {
                incident.push_back("(self;" + edge_core(eid, true) + ")");
                continue;
            }
            VertexId other = (e.ends[0] == v) ? e.ends[1] : e.ends[0];
            const VertexData& od = g_.vertex(other);
            incident.push_back("(n:g" + std::to_string(od.genus) + ",v" +
                               std::to_string(g_.valence(other)) + ",l" +
                               std::to_string(g_.legs_at(other)) + ",x" + vertex_label(other) +
                               ";" + edge_core(eid, e.ends[0] == v) + ")");
        }
        std::sort(incident.begin(), incident.end());
        for (const auto& s : incident) sig += s;
        return sig;
    }

    /// Signature relative to the placed prefix; isomorphism-invariant given
    /// corresponding prefixes.
    std::string dynamic_signature(VertexId v) const {
        std::string sig = static_sig_[index_of(v)];
        std::vector<std::string> rel;
        for (EdgeId eid : g_.edges_at(v)) {
            const EdgeData& e = g_.edge(eid);
            if (e.is_loop()) continue;
            VertexId other = (e.ends[0] == v) ? e.ends[1] : e.ends[0];
            auto it = placed_index_.find(other);
            if (it == placed_index_.end()) continue;
            rel.push_back("(" + std::to_string(it->second) + ";" +
                          edge_core(eid, e.ends[0] != v) + ")");
        }
        std::sort(rel.begin(), rel.end());
        sig += "|";
        for (const auto& s : rel) sig += s;
        return sig;
    }

    /// Row emitted when v is placed: its labels plus every edge from v into
    /// the placed set (loops included, attributed to v's own row).
    std::string encode_row(VertexId v, std::size_t k) const {
        const VertexData& data = g_.vertex(v);
        std::string row = "\n" + std::to_string(k) + ":g" + std::to_string(data.genus) + ";l" +
                          std::to_string(g_.legs_at(v)) + ";x" + vertex_label(v) + ";[";
        std::vector<std::string> descs;
        for (EdgeId eid : g_.edges_at(v)) {
            const EdgeData& e = g_.edge(eid);
            if (e.is_loop()) {
                if (e.ends[0] == v) {
                    descs.push_back("(" + std::to_string(k) + ";" + edge_core(eid, true) + ")");
                }
                continue;
            }
            VertexId other = (e.ends[0] == v) ? e.ends[1] : e.ends[0];
            auto it = placed_index_.find(other);
            if (it == placed_index_.end()) continue;
            // Positions anchored at the earlier-placed endpoint.
            descs.push_back("(" + std::to_string(it->second) + ";" +
                            edge_core(eid, e.ends[0] == other) + ")");
        }
        std::sort(descs.begin(), descs.end());
        for (const auto& s : descs) row += s;
        return row + "]";
    }

    std::size_t index_of(VertexId v) const {
        auto it = std::lower_bound(verts_.begin(), verts_.end(), v);
        return static_cast<std::size_t>(it - verts_.begin());
    }

    void recurse(const std::string& partial) {
        if (best_ && partial > *best_) return;
        if (order_.size() == verts_.size()) {
            if (!best_ || partial < *best_) {
                best_ = partial;
                best_orders_.clear();
                best_orders_.push_back(order_);
            } else if (partial == *best_) {
                if (opt_.collect_orderings) best_orders_.push_back(order_);
            }
            return;
        }
        std::optional<std::string> min_sig;
        std::vector<VertexId> candidates;
        for (VertexId v : verts_) {
            if (placed_index_.count(v)) continue;
            std::string sig = dynamic_signature(v);
            if (!min_sig || sig < *min_sig) {
                min_sig = sig;
                candidates.assign(1, v);
            } else if (sig == *min_sig) {
                candidates.push_back(v);
            }
        }
        for (VertexId v : candidates) {
            std::size_t k = order_.size();
            order_.push_back(v);
            placed_index_[v] = k;
            recurse(partial + encode_row(v, k));
            placed_index_.erase(v);
            order_.pop_back();
        }
    }

    const DualGraph& g_;
    const CanonicalOptions& opt_;
    std::vector<VertexId> verts_;
    std::vector<std::string> static_sig_;
    std::vector<VertexId> order_;
    std::map<VertexId, std::size_t> placed_index_;
    std::optional<std::string> best_;
    std::vector<std::vector<VertexId>> best_orders_;
};

} // namespace detail

inline CanonicalResult canonical_form(const DualGraph& g, const CanonicalOptions& opt = {}) {
    detail::CanonicalSearch search(g, opt);
    return search.run();
}

/// Canonical byte string: equal exactly for isomorphic labeled graphs.
inline std::string canonicalize(const DualGraph& g) { return canonical_form(g).str; }

/// Canonical form of a model presentation; the exceptional status of each
/// vertex participates in the labeling.
inline std::string canonicalize_model(const DualGraph& top, const std::set<VertexId>& exceptional) {
    CanonicalOptions opt;
    for (VertexId v : exceptional) opt.vertex_labels[v] = "exc";
    return canonical_form(top, opt).str;
}

} // namespace ssred

#endif // SSRED_CANONICAL_HPP
