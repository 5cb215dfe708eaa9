#pragma once

#include <algorithm>
#include <stdexcept>
#include <utility>
#include <vector>

#include "kqr/combinatorics.hpp"
#include "kqr/hypergraph.hpp"

namespace kqr {

/// A downward-closed set system with explicit levels G^(0)..G^(max_level).
///
/// The vertex set is stored explicitly (restrictions and links keep the
/// original labels), so the effective vertex count survives G[U] and G(e).
/// The empty complex is the one with ∅ ∉ G^(0).
class Complex {
public:
    Complex() : max_level_(0), levels_(1) {}

    /// Complex with the given vertex set and ∅ as its only edge.
    Complex(VertexSet vertices, int max_level)
        : verts_(std::move(vertices)), max_level_(max_level), levels_(max_level + 1) {
        if (max_level < 0) throw std::invalid_argument("Complex: negative max_level");
        levels_[0].push_back({});
    }

    const VertexSet& vertices() const { return verts_; }
    int vertex_count() const { return static_cast<int>(verts_.size()); }
    int max_level() const { return max_level_; }

    /// Ambient label bound (vertices are < ambient_n()).
    int ambient_n() const { return verts_.empty() ? 0 : verts_.back() + 1; }

    bool empty() const { return levels_[0].empty(); }

    const std::vector<VertexSet>& level(int i) const {
        if (i < 0 || i > max_level_) throw std::invalid_argument("Complex: level out of range");
        return levels_[i];
    }

    /// G^(i) as an r-graph on the ambient label range.
    RGraph level_graph(int i) const {
        return RGraph(ambient_n(), i, level(i));
    }

    bool contains(const VertexSet& e) const {
        int k = static_cast<int>(e.size());
        if (k > max_level_) return false;
        return std::binary_search(levels_[k].begin(), levels_[k].end(), e);
    }

    void insert(const VertexSet& e) {
        int k = static_cast<int>(e.size());
        if (k > max_level_) throw std::invalid_argument("Complex: edge above max_level");
        auto& lv = levels_[k];
        auto it = std::lower_bound(lv.begin(), lv.end(), e);
        if (it == lv.end() || *it != e) lv.insert(it, e);
    }

    /// Turns this into the empty complex (∅ removed from G^(0)).
    void clear_level0() { levels_[0].clear(); }

    /// Inserts e together with all of its subsets.
    void insert_closed(const VertexSet& e) {
        for (int k = 0; k <= static_cast<int>(e.size()); ++k)
            for_each_subset(e, k, [&](const VertexSet& s) { insert(s); });
    }

    /// Exhaustive downward-closure check (desk scale).
    bool is_downward_closed() const {
        for (int i = 1; i <= max_level_; ++i) {
            for (const auto& e : levels_[i]) {
                bool ok = true;
                for_each_subset(e, i - 1, [&](const VertexSet& s) {
                    if (!contains(s)) ok = false;
                });
                if (!ok) return false;
            }
        }
        return true;
    }

    /// G[H] for an r'-graph H: keeps e with all r'-subsets of e in H.
    /// Levels below r' are unchanged.
    Complex restrict_to(const RGraph& H) const {
        const int rp = H.r();
        Complex out(verts_, max_level_);
        for (int i = 0; i <= max_level_; ++i) {
            if (i < rp) {
                out.levels_[i] = levels_[i];
                continue;
            }
            for (const auto& e : levels_[i]) {
                bool keep = true;
                for_each_subset(e, rp, [&](const VertexSet& s) {
                    if (!H.contains(s)) keep = false;
                });
                if (keep) out.levels_[i].push_back(e);
            }
        }
        return out;
    }

    /// G − H := G[G^(r) − H].
    Complex minus(const RGraph& H) const {
        return restrict_to(level_graph(H.r()).minus(H));
    }

    /// G[U]: all edges inside U, on vertex set verts ∩ U.
    Complex restrict_vertices(const VertexSet& U) const {
        Complex out(set_intersect(verts_, U), max_level_);
        out.levels_[0] = levels_[0];
        for (int i = 1; i <= max_level_; ++i)
            for (const auto& e : levels_[i])
                if (is_subset(e, U)) out.levels_[i].push_back(e);
        return out;
    }

    /// Link complex G(e) on verts ∖ e; empty when e ∉ G.
    Complex link(const VertexSet& e) const {
        const int k = static_cast<int>(e.size());
        Complex out(set_minus(verts_, e), std::max(0, max_level_ - k));
        out.levels_[0].clear();
        if (!contains(e)) return out;
        for (int i = 0; i + k <= max_level_; ++i) {
            for (const auto& g : levels_[i + k]) {
                if (is_subset(e, g)) out.levels_[i].push_back(set_minus(g, e));
            }
            std::sort(out.levels_[i].begin(), out.levels_[i].end());
        }
        return out;
    }

    /// Counts |G^(m)(e)| = number of (m-|e|)-sets f with e ∪ f ∈ G^(m).
    std::int64_t link_count(const VertexSet& e, int m) const {
        if (m > max_level_) throw std::invalid_argument("link_count: level not materialized");
        std::int64_t cnt = 0;
        for (const auto& g : levels_[m])
            if (is_subset(e, g)) ++cnt;
        return cnt;
    }

    /// Complete complex K_n up to max_level.
    static Complex complete(int n, int max_level) {
        Complex out(range_set(n), max_level);
        for (int i = 1; i <= std::min(max_level, n); ++i)
            for_each_subset_of_range(n, i, [&](const VertexSet& s) { out.levels_[i].push_back(s); });
        return out;
    }

    /// Complex induced by an r-graph H: levels < r complete, level i >= r
    /// holds e iff every r-subset of e lies in H. H^{↔(r)} = H.
    static Complex induced(const RGraph& H, int max_level) {
        Complex out = complete(H.n(), max_level);
        return out.restrict_to(H);
    }

    /// Complex generated by a hypergraph (all subsets of its edges).
    static Complex generated(const std::vector<VertexSet>& edges, int n, int max_level) {
        Complex out(range_set(n), max_level);
        out.levels_[0].clear();
        for (const auto& e : edges) {
            if (static_cast<int>(e.size()) > max_level)
                throw std::invalid_argument("generated: edge above max_level");
            out.insert_closed(e);
        }
        return out;
    }

    friend bool operator==(const Complex& a, const Complex& b) {
        return a.verts_ == b.verts_ && a.levels_ == b.levels_;
    }

private:
    VertexSet verts_;
    int max_level_;
    std::vector<std::vector<VertexSet>> levels_;
};

/// ⋂_{f∈F} G(f) for a nonempty family F: sets g with f ∪ g ∈ G for all f.
inline Complex intersect_links(const Complex& G, const std::vector<VertexSet>& F) {
    if (F.empty()) throw std::invalid_argument("intersect_links: empty family");
    Complex out = G.link(F[0]);
    for (std::size_t i = 1; i < F.size(); ++i) {
        const Complex Li = G.link(F[i]);
        Complex merged(set_intersect(out.vertices(), Li.vertices()), std::min(out.max_level(), Li.max_level()));
        merged.clear_level0();
        for (int lv = 0; lv <= merged.max_level(); ++lv)
            for (const auto& e : out.level(lv))
                if (Li.contains(e) && is_subset(e, merged.vertices())) merged.insert(e);
        out = std::move(merged);
    }
    return out;
}

}  // namespace kqr
