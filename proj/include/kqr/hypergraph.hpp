#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kqr/combinatorics.hpp"

namespace kqr {

/// An r-uniform hypergraph on vertex set {0,..,n-1}.
///
/// Edges are strictly sorted r-subsets kept in lexicographic order
/// (canonical form), so iteration order is deterministic and membership
/// is a binary search. r = 0 is allowed: the only possible edge is {}.
class RGraph {
public:
    RGraph() : n_(0), r_(0) {}
    RGraph(int n, int r) : n_(n), r_(r) {
        if (r < 0 || n < 0) throw std::invalid_argument("RGraph: negative n or r");
    }
    RGraph(int n, int r, std::vector<VertexSet> edges) : RGraph(n, r) {
        for (auto& e : edges) add_unchecked(std::move(e));
        finalize();
    }

    int n() const { return n_; }
    int r() const { return r_; }
    std::int64_t size() const { return static_cast<std::int64_t>(edges_.size()); }
    bool empty() const { return edges_.empty(); }
    const std::vector<VertexSet>& edges() const { return edges_; }

    bool contains(const VertexSet& e) const {
        return std::binary_search(edges_.begin(), edges_.end(), e);
    }

    void add(VertexSet e) {
        validate(e);
        auto it = std::lower_bound(edges_.begin(), edges_.end(), e);
        if (it != edges_.end() && *it == e) return;
        edges_.insert(it, std::move(e));
    }

    void remove(const VertexSet& e) {
        auto it = std::lower_bound(edges_.begin(), edges_.end(), e);
        if (it != edges_.end() && *it == e) edges_.erase(it);
    }

    /// Link H(S): the (r-|S|)-graph of sets f with S ∪ f ∈ H, on the same
    /// ambient vertex range (vertices of S become isolated).
    RGraph link(const VertexSet& S) const {
        if (static_cast<int>(S.size()) > r_)
            throw std::invalid_argument("link: |S| > r");
        RGraph out(n_, r_ - static_cast<int>(S.size()));
        for (const auto& e : edges_) {
            if (is_subset(S, e)) out.edges_.push_back(set_minus(e, S));
        }
        out.finalize();
        return out;
    }

    /// Number of edges containing S (|H(S)| for |S| <= r).
    std::int64_t degree(const VertexSet& S) const {
        std::int64_t cnt = 0;
        for (const auto& e : edges_)
            if (is_subset(S, e)) ++cnt;
        return cnt;
    }

    /// (min,max) of |H(S)| over all i-subsets S of {0,..,n-1}.
    std::pair<std::int64_t, std::int64_t> degrees(int i) const {
        if (i < 0 || i >= r_)
            throw std::invalid_argument("degrees: level out of range");
        if (i == 0) return {size(), size()};
        std::int64_t lo = -1, hi = 0;
        std::map<VertexSet, std::int64_t> cnt;
        for (const auto& e : edges_) {
            for_each_subset(e, i, [&](const VertexSet& s) { ++cnt[s]; });
        }
        // i-sets not touching any edge have degree 0
        if (static_cast<std::int64_t>(cnt.size()) < binom(n_, i)) lo = 0;
        for (const auto& [s, c] : cnt) {
            if (lo < 0 || c < lo) lo = c;
            if (c > hi) hi = c;
        }
        if (lo < 0) lo = 0;
        return {lo, hi};
    }

    std::int64_t max_degree() const { return r_ >= 1 ? degrees(r_ - 1).second : size(); }
    std::int64_t min_degree() const { return r_ >= 1 ? degrees(r_ - 1).first : size(); }

    RGraph minus(const RGraph& other) const {
        RGraph out(n_, r_);
        for (const auto& e : edges_)
            if (!other.contains(e)) out.edges_.push_back(e);
        return out;  // already sorted
    }

    RGraph unite(const RGraph& other) const {
        RGraph out(n_, r_);
        std::set_union(edges_.begin(), edges_.end(), other.edges_.begin(), other.edges_.end(),
                       std::back_inserter(out.edges_));
        return out;
    }

    bool edge_disjoint_from(const RGraph& other) const {
        for (const auto& e : edges_)
            if (other.contains(e)) return false;
        return true;
    }

    /// Complete r-graph on n vertices.
    static RGraph complete(int n, int r) {
        RGraph out(n, r);
        for_each_subset_of_range(n, r, [&](const VertexSet& s) { out.edges_.push_back(s); });
        return out;
    }

    /// Partitions the edges into matchings by greedy colouring (first colour
    /// whose matching stays vertex-disjoint). Uses at most r*n^(r-1) parts.
    std::vector<RGraph> matching_decomposition() const {
        std::vector<RGraph> parts;
        std::vector<std::vector<char>> used;  // colour -> vertex used?
        for (const auto& e : edges_) {
            std::size_t c = 0;
            for (; c < parts.size(); ++c) {
                bool free = true;
                for (int v : e)
                    if (used[c][v]) { free = false; break; }
                if (free) break;
            }
            if (c == parts.size()) {
                parts.emplace_back(n_, r_);
                used.emplace_back(n_, 0);
            }
            parts[c].edges_.push_back(e);
            for (int v : e) used[c][v] = 1;
        }
        return parts;
    }

    friend bool operator==(const RGraph& a, const RGraph& b) {
        return a.n_ == b.n_ && a.r_ == b.r_ && a.edges_ == b.edges_;
    }

private:
    void validate(const VertexSet& e) const {
        if (static_cast<int>(e.size()) != r_)
            throw std::invalid_argument("RGraph: edge arity != r");
        if (!is_sorted_set(e))
            throw std::invalid_argument("RGraph: edge not strictly sorted");
        if (!e.empty() && (e.front() < 0 || e.back() >= n_))
            throw std::invalid_argument("RGraph: vertex out of range");
    }

    void add_unchecked(VertexSet e) {
        std::sort(e.begin(), e.end());
        validate(e);
        edges_.push_back(std::move(e));
    }

    void finalize() {
        std::sort(edges_.begin(), edges_.end());
        edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
    }

    int n_;
    int r_;
    std::vector<VertexSet> edges_;
};

/// r-uniform multigraph: sorted r-subsets with positive multiplicities.
class MultiRGraph {
public:
    MultiRGraph() : n_(0), r_(0) {}
    MultiRGraph(int n, int r) : n_(n), r_(r) {}

    int n() const { return n_; }
    int r() const { return r_; }
    const std::map<VertexSet, std::int64_t>& multiplicities() const { return mult_; }

    std::int64_t multiplicity(const VertexSet& e) const {
        auto it = mult_.find(e);
        return it == mult_.end() ? 0 : it->second;
    }

    void add(VertexSet e, std::int64_t count = 1) {
        if (count <= 0) throw std::invalid_argument("MultiRGraph: nonpositive count");
        std::sort(e.begin(), e.end());
        if (static_cast<int>(e.size()) != r_ || !is_sorted_set(e))
            throw std::invalid_argument("MultiRGraph: bad edge");
        if (!e.empty() && (e.front() < 0 || e.back() >= n_))
            throw std::invalid_argument("MultiRGraph: vertex out of range");
        mult_[std::move(e)] += count;
    }

    void remove(const VertexSet& e, std::int64_t count = 1) {
        auto it = mult_.find(e);
        if (it == mult_.end() || it->second < count)
            throw std::invalid_argument("MultiRGraph: removing more than present");
        it->second -= count;
        if (it->second == 0) mult_.erase(it);
    }

    /// Total number of edges containing S, counted with multiplicity.
    std::int64_t degree(const VertexSet& S) const {
        std::int64_t cnt = 0;
        for (const auto& [e, m] : mult_)
            if (is_subset(S, e)) cnt += m;
        return cnt;
    }

    std::int64_t total() const {
        std::int64_t t = 0;
        for (const auto& [e, m] : mult_) t += m;
        return t;
    }

    MultiRGraph link(const VertexSet& S) const {
        if (static_cast<int>(S.size()) > r_)
            throw std::invalid_argument("link: |S| > r");
        MultiRGraph out(n_, r_ - static_cast<int>(S.size()));
        for (const auto& [e, m] : mult_)
            if (is_subset(S, e)) out.mult_[set_minus(e, S)] += m;
        return out;
    }

    friend bool operator==(const MultiRGraph& a, const MultiRGraph& b) {
        return a.r_ == b.r_ && a.mult_ == b.mult_;
    }

    static MultiRGraph complete(int n, int r, std::int64_t multiplicity) {
        MultiRGraph out(n, r);
        for_each_subset_of_range(n, r, [&](const VertexSet& s) { out.mult_[s] = multiplicity; });
        return out;
    }

private:
    int n_;
    int r_;
    std::map<VertexSet, std::int64_t> mult_;
};

}  // namespace kqr
