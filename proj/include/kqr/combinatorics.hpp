#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <vector>

namespace kqr {

/// Vertices are 0-indexed ints; a vertex set is a strictly increasing vector.
using VertexSet = std::vector<int>;

inline std::int64_t binom(std::int64_t n, std::int64_t k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    std::int64_t r = 1;
    for (std::int64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

/// Calls f(subset) for every k-subset of {pool[0..m)}, in lexicographic order.
template <class F>
void for_each_subset(const std::vector<int>& pool, int k, F&& f) {
    const int m = static_cast<int>(pool.size());
    if (k < 0 || k > m) return;
    VertexSet cur(k);
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    while (true) {
        for (int i = 0; i < k; ++i) cur[i] = pool[idx[i]];
        f(const_cast<const VertexSet&>(cur));
        int i = k - 1;
        while (i >= 0 && idx[i] == m - k + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

/// k-subsets of {0,..,n-1}.
template <class F>
void for_each_subset_of_range(int n, int k, F&& f) {
    std::vector<int> pool(n);
    for (int i = 0; i < n; ++i) pool[i] = i;
    for_each_subset(pool, k, std::forward<F>(f));
}

inline VertexSet set_union(const VertexSet& a, const VertexSet& b) {
    VertexSet out;
    out.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline VertexSet set_minus(const VertexSet& a, const VertexSet& b) {
    VertexSet out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline VertexSet set_intersect(const VertexSet& a, const VertexSet& b) {
    VertexSet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline int intersection_size(const VertexSet& a, const VertexSet& b) {
    int cnt = 0;
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (*i < *j) ++i;
        else if (*j < *i) ++j;
        else { ++cnt; ++i; ++j; }
    }
    return cnt;
}

inline bool is_subset(const VertexSet& a, const VertexSet& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

inline bool is_sorted_set(const VertexSet& s) {
    for (std::size_t i = 1; i < s.size(); ++i)
        if (s[i - 1] >= s[i]) return false;
    return true;
}

inline VertexSet canonical(VertexSet s) {
    std::sort(s.begin(), s.end());
    return s;
}

struct VertexSetHash {
    std::size_t operator()(const VertexSet& s) const {
        std::size_t h = 0x9e3779b97f4a7c15ULL ^ s.size();
        for (int v : s) {
            h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return h;
    }
};

inline VertexSet range_set(int n) {
    VertexSet s(n);
    for (int i = 0; i < n; ++i) s[i] = i;
    return s;
}

}  // namespace kqr
