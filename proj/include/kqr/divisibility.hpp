#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kqr/combinatorics.hpp"
#include "kqr/complex.hpp"
#include "kqr/hypergraph.hpp"

namespace kqr {

struct DivisibilityViolation {
    VertexSet subset;
    std::int64_t degree;   // λ|H(S)| (or |M(S)| for multigraphs)
    std::int64_t divisor;  // C(q-|S|, r-|S|)
};

struct DivisibilityReport {
    bool ok = true;
    std::vector<DivisibilityViolation> violations;  // capped
    static constexpr int kMaxViolations = 100;
};

/// (q,r,λ)-divisibility of an r-graph: C(q-|S|,r-|S|) | λ|H(S)| for every
/// S ⊆ [n] with |S| <= r-1. Violations are reported up to the cap.
inline DivisibilityReport check_design_divisible(const RGraph& H, int q, int r, int lambda = 1) {
    DivisibilityReport rep;
    for (int i = 0; i < r; ++i) {
        const std::int64_t divisor = binom(q - i, r - i);
        if (divisor == 1) continue;
        bool more = false;
        for_each_subset_of_range(H.n(), i, [&](const VertexSet& S) {
            if (more) return;
            std::int64_t deg = lambda * H.degree(S);
            if (deg % divisor != 0) {
                rep.ok = false;
                if (static_cast<int>(rep.violations.size()) < DivisibilityReport::kMaxViolations)
                    rep.violations.push_back({S, deg, divisor});
                else
                    more = true;
            }
        });
    }
    return rep;
}

struct AdmissibleResult {
    bool ok = false;
    std::int64_t block_count = 0;  // λ C(n,r)/C(q,r) when ok
};

/// Divisibility of the complete host: C(q-i,r-i) | λ C(n-i,r-i) for 0 <= i < r.
inline AdmissibleResult admissible_params(int n, int q, int r, int lambda = 1) {
    if (!(n >= q && q > r && r >= 1)) throw std::invalid_argument("admissible_params: need n >= q > r >= 1");
    AdmissibleResult res;
    for (int i = 0; i < r; ++i) {
        if ((lambda * binom(n - i, r - i)) % binom(q - i, r - i) != 0) return res;
    }
    res.ok = true;
    res.block_count = lambda * binom(n, r) / binom(q, r);
    return res;
}

/// Multigraph K_q^(r)-divisibility: C(q-|S|,r-|S|) | |M(S)| with multiplicity.
inline bool check_multi_divisible(const MultiRGraph& M, int q) {
    const int r = M.r();
    for (int i = 0; i < r; ++i) {
        const std::int64_t divisor = binom(q - i, r - i);
        if (divisor == 1) continue;
        bool ok = true;
        for_each_subset_of_range(M.n(), i, [&](const VertexSet& S) {
            if (!ok) return;
            if (M.degree(S) % divisor != 0) ok = false;
        });
        if (!ok) return false;
    }
    return true;
}

}  // namespace kqr
