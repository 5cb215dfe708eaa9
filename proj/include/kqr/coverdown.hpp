#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kqr/combinatorics.hpp"
#include "kqr/complex.hpp"
#include "kqr/hypergraph.hpp"
#include "kqr/packing.hpp"
#include "kqr/params.hpp"
#include "kqr/rational.hpp"
#include "kqr/rng.hpp"

namespace kqr {

// ---------------------------------------------------------------------------
// i-systems and focuses
// ---------------------------------------------------------------------------

/// Distinct i-subsets S_1..S_p of the host vertex set.
struct ISystem {
    int i = 0;
    std::vector<VertexSet> sets;

    void validate() const {
        for (const auto& S : sets)
            if (static_cast<int>(S.size()) != i || !is_sorted_set(S))
                throw std::invalid_argument("ISystem: member is not a sorted i-set");
        auto copy = sets;
        std::sort(copy.begin(), copy.end());
        if (std::adjacent_find(copy.begin(), copy.end()) != copy.end())
            throw std::invalid_argument("ISystem: members not distinct");
    }
};

/// Per-S target vertex sets U_S ⊆ V ∖ S, aligned with ISystem::sets.
struct Focus {
    std::vector<VertexSet> U;
};

/// Every f ∈ G with |f| >= r contains at most one member of the system.
/// Returns a violating f if any.
inline std::optional<VertexSet> exclusivity_violation(const Complex& G, const ISystem& sys, int r) {
    for (int lvl = r; lvl <= G.max_level(); ++lvl) {
        for (const auto& f : G.level(lvl)) {
            int hits = 0;
            for (const auto& S : sys.sets)
                if (is_subset(S, f) && ++hits > 1) return f;
        }
    }
    return std::nullopt;
}

/// Type function τ_{r'}: S-important r'-sets e ↦ |e ∩ U_S| for the unique
/// S ⊆ e. Unimportant sets are absent from the map.
inline std::map<VertexSet, int> type_function(const Complex& G, const ISystem& sys, const Focus& foc,
                                              int rp, int r) {
    if (auto bad = exclusivity_violation(G, sys, r))
        throw std::invalid_argument("type_function: host not r-exclusive (witness has " +
                                    std::to_string(bad->size()) + " vertices)");
    std::map<VertexSet, int> tau;
    for (const auto& e : G.level(rp)) {
        for (std::size_t j = 0; j < sys.sets.size(); ++j) {
            if (is_subset(sys.sets[j], e)) {
                tau[e] = intersection_size(e, foc.U[j]);
                break;  // at most one S by exclusivity
            }
        }
    }
    return tau;
}

/// (q,r)-divisibility with respect to an i-system and focus: for all S and
/// all f ⊆ V∖S with |f| <= r-i-1 and |f ∖ U_S| >= 1,
/// C(q-i-|f|, r-i-|f|) divides |H(S ∪ f)|.
inline bool divisible_wrt_focus(const RGraph& H, const ISystem& sys, const Focus& foc, int q, int r) {
    const int i = sys.i;
    for (std::size_t j = 0; j < sys.sets.size(); ++j) {
        const VertexSet& S = sys.sets[j];
        const VertexSet& US = foc.U[j];
        VertexSet rest;
        for (int v = 0; v < H.n(); ++v)
            if (!std::binary_search(S.begin(), S.end(), v)) rest.push_back(v);
        for (int fsize = 0; fsize <= r - i - 1; ++fsize) {
            const std::int64_t divisor = binom(q - i - fsize, r - i - fsize);
            bool ok = true;
            for_each_subset(rest, fsize, [&](const VertexSet& f) {
                if (!ok) return;
                if (set_minus(f, US).empty()) return;  // need |f ∖ U_S| >= 1
                if (H.degree(set_union(S, f)) % divisor != 0) ok = false;
            });
            if (!ok) return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Focus condition report (F1)-(F3)
// ---------------------------------------------------------------------------

struct FocusReport {
    bool f1 = true;
    bool f2 = true;
    bool f3 = true;
    std::int64_t f1_worst_deviation_cubed = 0;  // max |U_S| deviation^3 vs n^2
    std::int64_t f2_worst_intersection = 0;
    Rational f2_bound;
    Rational f3_worst_ratio_j1;  // |J1| / bound, worst case
    Rational f3_worst_ratio_j2;
    std::vector<std::string> notes;
};

/// Z_{r,i}: quadruples (z0,z1,z2,z3) with z0+z1 < i, z0+z3 < i,
/// z0+z1+z2+z3 = r.
inline std::vector<std::array<int, 4>> z_quadruples(int r, int i) {
    std::vector<std::array<int, 4>> zs;
    for (int z0 = 0; z0 < i; ++z0)
        for (int z1 = 0; z0 + z1 < i; ++z1)
            for (int z3 = 0; z0 + z3 < i; ++z3) {
                int z2 = r - z0 - z1 - z3;
                if (z2 >= 0) zs.push_back({z0, z1, z2, z3});
            }
    return zs;
}

/// Measured (F1)-(F3) for a (ρ_size, ρ, r)-focus on n vertices:
/// (F1) |U_S| = ρ_size ρ n ± n^{2/3}; (F2) |U_S ∩ U_S'| <= 2ρ²n;
/// (F3) the J-set bounds, enumerated exhaustively.
inline FocusReport check_focus(const Focus& foc, const ISystem& sys, const Rational& rho_size,
                               const Rational& rho, int r, int n) {
    FocusReport rep;
    const int i = sys.i;
    const Rational target = rho_size * rho * Rational(n);

    for (const auto& US : foc.U) {
        Rational dev = (Rational(static_cast<std::int64_t>(US.size())) - target).abs();
        // |dev| <= n^{2/3}  <=>  dev^3 <= n^2
        if (dev.pow(3) > Rational(n).pow(2)) rep.f1 = false;
    }

    rep.f2_bound = Rational(2) * rho * rho * Rational(n);
    for (std::size_t a = 0; a < foc.U.size(); ++a)
        for (std::size_t b = a + 1; b < foc.U.size(); ++b) {
            std::int64_t isz = intersection_size(foc.U[a], foc.U[b]);
            rep.f2_worst_intersection = std::max(rep.f2_worst_intersection, isz);
            if (Rational(isz) > rep.f2_bound) rep.f2 = false;
        }

    if (i == 0 || sys.sets.size() < 2) {
        rep.notes.push_back("(F2)/(F3) vacuous for i = 0 or a single S");
        return rep;
    }

    rep.f3_worst_ratio_j1 = Rational(0);
    rep.f3_worst_ratio_j2 = Rational(0);
    const VertexSet V = range_set(n);
    for (std::size_t a = 0; a < sys.sets.size(); ++a) {
        const VertexSet& S = sys.sets[a];
        for (const auto& z : z_quadruples(r, i)) {
            const int z0 = z[0], z1 = z[1], z2 = z[2], z3 = z[3];
            const int fsize = z1 + z2 - 1;
            if (fsize < 0) continue;
            const Rational bound1 = Rational(1LL << std::min(62, 6 * r)) * rho.pow(z2 + z3 - 1) *
                                    Rational(n).pow(i - z0 - z1);
            const Rational bound2 = Rational(1LL << std::min(62, 9 * r)) * rho.pow(z2 + z3 + 1) *
                                    Rational(n).pow(i - z0 - z1 + 1);
            for_each_subset(set_minus(V, S), fsize, [&](const VertexSet& f) {
                std::int64_t j1 = 0, j2 = 0;
                for (std::size_t b = 0; b < sys.sets.size(); ++b) {
                    const VertexSet& Sp = sys.sets[b];
                    if (intersection_size(S, Sp) != z0) continue;
                    if (!is_subset(f, set_union(Sp, foc.U[b]))) continue;
                    if (intersection_size(foc.U[b], S) < z3) continue;
                    const int fS = intersection_size(f, Sp);
                    if (fS == z1) ++j1;
                    else if (fS == z1 - 1 && !set_intersect(foc.U[a], set_minus(Sp, f)).empty()) ++j2;
                }
                if (bound1 > Rational(0)) {
                    Rational ratio = Rational(j1) / bound1;
                    if (ratio > rep.f3_worst_ratio_j1) rep.f3_worst_ratio_j1 = ratio;
                    if (Rational(j1) > bound1) rep.f3 = false;
                } else if (j1 > 0) {
                    rep.f3 = false;
                }
                if (bound2 > Rational(0)) {
                    Rational ratio = Rational(j2) / bound2;
                    if (ratio > rep.f3_worst_ratio_j2) rep.f3_worst_ratio_j2 = ratio;
                    if (Rational(j2) > bound2) rep.f3 = false;
                } else if (j2 > 0) {
                    rep.f3 = false;
                }
            });
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Partition pairs and containment matrices
// ---------------------------------------------------------------------------

/// Ordered partitions of G^(r) and G^(q) where every clique of class k
/// contains the same number B[l][k] of edges of class l.
struct PartitionPair {
    std::vector<std::vector<VertexSet>> edge_classes;
    std::vector<std::vector<VertexSet>> clique_classes;
    std::vector<std::vector<std::int64_t>> B;  // B[l][k]

    bool upper_triangular() const {
        for (std::size_t l = 0; l < B.size(); ++l)
            for (std::size_t k = 0; k < l && k < B[l].size(); ++k)
                if (B[l][k] != 0) return false;
        return true;
    }
};

/// The (r,q)-partition pair of G, U: classes by |· ∩ U|, containment
/// B(E_l, Q_k) = C(k,l) C(q-k, r-l). The formula is verified exhaustively
/// against the actual per-block counts; a mismatch is an internal error.
inline PartitionPair partition_pair_of(const Complex& G, const VertexSet& U, int q, int r) {
    PartitionPair pp;
    pp.edge_classes.assign(r + 1, {});
    pp.clique_classes.assign(q + 1, {});
    for (const auto& e : G.level(r)) pp.edge_classes[intersection_size(e, U)].push_back(e);
    for (const auto& Q : G.level(q)) pp.clique_classes[intersection_size(Q, U)].push_back(Q);
    pp.B.assign(r + 1, std::vector<std::int64_t>(q + 1, 0));
    for (int l = 0; l <= r; ++l)
        for (int k = 0; k <= q; ++k) pp.B[l][k] = binom(k, l) * binom(q - k, r - l);

    // exhaustive verification of the containment function
    for (int k = 0; k <= q; ++k) {
        for (const auto& Q : pp.clique_classes[k]) {
            std::vector<std::int64_t> per_class(r + 1, 0);
            for_each_subset(Q, r, [&](const VertexSet& e) { ++per_class[intersection_size(e, U)]; });
            for (int l = 0; l <= r; ++l)
                if (per_class[l] != pp.B[l][k])
                    throw std::logic_error("partition_pair_of: containment verification failed");
        }
    }
    return pp;
}

/// Exhaustive constancy check for an arbitrary pair: every clique of class
/// k contains exactly B[l][k] edges of class l.
inline bool verify_partition_pair(const PartitionPair& pp, int r) {
    std::map<VertexSet, int> edge_class;
    for (std::size_t l = 0; l < pp.edge_classes.size(); ++l)
        for (const auto& e : pp.edge_classes[l]) edge_class[e] = static_cast<int>(l);
    for (std::size_t k = 0; k < pp.clique_classes.size(); ++k) {
        for (const auto& Q : pp.clique_classes[k]) {
            std::vector<std::int64_t> cnt(pp.edge_classes.size(), 0);
            bool ok = true;
            for_each_subset(Q, r, [&](const VertexSet& e) {
                auto it = edge_class.find(e);
                if (it == edge_class.end()) ok = false;
                else ++cnt[it->second];
            });
            if (!ok) return false;
            for (std::size_t l = 0; l < cnt.size(); ++l)
                if (cnt[l] != pp.B[l][k]) return false;
        }
    }
    return true;
}

struct PartitionRegularityReport {
    std::vector<std::vector<Rational>> A;    // midrange per class pair, undefined -> -1
    Rational eps;                            // worst half-spread over defined pairs
    bool any_undefined = false;
};

/// Per-class-pair regularity: |(P_clique(k))(e)| = (a_{l,k} ± eps) n^{q-r}
/// measured as midrange and worst deviation; empty edge classes are
/// reported undefined.
inline PartitionRegularityReport measure_partition_regularity(const Complex& G, const PartitionPair& pp,
                                                              const RGraph* Y, int q, int r) {
    PartitionRegularityReport rep;
    const Rational npow = Rational(G.vertex_count()).pow(q - r);
    rep.eps = Rational(0);
    rep.A.assign(pp.edge_classes.size(), std::vector<Rational>(pp.clique_classes.size(), Rational(-1)));
    for (std::size_t l = 0; l < pp.edge_classes.size(); ++l) {
        if (pp.edge_classes[l].empty()) {
            rep.any_undefined = true;
            continue;
        }
        for (std::size_t k = 0; k < pp.clique_classes.size(); ++k) {
            std::int64_t lo = -1, hi = 0;
            for (const auto& e : pp.edge_classes[l]) {
                std::int64_t cnt = 0;
                for (const auto& Q : pp.clique_classes[k]) {
                    if (Y != nullptr && !Y->contains(Q)) continue;
                    if (is_subset(e, Q)) ++cnt;
                }
                if (lo < 0 || cnt < lo) lo = cnt;
                hi = std::max(hi, cnt);
            }
            rep.A[l][k] = Rational(lo + hi, 2) / npow;
            Rational spread = Rational(hi - lo, 2) / npow;
            if (spread > rep.eps) rep.eps = spread;
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Diagonal-dominant solve
// ---------------------------------------------------------------------------

struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<std::vector<Rational>> a;

    static Matrix zero(int rows, int cols) {
        Matrix m;
        m.rows = rows;
        m.cols = cols;
        m.a.assign(rows, std::vector<Rational>(cols, Rational(0)));
        return m;
    }
};

/// min over the diagonal a_{j,j}.
inline Rational min_diagonal(const Matrix& A) {
    Rational m = A.a[0][0];
    for (int j = 1; j < A.rows; ++j)
        if (A.a[j][j] < m) m = A.a[j][j];
    return m;
}

/// Back-substitution solve of Ax = min_diag(A)·1 for upper-triangular
/// diagonal-dominant A (a_{l,k} <= a_{k,k}/(2(a-l))) with entries in [0,1]
/// and a <= b: y_k = 1/4b for k > a, y_k = (1 - Σ_{j>k} a_{k,j} y_j)/a_{k,k}
/// downwards, x = min_diag·y. Postconditions (exact Ax and x >= min/4b)
/// are re-verified; min_diag = 0 gives x = 0.
inline std::vector<Rational> solve_diagonal_dominant(const Matrix& A) {
    const int a = A.rows, b = A.cols;
    if (a > b) throw std::invalid_argument("solve_diagonal_dominant: need rows <= cols");
    for (int l = 0; l < a; ++l)
        for (int k = 0; k < b; ++k) {
            if (A.a[l][k] < Rational(0) || A.a[l][k] > Rational(1))
                throw std::invalid_argument("solve_diagonal_dominant: entry outside [0,1] at (" +
                                            std::to_string(l) + "," + std::to_string(k) + ")");
            if (k < l && A.a[l][k] != Rational(0))
                throw std::invalid_argument("solve_diagonal_dominant: not upper-triangular at (" +
                                            std::to_string(l) + "," + std::to_string(k) + ")");
        }
    // diagonal dominance: a_{l,k} <= a_{k,k} / (2(a-l)) for 1 <= l < k <= min(a,b)
    for (int l = 0; l < a; ++l)
        for (int k = l + 1; k < a; ++k) {
            if (A.a[l][k] * Rational(2) * Rational(a - 1 - l) > A.a[k][k])
                throw std::invalid_argument("solve_diagonal_dominant: dominance fails at (" +
                                            std::to_string(l) + "," + std::to_string(k) + ")");
        }

    const Rational mind = min_diagonal(A);
    if (mind == Rational(0)) return std::vector<Rational>(b, Rational(0));

    std::vector<Rational> y(b);
    for (int k = a; k < b; ++k) y[k] = Rational(1, 4 * b);
    for (int k = a - 1; k >= 0; --k) {
        Rational s(1);
        for (int j = k + 1; j < b; ++j) s -= A.a[k][j] * y[j];
        y[k] = s / A.a[k][k];
    }
    std::vector<Rational> x(b);
    for (int k = 0; k < b; ++k) x[k] = mind * y[k];

    const Rational floor = mind / Rational(4 * b);
    for (int k = 0; k < b; ++k) {
        if (x[k] < floor || x[k] > Rational(1))
            throw std::logic_error("solve_diagonal_dominant: x out of range");
    }
    for (int l = 0; l < a; ++l) {
        Rational s(0);
        for (int k = 0; k < b; ++k) s += A.a[l][k] * x[k];
        if (s != mind) throw std::logic_error("solve_diagonal_dominant: Ax != min_diag");
    }
    return x;
}

// ---------------------------------------------------------------------------
// Lifting link decompositions; the localized cover scheduler
// ---------------------------------------------------------------------------

/// Lifts a K_{q-i}^{(r-i)}-decomposition of G(S) to the K_q^(r)-packing
/// (S ⊎ K)^≤ covering all r-edges that contain S. The link decomposition
/// is verified first.
inline Packing lift_decomposition(const Complex& G, const VertexSet& S,
                                  const std::vector<VertexSet>& link_blocks, int q, int r) {
    const int i = static_cast<int>(S.size());
    Complex GS = G.link(S);
    auto rep = verify_design(GS.level_graph(r - i), link_blocks, 1);
    if (!rep.ok) throw std::invalid_argument("lift_decomposition: link blocks are not a decomposition of G(S)");
    Packing P;
    P.q = q;
    P.r = r;
    for (const auto& Q : link_blocks) P.blocks.push_back(set_union(S, Q));
    P.normalize();
    return P;
}

struct LocalizedCoverOutcome {
    bool ok = false;
    int failed_group = -1;
    std::string failure;
    Packing packing;
    std::vector<std::vector<VertexSet>> link_decompositions;  // per S_j
};

/// Localized cover scheduler: sequentially for j = 1..p, build the
/// conflict graphs T^j_z from earlier choices, generate up to t candidate
/// decompositions of H_j − ∪T^j_z by seeded exact solves, pick one at
/// random, and lift through S_j. The union covers every S-important
/// r-edge; r-disjointness is re-verified post hoc.
inline LocalizedCoverOutcome localized_cover(const Complex& G, const ISystem& sys, const Focus& foc,
                                             int q, int r, const ParamSet& p) {
    LocalizedCoverOutcome out;
    const int i = sys.i;
    if (auto bad = exclusivity_violation(G, sys, r)) {
        out.failure = "host not r-exclusive";
        return out;
    }
    // hypothesis: every S-important r-edge e ⊇ S_j has e ∖ S_j ⊆ U_j
    for (std::size_t j = 0; j < sys.sets.size(); ++j) {
        for (const auto& e : G.level(r)) {
            if (is_subset(sys.sets[j], e) && !is_subset(set_minus(e, sys.sets[j]), foc.U[j])) {
                out.failure = "important edge leaves U_S";
                return out;
            }
        }
    }

    Rng rng(p.seed);
    std::vector<std::vector<VertexSet>> chosen_blocks(sys.sets.size());  // lifted (q-i)-sets per j
    const auto zqs = z_quadruples(r, i);

    for (std::size_t j = 0; j < sys.sets.size(); ++j) {
        const VertexSet& Sj = sys.sets[j];
        Complex Hj = G.link(Sj).restrict_vertices(foc.U[j]);

        // conflict sets: Z1 ⊎ Z2 ⊆ U_j with Z1 ⊆ S_j', Z2 ⊆ K', |K'∩S_j|=z3,
        // |S_j∩S_j'|=z0, over earlier j' and their chosen blocks K'
        std::set<VertexSet> conflicts;
        for (std::size_t jp = 0; jp < j; ++jp) {
            const int z0 = intersection_size(Sj, sys.sets[jp]);
            for (const auto& Kp : chosen_blocks[jp]) {
                const int z3 = intersection_size(Kp, Sj);
                for (const auto& z : zqs) {
                    if (z[0] != z0 || z[3] != z3) continue;
                    const int z1 = z[1], z2 = z[2];
                    VertexSet s_in = set_intersect(sys.sets[jp], foc.U[j]);
                    VertexSet k_in = set_intersect(Kp, foc.U[j]);
                    for_each_subset(s_in, z1, [&](const VertexSet& Z1) {
                        for_each_subset(k_in, z2, [&](const VertexSet& Z2) {
                            if (!set_intersect(Z1, Z2).empty()) return;
                            conflicts.insert(set_union(Z1, Z2));
                        });
                    });
                }
            }
        }

        // candidate decompositions of H_j avoiding blocks that contain a
        // conflict set
        std::vector<VertexSet> banned_cliques;
        for (const auto& K : Hj.level(q - i)) {
            for (const auto& T : conflicts)
                if (is_subset(T, K)) {
                    banned_cliques.push_back(K);
                    break;
                }
        }
        std::vector<std::vector<VertexSet>> cands;
        for (int c = 0; c < std::max(1, p.budget.candidates); ++c) {
            ParamSet pc = p;
            pc.seed = Rng::derive(p.seed, (j << 16) ^ static_cast<std::uint64_t>(c));
            auto dec = exact_decompose(Hj, q - i, r - i, 1, pc, banned_cliques);
            if (dec.status == SolveStatus::Solved) {
                if (std::find(cands.begin(), cands.end(), dec.blocks) == cands.end())
                    cands.push_back(dec.blocks);
            }
        }
        if (cands.empty()) {
            out.failed_group = static_cast<int>(j);
            out.failure = "no candidate decomposition of the focused link";
            return out;
        }
        chosen_blocks[j] = cands[rng.below(cands.size())];
        out.link_decompositions.push_back(chosen_blocks[j]);
    }

    out.packing.q = q;
    out.packing.r = r;
    for (std::size_t j = 0; j < sys.sets.size(); ++j)
        for (const auto& K : chosen_blocks[j]) out.packing.blocks.push_back(set_union(sys.sets[j], K));
    out.packing.normalize();

    if (!verify_packing(G, out.packing)) {
        out.failure = "lifted packings collide";
        return out;
    }
    // covers every S-important r-edge
    RGraph covered = out.packing.covered_edges(G.ambient_n());
    for (const auto& e : G.level(r)) {
        for (const auto& S : sys.sets)
            if (is_subset(S, e) && !covered.contains(e)) {
                out.failure = "important edge left uncovered";
                return out;
            }
    }
    out.ok = true;
    return out;
}

}  // namespace kqr
