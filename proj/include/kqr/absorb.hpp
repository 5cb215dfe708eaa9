#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kqr/combinatorics.hpp"
#include "kqr/complex.hpp"
#include "kqr/divisibility.hpp"
#include "kqr/exact_cover.hpp"
#include "kqr/hypergraph.hpp"
#include "kqr/packing.hpp"
#include "kqr/params.hpp"
#include "kqr/rng.hpp"

namespace kqr {

// ---------------------------------------------------------------------------
// ∇ operators and clique unions
// ---------------------------------------------------------------------------

/// ∇̃H extends every edge instance into a K_q^(r) on q-r fresh vertices;
/// ∇H = ∇̃H − H. Fresh vertices extend the label range, and `extensions`
/// maps each edge instance to its Z_e so callers can embed the result.
struct NablaResult {
    MultiRGraph tilde;
    MultiRGraph minus;
    std::vector<std::pair<VertexSet, VertexSet>> extensions;  // (edge, Z_e) per instance
    int n_total = 0;
};

inline NablaResult nabla(const MultiRGraph& H, int q) {
    const int r = H.r();
    if (q <= r) throw std::invalid_argument("nabla: need q > r");
    std::int64_t instances = H.total();
    NablaResult out;
    out.n_total = H.n() + static_cast<int>(instances) * (q - r);
    out.tilde = MultiRGraph(out.n_total, r);
    out.minus = MultiRGraph(out.n_total, r);
    int next = H.n();
    for (const auto& entry : H.multiplicities()) {
        const VertexSet& e = entry.first;
        for (std::int64_t copy = 0; copy < entry.second; ++copy) {
            VertexSet Z(q - r);
            for (int i = 0; i < q - r; ++i) Z[i] = next++;
            out.extensions.push_back({e, Z});
            VertexSet block = set_union(e, Z);
            for_each_subset(block, r, [&](const VertexSet& f) {
                out.tilde.add(f);
                if (f != e) out.minus.add(f);
            });
        }
    }
    return out;
}

inline NablaResult nabla(const RGraph& H, int q) {
    MultiRGraph M(H.n(), H.r());
    for (const auto& e : H.edges()) M.add(e);
    return nabla(M, q);
}

inline RGraph to_simple(const MultiRGraph& M) {
    RGraph out(M.n(), M.r());
    for (const auto& [e, mult] : M.multiplicities()) {
        if (mult != 1) throw std::invalid_argument("to_simple: multiplicity > 1");
        out.add(e);
    }
    return out;
}

/// H^{+t}: vertex-disjoint union of H and t fresh copies of K_q^(r).
inline RGraph plus_cliques(const RGraph& H, int t, int q) {
    if (t < 0) throw std::invalid_argument("plus_cliques: t < 0");
    RGraph out(H.n() + t * q, H.r());
    for (const auto& e : H.edges()) out.add(e);
    for (int j = 0; j < t; ++j) {
        VertexSet clique(q);
        for (int i = 0; i < q; ++i) clique[i] = H.n() + j * q + i;
        for_each_subset(clique, H.r(), [&](const VertexSet& f) { out.add(f); });
    }
    return out;
}

// ---------------------------------------------------------------------------
// Canonical multigraphs L^{q,r}_{k,m}
// ---------------------------------------------------------------------------

struct CanonicalLResult {
    bool in_Mr = false;
    int failing_i = -1;     // witness when (k,m) ∉ M_r
    MultiRGraph graph;      // on [k] ∪ B with B = {k,..,k+q-r-1}
};

/// Canonical multi-r-graph on [k] ∪ B: multiplicity 0 on e ⊆ [k] and
/// m/(r-j) C(k-j, r-1-j) otherwise, j = |e ∩ [k]|. (k,m) must lie in M_r,
/// i.e. all those values must be integers.
inline CanonicalLResult canonical_L(int q, int r, int k, std::int64_t m) {
    if (!(q > r && r >= 2)) throw std::invalid_argument("canonical_L: need q > r >= 2");
    CanonicalLResult out;
    for (int i = 0; i <= r - 1; ++i) {
        if ((m * binom(k - i, r - 1 - i)) % (r - i) != 0) {
            out.failing_i = i;
            return out;
        }
    }
    out.in_Mr = true;
    const int total = k + (q - r);
    out.graph = MultiRGraph(total, r);
    for_each_subset_of_range(total, r, [&](const VertexSet& e) {
        int j = 0;
        for (int v : e)
            if (v < k) ++j;
        if (j == r) return;  // e ⊆ [k]
        std::int64_t mult = m * binom(k - j, r - 1 - j) / (r - j);
        if (mult > 0) out.graph.add(e, mult);
    });
    return out;
}

// ---------------------------------------------------------------------------
// Homomorphisms
// ---------------------------------------------------------------------------

struct Homomorphism {
    std::vector<int> map;  // vertex of H -> vertex of H'
};

enum class HomSearchStatus { Found, None, Budget };

struct HomSearchResult {
    HomSearchStatus status = HomSearchStatus::None;
    Homomorphism phi;
    std::int64_t nodes = 0;
};

/// Backtracking search for an edge-bijective homomorphism H ⇝ H':
/// φ(e) ∈ H' for every edge, distinct edges get distinct images, and
/// |H| = |H'|. Vertices need not map injectively.
inline HomSearchResult find_edge_bijective_hom(const RGraph& H, const RGraph& Hp,
                                               std::int64_t max_nodes = 2'000'000) {
    HomSearchResult res;
    if (H.size() != Hp.size() || H.r() != Hp.r()) return res;  // None immediately
    const int nH = H.n();
    const int nP = Hp.n();

    // incidence: edges listed per vertex; an edge is checkable once its
    // largest-indexed vertex (in assignment order) is mapped
    std::vector<int> order(nH);
    for (int i = 0; i < nH; ++i) order[i] = i;
    std::vector<std::int64_t> deg(nH, 0);
    for (const auto& e : H.edges())
        for (int v : e) ++deg[v];
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return deg[a] != deg[b] ? deg[a] > deg[b] : a < b;
    });
    std::vector<int> pos(nH);
    for (int i = 0; i < nH; ++i) pos[order[i]] = i;
    std::vector<std::vector<int>> ready_edges(nH);  // by assignment position
    for (std::size_t ei = 0; ei < H.edges().size(); ++ei) {
        int last = 0;
        for (int v : H.edges()[ei]) last = std::max(last, pos[v]);
        ready_edges[last].push_back(static_cast<int>(ei));
    }

    std::vector<int> phi(nH, -1);
    std::map<VertexSet, int> image_used;  // image edge -> source edge
    std::int64_t nodes = 0;
    bool timeout = false;

    std::function<bool(int)> rec = [&](int depth) -> bool {
        if (depth == nH) return true;
        const int v = order[depth];
        for (int w = 0; w < nP; ++w) {
            if (++nodes > max_nodes) { timeout = true; return false; }
            phi[v] = w;
            bool ok = true;
            std::vector<VertexSet> claimed;
            for (int ei : ready_edges[depth]) {
                VertexSet img;
                img.reserve(H.r());
                for (int u : H.edges()[ei]) img.push_back(phi[u]);
                std::sort(img.begin(), img.end());
                if (std::adjacent_find(img.begin(), img.end()) != img.end() || !Hp.contains(img) ||
                    image_used.count(img)) {
                    ok = false;
                    break;
                }
                image_used[img] = ei;
                claimed.push_back(img);
            }
            if (ok && rec(depth + 1)) return true;
            for (const auto& img : claimed) image_used.erase(img);
            phi[v] = -1;
            if (timeout) return false;
        }
        return false;
    };

    bool found = H.size() == 0 ? true : rec(0);
    if (H.size() == 0) phi.assign(nH, 0);
    res.nodes = nodes;
    if (found) {
        res.status = HomSearchStatus::Found;
        res.phi.map = phi;
    } else {
        res.status = timeout ? HomSearchStatus::Budget : HomSearchStatus::None;
    }
    return res;
}

/// Checks φ: every edge image lands in H' and images are pairwise distinct
/// with |H| = |H'|.
inline bool is_edge_bijective_hom(const RGraph& H, const RGraph& Hp, const Homomorphism& phi) {
    if (H.size() != Hp.size()) return false;
    std::vector<VertexSet> images;
    for (const auto& e : H.edges()) {
        VertexSet img;
        for (int v : e) img.push_back(phi.map.at(v));
        std::sort(img.begin(), img.end());
        if (std::adjacent_find(img.begin(), img.end()) != img.end()) return false;
        if (!Hp.contains(img)) return false;
        images.push_back(img);
    }
    std::sort(images.begin(), images.end());
    return std::adjacent_find(images.begin(), images.end()) == images.end();
}

// ---------------------------------------------------------------------------
// Strong colourings and identification
// ---------------------------------------------------------------------------

/// Vertex colouring where no colour repeats inside an edge.
struct StrongColouring {
    int num_colours = 0;
    std::vector<int> colour_of;  // per vertex; -1 for unused vertices

    VertexSet edge_colours(const VertexSet& e) const {
        VertexSet c;
        c.reserve(e.size());
        for (int v : e) c.push_back(colour_of.at(v));
        std::sort(c.begin(), c.end());
        return c;
    }
};

inline bool is_strong_colouring(const RGraph& H, const StrongColouring& c) {
    for (const auto& e : H.edges()) {
        VertexSet cols = c.edge_colours(e);
        if (std::adjacent_find(cols.begin(), cols.end()) != cols.end()) return false;
        for (int col : cols)
            if (col < 0 || col >= c.num_colours) return false;
    }
    return true;
}

/// |c^⊆(C')| = m for every (r-1)-subset C' of the colour set.
inline bool is_m_regular(const RGraph& H, const StrongColouring& c, std::int64_t m) {
    const int r = H.r();
    bool ok = true;
    for_each_subset_of_range(c.num_colours, r - 1, [&](const VertexSet& Cp) {
        std::int64_t cnt = 0;
        for (const auto& e : H.edges())
            if (is_subset(Cp, c.edge_colours(e))) ++cnt;
        if (cnt != m) ok = false;
    });
    return ok;
}

/// id(H,c): identify each colour class to one vertex; edge multiset {c(e)}.
inline MultiRGraph identify(const RGraph& H, const StrongColouring& c) {
    if (!is_strong_colouring(H, c)) throw std::invalid_argument("identify: colouring not strong on H");
    MultiRGraph out(c.num_colours, H.r());
    for (const auto& e : H.edges()) out.add(c.edge_colours(e));
    return out;
}

/// ∇c: vertices of H keep their colour, the i-th fresh vertex of every
/// Z_e gets fresh colour k+i. Strong on ∇H.
inline StrongColouring nabla_colouring(const StrongColouring& c, const NablaResult& nr, int q, int r) {
    StrongColouring out;
    out.num_colours = c.num_colours + (q - r);
    out.colour_of.assign(nr.n_total, -1);
    for (std::size_t v = 0; v < c.colour_of.size(); ++v) out.colour_of[v] = c.colour_of[v];
    for (const auto& [e, Z] : nr.extensions) {
        for (int i = 0; i < q - r; ++i) out.colour_of[Z[i]] = c.num_colours + i;
    }
    return out;
}

// ---------------------------------------------------------------------------
// m-regular colourings (Lemma `colouring` made constructive)
// ---------------------------------------------------------------------------

struct ColouringResult {
    bool ok = false;
    std::string failure;
    int t = 0;
    int k = 0;
    std::int64_t m = 0;
    RGraph H_plus_t;       // H ⊎ t cliques, support-relabelled host
    StrongColouring colouring;
};

/// Follows the constructive proof: build the (r-1)-multigraph H' with
/// |H'(S)| = |H(S)|, divide by q-r+1 to get H'', pick the smallest valid k
/// with K_k^{(r-1)} divisible by K_q^{(r-1)}, decompose the complete
/// multi-(r-1)-graph of multiplicity m' minus H'' into t copies of
/// K_q^{(r-1)} (exact solver, multi-use options), and read off the strong
/// m-regular [k]-colouring of H^{+t}.
inline ColouringResult find_m_regular_colouring(const RGraph& H_in, int q, int r, const ParamSet& p) {
    if (r < 2) throw std::invalid_argument("find_m_regular_colouring: r >= 2 required");
    ColouringResult out;
    if (!check_design_divisible(H_in, q, r, 1).ok) {
        out.failure = "input not K_q^(r)-divisible";
        return out;
    }

    // compact the support to [h]
    VertexSet support;
    for (const auto& e : H_in.edges()) support = set_union(support, e);
    const int h = static_cast<int>(support.size());
    std::vector<int> relabel(H_in.n(), -1);
    for (int i = 0; i < h; ++i) relabel[support[i]] = i;
    RGraph H(h, r);
    for (const auto& e : H_in.edges()) {
        VertexSet f;
        for (int v : e) f.push_back(relabel[v]);
        std::sort(f.begin(), f.end());
        H.add(f);
    }

    // H'' on [h]: |H(S)|/(q-r+1) per (r-1)-set S
    std::map<VertexSet, std::int64_t> Hpp;
    std::int64_t max_mult = 0;
    for_each_subset_of_range(h, r - 1, [&](const VertexSet& S) {
        std::int64_t deg = H.degree(S);
        if (deg == 0) return;
        if (deg % (q - r + 1) != 0) throw std::logic_error("colouring: divisibility lost");
        Hpp[S] = deg / (q - r + 1);
        max_mult = std::max(max_mult, Hpp[S]);
    });

    // smallest k >= max(h, q) with K_k^{(r-1)} divisible by K_q^{(r-1)};
    // k = a q! + q always qualifies, so the scan terminates
    auto factorial = [](int x) { std::int64_t f = 1; for (int i = 2; i <= x; ++i) f *= i; return f; };
    int k = -1;
    for (int cand = std::max(h, q);; ++cand) {
        bool ok = true;
        for (int i = 0; i <= r - 2; ++i)
            if (binom(cand - i, r - 1 - i) % binom(q - i, r - 1 - i) != 0) ok = false;
        if (ok) { k = cand; break; }
        if (cand > std::max(h, q) + factorial(q) + q)
            throw std::logic_error("colouring: no valid k found in congruence window");
    }

    const std::int64_t m_prime = max_mult + 1;
    out.m = (q - r + 1) * m_prime;
    out.k = k;

    // decompose (complete multi-(r-1)-graph on [k], multiplicity m') − H''
    // into copies of K_q^{(r-1)}; blocks may repeat
    std::vector<VertexSet> items;
    for_each_subset_of_range(k, r - 1, [&](const VertexSet& S) { items.push_back(S); });
    std::map<VertexSet, int> item_id;
    for (std::size_t i = 0; i < items.size(); ++i) item_id[items[i]] = static_cast<int>(i);

    ExactCover ec(static_cast<int>(items.size()), 0);
    for (std::size_t i = 0; i < items.size(); ++i) {
        auto it = Hpp.find(items[i]);
        std::int64_t mult = m_prime - (it == Hpp.end() ? 0 : it->second);
        if (mult < 0) throw std::logic_error("colouring: negative demand");
        ec.set_demand(static_cast<int>(i), static_cast<int>(mult));
    }
    std::vector<VertexSet> option_blocks;
    for_each_subset_of_range(k, q, [&](const VertexSet& Q) {
        std::vector<int> ids;
        for_each_subset(Q, r - 1, [&](const VertexSet& S) { ids.push_back(item_id.at(S)); });
        ec.add_option(std::move(ids), static_cast<int>(m_prime));
        option_blocks.push_back(Q);
    });
    auto sol = ec.solve(p.seed, p.budget.max_nodes);
    if (sol.status != SolveStatus::Solved) {
        out.failure = sol.status == SolveStatus::Timeout ? "multigraph decomposition budget exhausted"
                                                         : "multigraph decomposition unsat";
        return out;
    }

    out.t = static_cast<int>(sol.chosen.size());
    out.H_plus_t = plus_cliques(H, out.t, q);
    out.colouring.num_colours = k;
    out.colouring.colour_of.assign(out.H_plus_t.n(), -1);
    for (int v = 0; v < h; ++v) out.colouring.colour_of[v] = v;
    for (int j = 0; j < out.t; ++j) {
        const VertexSet& Kp = option_blocks[sol.chosen[j]];
        for (int i = 0; i < q; ++i) out.colouring.colour_of[h + j * q + i] = Kp[i];
    }

    if (!is_strong_colouring(out.H_plus_t, out.colouring) ||
        !is_m_regular(out.H_plus_t, out.colouring, out.m))
        throw std::logic_error("colouring: constructed colouring fails verification");
    out.ok = true;
    return out;
}

// ---------------------------------------------------------------------------
// Transformer / absorber verification, r = 1 absorbers
// ---------------------------------------------------------------------------

enum class VerifyStatus { True, False, Indeterminate };

/// T is an (H,H')-transformer in G: edge-disjoint from both, and both
/// G[T ∪ H] and G[T ∪ H'] decompose. A solver timeout is Indeterminate.
inline VerifyStatus verify_transformer(const Complex& G, const RGraph& T, const RGraph& H,
                                       const RGraph& Hp, const ParamSet& p) {
    if (!T.edge_disjoint_from(H) || !T.edge_disjoint_from(Hp)) return VerifyStatus::False;
    for (const RGraph* side : {&H, &Hp}) {
        auto dec = exact_decompose(G.restrict_to(T.unite(*side)), p.q, p.r, 1, p);
        if (dec.status == SolveStatus::Timeout) return VerifyStatus::Indeterminate;
        if (dec.status == SolveStatus::Unsat) return VerifyStatus::False;
    }
    return VerifyStatus::True;
}

/// A is an absorber for H in G: A, H edge-disjoint and both G[A] and
/// G[A ∪ H] decompose.
inline VerifyStatus verify_absorber(const Complex& G, const RGraph& A, const RGraph& H,
                                    const ParamSet& p) {
    if (!A.edge_disjoint_from(H)) return VerifyStatus::False;
    for (bool with_H : {false, true}) {
        auto dec = exact_decompose(G.restrict_to(with_H ? A.unite(H) : A), p.q, p.r, 1, p);
        if (dec.status == SolveStatus::Timeout) return VerifyStatus::Indeterminate;
        if (dec.status == SolveStatus::Unsat) return VerifyStatus::False;
    }
    return VerifyStatus::True;
}

struct AbsorberR1Result {
    bool ok = false;
    std::string failure;
    RGraph A;                                  // 1-graph
    std::vector<VertexSet> decomposition_A;    // K_q^(1)-decomposition of A
    std::vector<VertexSet> decomposition_AH;   // of A ∪ H
};

/// Explicit r = 1 absorber: H is partitioned into groups of q singletons
/// {e_1..e_q}; each group gets Q_0 = {v_1..v_q} ∈ G^(q) and, for each i,
/// Q_i ∈ G^(q)(e_i) ∩ G^(q)({v_i}), all pairwise disjoint. Then
/// A = ∪ C(Q_i, 1) decomposes as {Q_i ∪ {v_i}} and A ∪ H as
/// {Q_i ∪ e_i} ∪ {Q_0}.
inline AbsorberR1Result build_absorber_r1(const Complex& G, const RGraph& H, int q, const ParamSet& p) {
    if (H.r() != 1) throw std::invalid_argument("build_absorber_r1: H must be a 1-graph");
    AbsorberR1Result out;
    if (H.size() % q != 0) throw std::invalid_argument("build_absorber_r1: q must divide |H|");

    Rng rng(p.seed);
    std::vector<char> used(G.ambient_n(), 0);
    for (const auto& e : H.edges()) used[e[0]] = 1;

    out.A = RGraph(G.ambient_n(), 1);
    auto disjoint_free = [&](const VertexSet& S) {
        for (int v : S)
            if (used[v]) return false;
        return true;
    };
    auto claim = [&](const VertexSet& S) {
        for (int v : S) {
            used[v] = 1;
            VertexSet sv{v};
            if (!out.A.contains(sv)) out.A.add(sv);
        }
    };

    const auto& cliques = G.level(q);
    std::vector<int> order(cliques.size());
    std::iota(order.begin(), order.end(), 0);

    for (std::int64_t g = 0; g < H.size() / q; ++g) {
        VertexSet group;  // the q singleton vertices e_1..e_q of this group
        for (int i = 0; i < q; ++i) group.push_back(H.edges()[g * q + i][0]);

        rng.shuffle(order);
        VertexSet Q0;
        for (int ci : order) {
            if (G.contains(cliques[ci]) && disjoint_free(cliques[ci])) { Q0 = cliques[ci]; break; }
        }
        if (Q0.empty()) {
            out.failure = "no disjoint Q_0 available";
            return out;
        }
        claim(Q0);
        std::vector<VertexSet> Qi(q);
        for (int i = 0; i < q; ++i) {
            const int ei = group[i];
            const int vi = Q0[i];
            rng.shuffle(order);
            bool found = false;
            for (int ci : order) {
                const VertexSet& C = cliques[ci];
                // want Q_i with Q_i ∪ {e_i} and Q_i ∪ {v_i} both cliques:
                // search cliques through e_i, drop e_i, check v_i variant
                if (!std::binary_search(C.begin(), C.end(), ei)) continue;
                VertexSet Qcand = set_minus(C, VertexSet{ei});
                if (!disjoint_free(Qcand)) continue;
                VertexSet with_vi = set_union(Qcand, VertexSet{vi});
                if (static_cast<int>(with_vi.size()) != q || !G.contains(with_vi)) continue;
                Qi[i] = Qcand;
                claim(Qcand);
                found = true;
                break;
            }
            if (!found) {
                out.failure = "no disjoint Q_" + std::to_string(i + 1) + " available";
                return out;
            }
        }
        for (int i = 0; i < q; ++i) {
            out.decomposition_A.push_back(set_union(Qi[i], VertexSet{Q0[i]}));
            out.decomposition_AH.push_back(set_union(Qi[i], VertexSet{group[i]}));
        }
        out.decomposition_AH.push_back(Q0);
    }
    out.ok = true;
    return out;
}

}  // namespace kqr
