#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "kqr/combinatorics.hpp"
#include "kqr/complex.hpp"
#include "kqr/divisibility.hpp"
#include "kqr/exact_cover.hpp"
#include "kqr/hypergraph.hpp"
#include "kqr/params.hpp"
#include "kqr/parallel.hpp"
#include "kqr/rng.hpp"

namespace kqr {

/// A set of q-blocks pairwise sharing fewer than r vertices.
struct Packing {
    int q = 0;
    int r = 0;
    std::vector<VertexSet> blocks;  // sorted q-sets, kept in lex order

    void normalize() {
        std::sort(blocks.begin(), blocks.end());
        blocks.erase(std::unique(blocks.begin(), blocks.end()), blocks.end());
    }

    /// The r-graph of covered edges.
    RGraph covered_edges(int ambient_n) const {
        RGraph out(ambient_n, r);
        for (const auto& B : blocks)
            for_each_subset(B, r, [&](const VertexSet& e) {
                if (!out.contains(e)) out.add(e);
            });
        return out;
    }
};

/// Blocks lie in G^(q) and intersect pairwise in < r vertices.
inline bool verify_packing(const Complex& G, const Packing& P) {
    for (const auto& B : P.blocks) {
        if (static_cast<int>(B.size()) != P.q) return false;
        if (!G.contains(B)) return false;
    }
    for (std::size_t i = 0; i < P.blocks.size(); ++i)
        for (std::size_t j = i + 1; j < P.blocks.size(); ++j)
            if (intersection_size(P.blocks[i], P.blocks[j]) >= P.r) return false;
    return true;
}

struct DesignReport {
    bool ok = true;
    bool blocks_distinct = true;
    std::vector<VertexSet> blocks_outside_host;  // blocks with an r-subset not in H
    std::vector<std::pair<VertexSet, std::int64_t>> under_covered;
    std::vector<std::pair<VertexSet, std::int64_t>> over_covered;
};

/// Every edge of H covered exactly λ times by distinct blocks whose
/// r-subsets all lie in H.
inline DesignReport verify_design(const RGraph& H, const std::vector<VertexSet>& blocks, int lambda) {
    DesignReport rep;
    const int r = H.r();
    std::vector<VertexSet> sorted_blocks = blocks;
    for (auto& b : sorted_blocks) std::sort(b.begin(), b.end());
    std::sort(sorted_blocks.begin(), sorted_blocks.end());
    if (std::adjacent_find(sorted_blocks.begin(), sorted_blocks.end()) != sorted_blocks.end()) {
        rep.blocks_distinct = false;
        rep.ok = false;
    }
    std::unordered_map<VertexSet, std::int64_t, VertexSetHash> cover;
    for (const auto& B : sorted_blocks) {
        bool outside = false;
        for_each_subset(B, r, [&](const VertexSet& e) {
            ++cover[e];
            if (!H.contains(e)) outside = true;
        });
        if (outside) {
            rep.blocks_outside_host.push_back(B);
            rep.ok = false;
        }
    }
    for (const auto& e : H.edges()) {
        auto it = cover.find(e);
        std::int64_t c = it == cover.end() ? 0 : it->second;
        if (c < lambda) {
            rep.under_covered.push_back({e, c});
            rep.ok = false;
        } else if (c > lambda) {
            rep.over_covered.push_back({e, c});
            rep.ok = false;
        }
    }
    return rep;
}

struct DecomposeOutcome {
    SolveStatus status = SolveStatus::Unsat;
    std::vector<VertexSet> blocks;
    std::int64_t nodes = 0;
    std::string note;
};

/// Exact K_q^(r)-decomposition of G^(r) with multiplicity λ: items are the
/// r-edges (demand λ), options the q-cliques of G^(q); blocks are distinct.
/// Unsat is a proof of exhaustion (the divisibility precheck shortcuts it);
/// Timeout only means the node budget ran out.
inline DecomposeOutcome exact_decompose(const Complex& G, int q, int r, int lambda, const ParamSet& p,
                                        const std::vector<VertexSet>& excluded_blocks = {}) {
    DecomposeOutcome out;
    const auto& edges = G.level(r);
    const auto& cliques = G.level(q);
    const RGraph host = G.level_graph(r);
    if (!check_design_divisible(host, q, r, lambda).ok) {
        out.status = SolveStatus::Unsat;
        out.note = "divisibility precheck failed";
        return out;
    }
    if (edges.empty()) {
        out.status = SolveStatus::Solved;
        return out;
    }

    std::unordered_map<VertexSet, int, VertexSetHash> edge_id;
    edge_id.reserve(edges.size() * 2);
    for (std::size_t i = 0; i < edges.size(); ++i) edge_id[edges[i]] = static_cast<int>(i);

    std::unordered_set<VertexSet, VertexSetHash> excluded(excluded_blocks.begin(), excluded_blocks.end());

    ExactCover ec(static_cast<int>(edges.size()), 0);
    for (std::size_t i = 0; i < edges.size(); ++i) ec.set_demand(static_cast<int>(i), lambda);
    std::vector<VertexSet> option_blocks;
    for (const auto& Q : cliques) {
        if (excluded.count(Q)) continue;
        std::vector<int> items;
        bool valid = true;
        for_each_subset(Q, r, [&](const VertexSet& e) {
            auto it = edge_id.find(e);
            if (it == edge_id.end()) valid = false;
            else items.push_back(it->second);
        });
        if (!valid) continue;  // clique touches a non-edge (cannot happen in a complex)
        ec.add_option(std::move(items), 1);
        option_blocks.push_back(Q);
    }

    auto res = ec.solve(p.seed, p.budget.max_nodes);
    out.status = res.status;
    out.nodes = res.nodes;
    if (res.status == SolveStatus::Solved) {
        for (int o : res.chosen) out.blocks.push_back(option_blocks[o]);
        std::sort(out.blocks.begin(), out.blocks.end());
        auto rep = verify_design(host, out.blocks, lambda);
        if (!rep.ok) throw std::logic_error("exact_decompose: solver returned an invalid decomposition");
    }
    return out;
}

struct DisjointDecompositionsOutcome {
    bool ok = false;
    std::vector<std::vector<VertexSet>> decompositions;
    std::string failure;  // empty on success
};

/// t pairwise q-disjoint decompositions, found by repeated exact solves
/// with previously used blocks excluded. t above the n^{q-r}/(q-r)! cap is
/// rejected up front.
inline DisjointDecompositionsOutcome disjoint_decompositions(const Complex& G, int q, int r, int t,
                                                             const ParamSet& p) {
    DisjointDecompositionsOutcome out;
    if (t < 1) throw std::invalid_argument("disjoint_decompositions: t >= 1 required");
    const int n = G.vertex_count();
    // cap: at most n^{q-r}/(q-r)! q-disjoint decompositions
    double cap = 1.0;
    for (int i = 0; i < q - r; ++i) cap *= n;
    for (int i = 2; i <= q - r; ++i) cap /= i;
    if (static_cast<double>(t) > cap) {
        out.failure = "t exceeds the n^(q-r)/(q-r)! bound";
        return out;
    }
    std::vector<VertexSet> used;
    for (int i = 0; i < t; ++i) {
        ParamSet pi = p;
        pi.seed = Rng::derive(p.seed, static_cast<std::uint64_t>(i));
        auto dec = exact_decompose(G, q, r, 1, pi, used);
        if (dec.status != SolveStatus::Solved) {
            // unsat under exclusions is not a nonexistence proof (other
            // earlier choices might leave room), so both outcomes read as
            // a exhausted budget
            out.failure = "budget exhausted at decomposition " + std::to_string(i) +
                          (dec.status == SolveStatus::Unsat ? " (no decomposition avoids the used blocks)"
                                                            : " (node budget)");
            return out;
        }
        used.insert(used.end(), dec.blocks.begin(), dec.blocks.end());
        out.decompositions.push_back(std::move(dec.blocks));
    }
    out.ok = true;
    return out;
}

struct GreedyCoverOutcome {
    bool ok = false;
    int stalled_group = -1;                 // j with empty filtered candidates
    std::vector<VertexSet> chosen;          // Q_j per group (q-r sets)
    std::vector<VertexSet> blocks;          // all q-blocks (Q_j ∪ e f.a. e in L_j)
    std::int64_t union_max_degree = 0;      // Δ(∪ K_j^(r))
    bool candidate_warning = false;         // some filtered family got very small
};

/// Sequential random greedy cover: for each group L_j pick Q_j from the
/// filtered candidate family so that K_j = (Q_j ⊎ L_j)^≤ contains no edge
/// of any earlier K_j' nor of L − L_j. Desk-scale threshold is t = 1 with
/// a warning flag when a family drops below 1/4 of its original size.
inline GreedyCoverOutcome greedy_cover(const Complex& G, const std::vector<std::vector<VertexSet>>& groups,
                                       const std::vector<std::vector<VertexSet>>& candidates, const ParamSet& p) {
    if (groups.size() != candidates.size())
        throw std::invalid_argument("greedy_cover: groups/candidates size mismatch");
    const int r = p.r;
    GreedyCoverOutcome out;
    Rng rng(p.seed);

    std::unordered_set<VertexSet, VertexSetHash> L_all;  // edges of L
    for (const auto& Lj : groups)
        for (const auto& e : Lj) L_all.insert(e);
    std::unordered_set<VertexSet, VertexSetHash> covered;  // ∪ K_j'^(r) so far

    for (std::size_t j = 0; j < groups.size(); ++j) {
        const auto& Lj = groups[j];
        std::unordered_set<VertexSet, VertexSetHash> Lj_set(Lj.begin(), Lj.end());
        std::vector<VertexSet> filtered;
        for (const auto& Q : candidates[j]) {
            bool good = true;
            for (const auto& e : Lj) {
                if (!good) break;
                VertexSet block = set_union(Q, e);
                for_each_subset(block, r, [&](const VertexSet& f) {
                    if (!good) return;
                    if (covered.count(f)) good = false;
                    else if (L_all.count(f) && !Lj_set.count(f)) good = false;
                });
            }
            if (good) filtered.push_back(Q);
        }
        if (filtered.empty()) {
            out.stalled_group = static_cast<int>(j);
            return out;
        }
        if (filtered.size() * 4 < candidates[j].size()) out.candidate_warning = true;
        const VertexSet& Q = filtered[rng.below(filtered.size())];
        out.chosen.push_back(Q);
        for (const auto& e : Lj) {
            VertexSet block = set_union(Q, e);
            out.blocks.push_back(block);
            for_each_subset(block, r, [&](const VertexSet& f) { covered.insert(f); });
        }
    }
    std::sort(out.blocks.begin(), out.blocks.end());

    // post-hoc re-verification of the filter's guarantees: K_j and K_j'
    // are r-disjoint for j != j', and no K_j contains an edge of L − L_j
    {
        std::vector<std::unordered_set<VertexSet, VertexSetHash>> group_edges(groups.size());
        for (std::size_t j = 0; j < groups.size(); ++j)
            for (const auto& e : groups[j]) {
                VertexSet block = set_union(out.chosen[j], e);
                for_each_subset(block, r, [&](const VertexSet& f) { group_edges[j].insert(f); });
            }
        for (std::size_t j = 0; j < groups.size(); ++j) {
            std::unordered_set<VertexSet, VertexSetHash> own(groups[j].begin(), groups[j].end());
            for (const auto& f : group_edges[j]) {
                if (L_all.count(f) && !own.count(f))
                    throw std::logic_error("greedy_cover: K_j contains an edge of L - L_j");
                for (std::size_t jp = 0; jp < j; ++jp)
                    if (group_edges[jp].count(f))
                        throw std::logic_error("greedy_cover: K_j not r-disjoint from earlier K_j'");
            }
        }
    }

    RGraph cover_union(G.ambient_n(), r);
    for (const auto& f : covered) cover_union.add(f);
    out.union_max_degree = cover_union.empty() ? 0 : cover_union.max_degree();
    out.ok = true;
    return out;
}

/// Packs a clique through every edge of H (singleton groups); candidate
/// families are the full G^(q)(e) links.
inline GreedyCoverOutcome cover_edges(const Complex& G, const RGraph& H, const ParamSet& p) {
    std::vector<std::vector<VertexSet>> groups, candidates;
    const int q = p.q;
    for (const auto& e : H.edges()) {
        groups.push_back({e});
        std::vector<VertexSet> cand;
        for (const auto& Q : G.level(q))
            if (is_subset(e, Q)) cand.push_back(set_minus(Q, e));
        candidates.push_back(std::move(cand));
    }
    return greedy_cover(G, groups, candidates, p);
}

struct NibbleStats {
    std::int64_t covered = 0;
    std::int64_t leftover_edges = 0;
    std::int64_t leftover_max_degree = 0;
    int restarts_used = 0;
    std::uint64_t winning_seed = 0;
};

struct NibbleOutcome {
    Packing packing;
    RGraph leftover;
    NibbleStats stats;
};

namespace detail {

/// One greedy pass over the auxiliary C(q,r)-graph (vertices = r-edges,
/// hyperedges = q-cliques): scan cliques in seeded random order and take
/// any whose r-edges are all uncovered.
inline std::vector<int> nibble_pass(const std::vector<std::vector<int>>& clique_edges, int num_edges,
                                    std::uint64_t seed, bool rounds_mode) {
    Rng rng(seed);
    std::vector<int> order(clique_edges.size());
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    std::vector<char> covered(num_edges, 0);
    std::vector<char> taken(clique_edges.size(), 0);
    std::vector<int> result;

    auto try_take = [&](int c) {
        for (int e : clique_edges[c])
            if (covered[e]) return;
        for (int e : clique_edges[c]) covered[e] = 1;
        taken[c] = 1;
        result.push_back(c);
    };

    if (!rounds_mode) {
        for (int c : order) try_take(c);
        return result;
    }
    // nibble rounds: round t samples the surviving cliques with shrinking
    // probability 1/(4+t); the pass ends when a round adds nothing
    for (int round = 0;; ++round) {
        const Rational fraction(1, 4 + round);
        std::vector<int> sampled;
        for (int c : order) {
            if (taken[c]) continue;
            bool alive = true;
            for (int e : clique_edges[c])
                if (covered[e]) { alive = false; break; }
            if (alive && rng.chance(fraction)) sampled.push_back(c);
        }
        std::size_t before = result.size();
        for (int c : sampled) try_take(c);
        if (result.size() == before) break;
    }
    return result;
}

}  // namespace detail

/// Randomized greedy clique packing with restarts; returns the best
/// packing over derived seeds (fewest leftover edges, ties by restart
/// index). Set rounds_mode for the round-based variant.
inline NibbleOutcome nibble_pack(const Complex& G, int q, int r, const ParamSet& p, bool rounds_mode = false) {
    const auto& edges = G.level(r);
    const auto& cliques = G.level(q);
    std::unordered_map<VertexSet, int, VertexSetHash> edge_id;
    for (std::size_t i = 0; i < edges.size(); ++i) edge_id[edges[i]] = static_cast<int>(i);
    std::vector<std::vector<int>> clique_edges(cliques.size());
    for (std::size_t c = 0; c < cliques.size(); ++c) {
        for_each_subset(cliques[c], r, [&](const VertexSet& e) {
            clique_edges[c].push_back(edge_id.at(e));
        });
    }

    const int restarts = std::max(1, p.budget.restarts);
    std::vector<std::vector<int>> results(restarts);
    parallel_for(p.threads, restarts, [&](int i) {
        results[i] = detail::nibble_pass(clique_edges, static_cast<int>(edges.size()),
                                         Rng::derive(p.seed, static_cast<std::uint64_t>(i)), rounds_mode);
    });
    int best = 0;
    for (int i = 1; i < restarts; ++i)
        if (results[i].size() > results[best].size()) best = i;

    NibbleOutcome out;
    out.packing.q = q;
    out.packing.r = r;
    for (int c : results[best]) out.packing.blocks.push_back(cliques[c]);
    out.packing.normalize();
    if (!verify_packing(G, out.packing))
        throw std::logic_error("nibble_pack: produced blocks are not a packing");

    RGraph covered(G.ambient_n(), r);
    for (int c : results[best])
        for (int e : clique_edges[c]) covered.add(edges[e]);
    out.leftover = G.level_graph(r).minus(covered);
    out.stats.covered = covered.size();
    out.stats.leftover_edges = out.leftover.size();
    out.stats.leftover_max_degree = out.leftover.empty() ? 0 : out.leftover.max_degree();
    out.stats.restarts_used = restarts;
    out.stats.winning_seed = Rng::derive(p.seed, static_cast<std::uint64_t>(best));
    return out;
}

struct MakeDivisibleOutcome {
    bool ok = false;
    RGraph leftover;                 // L with G^(r) − L divisible
    std::int64_t max_degree = 0;     // Δ(L)
    std::string failure;             // set when budget exhausted
};

/// Deletes a sparse L ⊆ G^(r) − forbidden so that G^(r) − L becomes
/// K_q^(r)-divisible: cover `forbidden` with a greedy clique packing, pack
/// the rest by nibble, and return the leftover; retried over derived seeds,
/// keeping the L with smallest (Δ(L), |L|). Failure means the seed budget
/// ran out, not that no L exists.
inline MakeDivisibleOutcome make_divisible(const Complex& G, const RGraph& forbidden, const ParamSet& p) {
    MakeDivisibleOutcome out;
    const int q = p.q, r = p.r;
    const RGraph host = G.level_graph(r);
    if (forbidden.empty() && check_design_divisible(host, q, r, 1).ok) {
        out.ok = true;
        out.leftover = RGraph(G.ambient_n(), r);
        return out;
    }
    bool have = false;
    RGraph best_L;
    for (int attempt = 0; attempt < std::max(1, p.budget.retries); ++attempt) {
        ParamSet pa = p;
        pa.seed = Rng::derive(p.seed, static_cast<std::uint64_t>(attempt));
        RGraph covered(G.ambient_n(), r);
        if (!forbidden.empty()) {
            auto cov = cover_edges(G, forbidden, pa);
            if (!cov.ok) continue;
            for (const auto& B : cov.blocks)
                for_each_subset(B, r, [&](const VertexSet& e) {
                    if (!covered.contains(e)) covered.add(e);
                });
        }
        auto nib = nibble_pack(G.minus(covered), q, r, pa);
        RGraph L = host.minus(covered).minus(nib.packing.covered_edges(G.ambient_n()));
        if (!check_design_divisible(host.minus(L), q, r, 1).ok)
            throw std::logic_error("make_divisible: leftover complement not divisible");
        auto key = [](const RGraph& g) {
            return std::pair<std::int64_t, std::int64_t>(g.empty() ? 0 : g.max_degree(), g.size());
        };
        if (!have || key(L) < key(best_L)) {
            best_L = L;
            have = true;
        }
    }
    if (!have) {
        out.failure = "budget exhausted";
        return out;
    }
    out.ok = true;
    out.leftover = best_L;
    out.max_degree = best_L.empty() ? 0 : best_L.max_degree();
    return out;
}

}  // namespace kqr
