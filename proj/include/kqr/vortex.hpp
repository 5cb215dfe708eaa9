#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "kqr/boosting.hpp"
#include "kqr/combinatorics.hpp"
#include "kqr/complex.hpp"
#include "kqr/divisibility.hpp"
#include "kqr/exact_cover.hpp"
#include "kqr/hypergraph.hpp"
#include "kqr/packing.hpp"
#include "kqr/params.hpp"
#include "kqr/properties.hpp"
#include "kqr/rng.hpp"

namespace kqr {

/// Nested vertex sets U_0 ⊇ U_1 ⊇ … ⊇ U_ℓ with |U_i| = ⌊μ|U_{i-1}|⌋ and
/// |U_ℓ| = m, ⌊μm'⌋ <= m <= m'.
struct Vortex {
    std::vector<VertexSet> levels;  // levels[0] = V(G)
    Rational mu;
    int m = 0;

    int depth() const { return static_cast<int>(levels.size()) - 1; }
};

/// Builds a uniformly random vortex with the exact (V1)-(V3) sizes:
/// n_i = ⌊μ n_{i-1}⌋, ℓ = 1 + max{i : n_i >= m'} (0 when n <= m').
inline Vortex build_vortex(const Complex& G, const Rational& mu, int m_prime, const ParamSet& p) {
    if (!(mu > Rational(0) && mu <= Rational(1, 2)))
        throw std::invalid_argument("build_vortex: need 0 < mu <= 1/2");
    if (m_prime < 1) throw std::invalid_argument("build_vortex: m' >= 1 required");
    Vortex v;
    v.mu = mu;
    v.levels.push_back(G.vertices());
    Rng rng(p.seed);
    while (static_cast<std::int64_t>(v.levels.back().size()) >= m_prime) {
        const VertexSet& prev = v.levels.back();
        const Rational target = mu * Rational(static_cast<std::int64_t>(prev.size()));
        const std::int64_t size = target.num() / target.den();  // ⌊μ|U_{i-1}|⌋
        // sample a uniform subset of the previous level of the exact size
        VertexSet pool = prev;
        rng.shuffle(pool);
        pool.resize(static_cast<std::size_t>(size));
        std::sort(pool.begin(), pool.end());
        v.levels.push_back(std::move(pool));
    }
    v.m = static_cast<int>(v.levels.back().size());
    return v;
}

/// Measured (V4)/(V5) randomness reports for an existing vortex.
struct VortexRandomnessReport {
    std::vector<PropertyReport> inner;    // U_i random in G[U_{i-1}]
    std::vector<PropertyReport> annulus;  // U_i ∖ U_{i+1} random in G[U_{i-1}]
};

inline VortexRandomnessReport measure_vortex_randomness(const Complex& G, const Vortex& v,
                                                        const ParamSet& p) {
    VortexRandomnessReport rep;
    for (int i = 1; i <= v.depth(); ++i) {
        Complex host = G.restrict_vertices(v.levels[i - 1]);
        ParamSet pi = p;
        pi.mu = v.mu;
        rep.inner.push_back(check_random_in(host, v.levels[i], pi));
        if (i < v.depth()) {
            ParamSet pa = p;
            pa.mu = v.mu * (Rational(1) - v.mu);
            rep.annulus.push_back(
                check_random_in(host, set_minus(v.levels[i], v.levels[i + 1]), pa));
        }
    }
    return rep;
}

struct PipelineLevelStats {
    int level = 0;
    int level_size = 0;
    std::int64_t nibble_blocks = 0;
    std::int64_t nibble_leftover = 0;
    std::int64_t nibble_leftover_max_degree = 0;
    bool boost_used = false;
    std::vector<std::int64_t> coverdown_blocks_by_type;
};

struct PipelineOutcome {
    bool ok = false;
    std::string failure;          // reason, with the level reached
    bool divisible_input = true;  // false: rejected before any work
    int attempts = 0;
    std::vector<VertexSet> blocks;
    std::vector<PipelineLevelStats> level_stats;  // of the successful attempt
    Vortex vortex;                                // of the successful attempt
    std::int64_t final_leftover = 0;              // edges solved at U_ℓ
};

namespace detail {

struct AttemptFail {
    std::string reason;
};

/// One pipeline attempt with a fixed seed. Throws AttemptFail on a stall.
inline PipelineOutcome pipeline_attempt(const Complex& G, int q, int r, int m_prime, const ParamSet& p) {
    PipelineOutcome out;
    out.vortex = build_vortex(G, p.mu, m_prime, p);
    const Vortex& v = out.vortex;

    std::unordered_set<VertexSet, VertexSetHash> uncovered(G.level(r).begin(), G.level(r).end());
    auto uncovered_graph = [&](int ambient) {
        RGraph R(ambient, r);
        for (const auto& e : uncovered) R.add(e);
        return R;
    };

    for (int lvl = 0; lvl < v.depth(); ++lvl) {
        PipelineLevelStats st;
        st.level = lvl;
        st.level_size = static_cast<int>(v.levels[lvl].size());
        const VertexSet& U = v.levels[lvl];
        const VertexSet& W = v.levels[lvl + 1];

        Complex GU = G.restrict_vertices(U).restrict_to(uncovered_graph(G.ambient_n()));

        // reserve a sparse graph of edges meeting W (the H* role): the
        // nibble must leave fillers for the cover-down step
        Rng reserve_rng(Rng::derive(p.seed, 0x55AA + static_cast<std::uint64_t>(lvl)));
        std::unordered_set<VertexSet, VertexSetHash> reserved;
        RGraph nibble_target(G.ambient_n(), r);
        for (const auto& e : GU.level(r)) {
            if (is_subset(e, W)) continue;  // interior: never nibbled here
            const int type = intersection_size(e, W);
            if (type >= 1 && reserve_rng.chance(p.nu)) reserved.insert(e);
            else nibble_target.add(e);
        }

        ParamSet pn = p;
        pn.seed = Rng::derive(p.seed, 0xA0 + static_cast<std::uint64_t>(lvl));
        auto bn = boosted_nibble(GU.restrict_to(nibble_target), q, r, pn);
        const NibbleOutcome& nib = bn.boosted;
        st.boost_used = bn.boost_used;
        st.nibble_blocks = static_cast<std::int64_t>(nib.packing.blocks.size());
        st.nibble_leftover = nib.stats.leftover_edges;
        st.nibble_leftover_max_degree = nib.stats.leftover_max_degree;
        for (const auto& B : nib.packing.blocks) {
            out.blocks.push_back(B);
            for_each_subset(B, r, [&](const VertexSet& e) { uncovered.erase(e); });
        }

        // cover down: one exact-cover instance per level; every remaining
        // edge not inside W is an item, interior edges are at-most-once
        // fillers; items are laid out in ascending type order
        std::vector<VertexSet> items, fillers;
        for (int t = 0; t < r; ++t)
            for (const auto& e : GU.level(r))
                if (uncovered.count(e) && intersection_size(e, W) == t) items.push_back(e);
        for (const auto& e : GU.level(r))
            if (uncovered.count(e) && is_subset(e, W)) fillers.push_back(e);
        st.coverdown_blocks_by_type.assign(r, 0);
        if (!items.empty()) {
            std::unordered_map<VertexSet, int, VertexSetHash> id;
            for (std::size_t k = 0; k < items.size(); ++k) id[items[k]] = static_cast<int>(k);
            for (std::size_t k = 0; k < fillers.size(); ++k)
                id[fillers[k]] = static_cast<int>(items.size() + k);

            ExactCover ec(static_cast<int>(items.size()), static_cast<int>(fillers.size()));
            std::vector<VertexSet> option_blocks;
            for (const auto& Q : GU.level(q)) {
                bool usable = true;
                bool has_item = false;
                std::vector<int> ids;
                for_each_subset(Q, r, [&](const VertexSet& e) {
                    auto it = id.find(e);
                    if (it == id.end()) usable = false;  // covered elsewhere
                    else {
                        ids.push_back(it->second);
                        if (it->second < static_cast<int>(items.size())) has_item = true;
                    }
                });
                if (!usable || !has_item) continue;
                ec.add_option(std::move(ids), 1);
                option_blocks.push_back(Q);
            }
            auto sol = ec.solve(Rng::derive(p.seed, 0xB0 + (static_cast<std::uint64_t>(lvl) << 8)),
                                p.budget.max_nodes);
            if (sol.status != SolveStatus::Solved)
                throw AttemptFail{"level " + std::to_string(lvl) +
                                  (sol.status == SolveStatus::Unsat ? ": cover-down unsat"
                                                                    : ": cover-down budget")};
            for (int o : sol.chosen) {
                const VertexSet& B = option_blocks[o];
                int min_type = r;
                for_each_subset(B, r, [&](const VertexSet& e) {
                    if (id.count(e) && id.at(e) < static_cast<int>(items.size()))
                        min_type = std::min(min_type, intersection_size(e, W));
                });
                if (min_type < r) ++st.coverdown_blocks_by_type[min_type];
                out.blocks.push_back(B);
                for_each_subset(B, r, [&](const VertexSet& e) { uncovered.erase(e); });
            }
        }
        out.level_stats.push_back(std::move(st));
    }

    // final level: exact solve of the leftover inside U_ℓ
    Complex Gfin = G.restrict_vertices(v.levels.back()).restrict_to(uncovered_graph(G.ambient_n()));
    out.final_leftover = static_cast<std::int64_t>(Gfin.level(r).size());
    ParamSet pf = p;
    pf.seed = Rng::derive(p.seed, 0xF1);
    auto dec = exact_decompose(Gfin, q, r, 1, pf);
    if (dec.status != SolveStatus::Solved)
        throw AttemptFail{std::string("final level: ") +
                          (dec.status == SolveStatus::Unsat ? "leftover not decomposable" : "budget")};
    for (const auto& B : dec.blocks) out.blocks.push_back(B);
    std::sort(out.blocks.begin(), out.blocks.end());
    out.ok = true;
    return out;
}

}  // namespace detail

/// Desk-scale iterative pipeline: reject non-divisible input, build a
/// vortex, per level nibble away from the next level then cover down in
/// ascending type order, and solve the final leftover inside U_ℓ exactly
/// (the absorber role at constant size). Failed attempts restart with a
/// derived seed and a fresh vortex, up to the retry budget.
inline PipelineOutcome iterate_pipeline(const Complex& G, int q, int r, const ParamSet& p,
                                        int m_prime = 12) {
    PipelineOutcome out;
    if (!check_design_divisible(G.level_graph(r), q, r, 1).ok) {
        out.divisible_input = false;
        out.failure = "input not K_q^(r)-divisible";
        return out;
    }
    std::string last_fail;
    for (int attempt = 0; attempt < std::max(1, p.budget.retries); ++attempt) {
        ParamSet pa = p;
        pa.seed = Rng::derive(p.seed, 0xEE00 + static_cast<std::uint64_t>(attempt));
        try {
            PipelineOutcome res = detail::pipeline_attempt(G, q, r, m_prime, pa);
            res.attempts = attempt + 1;
            auto rep = verify_design(G.level_graph(r), res.blocks, 1);
            bool in_level_q = true;
            for (const auto& B : res.blocks)
                if (!G.contains(B)) in_level_q = false;
            if (!rep.ok || !in_level_q)
                throw std::logic_error("iterate_pipeline: assembled blocks fail verification");
            res.divisible_input = true;
            return res;
        } catch (const detail::AttemptFail& f) {
            last_fail = f.reason;
        }
    }
    out.failure = "retries exhausted; last failure: " + last_fail;
    out.attempts = std::max(1, p.budget.retries);
    return out;
}

}  // namespace kqr
