#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "kqr/combinatorics.hpp"
#include "kqr/complex.hpp"
#include "kqr/hypergraph.hpp"
#include "kqr/params.hpp"
#include "kqr/rational.hpp"
#include "kqr/rng.hpp"

namespace kqr {

struct BudgetExceeded : std::runtime_error {
    explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

/// Measured values are exact rationals from full enumeration below the
/// sampling threshold; the pass flag is a pure function of measured
/// values and supplied thresholds. Above the threshold a uniform sample
/// of edges is measured instead: `sampled` is set, the sample size is
/// recorded, and such reports are estimates which never fail.
struct PropertyReport {
    std::string property;
    bool vacuous = false;
    bool pass = true;
    bool sampled = false;
    std::int64_t sample_size = 0;
    std::map<std::string, Rational> measured;
    std::map<std::string, VertexSet> witnesses;
    std::vector<std::string> notes;
};

namespace detail {

// full enumeration above this many per-edge membership checks switches
// the per-edge measurements to a uniform sample
constexpr std::int64_t kExactWorkLimit = 50'000'000;
constexpr std::int64_t kSampleEdges = 1000;

/// Number of m-sets of G through e, counted by extending e inside the
/// vertex set (cheaper than scanning level m when links are small).
inline std::int64_t count_extensions(const Complex& G, const RGraph* Y, const VertexSet& e, int m) {
    std::int64_t cnt = 0;
    for_each_subset(set_minus(G.vertices(), e), m - static_cast<int>(e.size()),
                    [&](const VertexSet& f) {
                        VertexSet W = set_union(e, f);
                        if (!G.contains(W)) return;
                        if (Y != nullptr && !Y->contains(W)) return;
                        ++cnt;
                    });
    return cnt;
}

/// Picks the edges to measure: all of them below the work limit, a seeded
/// uniform sample above it.
inline std::vector<VertexSet> measurement_edges(const std::vector<VertexSet>& edges,
                                                std::int64_t per_edge_work, bool& sampled,
                                                std::int64_t work_limit) {
    sampled = static_cast<std::int64_t>(edges.size()) * per_edge_work > work_limit &&
              static_cast<std::int64_t>(edges.size()) > kSampleEdges;
    if (!sampled) return edges;
    std::vector<VertexSet> sample = edges;
    Rng rng(0x5A5Au);  // fixed: reports stay deterministic
    rng.shuffle(sample);
    sample.resize(kSampleEdges);
    return sample;
}

}  // namespace detail

/// Regularity of G[Y]: per-edge clique counts |G[Y]^(q)(e)| for e in G^(r).
/// Reports d = midrange/n^{q-r} and eps = half-spread/n^{q-r}
/// (Y = nullptr means Y = G^(q)).
inline PropertyReport measure_regularity(const Complex& G, const RGraph* Y, int q, int r,
                                          std::int64_t work_limit = detail::kExactWorkLimit) {
    PropertyReport rep;
    rep.property = "regularity";
    const auto& edges = G.level(r);
    if (edges.empty()) {
        rep.vacuous = true;
        rep.notes.push_back("G^(r) empty; d undefined");
        return rep;
    }
    const Rational npow = Rational(G.vertex_count()).pow(q - r);
    const auto probe =
        detail::measurement_edges(edges, binom(G.vertex_count() - r, q - r), rep.sampled, work_limit);
    std::int64_t lo = -1, hi = 0;
    VertexSet lo_wit, hi_wit;
    for (const auto& e : probe) {
        std::int64_t cnt = detail::count_extensions(G, Y, e, q);
        if (lo < 0 || cnt < lo) { lo = cnt; lo_wit = e; }
        if (cnt > hi) { hi = cnt; hi_wit = e; }
    }
    rep.measured["count_min"] = Rational(lo);
    rep.measured["count_max"] = Rational(hi);
    rep.measured["d"] = Rational(lo + hi, 2) / npow;
    rep.measured["eps"] = Rational(hi - lo, 2) / npow;
    rep.witnesses["min_edge"] = lo_wit;
    rep.witnesses["max_edge"] = hi_wit;
    if (rep.sampled) {
        rep.sample_size = static_cast<std::int64_t>(probe.size());
        rep.notes.push_back("estimate from a uniform edge sample; not a pass/fail result");
    }
    return rep;
}

/// Density: xi = min_e |G^(q')(e)| / n^{q'-r} over e in G^(r).
inline PropertyReport measure_density(const Complex& G, int qp, int r,
                                       std::int64_t work_limit = detail::kExactWorkLimit) {
    PropertyReport rep;
    rep.property = "density";
    const auto& edges = G.level(r);
    if (edges.empty()) {
        rep.vacuous = true;
        return rep;
    }
    const Rational npow = Rational(G.vertex_count()).pow(qp - r);
    const auto probe =
        detail::measurement_edges(edges, binom(G.vertex_count() - r, qp - r), rep.sampled, work_limit);
    std::int64_t lo = -1;
    VertexSet wit;
    for (const auto& e : probe) {
        std::int64_t cnt = detail::count_extensions(G, nullptr, e, qp);
        if (lo < 0 || cnt < lo) { lo = cnt; wit = e; }
    }
    rep.measured["count_min"] = Rational(lo);
    rep.measured["xi"] = Rational(lo) / npow;
    rep.witnesses["min_edge"] = wit;
    if (rep.sampled) {
        rep.sample_size = static_cast<std::int64_t>(probe.size());
        rep.notes.push_back("estimate from a uniform edge sample; not a pass/fail result");
    }
    return rep;
}

/// Extendability with X = V(G): for every r-set e of V(G), counts the
/// (q-r)-sets Q with all r-subsets of Q ∪ e except e in G^(r). An empty
/// G^(r) passes by definition.
inline PropertyReport measure_extendability(const Complex& G, int q, int r) {
    PropertyReport rep;
    rep.property = "extendability";
    if (G.level(r).empty()) {
        rep.vacuous = true;
        rep.measured["xi"] = Rational(1);
        rep.notes.push_back("G^(r) empty: extendable by definition");
        return rep;
    }
    const RGraph host = G.level_graph(r);
    const Rational npow = Rational(G.vertex_count()).pow(q - r);
    std::int64_t lo = -1;
    VertexSet wit;
    for_each_subset(G.vertices(), r, [&](const VertexSet& e) {
        std::int64_t cnt = 0;
        for_each_subset(set_minus(G.vertices(), e), q - r, [&](const VertexSet& Q) {
            VertexSet W = set_union(Q, e);
            bool good = true;
            for_each_subset(W, r, [&](const VertexSet& f) {
                if (f != e && !host.contains(f)) good = false;
            });
            if (good) ++cnt;
        });
        if (lo < 0 || cnt < lo) { lo = cnt; wit = e; }
    });
    rep.measured["count_min"] = Rational(lo);
    rep.measured["xi"] = Rational(lo) / npow;
    rep.witnesses["min_rset"] = wit;
    return rep;
}

namespace detail {

/// Full-complex test for G_F at parameters (q', r'), n_F vertices.
/// Returns (eps_meas, xi_meas); xi uses the per-set scale (k-set counts
/// against n^k/k!) for the density clause so that complete complexes
/// measure near 1 at desk scale; raw ratios are also recorded.
struct ComplexMeasure {
    bool vacuous = false;
    Rational eps;      // regularity half-spread / n^{q'-r'}
    Rational xi;       // min(d, extendability, density·k!/n^k)
    Rational d;        // regularity midrange
    Rational density_raw;
    Rational density_scaled;
    Rational extendability;
};

inline ComplexMeasure measure_full_complex(const Complex& GF, int qp, int rp, std::int64_t& ops,
                                           std::int64_t max_ops) {
    ComplexMeasure m;
    const int nF = GF.vertex_count();
    if (nF == 0) {
        m.vacuous = true;
        m.xi = Rational(1);
        return m;
    }
    if (rp == 0) {
        // (eps, xi, q', 0)-complex iff empty or |G^(q')| >= xi n^{q'}
        if (GF.empty()) {
            m.vacuous = true;
            m.xi = Rational(1);
            return m;
        }
        std::int64_t cnt = static_cast<std::int64_t>(GF.level(qp).size());
        ops += cnt + 1;
        Rational fact(1);
        for (int i = 2; i <= qp; ++i) fact *= Rational(i);
        m.density_raw = Rational(cnt) / Rational(nF).pow(qp);
        m.density_scaled = m.density_raw * fact;
        m.xi = m.density_scaled;
        m.d = m.density_scaled;
        return m;
    }
    if (GF.level(rp).empty()) {
        m.vacuous = true;
        m.xi = Rational(1);
        return m;
    }
    ops += static_cast<std::int64_t>(GF.level(rp).size()) *
           static_cast<std::int64_t>(GF.level(qp).size() + 1);
    if (ops > max_ops) throw BudgetExceeded("supercomplex enumeration budget exceeded");

    auto reg = measure_regularity(GF, nullptr, qp, rp);
    auto dens = measure_density(GF, qp + rp, rp);
    auto ext = measure_extendability(GF, qp, rp);
    Rational fact(1);
    for (int i = 2; i <= qp; ++i) fact *= Rational(i);
    m.eps = reg.measured.at("eps");
    m.d = reg.measured.at("d");
    m.density_raw = dens.measured.at("xi");
    m.density_scaled = m.density_raw * fact;
    m.extendability = ext.measured.at("xi");
    m.xi = m.d;
    if (m.extendability < m.xi) m.xi = m.extendability;
    if (m.density_scaled < m.xi) m.xi = m.density_scaled;
    return m;
}

/// Worst-case complex measures over all link-intersection families
/// F ⊆ G^(h), 1 <= |F| <= 2^h, h in [cap]_0, optionally restricted to a
/// vertex set U. The h = cap layer is a pure counting test and uses a
/// bitmask fast path for q-cap = 1 on <= 64 ambient labels.
struct FamilyScan {
    Rational worst_eps = Rational(0);
    Rational worst_xi = Rational(1);
    bool any = false;
    VertexSet eps_witness;
    VertexSet xi_witness;
};

inline FamilyScan scan_link_intersections(const Complex& G, int q, int r, const VertexSet* U,
                                          std::int64_t& ops, std::int64_t max_ops) {
    FamilyScan out;

    for (int h = 0; h < r; ++h) {
        const auto& level_h = G.level(h);
        const int max_size = std::min<std::int64_t>(1 << h, static_cast<std::int64_t>(level_h.size()));
        std::vector<int> pool(level_h.size());
        for (std::size_t k = 0; k < pool.size(); ++k) pool[k] = static_cast<int>(k);
        for (int fs = 1; fs <= max_size; ++fs) {
            for_each_subset(pool, fs, [&](const std::vector<int>& idx) {
                std::vector<VertexSet> F;
                F.reserve(idx.size());
                for (int k : idx) F.push_back(level_h[k]);
                Complex GF = intersect_links(G, F);
                if (U != nullptr) GF = GF.restrict_vertices(*U);
                detail::ComplexMeasure m = detail::measure_full_complex(GF, q - h, r - h, ops, max_ops);
                if (m.vacuous) return;
                out.any = true;
                if (m.eps > out.worst_eps) {
                    out.worst_eps = m.eps;
                    out.eps_witness = F[0];
                }
                if (m.xi < out.worst_xi) {
                    out.worst_xi = m.xi;
                    out.xi_witness = F[0];
                }
            });
            if (ops > max_ops) throw BudgetExceeded("link-intersection enumeration budget exceeded");
        }
    }

    // h = r: every intersection is a (q-r, 0)-complex; test the count
    // bound |⋂_f G(f)^{(q-r)}[U]| >= xi n_F^{q-r} directly (∅ is always
    // present since every f is an edge of G).
    {
        const auto& level_r = G.level(r);
        const int max_size = std::min<std::int64_t>(1 << r, static_cast<std::int64_t>(level_r.size()));
        const int k = q - r;
        Rational fact(1);
        for (int j = 2; j <= k; ++j) fact *= Rational(j);
        std::vector<int> pool(level_r.size());
        for (std::size_t j = 0; j < pool.size(); ++j) pool[j] = static_cast<int>(j);

        const VertexSet base = (U != nullptr) ? set_intersect(G.vertices(), *U) : G.vertices();
        const bool mask_path = (k == 1 && G.ambient_n() <= 64);
        std::vector<std::uint64_t> ext_mask;
        if (mask_path) {
            ext_mask.assign(level_r.size(), 0);
            for (std::size_t j = 0; j < level_r.size(); ++j) {
                for (int v : base) {
                    VertexSet e = level_r[j];
                    if (std::binary_search(e.begin(), e.end(), v)) continue;
                    e.insert(std::lower_bound(e.begin(), e.end(), v), v);
                    if (G.contains(e)) ext_mask[j] |= (1ULL << v);
                }
            }
        }

        for (int fs = 1; fs <= max_size; ++fs) {
            for_each_subset(pool, fs, [&](const std::vector<int>& idx) {
                VertexSet forb;  // ⋃F
                for (int j : idx) forb = set_union(forb, level_r[j]);
                std::int64_t cnt = 0;
                if (mask_path) {
                    std::uint64_t m = ~0ULL;
                    for (int j : idx) m &= ext_mask[j];
                    for (int v : forb) m &= ~(1ULL << v);
                    cnt = static_cast<std::int64_t>(__builtin_popcountll(m));
                    ops += static_cast<std::int64_t>(idx.size());
                } else {
                    for_each_subset(set_minus(base, forb), k, [&](const VertexSet& g) {
                        for (int j : idx) {
                            if (!G.contains(set_union(level_r[j], g))) return;
                        }
                        ++cnt;
                    });
                    ops += binom(static_cast<std::int64_t>(base.size()), k) *
                           static_cast<std::int64_t>(idx.size());
                }
                const int nF = static_cast<int>(base.size()) -
                               static_cast<int>(set_intersect(forb, base).size());
                if (nF == 0) return;  // no vertices left: bound is 0 >= xi*0
                out.any = true;
                Rational xi0 = Rational(cnt) * fact / Rational(nF).pow(k);
                if (xi0 < out.worst_xi) {
                    out.worst_xi = xi0;
                    out.xi_witness = level_r[idx[0]];
                }
            });
            if (ops > max_ops) throw BudgetExceeded("link-intersection enumeration budget exceeded");
        }
    }
    return out;
}

}  // namespace detail

/// Supercomplex check: for every i in [r]_0 and F ⊆ G^(i) with
/// 1 <= |F| <= 2^i, measures ⋂_{f∈F} G(f) as a full (q-i, r-i)-complex
/// (the Y = G^(q) relaxation; the existential Y of the definition is
/// exercised by the boosted selection instead). Worst-case (eps, xi) over
/// all (i, F); pass iff eps <= thresholds.eps and xi >= thresholds.xi.
inline PropertyReport check_supercomplex(const Complex& G, int q, int r, const Rational& eps_threshold,
                                         const Rational& xi_threshold, std::int64_t max_ops = 500'000'000) {
    PropertyReport rep;
    rep.property = "supercomplex";
    rep.notes.push_back("Y = G^(q) relaxation; density on per-set scale (count*k!/n^k)");
    std::int64_t ops = 0;
    auto scan = detail::scan_link_intersections(G, q, r, nullptr, ops, max_ops);
    if (!scan.any) rep.vacuous = true;
    rep.measured["eps"] = scan.worst_eps;
    rep.measured["xi"] = scan.worst_xi;
    rep.witnesses["worst_eps_F"] = scan.eps_witness;
    rep.witnesses["worst_xi_F"] = scan.xi_witness;
    rep.pass = rep.vacuous || (scan.worst_eps <= eps_threshold && scan.worst_xi >= xi_threshold);
    return rep;
}

/// Typicality: c_meas = max over families A of (r-1)-subsets, 1 <= |A| <= h,
/// of |deviation of ⋂_{S∈A} H(S) from p^{|A|} n| / (p^{|A|} n).
inline PropertyReport check_typicality(const RGraph& H, int h, const Rational& p) {
    if (p == Rational(0)) throw std::invalid_argument("check_typicality: p = 0");
    if (static_cast<std::int64_t>(h) * (H.r() - 1) > H.n())
        throw std::invalid_argument("check_typicality: h(r-1) > n");
    PropertyReport rep;
    rep.property = "typicality";
    const int n = H.n();
    const int rm1 = H.r() - 1;
    std::vector<VertexSet> subsets;
    for_each_subset_of_range(n, rm1, [&](const VertexSet& S) { subsets.push_back(S); });

    Rational worst(0);
    // enumerate families of size 1..h
    std::vector<int> pool(subsets.size());
    for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = static_cast<int>(i);
    for (int a = 1; a <= h; ++a) {
        const Rational expected = p.pow(a) * Rational(n);
        for_each_subset(pool, a, [&](const std::vector<int>& idx) {
            std::int64_t cnt = 0;
            for (int v = 0; v < n; ++v) {
                bool in_all = true;
                for (int k : idx) {
                    const VertexSet& S = subsets[k];
                    if (std::binary_search(S.begin(), S.end(), v)) { in_all = false; break; }
                    VertexSet e = S;
                    e.insert(std::lower_bound(e.begin(), e.end(), v), v);
                    if (!H.contains(e)) { in_all = false; break; }
                }
                if (in_all) ++cnt;
            }
            Rational dev = (Rational(cnt) - expected).abs() / expected;
            if (dev > worst) worst = dev;
        });
    }
    rep.measured["c"] = worst;
    return rep;
}

/// Measured (R1)-(R4) of "U is (eps, mu, xi, q, r)-random in G", with
/// Y = G^(q) (pass Y to restrict). Reports worst witnesses; pass compares
/// against p.eps / p.xi / p.mu.
inline PropertyReport check_random_in(const Complex& G, const VertexSet& U, const ParamSet& p,
                                      const RGraph* Y = nullptr) {
    PropertyReport rep;
    rep.property = "random_in";
    const int q = p.q, r = p.r;
    const int n = G.vertex_count();
    const Rational mu = p.mu;

    // (R1) |U| = mu*n ± n^{2/3}  (cube the inequality to stay rational)
    const Rational size_dev = (Rational(static_cast<std::int64_t>(U.size())) - mu * Rational(n)).abs();
    rep.measured["R1_size"] = Rational(static_cast<std::int64_t>(U.size()));
    rep.measured["R1_deviation"] = size_dev;
    bool r1 = size_dev.pow(3) <= Rational(n).pow(2);
    if (!r1) rep.pass = false;
    rep.notes.push_back(r1 ? "R1 holds" : "R1 fails");

    // (R2): per-edge counts of cliques by |Q ∩ U| = x vs bin(q-r,mu,x) d n^{q-r}
    const auto& edges = G.level(r);
    const Rational npow = Rational(n).pow(q - r);
    Rational d = p.d;
    if (d == Rational(0) && !edges.empty()) {
        auto reg = measure_regularity(G, Y, q, r);
        d = reg.measured.at("d");
    }
    Rational worst_r2(0);
    bool r2_infinite = false;
    for (int x = 0; x <= q - r; ++x) {
        const Rational b = Rational(binom(q - r, x)) * mu.pow(x) * (Rational(1) - mu).pow(q - r - x);
        const Rational expected = b * d * npow;
        for (const auto& e : edges) {
            std::int64_t cnt = 0;
            for (const auto& Q : G.level(q)) {
                if (!is_subset(e, Q)) continue;
                if (Y != nullptr && !Y->contains(Q)) continue;
                if (intersection_size(set_minus(Q, e), U) == x) ++cnt;
            }
            if (expected == Rational(0)) {
                if (cnt != 0) r2_infinite = true;
                continue;
            }
            Rational dev = (Rational(cnt) - expected).abs() / expected;
            if (dev > worst_r2) {
                worst_r2 = dev;
                rep.witnesses["R2_edge"] = e;
            }
        }
    }
    rep.measured["R2_eps"] = worst_r2;
    if (r2_infinite) rep.notes.push_back("R2: nonzero count where bin(q-r,mu,x)d = 0");
    if (worst_r2 > p.eps || r2_infinite) rep.pass = false;

    // (R3): |G[Y]^{(q+r)}(e)[U]| >= xi (mu n)^q
    if (G.max_level() >= q + r) {
        Rational worst_r3(-1);
        const Rational denom = (mu * Rational(n)).pow(q);
        for (const auto& e : edges) {
            std::int64_t cnt = 0;
            for (const auto& W : G.level(q + r)) {
                if (!is_subset(e, W)) continue;
                VertexSet rest = set_minus(W, e);
                if (static_cast<int>(set_intersect(rest, U).size()) != q) continue;
                if (Y != nullptr) {
                    bool ok = true;
                    for_each_subset(W, q, [&](const VertexSet& Q) {
                        if (!Y->contains(Q)) ok = false;
                    });
                    if (!ok) continue;
                }
                ++cnt;
            }
            Rational ratio = denom == Rational(0) ? Rational(0) : Rational(cnt) / denom;
            if (worst_r3 < Rational(0) || ratio < worst_r3) {
                worst_r3 = ratio;
                rep.witnesses["R3_edge"] = e;
            }
        }
        if (worst_r3 < Rational(0)) worst_r3 = Rational(1);
        rep.measured["R3_xi"] = worst_r3;
        if (worst_r3 < p.xi) rep.pass = false;
    } else {
        rep.notes.push_back("R3 skipped: complex not materialized to level q+r");
    }

    // (R4): link-intersection complexes restricted to U
    std::int64_t ops = 0;
    auto scan = detail::scan_link_intersections(G, q, r, &U, ops,
                                                std::numeric_limits<std::int64_t>::max());
    if (scan.any) {
        rep.measured["R4_eps"] = scan.worst_eps;
        rep.measured["R4_xi"] = scan.worst_xi;
        if (scan.worst_eps > p.eps || scan.worst_xi < p.xi) rep.pass = false;
    }
    return rep;
}

}  // namespace kqr
