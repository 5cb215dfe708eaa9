#pragma once

#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "kqr/combinatorics.hpp"
#include "kqr/complex.hpp"
#include "kqr/packing.hpp"
#include "kqr/params.hpp"
#include "kqr/properties.hpp"
#include "kqr/rational.hpp"
#include "kqr/rng.hpp"

namespace kqr {

/// Arbitrary-precision rational for the reweighting arithmetic: ψ values
/// accumulate one term per (edge, (q+r)-clique) pair, so their reduced
/// denominators are lcm-like and overflow 64 bits on irregular complexes.
using BigRational = boost::multiprecision::cpp_rational;

inline BigRational to_big(const Rational& r) {
    return BigRational(r.num(), r.den());
}

inline std::string big_str(const BigRational& x) {
    std::ostringstream os;
    os << x;
    return os.str();
}

/// Seeded Bernoulli with exact big-rational probability.
inline bool big_chance(Rng& rng, const BigRational& p) {
    using boost::multiprecision::cpp_int;
    if (p <= 0) return false;
    if (p >= 1) return true;
    cpp_int x = rng.next();
    return x * denominator(p) < (numerator(p) << 64);
}

/// Symmetric edge-gadget weights: w[j] is the value on q-sets Q of the
/// complete complex on e ∪ J (|e| = r, |J| = q) with |Q ∩ e| = j. The
/// weighted q-set count through an r-set e' is 1 for e' = e and 0
/// otherwise, and |w[j]| <= 2^{r-j}(r-j)!/C(q-r+j, j).
struct GadgetWeights {
    int q = 0;
    int r = 0;
    std::vector<Rational> w;  // size r+1

    Rational bound(int j) const {
        Rational b(1);
        for (int i = 0; i < r - j; ++i) b *= Rational(2);
        for (int i = 2; i <= r - j; ++i) b *= Rational(i);
        return b / Rational(binom(q - r + j, j));
    }
};

/// Solves the symmetric gadget system. For e' with s = |e' ∩ e|, the
/// number of q-sets Q containing e' with |Q ∩ e| = j is
/// N(s,j) = C(r-s, j-s) C(q-r+s, j), which is triangular in (s, j), so
/// back-substitution from s = r down to 0 gives the unique symmetric
/// solution. Both gadget properties are then verified exhaustively on the
/// complete complex on q+r vertices; a failure is an internal error.
inline GadgetWeights edge_gadget(int q, int r) {
    if (!(q > r && r >= 1)) throw std::invalid_argument("edge_gadget: need q > r >= 1");
    GadgetWeights gw;
    gw.q = q;
    gw.r = r;
    gw.w.assign(r + 1, Rational(0));

    auto N = [&](int s, int j) -> std::int64_t { return binom(r - s, j - s) * binom(q - r + s, j); };

    for (int s = r; s >= 0; --s) {
        Rational rhs = (s == r) ? Rational(1) : Rational(0);
        for (int j = s + 1; j <= r; ++j) rhs -= Rational(N(s, j)) * gw.w[j];
        const std::int64_t diag = N(s, s);
        if (diag == 0) throw std::logic_error("edge_gadget: singular system");
        gw.w[s] = rhs / Rational(diag);
    }

    // property (i), exhaustively on the complete complex on q+r vertices
    // with e = {0..r-1}
    const int m = q + r;
    VertexSet e = range_set(r);
    bool ok = true;
    for_each_subset_of_range(m, r, [&](const VertexSet& ep) {
        Rational sum(0);
        for_each_subset_of_range(m, q, [&](const VertexSet& Q) {
            if (!is_subset(ep, Q)) return;
            sum += gw.w[intersection_size(Q, e)];
        });
        const Rational want = (ep == e) ? Rational(1) : Rational(0);
        if (sum != want) ok = false;
    });
    if (!ok) throw std::logic_error("edge_gadget: row-sum identity failed");
    for (int j = 0; j <= r; ++j)
        if (gw.w[j].abs() > gw.bound(j)) throw std::logic_error("edge_gadget: magnitude bound failed");
    return gw;
}

/// Exact fractional reweighting of G^(q): for every r-edge the reweighted
/// clique count is exactly d' n^{q-r}.
struct BoostWeights {
    int q = 0;
    int r = 0;
    Rational d_target;                    // d'
    std::map<VertexSet, BigRational> psi; // per q-clique, canonical order
    BigRational psi_min;
    BigRational psi_max;
    bool in_quarter_range = false;        // 1/4 <= psi <= 3/4 everywhere
    bool range_violation = false;         // some psi outside [0,1]
};

/// Builds ψ = 1/2 + Σ_e c_e Σ_J ψ_{e,J} with
/// c_e = (d' n^{q-r} − |G^(q)(e)|/2) / |G^{(q+r)}(e)|, all in exact
/// rationals. d_prime = 0 selects the default d/2 with d the measured
/// regularity midrange. Throws when some edge lies in no (q+r)-clique.
inline BoostWeights boost_weights(const Complex& G, int q, int r, Rational d_prime = Rational(0)) {
    if (G.max_level() < q + r)
        throw std::invalid_argument("boost_weights: complex must be materialized to level q+r");
    BoostWeights bw;
    bw.q = q;
    bw.r = r;
    const int n = G.vertex_count();
    const auto& edges = G.level(r);
    const Rational npow = Rational(n).pow(q - r);

    if (d_prime == Rational(0)) {
        auto reg = measure_regularity(G, nullptr, q, r);
        if (reg.vacuous) throw std::invalid_argument("boost_weights: no r-edges");
        d_prime = reg.measured.at("d") / Rational(2);
    }
    bw.d_target = d_prime;

    std::map<VertexSet, BigRational> c;
    for (const auto& e : edges) {
        const std::int64_t deg_q = G.link_count(e, q);
        const std::int64_t deg_qr = G.link_count(e, q + r);
        if (deg_qr == 0)
            throw std::invalid_argument("boost_weights: edge with no (q+r)-clique (unsupported input)");
        c[e] = (to_big(d_prime * npow) - BigRational(deg_q, 2)) / deg_qr;
    }

    const GadgetWeights gw = edge_gadget(q, r);
    std::vector<BigRational> gadget(r + 1);
    for (int j = 0; j <= r; ++j) gadget[j] = to_big(gw.w[j]);

    bool first = true;
    for (const auto& Q : G.level(q)) {
        BigRational val(1, 2);
        // pairs (e, J): Q ⊆ e ∪ J = W with W a (q+r)-set of G; every
        // r-subset e of W is an edge (downward closure)
        for (const auto& W : G.level(q + r)) {
            if (!is_subset(Q, W)) continue;
            for_each_subset(W, r, [&](const VertexSet& e) {
                val += c.at(e) * gadget[intersection_size(Q, e)];
            });
        }
        bw.psi[Q] = val;
        if (first || val < bw.psi_min) bw.psi_min = val;
        if (first || val > bw.psi_max) bw.psi_max = val;
        first = false;
    }
    bw.in_quarter_range = !first && bw.psi_min >= BigRational(1, 4) && bw.psi_max <= BigRational(3, 4);
    bw.range_violation = !first && (bw.psi_min < 0 || bw.psi_max > 1);

    // exact per-edge row sums (zero tolerance)
    for (const auto& e : edges) {
        BigRational sum(0);
        for (const auto& [Q, v] : bw.psi)
            if (is_subset(e, Q)) sum += v;
        if (sum != to_big(d_prime * npow))
            throw std::logic_error("boost_weights: row sum not exactly d'n^{q-r}");
    }
    return bw;
}

struct BoostSelection {
    RGraph Y;
    PropertyReport regularity;
    PropertyReport density;
};

/// Seeded independent inclusion of each q-clique with probability ψ(Q),
/// plus regularity / density reports for the selection.
inline BoostSelection boost_select(const Complex& G, const BoostWeights& bw, const ParamSet& p) {
    if (!bw.psi.empty() && (bw.psi_min < 0 || bw.psi_max > 1))
        throw std::invalid_argument("boost_select: psi outside [0,1]");
    BoostSelection out;
    Rng rng(p.seed);
    out.Y = RGraph(G.ambient_n(), bw.q);
    for (const auto& [Q, v] : bw.psi)
        if (big_chance(rng, v)) out.Y.add(Q);
    out.regularity = measure_regularity(G, &out.Y, bw.q, bw.r);
    if (G.max_level() >= bw.q + bw.r) {
        // density of G[Y] at level q+r
        Complex GY = G.restrict_to(out.Y);
        out.density = measure_density(GY, bw.q + bw.r, bw.r);
    }
    return out;
}

struct BoostedNibbleOutcome {
    NibbleOutcome boosted;
    NibbleOutcome baseline;        // plain nibble on the same seeds
    bool boost_used = false;       // false when boost was unsupported
    std::string note;
};

/// boost_weights → boost_select → nibble on G[Y], with a plain nibble on
/// the same seeds for comparison. Falls back to the plain result when the
/// complex cannot support the reweighting.
inline BoostedNibbleOutcome boosted_nibble(const Complex& G, int q, int r, const ParamSet& p) {
    BoostedNibbleOutcome out;
    out.baseline = nibble_pack(G, q, r, p);
    try {
        BoostWeights bw = boost_weights(G, q, r, p.d);
        BoostSelection sel = boost_select(G, bw, p);
        Complex GY = G.restrict_to(sel.Y);
        out.boosted = nibble_pack(GY, q, r, p);
        out.boost_used = true;
    } catch (const std::invalid_argument& ex) {
        out.boosted = out.baseline;
        out.note = std::string("boost unsupported, plain nibble used: ") + ex.what();
    }
    return out;
}

}  // namespace kqr
