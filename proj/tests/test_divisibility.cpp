#include <catch2/catch_amalgamated.hpp>

#include "kqr/coverdown.hpp"
#include "kqr/divisibility.hpp"
#include "kqr/packing.hpp"
#include "kqr/rng.hpp"

using namespace kqr;

TEST_CASE("design divisibility on complete hosts") {
    REQUIRE(check_design_divisible(RGraph::complete(7, 2), 3, 2, 1).ok);

    auto rep = check_design_divisible(RGraph::complete(6, 2), 3, 2, 1);
    REQUIRE_FALSE(rep.ok);
    // violation at a singleton: degree 5, divisor 2
    bool singleton_violation = false;
    for (const auto& v : rep.violations)
        if (v.subset.size() == 1 && v.degree == 5 && v.divisor == 2) singleton_violation = true;
    REQUIRE(singleton_violation);

    REQUIRE(check_design_divisible(RGraph(9, 2), 3, 2, 1).ok);  // empty host
}

TEST_CASE("admissible parameters") {
    auto a = admissible_params(7, 3, 2, 1);
    REQUIRE(a.ok);
    REQUIRE(a.block_count == 7);

    REQUIRE_FALSE(admissible_params(6, 3, 2, 1).ok);

    auto c = admissible_params(13, 3, 2, 1);
    REQUIRE(c.ok);
    REQUIRE(c.block_count == 26);
}

TEST_CASE("cross-oracle: complete-host checker agrees with admissible_params") {
    for (const auto& qr : std::vector<std::pair<int, int>>{{3, 2}, {4, 2}, {4, 3}}) {
        const int q = qr.first, r = qr.second;
        for (int n = q; n <= 60; ++n) {
            // degree counts of K_n are binomials, so the two must agree;
            // full enumeration up to n=24 keeps the runtime sane
            if (n <= 24) {
                REQUIRE(check_design_divisible(RGraph::complete(n, r), q, r, 1).ok ==
                        admissible_params(n, q, r, 1).ok);
            } else {
                REQUIRE(admissible_params(n, q, r, 1).ok ==
                        ([&] {
                            for (int i = 0; i < r; ++i)
                                if (binom(n - i, r - i) % binom(q - i, r - i) != 0) return false;
                            return true;
                        }()));
            }
        }
    }
}

TEST_CASE("Steiner triple systems exist iff n ≡ 1, 3 (mod 6)") {
    for (int n = 3; n <= 100; ++n) {
        bool expected = (n % 6 == 1) || (n % 6 == 3);
        REQUIRE(admissible_params(n, 3, 2, 1).ok == expected);
    }
}

TEST_CASE("multigraph divisibility") {
    auto M = MultiRGraph::complete(3, 2, 2);
    REQUIRE(check_multi_divisible(M, 3));  // degrees 4, total 6

    MultiRGraph single(4, 2);
    single.add({0, 1});
    REQUIRE_FALSE(check_multi_divisible(single, 3));  // C(2,1)=2 does not divide 1

    REQUIRE(check_multi_divisible(MultiRGraph(4, 2), 3));  // empty
}

TEST_CASE("focus-respecting divisibility") {
    // empty H is divisible w.r.t. any system
    ISystem sys;
    sys.i = 1;
    sys.sets = {{0}};
    Focus foc;
    foc.U = {{1, 2, 3}};
    REQUIRE(divisible_wrt_focus(RGraph(6, 2), sys, foc, 3, 2));

    // i-system {∅}, focus {U}: the condition quantifies over f with
    // |f| <= r-1 and f ⊄ U, i.e. ordinary divisibility at sets meeting V∖U
    ISystem empty_sys;
    empty_sys.i = 0;
    empty_sys.sets = {{}};
    Focus whole;
    whole.U = {{0, 1, 2, 3, 4, 5, 6}};
    auto K7 = RGraph::complete(7, 2);
    REQUIRE(divisible_wrt_focus(K7, empty_sys, whole, 3, 2));  // no f with |f ∖ U| >= 1 at all

    Focus partial;
    partial.U = {{0, 1, 2, 3, 4, 5}};  // vertex 6 outside
    // f = {6}: need C(2,1) | deg(6) = 6: ok for K_7
    REQUIRE(divisible_wrt_focus(K7, empty_sys, partial, 3, 2));
    auto K6 = RGraph::complete(6, 2);
    Focus partial6;
    partial6.U = {{0, 1, 2, 3, 4}};
    // f = {5}: deg 5 is odd
    REQUIRE_FALSE(divisible_wrt_focus(K6, empty_sys, partial6, 3, 2));
}

TEST_CASE("focus divisibility agrees with direct enumeration on random instances") {
    // for i = 0 and (q,r) = (3,2) the condition bites at |f| = 1, f ⊄ U
    Rng rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        RGraph H(8, 2);
        for_each_subset_of_range(8, 2, [&](const VertexSet& e) {
            if (rng.below(2) == 0) H.add(e);
        });
        ISystem sys;
        sys.i = 0;
        sys.sets = {{}};
        Focus foc;
        foc.U = {{0, 1, 2, static_cast<int>(3 + rng.below(3))}};

        bool expected = true;
        for (int fsize = 0; fsize <= 2 - 0 - 1; ++fsize) {
            for_each_subset_of_range(8, fsize, [&](const VertexSet& f) {
                if (set_minus(f, foc.U[0]).empty()) return;  // need |f ∖ U| >= 1
                if (H.degree(f) % binom(3 - fsize, 2 - fsize) != 0) expected = false;
            });
        }
        REQUIRE(divisible_wrt_focus(H, sys, foc, 3, 2) == expected);

        // for i = 1, r = 2 the quantifier range is empty: always true
        ISystem sys1;
        sys1.i = 1;
        sys1.sets = {{0}, {1}};
        Focus foc1;
        foc1.U = {{2, 3, 4}, {5, 6, 7}};
        REQUIRE(divisible_wrt_focus(H, sys1, foc1, 3, 2));
    }
}

TEST_CASE("make_divisible") {
    ParamSet p;

    // already divisible, no forbidden edges: L = ∅
    auto G7 = Complex::complete(7, 3);
    auto out = make_divisible(G7, RGraph(7, 2), p);
    REQUIRE(out.ok);
    REQUIRE(out.leftover.empty());

    // K_6: a leftover with Δ(L) <= 2 exists (perfect matching works)
    auto G6 = Complex::complete(6, 3);
    auto out6 = make_divisible(G6, RGraph(6, 2), p);
    REQUIRE(out6.ok);
    REQUIRE(out6.max_degree <= 2);
    auto host = G6.level_graph(2);
    REQUIRE(check_design_divisible(host.minus(out6.leftover), 3, 2, 1).ok);

    // forbidden = all edges of a non-divisible host: no L can exist
    ParamSet tight = p;
    tight.budget.retries = 4;
    auto bad = make_divisible(G6, RGraph::complete(6, 2), tight);
    REQUIRE_FALSE(bad.ok);
    REQUIRE(bad.failure == "budget exhausted");
}

TEST_CASE("packing removal preserves divisibility residues setwise") {
    // if K is a packing, removing K^(r) shifts every residue by the
    // packing's own (divisible) contribution
    ParamSet p;
    auto G = Complex::complete(7, 3);
    auto dec = exact_decompose(G, 3, 2, 1, p);
    REQUIRE(dec.status == SolveStatus::Solved);
    Packing K{3, 2, {dec.blocks[0], dec.blocks[1]}};
    REQUIRE(verify_packing(G, K));
    auto covered = K.covered_edges(7);
    auto host = G.level_graph(2);
    for_each_subset_of_range(7, 1, [&](const VertexSet& S) {
        REQUIRE(host.minus(covered).degree(S) == host.degree(S) - covered.degree(S));
    });
}
