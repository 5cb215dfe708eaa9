#include <catch2/catch_amalgamated.hpp>

#include "kqr/complex.hpp"
#include "kqr/hypergraph.hpp"
#include "kqr/params.hpp"
#include "kqr/rng.hpp"

using namespace kqr;

TEST_CASE("link of complete graphs") {
    auto K4 = RGraph::complete(4, 2);
    auto L = K4.link({0});
    REQUIRE(L.r() == 1);
    REQUIRE(L.edges() == std::vector<VertexSet>{{1}, {2}, {3}});

    RGraph H(3, 3, {{0, 1, 2}});
    REQUIRE(H.link({0, 1}).edges() == std::vector<VertexSet>{{2}});

    auto K5 = RGraph::complete(5, 3);
    auto L2 = K5.link({0, 1});
    REQUIRE(L2.size() == 3);
    REQUIRE(L2.edges() == std::vector<VertexSet>{{2}, {3}, {4}});
}

TEST_CASE("link rejects oversized S") {
    auto K4 = RGraph::complete(4, 2);
    REQUIRE_THROWS_AS(K4.link({0, 1, 2}), std::invalid_argument);
}

TEST_CASE("link composition: link(link(H,S1),S2) = link(H, S1 ∪ S2)") {
    Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        RGraph H(8, 3);
        for_each_subset_of_range(8, 3, [&](const VertexSet& e) {
            if (rng.below(2) == 0) H.add(e);
        });
        VertexSet S1{static_cast<int>(rng.below(4))};
        VertexSet S2{4 + static_cast<int>(rng.below(4))};
        auto lhs = H.link(S1).link(S2);
        auto rhs = H.link(set_union(S1, S2));
        REQUIRE(lhs.edges() == rhs.edges());
    }
}

TEST_CASE("degrees") {
    auto K9 = RGraph::complete(9, 2);
    auto [lo, hi] = K9.degrees(1);
    REQUIRE(lo == 8);
    REQUIRE(hi == 8);

    // delta_0 = Delta_0 = |H|
    auto [l0, h0] = K9.degrees(0);
    REQUIRE(l0 == K9.size());
    REQUIRE(h0 == K9.size());

    // path on {1,2,3} with an isolated vertex 0
    RGraph P(4, 2, {{1, 2}, {2, 3}});
    auto [pl, ph] = P.degrees(1);
    REQUIRE(pl == 0);  // the isolated vertex
    REQUIRE(ph == 2);
    RGraph P3(3, 2, {{0, 1}, {1, 2}});
    auto [ql, qh] = P3.degrees(1);
    REQUIRE(ql == 1);
    REQUIRE(qh == 2);

    REQUIRE_THROWS_AS(K9.degrees(2), std::invalid_argument);
}

TEST_CASE("induced and generated complexes") {
    auto K6r3 = RGraph::complete(6, 3);
    auto G = Complex::induced(K6r3, 4);
    // induced(K_n^(r)) is complete up to max_level
    for (int i = 0; i <= 4; ++i) REQUIRE(static_cast<std::int64_t>(G.level(i).size()) == binom(6, i));

    // induced(H)^(r) = H for any H
    Rng rng(3);
    RGraph H(7, 3);
    for_each_subset_of_range(7, 3, [&](const VertexSet& e) {
        if (rng.below(3) == 0) H.add(e);
    });
    auto GH = Complex::induced(H, 4);
    REQUIRE(GH.level_graph(3).minus(H).empty());
    REQUIRE(H.minus(GH.level_graph(3)).empty());

    // levels below r are complete
    REQUIRE(static_cast<std::int64_t>(GH.level(2).size()) == binom(7, 2));

    // generated({{1,2,3}})^(2) = {{1,2},{1,3},{2,3}}
    auto Ggen = Complex::generated({{1, 2, 3}}, 4, 3);
    REQUIRE(Ggen.level(2) == std::vector<VertexSet>{{1, 2}, {1, 3}, {2, 3}});
    REQUIRE(Ggen.level(1) == std::vector<VertexSet>{{1}, {2}, {3}});
}

TEST_CASE("every produced complex is downward closed") {
    Rng rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        RGraph H(8, 2);
        for_each_subset_of_range(8, 2, [&](const VertexSet& e) {
            if (rng.below(2) == 0) H.add(e);
        });
        auto G = Complex::induced(H, 4);
        REQUIRE(G.is_downward_closed());
        REQUIRE(G.link({0, 1}).is_downward_closed());
        REQUIRE(G.restrict_vertices({0, 1, 2, 3, 4}).is_downward_closed());
        REQUIRE(G.minus(RGraph(8, 2, {{0, 1}, {2, 3}})).is_downward_closed());
    }
}

TEST_CASE("restrict and minus") {
    auto G = Complex::complete(5, 3);
    // G[G^(q)] is the identity when all q-subsets are present
    auto GY = G.restrict_to(G.level_graph(3));
    REQUIRE(GY == G);

    // G(e) empty when e ∉ G
    auto Gm = G.minus(RGraph(5, 2, {{0, 1}}));
    REQUIRE(Gm.link({0, 1}).empty());
    REQUIRE_FALSE(Gm.contains({0, 1}));

    // K_5 complex, e = {0,1}: G(e)^(1) has 3 edges
    auto L = G.link({0, 1});
    REQUIRE(L.level(1).size() == 3);

    // (G−H1)−H2 = (G−H2)−H1
    RGraph H1(5, 2, {{0, 1}, {1, 2}});
    RGraph H2(5, 2, {{2, 3}});
    REQUIRE(G.minus(H1).minus(H2) == G.minus(H2).minus(H1));

    // (G[H1])[H2] = (G[H2])[H1] on random small inputs
    Rng rng(19);
    for (int trial = 0; trial < 10; ++trial) {
        RGraph A(5, 2), B(5, 3);
        for_each_subset_of_range(5, 2, [&](const VertexSet& e) {
            if (rng.below(4) != 0) A.add(e);
        });
        for_each_subset_of_range(5, 3, [&](const VertexSet& e) {
            if (rng.below(4) != 0) B.add(e);
        });
        REQUIRE(G.restrict_to(A).restrict_to(B) == G.restrict_to(B).restrict_to(A));
    }
}

TEST_CASE("intersect_links") {
    auto G = Complex::complete(6, 3);
    auto I = intersect_links(G, {{0}, {1}});
    // common link of two vertices in K_6: complete complex on the other 4
    REQUIRE(I.level(1).size() == 4);
    REQUIRE(I.level(2).size() == 6);
    REQUIRE_FALSE(I.empty());
}

TEST_CASE("matching decomposition") {
    auto K4 = RGraph::complete(4, 2);
    auto parts = K4.matching_decomposition();
    REQUIRE(static_cast<std::int64_t>(parts.size()) <= 2 * 4);  // r n^{r-1}
    REQUIRE(parts.size() == 3);                                 // greedy achieves 3 on K_4
    std::int64_t total = 0;
    for (const auto& M : parts) {
        total += M.size();
        REQUIRE((M.empty() || M.degrees(1).second == 1));  // each part is a matching
    }
    REQUIRE(total == K4.size());

    RGraph single(4, 2, {{0, 1}});
    REQUIRE(single.matching_decomposition().size() == 1);
    RGraph empty(4, 2);
    REQUIRE(empty.matching_decomposition().empty());
}

TEST_CASE("complete complex level sizes: |H^↔(i)| = C(n,i) for i < r") {
    RGraph H(7, 3, {{0, 1, 2}, {2, 3, 4}});
    auto G = Complex::induced(H, 3);
    REQUIRE(static_cast<std::int64_t>(G.level(0).size()) == 1);
    REQUIRE(static_cast<std::int64_t>(G.level(1).size()) == binom(7, 1));
    REQUIRE(static_cast<std::int64_t>(G.level(2).size()) == binom(7, 2));
}

TEST_CASE("parameter validation") {
    ParamSet p;
    p.validate();  // defaults are valid
    ParamSet bad = p;
    bad.r = bad.q;
    REQUIRE_THROWS_AS(bad.validate(), std::invalid_argument);
    ParamSet bad2 = p;
    bad2.lambda = 0;
    REQUIRE_THROWS_AS(bad2.validate(), std::invalid_argument);
    ParamSet bad3 = p;
    bad3.mu = Rational(3, 2);
    REQUIRE_THROWS_AS(bad3.validate(), std::invalid_argument);
}

TEST_CASE("multigraph basics") {
    MultiRGraph M(4, 2);
    M.add({0, 1}, 2);
    M.add({1, 2});
    REQUIRE(M.multiplicity({0, 1}) == 2);
    REQUIRE(M.total() == 3);
    REQUIRE(M.degree({1}) == 3);
    auto L = M.link({1});
    REQUIRE(L.multiplicity({0}) == 2);
    REQUIRE(L.multiplicity({2}) == 1);
    REQUIRE_THROWS_AS(M.remove({0, 1}, 3), std::invalid_argument);
}
