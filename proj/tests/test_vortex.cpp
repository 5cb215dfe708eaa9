#include <catch2/catch_amalgamated.hpp>

#include "kqr/vortex.hpp"

using namespace kqr;

TEST_CASE("vortex sizes follow the floor recursion") {
    ParamSet p;
    Complex G(range_set(200), 0);
    auto v = build_vortex(G, Rational(3, 10), 20, p);
    REQUIRE(v.levels.size() == 3);
    REQUIRE(v.levels[0].size() == 200);
    REQUIRE(v.levels[1].size() == 60);
    REQUIRE(v.levels[2].size() == 18);
    REQUIRE(v.m == 18);

    // trivial vortex when n <= m'
    Complex S(range_set(10), 0);
    auto tv = build_vortex(S, Rational(1, 2), 12, p);
    REQUIRE(tv.depth() == 0);
    REQUIRE(tv.m == 10);
}

TEST_CASE("vortex size invariants over random parameters") {
    Rng rng(8);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 10 + static_cast<int>(rng.below(400));
        const Rational mu(1 + static_cast<std::int64_t>(rng.below(5)), 10);  // 1/10 .. 5/10
        const int m_prime = 5 + static_cast<int>(rng.below(20));
        ParamSet p;
        p.seed = rng.next();
        Complex G(range_set(n), 0);
        auto v = build_vortex(G, mu, m_prime, p);
        // replay the formula
        REQUIRE(v.levels[0].size() == static_cast<std::size_t>(n));
        for (std::size_t i = 1; i < v.levels.size(); ++i) {
            const auto prev = static_cast<std::int64_t>(v.levels[i - 1].size());
            const Rational target = mu * Rational(prev);
            REQUIRE(static_cast<std::int64_t>(v.levels[i].size()) == target.num() / target.den());
            REQUIRE(is_subset(v.levels[i], v.levels[i - 1]));
            REQUIRE(prev >= m_prime);  // only levels >= m' get shrunk
        }
        REQUIRE(static_cast<std::int64_t>(v.levels.back().size()) < m_prime);
        // (V3): floor(mu m') <= m <= m' unless the vortex is trivial
        if (v.depth() > 0) {
            const Rational lo = mu * Rational(m_prime);
            REQUIRE(Rational(v.m) >= Rational(lo.num() / lo.den()));
            REQUIRE(v.m <= m_prime);
        }
    }
}

TEST_CASE("vortex randomness reports are measured") {
    ParamSet p;
    p.mu = Rational(1, 2);
    p.eps = Rational(1);
    p.xi = Rational(0);
    auto G = Complex::complete(14, 5);
    auto v = build_vortex(G, Rational(1, 2), 6, p);
    REQUIRE(v.depth() >= 1);
    auto rep = measure_vortex_randomness(G, v, p);
    REQUIRE(rep.inner.size() == static_cast<std::size_t>(v.depth()));
    REQUIRE(rep.inner[0].measured.count("R2_eps") == 1);
}

TEST_CASE("pipeline end to end on complete hosts") {
    for (int n : {7, 9, 13}) {
        for (std::uint64_t seed : {0ULL, 1ULL}) {
            ParamSet p;
            p.seed = seed;
            auto G = Complex::complete(n, 5);
            auto out = iterate_pipeline(G, 3, 2, p);
            REQUIRE(out.ok);
            REQUIRE(verify_design(RGraph::complete(n, 2), out.blocks, 1).ok);
            REQUIRE(out.blocks.size() == static_cast<std::size_t>(n * (n - 1) / 6));
        }
    }
}

TEST_CASE("pipeline on a non-complete divisible host") {
    // K_13 minus one block of an STS(13) stays divisible and decomposable
    ParamSet p0;
    auto sts = exact_decompose(Complex::complete(13, 3), 3, 2, 1, p0);
    REQUIRE(sts.status == SolveStatus::Solved);
    RGraph host = RGraph::complete(13, 2);
    for_each_subset(sts.blocks[0], 2, [&](const VertexSet& e) { host.remove(e); });
    REQUIRE(check_design_divisible(host, 3, 2, 1).ok);
    auto G = Complex::induced(host, 5);
    for (std::uint64_t seed : {0ULL, 3ULL}) {
        ParamSet p;
        p.seed = seed;
        auto out = iterate_pipeline(G, 3, 2, p);
        REQUIRE(out.ok);
        REQUIRE(verify_design(host, out.blocks, 1).ok);
    }
}

TEST_CASE("pipeline rejects non-divisible input before any work") {
    ParamSet p;
    auto out = iterate_pipeline(Complex::complete(8, 5), 3, 2, p);
    REQUIRE_FALSE(out.ok);
    REQUIRE_FALSE(out.divisible_input);
    REQUIRE(out.attempts == 0);
}

TEST_CASE("pipeline blocks always lie in G^(q)") {
    ParamSet p;
    auto G = Complex::complete(13, 5);
    auto out = iterate_pipeline(G, 3, 2, p);
    REQUIRE(out.ok);
    for (const auto& B : out.blocks) REQUIRE(G.contains(B));
}

TEST_CASE("pipeline is deterministic in the seed") {
    ParamSet p;
    p.seed = 2024;
    auto G = Complex::complete(13, 5);
    auto a = iterate_pipeline(G, 3, 2, p);
    auto b = iterate_pipeline(G, 3, 2, p);
    REQUIRE(a.ok);
    REQUIRE(a.blocks == b.blocks);
    ParamSet p4 = p;
    p4.threads = 4;
    auto c = iterate_pipeline(G, 3, 2, p4);
    REQUIRE(a.blocks == c.blocks);
}

TEST_CASE("pipeline emits per-level stats") {
    ParamSet p;
    auto G = Complex::complete(13, 5);
    auto out = iterate_pipeline(G, 3, 2, p);
    REQUIRE(out.ok);
    REQUIRE(out.vortex.depth() == 1);
    REQUIRE(out.level_stats.size() == 1);
    REQUIRE(out.level_stats[0].level_size == 13);
    REQUIRE(out.level_stats[0].coverdown_blocks_by_type.size() == 2);
}
