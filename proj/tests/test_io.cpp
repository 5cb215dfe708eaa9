#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "kqr/io.hpp"
#include "kqr/rng.hpp"

using namespace kqr;

TEST_CASE("hypergraph round trip") {
    Rng rng(41);
    for (int trial = 0; trial < 20; ++trial) {
        RGraph H(9, 3);
        for_each_subset_of_range(9, 3, [&](const VertexSet& e) {
            if (rng.below(3) == 0) H.add(e);
        });
        std::ostringstream os;
        write_hypergraph(os, H);
        std::istringstream is(os.str());
        auto back = read_hypergraph(is);
        REQUIRE_FALSE(back.is_multi);
        REQUIRE(back.graph == H);
    }
}

TEST_CASE("multigraph round trip") {
    MultiRGraph M(5, 2);
    M.add({0, 1}, 3);
    M.add({1, 2});
    M.add({2, 4}, 2);
    std::ostringstream os;
    write_hypergraph(os, M);
    std::istringstream is(os.str());
    auto back = read_hypergraph(is);
    REQUIRE(back.is_multi);
    REQUIRE(back.multigraph == M);
}

TEST_CASE("design round trip with canonical block order") {
    DesignFile d;
    d.n = 7;
    d.q = 3;
    d.r = 2;
    d.lambda = 1;
    d.blocks = {{2, 4, 6}, {0, 1, 3}, {1, 2, 4}};
    std::ostringstream os;
    write_design(os, d);
    // canonical: lexicographic block order
    REQUIRE(os.str().find("0 1 3") < os.str().find("1 2 4"));
    REQUIRE(os.str().find("1 2 4") < os.str().find("2 4 6"));
    std::istringstream is(os.str());
    auto back = read_design(is);
    REQUIRE(back.n == 7);
    REQUIRE(back.lambda == 1);
    auto sorted_blocks = d.blocks;
    std::sort(sorted_blocks.begin(), sorted_blocks.end());
    REQUIRE(back.blocks == sorted_blocks);
}

TEST_CASE("comments and blank lines are skipped") {
    std::istringstream is(
        "# a Steiner host\n"
        "\n"
        "hypergraph n=4 r=2   # header comment\n"
        "0 1\n"
        "  2 3  # an edge\n");
    auto host = read_hypergraph(is);
    REQUIRE(host.graph.size() == 2);
    REQUIRE(host.graph.contains({2, 3}));
}

TEST_CASE("parse errors carry line and column") {
    std::istringstream bad_header("hypegraph n=4 r=2\n");
    REQUIRE_THROWS_AS(read_hypergraph(bad_header), ParseError);

    std::istringstream bad_vertex("hypergraph n=4 r=2\n0 9\n");
    try {
        read_hypergraph(bad_vertex);
        FAIL("expected ParseError");
    } catch (const ParseError& ex) {
        REQUIRE(ex.line == 2);
        REQUIRE(std::string(ex.what()).find("line 2") != std::string::npos);
    }

    std::istringstream unsorted("hypergraph n=4 r=2\n1 0\n");
    REQUIRE_THROWS_AS(read_hypergraph(unsorted), ParseError);

    std::istringstream wrong_arity("design n=7 q=3 r=2 lambda=1\n0 1\n");
    REQUIRE_THROWS_AS(read_design(wrong_arity), ParseError);
}

TEST_CASE("property reports serialize to schema-conformant JSON") {
    PropertyReport rep;
    rep.property = "regularity";
    rep.pass = true;
    rep.measured["d"] = Rational(4, 5);
    rep.measured["eps"] = Rational(0);
    rep.witnesses["min_edge"] = {0, 1};
    rep.notes.push_back("note");
    json j = property_report_json(rep);

    // schema: property/vacuous/pass flags, measured {exact, approx,
    // is_exact} triples, witnesses as arrays, notes as strings
    REQUIRE(j.at("property").is_string());
    REQUIRE(j.at("vacuous").is_boolean());
    REQUIRE(j.at("pass").is_boolean());
    for (const auto& [key, val] : j.at("measured").items()) {
        REQUIRE(val.at("is_exact").is_boolean());
        REQUIRE((val.at("exact").is_string() || val.at("exact").is_null()));
        REQUIRE(val.at("approx").is_number());
    }
    for (const auto& [key, val] : j.at("witnesses").items()) REQUIRE(val.is_array());
    REQUIRE(j.at("notes").is_array());
    REQUIRE(j.at("measured").at("d").at("exact") == "4/5");
}

TEST_CASE("rational json flags exactness") {
    auto exact = rational_json(Rational(5, 12));
    REQUIRE(exact.at("is_exact") == true);
    REQUIRE(exact.at("exact") == "5/12");
    auto approx = approx_json(0.41);
    REQUIRE(approx.at("is_exact") == false);
    REQUIRE(approx.at("exact").is_null());
}
