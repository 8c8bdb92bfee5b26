#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "ssred/ssred.hpp"

using namespace ssred;
using namespace ssred::testing;

TEST_CASE("validate_graph accepts a smooth irreducible fiber") {
    DualGraph g;
    g.add_vertex(V(1), 2);
    CHECK(validate_graph(g).ok());
    CHECK(validate_graph(g).empty());
}

TEST_CASE("validate_graph flags non-positive thickness") {
    DualGraph g;
    g.add_vertex(V(1), 0);
    g.add_vertex(V(2), 0);
    g.add_edge(E(1), V(1), V(2), 0);
    Diagnostics d = validate_graph(g);
    CHECK_FALSE(d.ok());
    CHECK(d.has_rule("thickness-positive"));
}

TEST_CASE("validate_graph flags a marking outside the open interval") {
    DualGraph g = chain({0, 0}, {2});
    g.add_marking(M(1), E(1), V(1), Rational(5, 2));
    Diagnostics d = validate_graph(g);
    CHECK_FALSE(d.ok());
    CHECK(d.has_rule("marking-in-interior"));
}

TEST_CASE("validate_graph flags two markings at one metric point") {
    DualGraph g = chain({0, 0}, {2});
    // 1/2 from vertex 1 equals 3/2 from vertex 2.
    g.add_marking(M(1), E(1), V(1), Rational(1, 2));
    g.add_marking(M(2), E(1), V(2), Rational(3, 2));
    Diagnostics d = validate_graph(g);
    CHECK(d.has_rule("marking-collision"));
}

TEST_CASE("omega degree of a (-2)-configuration vanishes") {
    DualGraph g = chain({0, 0, 0}, {1, 1});
    CHECK(omega_degree(g, V(2)) == 0);
}

TEST_CASE("omega degree of an isolated genus-2 vertex") {
    DualGraph g;
    g.add_vertex(V(1), 2);
    CHECK(omega_degree(g, V(1)) == 2);
}

TEST_CASE("a loop counts two half-edges") {
    DualGraph g;
    g.add_vertex(V(1), 0);
    g.add_loop(E(1), V(1), 1);
    CHECK(omega_degree(g, V(1)) == 0);
}

TEST_CASE("marked omega degree counts legs") {
    DualGraph g = chain({0, 1}, {1});
    g.add_leg(L(1), V(1));
    g.add_leg(L(2), V(1));
    CHECK(omega_degree(g, V(1), true) == 1); // 2*0 - 2 + 1 + 2
}

TEST_CASE("marked omega degree rejects unresolved edge markings") {
    DualGraph g = chain({0, 0}, {2});
    g.add_marking(M(1), E(1), V(1), Rational(1));
    CHECK_THROWS_AS(omega_degree(g, V(1), true), PreconditionError);
}

TEST_CASE("omega degree of an unknown vertex fails") {
    DualGraph g = chain({0}, {});
    CHECK_THROWS_AS(omega_degree(g, V(9)), PreconditionError);
}

TEST_CASE("arithmetic genus of a 3-cycle is 1") {
    CHECK(arithmetic_genus(cycle({1, 1, 1})) == 1);
}

TEST_CASE("arithmetic genus of a single genus-3 vertex") {
    DualGraph g;
    g.add_vertex(V(1), 3);
    CHECK(arithmetic_genus(g) == 3);
}

TEST_CASE("two genus-1 vertices with two parallel edges have genus 3") {
    DualGraph g;
    g.add_vertex(V(1), 1);
    g.add_vertex(V(2), 1);
    g.add_edge(E(1), V(1), V(2), 1);
    g.add_edge(E(2), V(1), V(2), 1);
    CHECK(arithmetic_genus(g) == 3);
    // Independent route: the omega-degree sum must equal 2g - 2.
    CHECK(omega_degree(g, V(1)) + omega_degree(g, V(2)) == 2 * 3 - 2);
}

TEST_CASE("arithmetic genus rejects disconnected graphs") {
    DualGraph g;
    g.add_vertex(V(1), 0);
    g.add_vertex(V(2), 0);
    CHECK_THROWS_AS(arithmetic_genus(g), PreconditionError);
}

TEST_CASE("desingularize subdivides a thick edge into a unit chain") {
    DualGraph g = chain({2, 1}, {3});
    DesingularizeResult r = desingularize(g);
    CHECK(r.graph.vertices().size() == 4);
    CHECK(r.graph.edges().size() == 3);
    CHECK(r.exceptional.size() == 2);
    for (const auto& [e, data] : r.graph.edges()) CHECK(data.thickness == 1);
    // Round trip: contracting the inserted vertices restores the input.
    ContractResult back = contract(r.graph, r.exceptional);
    CHECK(canonicalize(back.graph) == canonicalize(g));
    // Trace invariants: the witness sums to the coarse thickness.
    const auto& wit = r.trace.merged_thickness_witness.at(E(1));
    CHECK(std::accumulate(wit.begin(), wit.end(), std::int64_t{0}) == 3);
}

TEST_CASE("desingularize is the identity on regular graphs") {
    DualGraph g = cycle({1, 1, 1});
    DesingularizeResult r = desingularize(g);
    CHECK(r.exceptional.empty());
    CHECK(r.graph == g);
}

TEST_CASE("desingularize splits a loop of thickness 2") {
    DualGraph g;
    g.add_vertex(V(1), 0);
    g.add_vertex(V(2), 1); // anchor so the loop is not a whole component later
    g.add_edge(E(1), V(1), V(2), 1);
    g.add_loop(E(2), V(1), 2);
    DesingularizeResult r = desingularize(g);
    CHECK(r.exceptional.size() == 1);
    VertexId inserted = *r.exceptional.begin();
    CHECK(r.graph.valence(inserted) == 2);
    CHECK(r.graph.edges().size() == 3);
    ContractResult back = contract(r.graph, r.exceptional);
    CHECK(canonicalize(back.graph) == canonicalize(g));
}

TEST_CASE("desingularize turns integral markings into legs") {
    DualGraph g = chain({1, 1}, {3});
    g.add_marking(M(7), E(1), V(2), Rational(1)); // position 1 from vertex 2 = 2 from vertex 1
    DesingularizeResult r = desingularize(g);
    CHECK(r.graph.markings().empty());
    CHECK(r.graph.legs().size() == 1);
    VertexId carrier = r.graph.legs().at(L(7));
    CHECK(r.exceptional.count(carrier) == 1);
    // The carrier sits at distance 2 from vertex 1: its chain neighbours are
    // the other inserted vertex and vertex 2.
    CHECK(r.graph.valence(carrier) == 2);
}

TEST_CASE("desingularize rejects non-integral markings with the splitting index") {
    DualGraph g = chain({1, 1}, {2});
    g.add_marking(M(1), E(1), V(1), Rational(1, 2));
    try {
        desingularize(g);
        FAIL("expected a precondition error");
    } catch (const PreconditionError& e) {
        CHECK(e.rule() == "non-integral-marking");
        REQUIRE(e.payload().has_value());
        CHECK(*e.payload() == 2);
    }
}

TEST_CASE("contract merges a chain and adds thicknesses") {
    DualGraph g = chain({1, 0, 0, 1}, {2, 1, 3});
    ContractResult r = contract(g, {V(2), V(3)});
    CHECK(r.graph.vertices().size() == 2);
    REQUIRE(r.graph.edges().size() == 1);
    CHECK(r.graph.edges().begin()->second.thickness == 6);
    // Desingularize round trip: the merged edge resolves into a 6-chain.
    DualGraph plain = chain({1, 1}, {6});
    CHECK(canonicalize(desingularize(r.graph).graph) == canonicalize(desingularize(plain).graph));
    const auto& wit = r.trace.merged_thickness_witness.begin()->second;
    CHECK(std::accumulate(wit.begin(), wit.end(), std::int64_t{0}) == 6);
}

TEST_CASE("contract blows down a genus-0 leaf") {
    DualGraph g = chain({2, 0}, {1});
    ContractResult r = contract(g, {V(2)});
    CHECK(r.graph.vertices().size() == 1);
    CHECK(r.graph.edges().empty());
    CHECK(std::get<VertexId>(r.trace.vertex_image.at(V(2))) == V(1));
}

TEST_CASE("contract cascades through hanging chains") {
    // v1(g2) - a - b with b a leaf; contracting {a, b} deletes the tree.
    DualGraph g = chain({2, 0, 0}, {1, 1});
    ContractResult r = contract(g, {V(2), V(3)});
    CHECK(r.graph.vertices().size() == 1);
    CHECK(r.graph.edges().empty());
    CHECK(arithmetic_genus(r.graph) == 2);
}

TEST_CASE("contract collapses a cycle onto a loop") {
    DualGraph g = cycle({1, 2, 3}, {1, 0, 0});
    ContractResult r = contract(g, {V(2), V(3)});
    CHECK(r.graph.vertices().size() == 1);
    REQUIRE(r.graph.edges().size() == 1);
    CHECK(r.graph.edges().begin()->second.is_loop());
    CHECK(r.graph.edges().begin()->second.thickness == 6);
    CHECK(arithmetic_genus(r.graph) == arithmetic_genus(g));
}

TEST_CASE("contract rejects positive omega-degree victims") {
    DualGraph g = chain({1, 2}, {1}); // vertex 1: genus 1, valence 1, omega 1
    try {
        contract(g, {V(1)});
        FAIL("expected omega-positive");
    } catch (const PreconditionError& e) {
        CHECK(e.rule() == "omega-positive");
    }
}

TEST_CASE("contract rejects a full component") {
    DualGraph g = cycle({1, 1, 1});
    try {
        contract(g, {V(1), V(2), V(3)});
        FAIL("expected full-component");
    } catch (const PreconditionError& e) {
        CHECK(e.rule() == "full-component");
    }
}

TEST_CASE("contract rejects marked victims and marked edges") {
    DualGraph g = chain({1, 0, 1}, {1, 1});
    g.add_leg(L(1), V(2));
    CHECK_THROWS_AS(contract(g, {V(2)}), PreconditionError);

    DualGraph h = chain({1, 0, 1}, {2, 2});
    h.add_marking(M(1), E(1), V(1), Rational(1, 2));
    CHECK_THROWS_AS(contract(h, {V(2)}), PreconditionError);
}

TEST_CASE("base change scales thicknesses and positions") {
    DualGraph g = chain({0, 0}, {2});
    g.add_marking(M(1), E(1), V(1), Rational(1, 2));
    DualGraph scaled = base_change(g, 6);
    CHECK(scaled.edges().at(E(1)).thickness == 12);
    CHECK(scaled.markings().at(M(1)).position == Rational(3));
    CHECK(base_change(g, 1) == g);
    CHECK_THROWS_AS(base_change(g, 0), PreconditionError);
}

TEST_CASE("base change preserves the arithmetic genus") {
    DualGraph g = cycle({1, 2, 3});
    CHECK(arithmetic_genus(base_change(g, 2)) == 1);
    for (const auto& [v, data] : g.vertices()) {
        CHECK(omega_degree(base_change(g, 2), v) == omega_degree(g, v));
    }
}

TEST_CASE("splitting index is the lcm of the position denominators") {
    DualGraph g = chain({0, 0, 0}, {1, 1});
    CHECK(splitting_index(g) == 1);

    DualGraph h = chain({0, 0, 0}, {2, 2});
    h.add_marking(M(1), E(1), V(1), Rational(1, 2));
    h.add_marking(M(2), E(2), V(2), Rational(1, 3));
    CHECK(splitting_index(h) == 6);
    // After the base change the markings are integral and resolve.
    CHECK_NOTHROW(desingularize(base_change(h, 6)));

    DualGraph k = chain({0, 0}, {1});
    k.add_marking(M(1), E(1), V(1), Rational(3, 4));
    CHECK(splitting_index(k) == 4);
}

TEST_CASE("canonicalize is invariant under relabeling") {
    DualGraph g = cycle({1, 1, 2}, {0, 1, 0});
    g.add_leg(L(1), V(2));
    CHECK(canonicalize(g) == canonicalize(relabel(g, 100)));
}

TEST_CASE("canonicalize identifies rotated genus labellings") {
    DualGraph a = cycle({1, 1, 1}, {0, 0, 1});
    DualGraph b = cycle({1, 1, 1}, {0, 1, 0});
    CHECK(canonicalize(a) == canonicalize(b));
}

TEST_CASE("canonicalize separates different thickness multisets") {
    DualGraph a = cycle({1, 1, 2});
    DualGraph b = cycle({1, 2, 2});
    CHECK(canonicalize(a) != canonicalize(b));
    CHECK_FALSE(brute_force_isomorphic(a, b));
}

TEST_CASE("canonicalize agrees with the brute-force isomorphism oracle") {
    std::mt19937_64 rng(default_seed());
    RandomGraphParams p;
    p.max_vertices = 4;
    p.max_genus = 1;
    p.max_thickness = 2;
    p.max_legs = 1;
    for (int i = 0; i < 60; ++i) {
        DualGraph a = random_connected_graph(rng, p);
        DualGraph b = random_connected_graph(rng, p);
        CHECK((canonicalize(a) == canonicalize(b)) == brute_force_isomorphic(a, b));
        CHECK(canonicalize(a) == canonicalize(relabel(a, 50)));
    }
}

TEST_CASE("omega-degree sum equals 2g - 2 on random graphs") {
    std::mt19937_64 rng(default_seed() + 1);
    for (int i = 0; i < 200; ++i) {
        DualGraph g = random_connected_graph(rng);
        std::int64_t sum = 0;
        for (const auto& [v, data] : g.vertices()) sum += omega_degree(g, v);
        CHECK(sum == 2 * arithmetic_genus(g) - 2);
    }
}

TEST_CASE("genus is invariant under the elementary moves on random graphs") {
    std::mt19937_64 rng(default_seed() + 2);
    for (int i = 0; i < 100; ++i) {
        DualGraph g = random_connected_graph(rng);
        std::int64_t genus = arithmetic_genus(g);
        DesingularizeResult r = desingularize(g);
        CHECK(arithmetic_genus(r.graph) == genus);
        ContractResult back = contract(r.graph, r.exceptional);
        CHECK(arithmetic_genus(back.graph) == genus);
        CHECK(canonicalize(back.graph) == canonicalize(g));
        CHECK(arithmetic_genus(base_change(g, 3)) == genus);
    }
}

TEST_CASE("base change composes multiplicatively") {
    std::mt19937_64 rng(default_seed() + 3);
    RandomGraphParams p;
    p.with_markings = true;
    for (int i = 0; i < 50; ++i) {
        DualGraph g = random_connected_graph(rng, p);
        CHECK(base_change(base_change(g, 2), 3) == base_change(g, 6));
    }
}

TEST_CASE("contract preserves the leg multiset") {
    DualGraph g = chain({1, 0, 0, 1}, {1, 1, 1});
    g.add_leg(L(1), V(1));
    g.add_leg(L(2), V(4));
    ContractResult r = contract(g, {V(2), V(3)});
    CHECK(r.graph.legs().size() == 2);
    CHECK(r.graph.legs().at(L(1)) == V(1));
    CHECK(r.graph.legs().at(L(2)) == V(4));
}
