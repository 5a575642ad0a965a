#include <catch_amalgamated.hpp>

#include "kgfpq/editor.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace kgfpq;

TEST_CASE("candidates on the toy KG match the worked examples") {
    KnowledgeGraph g = fixtures::toy_graph();
    const Triplet t = fixtures::lennon_death();

    CHECK(candidates(g, t, EditMethod::NSC).count("liverpool") == 1);
    CHECK(candidates(g, t, EditMethod::NNDC).count("monalisa") == 1);
    CHECK(candidates(g, t, EditMethod::NDC) == std::set<EntityId>{"paul"});
    CHECK(candidates(g, t, EditMethod::NNSC) == std::set<EntityId>{"paris", "ulm"});
    CHECK(candidates(g, t, EditMethod::NNSR) == std::set<EntityId>{"paris"});
    CHECK(candidates(g, t, EditMethod::NNDR) ==
          std::set<EntityId>{"einstein", "monalisa", "ulm"});
}

TEST_CASE("candidates rejects a triplet not in the graph") {
    KnowledgeGraph g = fixtures::toy_graph();
    CHECK_THROWS_AS(candidates(g, {"lennon", "place of death", "liverpool"}, EditMethod::NSC),
                    std::runtime_error);
}

TEST_CASE("candidates equal brute-force predicate enumeration") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        KnowledgeGraph g = fixtures::random_graph(seed);
        for (const Triplet& t : g.triplets())
            for (EditMethod m : kAllEditMethods)
                CHECK(candidates(g, t, m) == oracles::brute_force_candidates(g, t, m));
    }
}

TEST_CASE("axis partition of candidate sets") {
    for (std::uint64_t seed = 50; seed < 70; ++seed) {
        KnowledgeGraph g = fixtures::random_graph(seed);
        for (const Triplet& t : g.triplets()) {
            auto nsc = candidates(g, t, EditMethod::NSC);
            auto ndc = candidates(g, t, EditMethod::NDC);
            auto nnsc = candidates(g, t, EditMethod::NNSC);
            auto nndc = candidates(g, t, EditMethod::NNDC);
            auto nnsr = candidates(g, t, EditMethod::NNSR);
            auto nndr = candidates(g, t, EditMethod::NNDR);

            auto disjoint = [](const std::set<EntityId>& a, const std::set<EntityId>& b) {
                for (const auto& x : a)
                    if (b.count(x)) return false;
                return true;
            };
            CHECK(disjoint(nsc, ndc));
            CHECK(disjoint(nnsc, nndc));
            CHECK(disjoint(nnsr, nndr));

            // same-axis unions cover the whole valid set on each side
            std::set<EntityId> neighbors = nsc;
            neighbors.insert(ndc.begin(), ndc.end());
            std::set<EntityId> non_neighbors_rel = nnsr;
            non_neighbors_rel.insert(nndr.begin(), nndr.end());
            std::set<EntityId> non_neighbors_con = nnsc;
            non_neighbors_con.insert(nndc.begin(), nndc.end());
            CHECK(non_neighbors_rel == non_neighbors_con);
            for (const auto& x : neighbors) CHECK(non_neighbors_rel.count(x) == 0);
        }
    }
}

TEST_CASE("edit sampling") {
    KnowledgeGraph g = fixtures::toy_graph();
    const Triplet t = fixtures::lennon_death();

    SECTION("singleton candidate set forces the choice") {
        for (std::uint64_t seed : {0ULL, 7ULL, 999ULL}) {
            FalseTriplet ft = edit(g, t, EditMethod::NDC, seed);
            CHECK(ft.edited_object == "paul");
            REQUIRE(ft.hop.has_value());
            CHECK(*ft.hop == 1);
        }
    }

    SECTION("empty candidate set raises EmptyCandidateSet") {
        // whole concept class within 5 hops -> NNSC infeasible
        KnowledgeGraph small = KnowledgeGraph::from_parts(
            {{"a", "A", "c1"}, {"b", "B", "c1"}, {"c", "C", "c1"}},
            {{"a", "r", "b"}, {"b", "r", "c"}});
        CHECK_THROWS_AS(edit(small, {"a", "r", "b"}, EditMethod::NNSC, 1), EmptyCandidateSet);
    }

    SECTION("fixed seed is deterministic and always verifies") {
        for (std::uint64_t seed = 0; seed < 30; ++seed)
            for (EditMethod m : kAllEditMethods) {
                if (candidates(g, t, m).empty()) continue;
                FalseTriplet a = edit(g, t, m, seed);
                FalseTriplet b = edit(g, t, m, seed);
                CHECK(a.edited_object == b.edited_object);
                CHECK(verify_method(g, a));
                CHECK(oracles::brute_force_candidates(g, t, m).count(a.edited_object) == 1);
            }
    }
}

TEST_CASE("edit_all covers all six methods between edits and skips") {
    KnowledgeGraph g = fixtures::toy_graph();
    EditBundle b = edit_all(g, fixtures::lennon_death(), 42);
    CHECK(b.edits.size() + b.skipped.size() == 6);
    CHECK(b.edits.size() == 6);  // all feasible on the toy KG

    SECTION("degenerate graph lands infeasible methods in skipped") {
        KnowledgeGraph small = KnowledgeGraph::from_parts(
            {{"a", "A", "c1"}, {"b", "B", "c1"}, {"c", "C", "c2"}},
            {{"a", "r", "b"}, {"b", "r", "c"}});
        EditBundle sb = edit_all(small, {"a", "r", "b"}, 42);
        CHECK(sb.edits.size() + sb.skipped.size() == 6);
        CHECK(sb.skipped.count(EditMethod::NNSC) == 1);
    }

    SECTION("bundle contents reproduce the per-method seed schedule") {
        EditBundle again = edit_all(g, fixtures::lennon_death(), 42);
        REQUIRE(again.edits.size() == b.edits.size());
        for (const auto& [m, ft] : b.edits) {
            CHECK(again.edits.at(m).edited_object == ft.edited_object);
            FalseTriplet direct =
                edit(g, fixtures::lennon_death(), m, derive_seed(42, to_string(m)));
            CHECK(direct.edited_object == ft.edited_object);
        }
    }
}

TEST_CASE("falsity guarantee and distance consistency over fuzzed graphs") {
    for (std::uint64_t seed = 300; seed < 340; ++seed) {
        KnowledgeGraph g = fixtures::random_graph(seed);
        auto dist = oracles::floyd_warshall(g);
        for (const Triplet& t : g.triplets()) {
            EditBundle b = edit_all(g, t, seed);
            for (const auto& [m, ft] : b.edits) {
                CHECK_FALSE(g.has_triplet(ft.base.subject, ft.base.relation, ft.edited_object));
                CHECK(ft.edited_object != ft.base.object);
                CHECK(verify_method(g, ft));
                const int d = dist.at({t.subject, ft.edited_object});
                if (m == EditMethod::NSC || m == EditMethod::NDC) {
                    REQUIRE(ft.hop.has_value());
                    CHECK(*ft.hop == d);
                    CHECK(*ft.hop >= 1);
                    CHECK(*ft.hop <= 5);
                } else {
                    CHECK_FALSE(ft.hop.has_value());
                    CHECK(d > 5);
                }
            }
        }
    }
}

TEST_CASE("verify_method rejects hand-built violations") {
    KnowledgeGraph g = fixtures::toy_graph();
    const Triplet t = fixtures::lennon_death();

    FalseTriplet same_object{t, t.object, EditMethod::NSC, 1};
    CHECK_FALSE(verify_method(g, same_object));

    FalseTriplet wrong_axis{t, "liverpool", EditMethod::NNSC, std::nullopt};
    CHECK_FALSE(verify_method(g, wrong_axis));  // liverpool is a neighbor

    FalseTriplet wrong_hop{t, "liverpool", EditMethod::NSC, 3};
    CHECK_FALSE(verify_method(g, wrong_hop));

    FalseTriplet good{t, "liverpool", EditMethod::NSC, 1};
    CHECK(verify_method(g, good));
}
