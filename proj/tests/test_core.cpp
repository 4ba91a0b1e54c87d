#include <doctest.h>

#include "helpers.hpp"

using namespace cdparse;
using namespace testutil;

TEST_CASE("lexicon lookup resolves forms and rejects unknown ones") {
    const Grammar& g = demo_grammar();
    CHECK(lexicon_lookup(g, "the") == std::vector<int>{g.category_index("det")});
    CHECK(lexicon_lookup(g, "Tom") == std::vector<int>{g.category_index("n")});
    CHECK_THROWS_AS((void)lexicon_lookup(g, "xyzzy"), Error);
    try {
        (void)lexicon_lookup(g, "xyzzy");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::UnknownForm);
    }
}

TEST_CASE("category-ambiguous forms yield one node per category at one position") {
    Grammar g = demo_grammar();
    g.lexicon["sail"] = {g.category_index("n"), g.category_index("v")};
    auto nodes = make_string_nodes(g, {"the", "sail"});
    REQUIRE(nodes.size() == 3);
    CHECK(nodes[1].position == 2);
    CHECK(nodes[2].position == 2);
    CHECK(nodes[1].category != nodes[2].category);
    CHECK(nodes[1].ext_id == nodes[2].ext_id);
}

TEST_CASE("network bookkeeping: deletion log, step counter, initial sizes") {
    ConstraintNetwork net = demo_network();
    NodeId the = 2;
    int before = static_cast<int>(net.domain(the).size());
    CHECK(net.initial_size(the) == before);
    ModValue victim = net.domain(the).front();
    CHECK(net.erase_value(the, victim, "test", 0.7));
    CHECK_FALSE(net.erase_value(the, victim, "test", 0.7));
    CHECK(net.step_counter() == 1);
    CHECK(net.deletion_log().back().reliability == 0.7);
    CHECK(net.deletion_log().back().node == the);
    CHECK(static_cast<int>(net.domain(the).size()) == before - 1);
}

TEST_CASE("check_status distinguishes unique, ambiguous, inconsistent") {
    ConstraintNetwork net = demo_network();
    CHECK(check_status(net) == Status::Ambiguous);
    // delete everything from one node
    for (auto v : std::vector<ModValue>(net.domain(2)))
        net.erase_value(2, v, "test", 1.0);
    CHECK(check_status(net) == Status::Inconsistent);
}

TEST_CASE("extract_solution returns a partial description on ambiguous networks") {
    ConstraintNetwork net = demo_network();
    auto analysis = extract_solution(net);
    CHECK_FALSE(analysis.complete);
    REQUIRE(analysis.resolved.size() == 1);  // the verb is root-only from licensing
    CHECK(analysis.resolved[0].node == 1);
    CHECK(analysis.resolved[0].value == mv(kNilNode, demo_grammar().root_label));
    CHECK(analysis.unresolved.size() == 3);
}

TEST_CASE("extract_solution validates singleton networks as trees") {
    const Grammar& g = demo_grammar();
    int lab = g.label_index("SUBJ");

    SUBCASE("two-node cycle is malformed") {
        ConstraintNetwork net(Mode::String);
        WordNode a;
        a.id = 0;
        a.ext_id = 1;
        a.form = "a";
        a.position = 1;
        WordNode b = a;
        b.id = 1;
        b.ext_id = 2;
        b.form = "b";
        b.position = 2;
        net.add_node(a);
        net.add_node(b);
        net.admit_value(0, mv(1, lab));
        net.admit_value(1, mv(0, lab));
        CHECK_THROWS_AS((void)extract_solution(net), Error);
        try {
            (void)extract_solution(net);
        } catch (const Error& e) {
            CHECK(e.code() == Errc::MalformedTree);
        }
    }

    SUBCASE("empty domain raises inconsistent") {
        ConstraintNetwork net = demo_network();
        for (auto v : std::vector<ModValue>(net.domain(0)))
            net.erase_value(0, v, "test", 1.0);
        CHECK_THROWS_AS((void)extract_solution(net), Error);
        try {
            (void)extract_solution(net);
        } catch (const Error& e) {
            CHECK(e.code() == Errc::Inconsistent);
        }
    }

    SUBCASE("resolved demo parse extracts completely") {
        auto result = run_contract(demo_grammar(), demo_nodes(), Budget::steps(3));
        REQUIRE(result.status == Status::Unique);
        auto analysis = extract_solution(result.network);
        CHECK(analysis.complete);
        CHECK(analysis.resolved.size() == 4);
    }
}

TEST_CASE("domain membership invariant: every head is NIL or a live node id") {
    ConstraintNetwork net = demo_network();
    for (NodeId i = 0; i < net.node_count(); ++i) {
        for (const auto& v : net.domain(i)) {
            bool ok = v.head == kNilNode || (v.head >= 0 && v.head < net.node_count());
            CHECK(ok);
            if (v.head == kNilNode) CHECK(v.label == demo_grammar().root_label);
        }
    }
}

TEST_CASE("deletion-log completeness: deletions account for initial minus current") {
    ConstraintNetwork net = demo_network();
    auto hard = constraints_of(demo_grammar(), {Kind::Hard, Kind::Heuristic});
    propagate(net, hard);
    for (NodeId i = 0; i < net.node_count(); ++i) {
        int deleted = 0;
        for (const auto& rec : net.deletion_log()) {
            if (rec.node == i) ++deleted;
        }
        CHECK(net.initial_size(i) - static_cast<int>(net.domain(i).size()) == deleted);
    }
}
