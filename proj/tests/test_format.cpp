#include <doctest.h>

#include <json.hpp>

#include "cdparse/format.hpp"
#include "helpers.hpp"

using namespace cdparse;
using namespace testutil;

TEST_CASE("TSV output: resolved parse, root encoded as head 0") {
    auto result = run_contract(demo_grammar(), demo_nodes(), Budget::steps(3));
    REQUIRE(result.status == Status::Unique);
    std::string tsv = format_output(result, demo_grammar(), OutputFormat::Tsv);
    CHECK(tsv == "id\tform\tcat\thead\tlabel\n"
                 "1\tTom\tn\t2\tSUBJ\n"
                 "2\treads\tv\t0\tROOT\n"
                 "3\tthe\tdet\t4\tDET\n"
                 "4\tletter\tn\t2\tOBJ\n");
}

TEST_CASE("TSV output: the initial network lists the ambiguous domains") {
    AnytimeResult result;
    result.network = demo_network();
    result.status = check_status(result.network);
    std::string tsv = format_output(result, demo_grammar(), OutputFormat::Tsv);
    CHECK(tsv == "id\tform\tcat\thead\tlabel\n"
                 "2\treads\tv\t0\tROOT\n"
                 "# ambiguous\n"
                 "1\tTom\tn\t{(2,SUBJ),(2,OBJ)}\n"
                 "3\tthe\tdet\t{(1,DET),(4,DET)}\n"
                 "4\tletter\tn\t{(2,SUBJ),(2,OBJ)}\n");
}

TEST_CASE("TSV output: an empty network is just the header") {
    AnytimeResult result;
    result.status = Status::Unique;
    CHECK(format_output(result, demo_grammar(), OutputFormat::Tsv) ==
          "id\tform\tcat\thead\tlabel\n");
}

TEST_CASE("JSON output carries nodes, status, and the trace inline") {
    auto result = run_contract(demo_grammar(), demo_nodes(), Budget::steps(3));
    auto doc = nlohmann::json::parse(format_output(result, demo_grammar(), OutputFormat::Json));
    CHECK(doc["status"] == "UNIQUE");
    CHECK(doc["mode"] == "string");
    CHECK(doc["nodes"].size() == 4);
    CHECK(doc["ambiguous"].empty());
    CHECK(doc["trace"]["mode"] == "contract");
    CHECK(doc["trace"]["samples"].size() == 4);
    CHECK(doc["nodes"][1]["head"] == 0);
    CHECK(doc["nodes"][1]["label"] == "ROOT");
}

TEST_CASE("oracle formatting prints one assignment per line plus a count") {
    const Grammar& g = demo_grammar();
    auto net = demo_network();
    auto oracle = oracle_enumerate_network(g, net, false);
    std::string text = format_oracle(oracle, g, net);
    CHECK(text == "Tom:2:SUBJ reads:0:ROOT the:4:DET letter:2:OBJ\n"
                  "Tom:2:OBJ reads:0:ROOT the:4:DET letter:2:SUBJ\n"
                  "count 2\n");
}
