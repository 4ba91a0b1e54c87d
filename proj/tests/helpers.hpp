#pragma once

#include <string>
#include <vector>

#include "cdparse/lattice.hpp"
#include "cdparse/oracle.hpp"
#include "cdparse/scheduler.hpp"

namespace testutil {

using namespace cdparse;

inline std::string grammar_path(const std::string& name) {
    return std::string(CDPARSE_GRAMMAR_DIR) + "/" + name;
}

inline std::string input_path(const std::string& name) {
    return std::string(CDPARSE_INPUT_DIR) + "/" + name;
}

inline const Grammar& demo_grammar() {
    static Grammar g = load_grammar_file(grammar_path("demo.json"));
    return g;
}

inline std::vector<WordNode> demo_nodes() {
    return make_string_nodes(demo_grammar(), {"Tom", "reads", "the", "letter"});
}

inline ConstraintNetwork demo_network() {
    return license_domains(demo_grammar(), demo_nodes());
}

inline ModValue mv(NodeId head, int label) { return ModValue{head, label}; }

inline const ConstraintDef& constraint(const Grammar& g, const std::string& id) {
    for (const auto& c : g.constraints) {
        if (c.id == id) return c;
    }
    throw std::runtime_error("no such constraint in fixture: " + id);
}

inline std::vector<ModValue> domain_of(const ConstraintNetwork& net, NodeId id) {
    return net.domain(id);
}

// lattice node builder
inline WordNode hyp(NodeId id, std::int64_t ext, const std::string& form, int cat,
                    std::int64_t start, std::int64_t end, double conf = 1.0) {
    WordNode n;
    n.id = id;
    n.ext_id = ext;
    n.form = form;
    n.category = cat;
    n.interval = TimeInterval{start, end};
    n.confidence = conf;
    return n;
}

// Three words where hard constraints alone reach the unique parse, but an
// escalated low-reliability heuristic kills the subject reading first. Used
// to demonstrate the reduced quality of continued runs.
inline Grammar subadditive_grammar() {
    return parse_grammar(R"({
        "categories": ["n", "v"],
        "labels": ["ROOT", "SUBJ", "OBJ"],
        "lexicon": {"verb": ["v"], "noun": ["n"]},
        "params": {"theta_heuristic": 0.5, "theta_preference": 0.8},
        "constraints": [
            {"id": "lic-noun", "arity": 1, "kind": "LICENSE", "reliability": 1.0, "phase": 0,
             "formula": ["->", ["=", ["cat","x"], "n"],
                         ["and", ["in", ["lab","x"], ["SUBJ","OBJ"]],
                                 ["=", ["cat",["mod","x"]], "v"]]]},
            {"id": "lic-verb", "arity": 1, "kind": "LICENSE", "reliability": 1.0, "phase": 0,
             "formula": ["->", ["=", ["cat","x"], "v"], ["=", ["lab","x"], "ROOT"]]},
            {"id": "subj-early", "arity": 1, "kind": "HARD", "reliability": 1.0, "phase": 1,
             "formula": ["->", ["=", ["lab","x"], "SUBJ"], ["<=", ["pos","x"], 2]]},
            {"id": "unique-role", "arity": 2, "kind": "HARD", "reliability": 1.0, "phase": 1,
             "formula": ["->", ["and", ["=", ["mod","x"], ["mod","y"]],
                                       ["=", ["lab","x"], ["lab","y"]]],
                               ["=", "x", "y"]]},
            {"id": "subj-late", "arity": 1, "kind": "HEURISTIC", "reliability": 0.5, "phase": 2,
             "formula": ["->", ["=", ["lab","x"], "SUBJ"], ["<=", 3, ["pos","x"]]]}
        ]
    })");
}

}  // namespace testutil
