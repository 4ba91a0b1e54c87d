#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cdparse/core.hpp"
#include "cdparse/expr.hpp"

namespace cdparse {

enum class Kind { License, Hard, Heuristic, Preference, Dynamic };

const char* kind_name(Kind k);

// A declarative local constraint. License/Hard/Heuristic/Dynamic formulas are
// implications filtering single values (arity 1) or value pairs (arity 2);
// Preference rules compare two candidate heads of one node and name the value
// to delete.
struct ConstraintDef {
    std::string id;
    int arity = 1;
    Kind kind = Kind::Hard;
    double reliability = 1.0;
    int phase = 1;
    Expr formula;         // implication form
    Expr pref_condition;  // Preference only: condition over x (owner), y, z (heads)
    Var pref_target = Var::Y;
    int file_order = 0;
};

// Fuzzy link valuation inputs: word-pair weights and head-category priors,
// both defaulting to 1 when absent.
struct ScoreModels {
    std::map<std::pair<std::string, std::string>, double> bigram;  // (head form, dep form)
    std::map<std::tuple<int, int, int>, double> dominance;         // (head cat, label, dep cat)

    double bigram_weight(const std::string& head_form, const std::string& dep_form) const;
    double dominance_prior(int head_cat, int label, int dep_cat) const;
};

struct Grammar {
    std::vector<std::string> categories;
    std::vector<std::string> labels;
    int root_label = 0;  // index of ROOT
    std::map<std::string, std::vector<int>> lexicon;
    std::map<std::string, double> params;
    std::vector<ConstraintDef> constraints;
    ScoreModels models;

    int category_index(const std::string& name) const;  // -1 when absent
    int label_index(const std::string& name) const;
    double param_or(const std::string& name, double fallback) const;
    double require_param(const std::string& name) const;
};

// Loader for the JSON grammar format (see README). Throws Error with
// SyntaxError / UndeclaredSymbol / BadReliability / NonlocalFormula.
Grammar parse_grammar(const std::string& text);
Grammar load_grammar_file(const std::string& path);
std::string serialize_grammar(const Grammar& g);

// Categories for a surface form, sorted by declaration index.
std::vector<int> lexicon_lookup(const Grammar& g, const std::string& form);

// Single-orientation evaluations. Callers test both orientations of a pair;
// eval_pair is that conjunction.
bool eval_unary(const ConstraintDef& c, const ConstraintNetwork& net, NodeId x,
                const ModValue& vx);
bool eval_binary(const ConstraintDef& c, const ConstraintNetwork& net, NodeId x,
                 const ModValue& vx, NodeId y, const ModValue& vy);
bool eval_pair(const ConstraintDef& c, const ConstraintNetwork& net, NodeId x,
               const ModValue& vx, NodeId y, const ModValue& vy);

// Binds n = max(1, round(beta * time_fraction_remaining)) and returns the
// hard-shaped instance.
ConstraintDef instantiate_dynamic(const ConstraintDef& c, double time_fraction_remaining,
                                  const Grammar& g);

// Built-in constraints injected during propagation: two-cycle suppression
// everywhere; in lattice mode the pairwise node-overlap condition plus its
// unary value-overlaps-own-head special case.
const ConstraintDef& builtin_anticycle();
const ConstraintDef& builtin_overlap();
const ConstraintDef& builtin_self_overlap();

// Rejects grammars whose formulas cannot be interpreted in the given mode
// (interval predicates in string mode, positional arithmetic in lattice mode).
void validate_for_mode(const Grammar& g, Mode mode);

}  // namespace cdparse
