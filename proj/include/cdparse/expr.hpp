#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cdparse/core.hpp"

namespace cdparse {

// ---------------------------------------------------------------------------
// Formula trees for local (unary/binary) constraints.
//
// Variables x and y denote the nodes whose candidate values are under test;
// mod(x) / mod(y) reach their candidate heads and nothing deeper. Preference
// conditions additionally bind y and z directly to two candidate heads of x.
// ---------------------------------------------------------------------------

enum class Var { X, Y, Z };

struct NodeRef {
    Var var = Var::X;
    bool via_head = false;  // the head named by the variable's candidate value
};

struct NumTerm {
    enum class K { Pos, Start, End, Conf, Lit, ParamN };
    K k = K::Lit;
    NodeRef ref;         // Pos/Start/End/Conf
    double lit = 0.0;    // Lit
    double addend = 0.0; // folded "+ constant"
    bool addend_n = false;  // "+ n"
};

struct SymTerm {
    enum class K { CatOf, LabOf, Lit };
    K k = K::Lit;
    NodeRef ref;
    int lit = -1;          // resolved symbol index
    bool is_label = false; // symbol table the term draws from
};

class Expr {
public:
    enum class Op {
        And, Or, Not, Implies,
        NumEq, NumNe, NumLt, NumLe,
        SymEq, SymNe,
        NodeEq, NodeNe,
        InSet,
        Overlap, Precedes,
    };

    Op op = Op::And;
    std::vector<Expr> kids;  // connectives
    NumTerm num_lhs, num_rhs;
    SymTerm sym_lhs, sym_rhs;
    NodeRef node_lhs, node_rhs;
    std::vector<int> set_members;  // InSet, sorted
    bool set_is_label = false;
};

// Assignment context for one evaluation. Unbound variables are a validation
// error, never consulted at runtime.
struct EvalCtx {
    const ConstraintNetwork* net = nullptr;
    NodeId x = kNilNode;
    const ModValue* vx = nullptr;
    NodeId y = kNilNode;
    const ModValue* vy = nullptr;
    NodeId z = kNilNode;           // preference head binding
    bool heads_direct = false;     // preference: y/z are head nodes themselves
    std::optional<double> param_n; // bound value of n, if any
};

// Material-implication semantics; an atomic predicate touching an undefined
// operand (an accessor through a NIL head) evaluates to false.
bool eval_expr(const Expr& e, const EvalCtx& ctx);

// Structural queries used by the loader and the scheduler.
bool expr_mentions_param(const Expr& e);
bool expr_mentions_var(const Expr& e, Var v);
void bind_param(Expr& e, double n);

struct ModeNeeds {
    bool pos_relational = false;  // pos-to-pos comparisons (portable to lattice)
    bool pos_scalar = false;      // pos arithmetic or pos-vs-literal (string only)
    bool intervals = false;       // start/end/overlap/precedes (lattice only)
};
ModeNeeds expr_mode_needs(const Expr& e);

}  // namespace cdparse
