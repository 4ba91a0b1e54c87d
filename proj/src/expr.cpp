#include "cdparse/expr.hpp"

namespace cdparse {

namespace {

struct NodeVal {
    bool defined = false;
    NodeId id = kNilNode;  // kNilNode is a legitimate value (the root head)
};

NodeVal resolve(const NodeRef& r, const EvalCtx& ctx) {
    NodeId base = kNilNode;
    const ModValue* val = nullptr;
    switch (r.var) {
        case Var::X: base = ctx.x; val = ctx.vx; break;
        case Var::Y: base = ctx.y; val = ctx.vy; break;
        case Var::Z: base = ctx.z; val = nullptr; break;
    }
    if (!r.via_head) return NodeVal{true, base};
    if (ctx.heads_direct && r.var != Var::X) return NodeVal{false, kNilNode};
    if (val == nullptr) return NodeVal{false, kNilNode};
    return NodeVal{true, val->head};
}

std::optional<double> eval_num(const NumTerm& t, const EvalCtx& ctx) {
    double base = 0.0;
    switch (t.k) {
        case NumTerm::K::Lit:
            base = t.lit;
            break;
        case NumTerm::K::ParamN:
            if (!ctx.param_n) return std::nullopt;
            base = *ctx.param_n;
            break;
        default: {
            NodeVal nv = resolve(t.ref, ctx);
            if (!nv.defined || nv.id == kNilNode) return std::nullopt;
            const WordNode& n = ctx.net->node(nv.id);
            switch (t.k) {
                case NumTerm::K::Pos:
                    base = static_cast<double>(n.position);
                    break;
                case NumTerm::K::Start:
                    if (!n.interval) return std::nullopt;
                    base = static_cast<double>(n.interval->start_ms);
                    break;
                case NumTerm::K::End:
                    if (!n.interval) return std::nullopt;
                    base = static_cast<double>(n.interval->end_ms);
                    break;
                case NumTerm::K::Conf:
                    base = n.confidence;
                    break;
                default:
                    return std::nullopt;
            }
            break;
        }
    }
    double add = t.addend;
    if (t.addend_n) {
        if (!ctx.param_n) return std::nullopt;
        add += *ctx.param_n;
    }
    return base + add;
}

bool intervals_of(const NodeRef& a, const NodeRef& b, const EvalCtx& ctx,
                  NodeVal& na, NodeVal& nb) {
    na = resolve(a, ctx);
    nb = resolve(b, ctx);
    return na.defined && nb.defined && na.id != kNilNode && nb.id != kNilNode;
}

bool interval_precedes(const WordNode& a, const WordNode& b) {
    return a.interval && b.interval && a.interval->end_ms <= b.interval->start_ms;
}

bool interval_overlap(const WordNode& a, const WordNode& b) {
    if (a.id == b.id) return false;
    if (!a.interval || !b.interval) return false;
    return std::max(a.interval->start_ms, b.interval->start_ms) <
           std::min(a.interval->end_ms, b.interval->end_ms);
}

// pos-to-pos comparisons generalize to interval relations in lattice mode.
bool lattice_pos_cmp(Expr::Op op, const NumTerm& lt, const NumTerm& rt,
                     const EvalCtx& ctx) {
    NodeVal a, b;
    if (!intervals_of(lt.ref, rt.ref, ctx, a, b)) return false;
    const WordNode& na = ctx.net->node(a.id);
    const WordNode& nb = ctx.net->node(b.id);
    switch (op) {
        case Expr::Op::NumLt: return interval_precedes(na, nb);
        case Expr::Op::NumLe: return !interval_precedes(nb, na);
        case Expr::Op::NumEq: return a.id == b.id || interval_overlap(na, nb);
        case Expr::Op::NumNe: return !(a.id == b.id || interval_overlap(na, nb));
        default: return false;
    }
}

std::optional<int> eval_sym(const SymTerm& t, const EvalCtx& ctx) {
    switch (t.k) {
        case SymTerm::K::Lit:
            return t.lit;
        case SymTerm::K::CatOf: {
            NodeVal nv = resolve(t.ref, ctx);
            if (!nv.defined || nv.id == kNilNode) return std::nullopt;
            return ctx.net->node(nv.id).category;
        }
        case SymTerm::K::LabOf: {
            // Labels live on candidate values, so only plain x/y carry one.
            if (t.ref.via_head) return std::nullopt;
            const ModValue* v = nullptr;
            if (t.ref.var == Var::X) v = ctx.vx;
            if (t.ref.var == Var::Y && !ctx.heads_direct) v = ctx.vy;
            if (v == nullptr) return std::nullopt;
            return v->label;
        }
    }
    return std::nullopt;
}

}  // namespace

bool eval_expr(const Expr& e, const EvalCtx& ctx) {
    switch (e.op) {
        case Expr::Op::And:
            for (const auto& k : e.kids)
                if (!eval_expr(k, ctx)) return false;
            return true;
        case Expr::Op::Or:
            for (const auto& k : e.kids)
                if (eval_expr(k, ctx)) return true;
            return false;
        case Expr::Op::Not:
            return !eval_expr(e.kids.front(), ctx);
        case Expr::Op::Implies:
            return !eval_expr(e.kids[0], ctx) || eval_expr(e.kids[1], ctx);

        case Expr::Op::NumEq:
        case Expr::Op::NumNe:
        case Expr::Op::NumLt:
        case Expr::Op::NumLe: {
            if (ctx.net && ctx.net->mode() == Mode::Lattice &&
                e.num_lhs.k == NumTerm::K::Pos && e.num_rhs.k == NumTerm::K::Pos &&
                e.num_lhs.addend == 0 && e.num_rhs.addend == 0 &&
                !e.num_lhs.addend_n && !e.num_rhs.addend_n) {
                return lattice_pos_cmp(e.op, e.num_lhs, e.num_rhs, ctx);
            }
            auto l = eval_num(e.num_lhs, ctx);
            auto r = eval_num(e.num_rhs, ctx);
            if (!l || !r) return false;
            switch (e.op) {
                case Expr::Op::NumEq: return *l == *r;
                case Expr::Op::NumNe: return *l != *r;
                case Expr::Op::NumLt: return *l < *r;
                default: return *l <= *r;
            }
        }

        case Expr::Op::SymEq:
        case Expr::Op::SymNe: {
            auto l = eval_sym(e.sym_lhs, ctx);
            auto r = eval_sym(e.sym_rhs, ctx);
            if (!l || !r) return false;
            return (e.op == Expr::Op::SymEq) ? (*l == *r) : (*l != *r);
        }

        case Expr::Op::NodeEq:
        case Expr::Op::NodeNe: {
            NodeVal l = resolve(e.node_lhs, ctx);
            NodeVal r = resolve(e.node_rhs, ctx);
            if (!l.defined || !r.defined) return false;
            return (e.op == Expr::Op::NodeEq) ? (l.id == r.id) : (l.id != r.id);
        }

        case Expr::Op::InSet: {
            auto l = eval_sym(e.sym_lhs, ctx);
            if (!l) return false;
            return std::binary_search(e.set_members.begin(), e.set_members.end(), *l);
        }

        case Expr::Op::Overlap:
        case Expr::Op::Precedes: {
            NodeVal a, b;
            if (!intervals_of(e.node_lhs, e.node_rhs, ctx, a, b)) return false;
            const WordNode& na = ctx.net->node(a.id);
            const WordNode& nb = ctx.net->node(b.id);
            return (e.op == Expr::Op::Overlap) ? interval_overlap(na, nb)
                                               : interval_precedes(na, nb);
        }
    }
    return false;
}

bool expr_mentions_param(const Expr& e) {
    if (e.num_lhs.k == NumTerm::K::ParamN || e.num_rhs.k == NumTerm::K::ParamN ||
        e.num_lhs.addend_n || e.num_rhs.addend_n) {
        return true;
    }
    for (const auto& k : e.kids)
        if (expr_mentions_param(k)) return true;
    return false;
}

namespace {

bool ref_uses(const NodeRef& r, Var v) { return r.var == v; }

bool term_uses(const NumTerm& t, Var v) {
    return t.k != NumTerm::K::Lit && t.k != NumTerm::K::ParamN && ref_uses(t.ref, v);
}

bool sym_uses(const SymTerm& t, Var v) {
    return t.k != SymTerm::K::Lit && ref_uses(t.ref, v);
}

}  // namespace

bool expr_mentions_var(const Expr& e, Var v) {
    switch (e.op) {
        case Expr::Op::NumEq:
        case Expr::Op::NumNe:
        case Expr::Op::NumLt:
        case Expr::Op::NumLe:
            if (term_uses(e.num_lhs, v) || term_uses(e.num_rhs, v)) return true;
            break;
        case Expr::Op::SymEq:
        case Expr::Op::SymNe:
            if (sym_uses(e.sym_lhs, v) || sym_uses(e.sym_rhs, v)) return true;
            break;
        case Expr::Op::InSet:
            if (sym_uses(e.sym_lhs, v)) return true;
            break;
        case Expr::Op::NodeEq:
        case Expr::Op::NodeNe:
        case Expr::Op::Overlap:
        case Expr::Op::Precedes:
            if (ref_uses(e.node_lhs, v) || ref_uses(e.node_rhs, v)) return true;
            break;
        default:
            break;
    }
    for (const auto& k : e.kids)
        if (expr_mentions_var(k, v)) return true;
    return false;
}

void bind_param(Expr& e, double n) {
    auto bind_term = [n](NumTerm& t) {
        if (t.k == NumTerm::K::ParamN) {
            t.k = NumTerm::K::Lit;
            t.lit = n;
        }
        if (t.addend_n) {
            t.addend_n = false;
            t.addend += n;
        }
    };
    bind_term(e.num_lhs);
    bind_term(e.num_rhs);
    for (auto& k : e.kids) bind_param(k, n);
}

ModeNeeds expr_mode_needs(const Expr& e) {
    ModeNeeds needs;
    auto merge = [&needs](const ModeNeeds& o) {
        needs.pos_relational |= o.pos_relational;
        needs.pos_scalar |= o.pos_scalar;
        needs.intervals |= o.intervals;
    };
    auto term_interval = [](const NumTerm& t) {
        return t.k == NumTerm::K::Start || t.k == NumTerm::K::End;
    };
    switch (e.op) {
        case Expr::Op::NumEq:
        case Expr::Op::NumNe:
        case Expr::Op::NumLt:
        case Expr::Op::NumLe: {
            bool lp = e.num_lhs.k == NumTerm::K::Pos;
            bool rp = e.num_rhs.k == NumTerm::K::Pos;
            bool plain = e.num_lhs.addend == 0 && e.num_rhs.addend == 0 &&
                         !e.num_lhs.addend_n && !e.num_rhs.addend_n;
            if (lp && rp && plain) {
                needs.pos_relational = true;
            } else if (lp || rp) {
                needs.pos_scalar = true;
            }
            if (term_interval(e.num_lhs) || term_interval(e.num_rhs)) {
                needs.intervals = true;
            }
            break;
        }
        case Expr::Op::Overlap:
        case Expr::Op::Precedes:
            needs.intervals = true;
            break;
        default:
            break;
    }
    for (const auto& k : e.kids) merge(expr_mode_needs(k));
    return needs;
}

}  // namespace cdparse
