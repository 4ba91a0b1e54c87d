#include "cdparse/grammar.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace cdparse {

using nlohmann::ordered_json;

const char* kind_name(Kind k) {
    switch (k) {
        case Kind::License: return "LICENSE";
        case Kind::Hard: return "HARD";
        case Kind::Heuristic: return "HEURISTIC";
        case Kind::Preference: return "PREFERENCE";
        case Kind::Dynamic: return "DYNAMIC";
    }
    return "?";
}

double ScoreModels::bigram_weight(const std::string& head_form,
                                  const std::string& dep_form) const {
    auto it = bigram.find({head_form, dep_form});
    return it == bigram.end() ? 1.0 : it->second;
}

double ScoreModels::dominance_prior(int head_cat, int label, int dep_cat) const {
    auto it = dominance.find({head_cat, label, dep_cat});
    return it == dominance.end() ? 1.0 : it->second;
}

int Grammar::category_index(const std::string& name) const {
    auto it = std::find(categories.begin(), categories.end(), name);
    return it == categories.end() ? -1 : static_cast<int>(it - categories.begin());
}

int Grammar::label_index(const std::string& name) const {
    auto it = std::find(labels.begin(), labels.end(), name);
    return it == labels.end() ? -1 : static_cast<int>(it - labels.begin());
}

double Grammar::param_or(const std::string& name, double fallback) const {
    auto it = params.find(name);
    return it == params.end() ? fallback : it->second;
}

double Grammar::require_param(const std::string& name) const {
    auto it = params.find(name);
    if (it == params.end()) {
        throw Error(Errc::MissingParam, "grammar parameter '" + name + "' is not declared");
    }
    return it->second;
}

std::vector<int> lexicon_lookup(const Grammar& g, const std::string& form) {
    auto it = g.lexicon.find(form);
    if (it == g.lexicon.end()) {
        throw Error(Errc::UnknownForm, "form '" + form + "' has no lexicon entry");
    }
    return it->second;
}

// ---------------------------------------------------------------------------
// Formula parsing
// ---------------------------------------------------------------------------

namespace {

// Node variables cannot double as symbol names; "n" stays available since
// numeric and symbol positions never mix.
bool is_reserved_word(const std::string& s) {
    return s == "x" || s == "y" || s == "z";
}

struct FormulaParser {
    const Grammar& g;
    std::string where;  // constraint id, for messages
    bool allow_z = false;

    [[noreturn]] void fail(Errc code, const std::string& msg) const {
        throw Error(code, "constraint '" + where + "': " + msg);
    }

    bool looks_like_node_ref(const ordered_json& j) const {
        if (j.is_string()) {
            std::string s = j.get<std::string>();
            return s == "x" || s == "y" || s == "z";
        }
        if (j.is_array() && j.size() == 2 && j[0].is_string()) {
            std::string h = j[0].get<std::string>();
            return (h == "mod" || h == "head") && looks_like_node_ref(j[1]);
        }
        return false;
    }

    NodeRef parse_node_ref(const ordered_json& j) const {
        if (j.is_string()) {
            std::string s = j.get<std::string>();
            if (s == "x") return NodeRef{Var::X, false};
            if (s == "y") return NodeRef{Var::Y, false};
            if (s == "z") {
                if (!allow_z) fail(Errc::NonlocalFormula, "variable z outside a preference condition");
                return NodeRef{Var::Z, false};
            }
            fail(Errc::NonlocalFormula, "unknown variable '" + s + "'");
        }
        std::string h = j[0].get<std::string>();
        NodeRef inner = parse_node_ref(j[1]);
        if (inner.via_head) {
            fail(Errc::NonlocalFormula, h + "() chain deeper than one head");
        }
        if (inner.var == Var::Z) {
            fail(Errc::NonlocalFormula, "head access on a preference head binding");
        }
        return NodeRef{inner.var, true};
    }

    bool looks_like_sym_term(const ordered_json& j) const {
        return j.is_array() && j.size() == 2 && j[0].is_string() &&
               (j[0].get<std::string>() == "cat" || j[0].get<std::string>() == "lab");
    }

    // accessor side first when mixing accessor and literal
    SymTerm parse_sym_term(const ordered_json& j, bool expect_label,
                           bool table_known) const {
        SymTerm t;
        if (looks_like_sym_term(j)) {
            std::string h = j[0].get<std::string>();
            t.k = (h == "cat") ? SymTerm::K::CatOf : SymTerm::K::LabOf;
            t.is_label = (h == "lab");
            t.ref = parse_node_ref(j[1]);
            if (t.k == SymTerm::K::LabOf && t.ref.via_head) {
                fail(Errc::NonlocalFormula,
                     "lab() of a candidate head needs a third assignment");
            }
            return t;
        }
        if (j.is_string()) {
            std::string s = j.get<std::string>();
            if (is_reserved_word(s)) fail(Errc::SyntaxError, "'" + s + "' used as a symbol");
            if (!table_known) fail(Errc::SyntaxError, "symbol '" + s + "' lacks an accessor context");
            t.k = SymTerm::K::Lit;
            t.is_label = expect_label;
            t.lit = expect_label ? g.label_index(s) : g.category_index(s);
            if (t.lit < 0) {
                fail(Errc::UndeclaredSymbol, std::string(expect_label ? "label '" : "category '") +
                                                 s + "' is not declared");
            }
            return t;
        }
        fail(Errc::SyntaxError, "expected cat()/lab() accessor or symbol");
    }

    bool looks_like_num_term(const ordered_json& j) const {
        if (j.is_number()) return true;
        if (j.is_string()) return j.get<std::string>() == "n";
        if (j.is_array() && j.size() >= 2 && j[0].is_string()) {
            std::string h = j[0].get<std::string>();
            return h == "pos" || h == "start" || h == "end" || h == "conf" || h == "+";
        }
        return false;
    }

    NumTerm parse_num_term(const ordered_json& j) const {
        NumTerm t;
        if (j.is_number()) {
            t.k = NumTerm::K::Lit;
            t.lit = j.get<double>();
            return t;
        }
        if (j.is_string() && j.get<std::string>() == "n") {
            t.k = NumTerm::K::ParamN;
            return t;
        }
        if (!j.is_array() || j.empty() || !j[0].is_string()) {
            fail(Errc::SyntaxError, "expected a numeric term");
        }
        std::string h = j[0].get<std::string>();
        if (h == "+") {
            if (j.size() != 3) fail(Errc::SyntaxError, "'+' takes two operands");
            NumTerm a = parse_num_term(j[1]);
            NumTerm b = parse_num_term(j[2]);
            auto is_const = [](const NumTerm& x) {
                return x.k == NumTerm::K::Lit || x.k == NumTerm::K::ParamN;
            };
            if (is_const(b) && !is_const(a)) std::swap(a, b);
            if (!is_const(a)) fail(Errc::SyntaxError, "'+' requires a constant operand");
            if (a.k == NumTerm::K::ParamN || a.addend_n) b.addend_n = true;
            b.addend += a.lit + a.addend;
            return b;
        }
        if (j.size() != 2) fail(Errc::SyntaxError, "accessor takes one node reference");
        t.ref = parse_node_ref(j[1]);
        if (h == "pos") t.k = NumTerm::K::Pos;
        else if (h == "start") t.k = NumTerm::K::Start;
        else if (h == "end") t.k = NumTerm::K::End;
        else if (h == "conf") t.k = NumTerm::K::Conf;
        else fail(Errc::SyntaxError, "unknown accessor '" + h + "'");
        return t;
    }

    Expr parse_comparison(const std::string& op, const ordered_json& lhs,
                          const ordered_json& rhs) const {
        Expr e;
        if (op == "<" || op == "<=") {
            e.op = (op == "<") ? Expr::Op::NumLt : Expr::Op::NumLe;
            e.num_lhs = parse_num_term(lhs);
            e.num_rhs = parse_num_term(rhs);
            return e;
        }
        // "=" / "!=": dispatch on operand shapes
        bool eq = (op == "=");
        if (looks_like_node_ref(lhs) && looks_like_node_ref(rhs)) {
            e.op = eq ? Expr::Op::NodeEq : Expr::Op::NodeNe;
            e.node_lhs = parse_node_ref(lhs);
            e.node_rhs = parse_node_ref(rhs);
            return e;
        }
        if (looks_like_sym_term(lhs) || looks_like_sym_term(rhs)) {
            e.op = eq ? Expr::Op::SymEq : Expr::Op::SymNe;
            if (looks_like_sym_term(lhs)) {
                e.sym_lhs = parse_sym_term(lhs, false, false);
                e.sym_rhs = parse_sym_term(rhs, e.sym_lhs.is_label, true);
            } else {
                e.sym_rhs = parse_sym_term(rhs, false, false);
                e.sym_lhs = parse_sym_term(lhs, e.sym_rhs.is_label, true);
            }
            if (e.sym_lhs.k != SymTerm::K::Lit && e.sym_rhs.k != SymTerm::K::Lit &&
                e.sym_lhs.is_label != e.sym_rhs.is_label) {
                fail(Errc::SyntaxError, "comparing a category with a label");
            }
            return e;
        }
        if (looks_like_num_term(lhs) && looks_like_num_term(rhs)) {
            e.op = eq ? Expr::Op::NumEq : Expr::Op::NumNe;
            e.num_lhs = parse_num_term(lhs);
            e.num_rhs = parse_num_term(rhs);
            return e;
        }
        fail(Errc::SyntaxError, "cannot type the operands of '" + op + "'");
    }

    Expr parse(const ordered_json& j) const {
        if (!j.is_array() || j.empty() || !j[0].is_string()) {
            fail(Errc::SyntaxError, "formula node must be [op, ...]");
        }
        std::string op = j[0].get<std::string>();
        Expr e;
        if (op == "and" || op == "or") {
            if (j.size() < 3) fail(Errc::SyntaxError, "'" + op + "' takes two or more operands");
            e.op = (op == "and") ? Expr::Op::And : Expr::Op::Or;
            for (size_t i = 1; i < j.size(); ++i) e.kids.push_back(parse(j[i]));
            return e;
        }
        if (op == "not") {
            if (j.size() != 2) fail(Errc::SyntaxError, "'not' takes one operand");
            e.op = Expr::Op::Not;
            e.kids.push_back(parse(j[1]));
            return e;
        }
        if (op == "->") {
            if (j.size() != 3) fail(Errc::SyntaxError, "'->' takes two operands");
            e.op = Expr::Op::Implies;
            e.kids.push_back(parse(j[1]));
            e.kids.push_back(parse(j[2]));
            return e;
        }
        if (op == "=" || op == "!=" || op == "<" || op == "<=") {
            if (j.size() != 3) fail(Errc::SyntaxError, "'" + op + "' takes two operands");
            return parse_comparison(op, j[1], j[2]);
        }
        if (op == "in") {
            if (j.size() != 3 || !j[2].is_array()) {
                fail(Errc::SyntaxError, "'in' takes an accessor and a symbol list");
            }
            e.op = Expr::Op::InSet;
            e.sym_lhs = parse_sym_term(j[1], false, false);
            if (e.sym_lhs.k == SymTerm::K::Lit) {
                fail(Errc::SyntaxError, "'in' needs a cat()/lab() accessor");
            }
            e.set_is_label = e.sym_lhs.is_label;
            for (const auto& m : j[2]) {
                if (!m.is_string()) fail(Errc::SyntaxError, "'in' members must be symbols");
                std::string s = m.get<std::string>();
                int idx = e.set_is_label ? g.label_index(s) : g.category_index(s);
                if (idx < 0) fail(Errc::UndeclaredSymbol, "'" + s + "' is not declared");
                e.set_members.push_back(idx);
            }
            std::sort(e.set_members.begin(), e.set_members.end());
            return e;
        }
        if (op == "overlap" || op == "precedes") {
            if (j.size() != 3) fail(Errc::SyntaxError, "'" + op + "' takes two node references");
            e.op = (op == "overlap") ? Expr::Op::Overlap : Expr::Op::Precedes;
            e.node_lhs = parse_node_ref(j[1]);
            e.node_rhs = parse_node_ref(j[2]);
            return e;
        }
        fail(Errc::SyntaxError, "unknown operator '" + op + "'");
    }
};

void line_col_of(const std::string& text, size_t byte, int& line, int& col) {
    line = 1;
    col = 1;
    for (size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
}

bool expr_uses_via_head(const Expr& e) {
    auto num_vh = [](const NumTerm& t) {
        return (t.k != NumTerm::K::Lit && t.k != NumTerm::K::ParamN) && t.ref.via_head;
    };
    auto sym_vh = [](const SymTerm& t) { return t.k != SymTerm::K::Lit && t.ref.via_head; };
    switch (e.op) {
        case Expr::Op::NumEq:
        case Expr::Op::NumNe:
        case Expr::Op::NumLt:
        case Expr::Op::NumLe:
            if (num_vh(e.num_lhs) || num_vh(e.num_rhs)) return true;
            break;
        case Expr::Op::SymEq:
        case Expr::Op::SymNe:
            if (sym_vh(e.sym_lhs) || sym_vh(e.sym_rhs)) return true;
            break;
        case Expr::Op::InSet:
            if (sym_vh(e.sym_lhs)) return true;
            break;
        case Expr::Op::NodeEq:
        case Expr::Op::NodeNe:
        case Expr::Op::Overlap:
        case Expr::Op::Precedes:
            if (e.node_lhs.via_head || e.node_rhs.via_head) return true;
            break;
        default:
            break;
    }
    for (const auto& k : e.kids)
        if (expr_uses_via_head(k)) return true;
    return false;
}

bool expr_uses_lab(const Expr& e) {
    auto is_lab = [](const SymTerm& t) { return t.k == SymTerm::K::LabOf; };
    if ((e.op == Expr::Op::SymEq || e.op == Expr::Op::SymNe) &&
        (is_lab(e.sym_lhs) || is_lab(e.sym_rhs))) {
        return true;
    }
    if (e.op == Expr::Op::InSet && is_lab(e.sym_lhs)) return true;
    for (const auto& k : e.kids)
        if (expr_uses_lab(k)) return true;
    return false;
}

Kind parse_kind(const std::string& s, const std::string& id) {
    if (s == "LICENSE") return Kind::License;
    if (s == "HARD") return Kind::Hard;
    if (s == "HEURISTIC") return Kind::Heuristic;
    if (s == "PREFERENCE") return Kind::Preference;
    if (s == "DYNAMIC") return Kind::Dynamic;
    throw Error(Errc::SyntaxError, "constraint '" + id + "': unknown kind '" + s + "'");
}

}  // namespace

Grammar parse_grammar(const std::string& text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        int line = 0, col = 0;
        line_col_of(text, e.byte > 0 ? e.byte - 1 : 0, line, col);
        throw Error(Errc::SyntaxError, "grammar JSON at line " + std::to_string(line) +
                                           ", column " + std::to_string(col) + ": " + e.what());
    }
    if (!doc.is_object()) throw Error(Errc::SyntaxError, "grammar must be a JSON object");

    Grammar g;
    for (const char* key : {"categories", "labels", "lexicon", "constraints"}) {
        if (!doc.contains(key)) {
            throw Error(Errc::SyntaxError, std::string("missing top-level key '") + key + "'");
        }
    }

    for (const auto& c : doc["categories"]) {
        std::string name = c.get<std::string>();
        if (name.empty() || is_reserved_word(name)) {
            throw Error(Errc::SyntaxError, "bad category name '" + name + "'");
        }
        if (g.category_index(name) >= 0) {
            throw Error(Errc::SyntaxError, "duplicate category '" + name + "'");
        }
        g.categories.push_back(name);
    }
    for (const auto& l : doc["labels"]) {
        std::string name = l.get<std::string>();
        if (name.empty() || is_reserved_word(name)) {
            throw Error(Errc::SyntaxError, "bad label name '" + name + "'");
        }
        if (g.label_index(name) >= 0) {
            throw Error(Errc::SyntaxError, "duplicate label '" + name + "'");
        }
        g.labels.push_back(name);
    }
    g.root_label = g.label_index("ROOT");
    if (g.root_label < 0) {
        throw Error(Errc::UndeclaredSymbol, "the label set must declare ROOT");
    }

    for (auto it = doc["lexicon"].begin(); it != doc["lexicon"].end(); ++it) {
        std::vector<int> cats;
        for (const auto& c : it.value()) {
            int idx = g.category_index(c.get<std::string>());
            if (idx < 0) {
                throw Error(Errc::UndeclaredSymbol, "lexicon entry '" + it.key() +
                                                        "' uses undeclared category");
            }
            cats.push_back(idx);
        }
        std::sort(cats.begin(), cats.end());
        cats.erase(std::unique(cats.begin(), cats.end()), cats.end());
        g.lexicon[it.key()] = cats;
    }

    if (doc.contains("params")) {
        for (auto it = doc["params"].begin(); it != doc["params"].end(); ++it) {
            g.params[it.key()] = it.value().get<double>();
        }
    }

    int order = 0;
    for (const auto& jc : doc["constraints"]) {
        ConstraintDef c;
        if (!jc.contains("id") || !jc["id"].is_string()) {
            throw Error(Errc::SyntaxError, "constraint without id");
        }
        c.id = jc["id"].get<std::string>();
        for (const auto& prev : g.constraints) {
            if (prev.id == c.id) {
                throw Error(Errc::SyntaxError, "duplicate constraint id '" + c.id + "'");
            }
        }
        c.arity = jc.value("arity", 1);
        if (c.arity != 1 && c.arity != 2) {
            throw Error(Errc::SyntaxError, "constraint '" + c.id + "': arity must be 1 or 2");
        }
        c.kind = parse_kind(jc.value("kind", std::string("HARD")), c.id);
        c.reliability = jc.value("reliability", 1.0);
        if (!(c.reliability > 0.0 && c.reliability <= 1.0)) {
            throw Error(Errc::BadReliability,
                        "constraint '" + c.id + "': reliability outside (0,1]");
        }
        if ((c.kind == Kind::License || c.kind == Kind::Hard) && c.reliability != 1.0) {
            throw Error(Errc::BadReliability,
                        "constraint '" + c.id + "': LICENSE/HARD reliability must be 1.0");
        }
        c.phase = jc.value("phase", c.kind == Kind::License ? 0 : 1);
        if (c.phase < 0) {
            throw Error(Errc::SyntaxError, "constraint '" + c.id + "': negative phase");
        }
        if (c.kind == Kind::License && c.phase != 0) {
            throw Error(Errc::SyntaxError,
                        "constraint '" + c.id + "': LICENSE constraints carry phase 0");
        }
        if (!jc.contains("formula")) {
            throw Error(Errc::SyntaxError, "constraint '" + c.id + "': missing formula");
        }

        FormulaParser parser{g, c.id, c.kind == Kind::Preference};
        const auto& jf = jc["formula"];
        if (c.kind == Kind::Preference) {
            if (!jf.is_array() || jf.size() != 3 || !jf[0].is_string() ||
                jf[0].get<std::string>() != "=>" || !jf[2].is_array() ||
                jf[2].size() != 2 || jf[2][0] != "delete") {
                throw Error(Errc::SyntaxError, "constraint '" + c.id +
                                                   "': preference needs [\"=>\", cond, "
                                                   "[\"delete\", \"y\"|\"z\"]]");
            }
            std::string target = jf[2][1].get<std::string>();
            if (target != "y" && target != "z") {
                throw Error(Errc::SyntaxError,
                            "constraint '" + c.id + "': delete target must be y or z");
            }
            c.pref_target = (target == "y") ? Var::Y : Var::Z;
            c.pref_condition = parser.parse(jf[1]);
            if (expr_uses_via_head(c.pref_condition) || expr_uses_lab(c.pref_condition)) {
                throw Error(Errc::NonlocalFormula,
                            "constraint '" + c.id +
                                "': preference conditions range over node properties only");
            }
            if (expr_mentions_param(c.pref_condition)) {
                throw Error(Errc::SyntaxError,
                            "constraint '" + c.id + "': parameter n outside a DYNAMIC constraint");
            }
        } else {
            if (!jf.is_array() || jf.empty() || jf[0] != "->") {
                throw Error(Errc::SyntaxError,
                            "constraint '" + c.id + "': formula must be an implication");
            }
            c.formula = parser.parse(jf);
            if (c.arity == 1 && (expr_mentions_var(c.formula, Var::Y) ||
                                 expr_mentions_var(c.formula, Var::Z))) {
                throw Error(Errc::NonlocalFormula,
                            "constraint '" + c.id + "': arity-1 formula references y or z");
            }
            bool has_n = expr_mentions_param(c.formula);
            if (c.kind == Kind::Dynamic && !has_n) {
                throw Error(Errc::SyntaxError,
                            "constraint '" + c.id + "': DYNAMIC formula must contain n");
            }
            if (c.kind != Kind::Dynamic && has_n) {
                throw Error(Errc::SyntaxError,
                            "constraint '" + c.id + "': parameter n outside a DYNAMIC constraint");
            }
        }
        c.file_order = order++;
        g.constraints.push_back(std::move(c));
    }

    for (const auto& c : g.constraints) {
        if (c.kind == Kind::Dynamic && g.params.find("beta") == g.params.end()) {
            throw Error(Errc::MissingParam,
                        "constraint '" + c.id + "' is DYNAMIC but no beta is declared");
        }
    }

    if (doc.contains("bigrams")) {
        for (const auto& b : doc["bigrams"]) {
            g.models.bigram[{b.at("head").get<std::string>(), b.at("dep").get<std::string>()}] =
                b.at("w").get<double>();
        }
    }
    if (doc.contains("dominance")) {
        for (const auto& d : doc["dominance"]) {
            int hc = g.category_index(d.at("head_cat").get<std::string>());
            int lb = g.label_index(d.at("label").get<std::string>());
            int dc = g.category_index(d.at("dep_cat").get<std::string>());
            if (hc < 0 || lb < 0 || dc < 0) {
                throw Error(Errc::UndeclaredSymbol, "dominance entry uses undeclared symbols");
            }
            g.models.dominance[{hc, lb, dc}] = d.at("w").get<double>();
        }
    }
    return g;
}

Grammar load_grammar_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::IoError, "cannot open grammar file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_grammar(buf.str());
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

ordered_json ref_to_json(const NodeRef& r) {
    std::string v = r.var == Var::X ? "x" : (r.var == Var::Y ? "y" : "z");
    if (!r.via_head) return v;
    return ordered_json::array({"mod", v});
}

ordered_json num_to_json(const NumTerm& t) {
    ordered_json base;
    switch (t.k) {
        case NumTerm::K::Lit: base = t.lit; break;
        case NumTerm::K::ParamN: base = "n"; break;
        case NumTerm::K::Pos: base = ordered_json::array({"pos", ref_to_json(t.ref)}); break;
        case NumTerm::K::Start: base = ordered_json::array({"start", ref_to_json(t.ref)}); break;
        case NumTerm::K::End: base = ordered_json::array({"end", ref_to_json(t.ref)}); break;
        case NumTerm::K::Conf: base = ordered_json::array({"conf", ref_to_json(t.ref)}); break;
    }
    if (t.addend != 0 && t.k != NumTerm::K::Lit) {
        base = ordered_json::array({"+", base, t.addend});
    }
    if (t.addend_n) base = ordered_json::array({"+", base, "n"});
    return base;
}

ordered_json sym_to_json(const SymTerm& t, const Grammar& g) {
    switch (t.k) {
        case SymTerm::K::Lit:
            return t.is_label ? g.labels[static_cast<size_t>(t.lit)]
                              : g.categories[static_cast<size_t>(t.lit)];
        case SymTerm::K::CatOf:
            return ordered_json::array({"cat", ref_to_json(t.ref)});
        case SymTerm::K::LabOf:
            return ordered_json::array({"lab", ref_to_json(t.ref)});
    }
    return nullptr;
}

ordered_json expr_to_json(const Expr& e, const Grammar& g) {
    switch (e.op) {
        case Expr::Op::And:
        case Expr::Op::Or: {
            ordered_json out = ordered_json::array({e.op == Expr::Op::And ? "and" : "or"});
            for (const auto& k : e.kids) out.push_back(expr_to_json(k, g));
            return out;
        }
        case Expr::Op::Not:
            return ordered_json::array({"not", expr_to_json(e.kids[0], g)});
        case Expr::Op::Implies:
            return ordered_json::array(
                {"->", expr_to_json(e.kids[0], g), expr_to_json(e.kids[1], g)});
        case Expr::Op::NumEq:
            return ordered_json::array({"=", num_to_json(e.num_lhs), num_to_json(e.num_rhs)});
        case Expr::Op::NumNe:
            return ordered_json::array({"!=", num_to_json(e.num_lhs), num_to_json(e.num_rhs)});
        case Expr::Op::NumLt:
            return ordered_json::array({"<", num_to_json(e.num_lhs), num_to_json(e.num_rhs)});
        case Expr::Op::NumLe:
            return ordered_json::array({"<=", num_to_json(e.num_lhs), num_to_json(e.num_rhs)});
        case Expr::Op::SymEq:
            return ordered_json::array(
                {"=", sym_to_json(e.sym_lhs, g), sym_to_json(e.sym_rhs, g)});
        case Expr::Op::SymNe:
            return ordered_json::array(
                {"!=", sym_to_json(e.sym_lhs, g), sym_to_json(e.sym_rhs, g)});
        case Expr::Op::NodeEq:
            return ordered_json::array({"=", ref_to_json(e.node_lhs), ref_to_json(e.node_rhs)});
        case Expr::Op::NodeNe:
            return ordered_json::array({"!=", ref_to_json(e.node_lhs), ref_to_json(e.node_rhs)});
        case Expr::Op::InSet: {
            ordered_json members = ordered_json::array();
            for (int m : e.set_members) {
                members.push_back(e.set_is_label ? g.labels[static_cast<size_t>(m)]
                                                 : g.categories[static_cast<size_t>(m)]);
            }
            return ordered_json::array({"in", sym_to_json(e.sym_lhs, g), members});
        }
        case Expr::Op::Overlap:
            return ordered_json::array(
                {"overlap", ref_to_json(e.node_lhs), ref_to_json(e.node_rhs)});
        case Expr::Op::Precedes:
            return ordered_json::array(
                {"precedes", ref_to_json(e.node_lhs), ref_to_json(e.node_rhs)});
    }
    return nullptr;
}

}  // namespace

std::string serialize_grammar(const Grammar& g) {
    ordered_json doc;
    doc["categories"] = g.categories;
    doc["labels"] = g.labels;
    ordered_json lex = ordered_json::object();
    for (const auto& [form, cats] : g.lexicon) {
        ordered_json names = ordered_json::array();
        for (int c : cats) names.push_back(g.categories[static_cast<size_t>(c)]);
        lex[form] = names;
    }
    doc["lexicon"] = lex;
    doc["params"] = g.params;
    ordered_json arr = ordered_json::array();
    for (const auto& c : g.constraints) {
        ordered_json jc;
        jc["id"] = c.id;
        jc["arity"] = c.arity;
        jc["kind"] = kind_name(c.kind);
        jc["reliability"] = c.reliability;
        jc["phase"] = c.phase;
        if (c.kind == Kind::Preference) {
            jc["formula"] = ordered_json::array(
                {"=>", expr_to_json(c.pref_condition, g),
                 ordered_json::array({"delete", c.pref_target == Var::Y ? "y" : "z"})});
        } else {
            jc["formula"] = expr_to_json(c.formula, g);
        }
        arr.push_back(jc);
    }
    doc["constraints"] = arr;
    if (!g.models.bigram.empty()) {
        ordered_json bg = ordered_json::array();
        for (const auto& [key, w] : g.models.bigram) {
            bg.push_back({{"head", key.first}, {"dep", key.second}, {"w", w}});
        }
        doc["bigrams"] = bg;
    }
    if (!g.models.dominance.empty()) {
        ordered_json dm = ordered_json::array();
        for (const auto& [key, w] : g.models.dominance) {
            dm.push_back({{"head_cat", g.categories[static_cast<size_t>(std::get<0>(key))]},
                          {"label", g.labels[static_cast<size_t>(std::get<1>(key))]},
                          {"dep_cat", g.categories[static_cast<size_t>(std::get<2>(key))]},
                          {"w", w}});
        }
        doc["dominance"] = dm;
    }
    return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Evaluation entry points
// ---------------------------------------------------------------------------

bool eval_unary(const ConstraintDef& c, const ConstraintNetwork& net, NodeId x,
                const ModValue& vx) {
    EvalCtx ctx;
    ctx.net = &net;
    ctx.x = x;
    ctx.vx = &vx;
    return eval_expr(c.formula, ctx);
}

bool eval_binary(const ConstraintDef& c, const ConstraintNetwork& net, NodeId x,
                 const ModValue& vx, NodeId y, const ModValue& vy) {
    EvalCtx ctx;
    ctx.net = &net;
    ctx.x = x;
    ctx.vx = &vx;
    ctx.y = y;
    ctx.vy = &vy;
    return eval_expr(c.formula, ctx);
}

bool eval_pair(const ConstraintDef& c, const ConstraintNetwork& net, NodeId x,
               const ModValue& vx, NodeId y, const ModValue& vy) {
    return eval_binary(c, net, x, vx, y, vy) && eval_binary(c, net, y, vy, x, vx);
}

ConstraintDef instantiate_dynamic(const ConstraintDef& c, double time_fraction_remaining,
                                  const Grammar& g) {
    if (c.kind != Kind::Dynamic) {
        throw Error(Errc::DomainError, "instantiate_dynamic on a non-DYNAMIC constraint");
    }
    double beta = g.require_param("beta");
    double frac = std::clamp(time_fraction_remaining, 0.0, 1.0);
    auto n = static_cast<double>(std::max<long>(1, std::lround(beta * frac)));
    ConstraintDef out = c;
    out.kind = Kind::Hard;
    bind_param(out.formula, n);
    return out;
}

// ---------------------------------------------------------------------------
// Built-ins
// ---------------------------------------------------------------------------

namespace {

Expr node_eq(NodeRef a, NodeRef b) {
    Expr e;
    e.op = Expr::Op::NodeEq;
    e.node_lhs = a;
    e.node_rhs = b;
    return e;
}

Expr overlap_atom(NodeRef a, NodeRef b) {
    Expr e;
    e.op = Expr::Op::Overlap;
    e.node_lhs = a;
    e.node_rhs = b;
    return e;
}

ConstraintDef make_anticycle() {
    // mod(x)=y and mod(y)=x -> x=y
    NodeRef x{Var::X, false}, y{Var::Y, false};
    NodeRef mx{Var::X, true}, my{Var::Y, true};
    Expr ante;
    ante.op = Expr::Op::And;
    ante.kids.push_back(node_eq(mx, y));
    ante.kids.push_back(node_eq(my, x));
    Expr impl;
    impl.op = Expr::Op::Implies;
    impl.kids.push_back(std::move(ante));
    impl.kids.push_back(node_eq(x, y));
    ConstraintDef c;
    c.id = "builtin:anticycle";
    c.arity = 2;
    c.kind = Kind::Hard;
    c.reliability = 1.0;
    c.phase = 1;
    c.file_order = 1000000;  // built-ins queue behind the grammar's own rules
    c.formula = std::move(impl);
    return c;
}

ConstraintDef make_self_overlap() {
    // A value may not name a head its own node overlaps. Decidable from the
    // value alone, so it prunes even while neighbor domains may still grow.
    NodeRef x{Var::X, false};
    NodeRef mx{Var::X, true};
    Expr no;
    no.op = Expr::Op::Not;
    no.kids.push_back(overlap_atom(x, mx));
    ConstraintDef c;
    c.id = "builtin:overlap-self";
    c.arity = 1;
    c.kind = Kind::Hard;
    c.reliability = 1.0;
    c.phase = 1;
    c.file_order = 1000001;
    c.formula = std::move(no);
    return c;
}

ConstraintDef make_overlap() {
    // No pair among {x, mod(x), y, mod(y)} may overlap; NIL heads fall out of
    // the pair set because overlap() on an undefined operand is false.
    NodeRef x{Var::X, false}, y{Var::Y, false};
    NodeRef mx{Var::X, true}, my{Var::Y, true};
    Expr any;
    any.op = Expr::Op::Or;
    any.kids.push_back(overlap_atom(x, mx));
    any.kids.push_back(overlap_atom(x, y));
    any.kids.push_back(overlap_atom(x, my));
    any.kids.push_back(overlap_atom(mx, y));
    any.kids.push_back(overlap_atom(mx, my));
    any.kids.push_back(overlap_atom(y, my));
    Expr no;
    no.op = Expr::Op::Not;
    no.kids.push_back(std::move(any));
    ConstraintDef c;
    c.id = "builtin:overlap";
    c.arity = 2;
    c.kind = Kind::Hard;
    c.reliability = 1.0;
    c.phase = 1;
    c.file_order = 1000002;
    c.formula = std::move(no);
    return c;
}

}  // namespace

const ConstraintDef& builtin_anticycle() {
    static const ConstraintDef c = make_anticycle();
    return c;
}

const ConstraintDef& builtin_overlap() {
    static const ConstraintDef c = make_overlap();
    return c;
}

const ConstraintDef& builtin_self_overlap() {
    static const ConstraintDef c = make_self_overlap();
    return c;
}

void validate_for_mode(const Grammar& g, Mode mode) {
    for (const auto& c : g.constraints) {
        ModeNeeds needs = expr_mode_needs(c.kind == Kind::Preference ? c.pref_condition
                                                                     : c.formula);
        if (mode == Mode::String && needs.intervals) {
            throw Error(Errc::ModeMismatch,
                        "constraint '" + c.id + "' uses interval predicates in string mode");
        }
        if (mode == Mode::Lattice && needs.pos_scalar) {
            throw Error(Errc::ModeMismatch,
                        "constraint '" + c.id +
                            "' uses positional arithmetic, undefined over intervals");
        }
    }
}

}  // namespace cdparse
