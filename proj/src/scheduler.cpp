#include "cdparse/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <thread>

#include "cdparse/kernels.hpp"

namespace cdparse {

namespace {

constexpr double kMinLoggedReliability = 1e-9;

int kind_rank(Kind k) {
    switch (k) {
        case Kind::License:
        case Kind::Hard: return 0;
        case Kind::Heuristic:
        case Kind::Dynamic: return 1;
        case Kind::Preference: return 2;
    }
    return 3;
}

// node selection order: most ambiguous first, then leftmost, then lowest id
bool node_before(const ConstraintNetwork& net, NodeId a, NodeId b) {
    size_t sa = net.domain(a).size(), sb = net.domain(b).size();
    if (sa != sb) return sa > sb;
    const WordNode& na = net.node(a);
    const WordNode& nb = net.node(b);
    std::int64_t pa = na.interval ? na.interval->start_ms : na.position;
    std::int64_t pb = nb.interval ? nb.interval->start_ms : nb.position;
    if (pa != pb) return pa < pb;
    return a < b;
}

struct ChoiceKey {
    double rp;
    int rank;
    double reliability;
    int phase;
    int file_order;
};

bool choice_before(const ChoiceKey& a, const ChoiceKey& b) {
    if (a.rp != b.rp) return a.rp > b.rp;
    if (a.rank != b.rank) return a.rank < b.rank;
    if (a.reliability != b.reliability) return a.reliability > b.reliability;
    if (a.phase != b.phase) return a.phase < b.phase;
    return a.file_order < b.file_order;
}

ChoiceKey key_of(const ConstraintDef& c, const SchedulerState& st) {
    return ChoiceKey{st.restrictive_power(c.id), kind_rank(c.kind), c.reliability, c.phase,
                     c.file_order};
}

std::vector<const ConstraintDef*> schedulable_constraints(const Grammar& g, Mode mode) {
    std::vector<const ConstraintDef*> out;
    for (const auto& c : g.constraints) {
        if (c.kind == Kind::License) continue;
        out.push_back(&c);
    }
    out.push_back(&builtin_anticycle());
    if (mode == Mode::Lattice) {
        out.push_back(&builtin_self_overlap());
        out.push_back(&builtin_overlap());
    }
    return out;
}

std::vector<ModValue> unary_victims(const ConstraintNetwork& net, const ConstraintDef& c,
                                    NodeId node) {
    std::vector<ModValue> out;
    for (const auto& v : net.domain(node)) {
        if (!eval_unary(c, net, node, v)) out.push_back(v);
    }
    return out;
}

std::vector<ModValue> revise_victims(const ConstraintNetwork& net, NodeId x,
                                     const ConstraintDef& c, NodeId y) {
    auto mask = kernels::support_mask(c, net, x, net.domain(x), y, net.domain(y));
    std::vector<ModValue> out;
    const auto& dom = net.domain(x);
    for (std::size_t i = 0; i < dom.size(); ++i) {
        if (!mask[i]) out.push_back(dom[i]);
    }
    return out;
}

std::vector<ModValue> preference_victims(const ConstraintNetwork& net,
                                         const ConstraintDef& rule, NodeId node) {
    std::set<ModValue> victims;
    const auto& dom = net.domain(node);
    for (const auto& first : dom) {
        for (const auto& second : dom) {
            if (first.head == kNilNode || second.head == kNilNode) continue;
            if (first.head == second.head) continue;
            EvalCtx ctx;
            ctx.net = &net;
            ctx.x = node;
            ctx.y = first.head;
            ctx.z = second.head;
            ctx.heads_direct = true;
            if (eval_expr(rule.pref_condition, ctx)) {
                victims.insert(rule.pref_target == Var::Y ? first : second);
            }
        }
    }
    return {victims.begin(), victims.end()};
}

}  // namespace

double SchedulerState::restrictive_power(const std::string& id) const {
    auto it = rp.find(id);
    if (it == rp.end() || it->second.first == 0) return 1.0;
    return static_cast<double>(it->second.second) / static_cast<double>(it->second.first);
}

NodeId select_node(const ConstraintNetwork& net) {
    NodeId best = kNilNode;
    for (NodeId i = 0; i < net.node_count(); ++i) {
        if (net.domain(i).size() < 2) continue;
        if (best == kNilNode || node_before(net, i, best)) best = i;
    }
    if (best == kNilNode) {
        throw Error(Errc::NoAmbiguousNode, "all domains are singletons");
    }
    return best;
}

const ConstraintDef* select_constraint(const Grammar& g, const ConstraintNetwork& net,
                                       double pressure, const SchedulerState& state) {
    double theta_h = g.param_or("theta_heuristic", 0.5);
    double theta_p = g.param_or("theta_preference", 0.8);
    const ConstraintDef* best = nullptr;
    ChoiceKey best_key{};
    for (const auto* c : schedulable_constraints(g, net.mode())) {
        if (kind_rank(c->kind) == 1 && pressure < theta_h) continue;
        if (c->kind == Kind::Preference && pressure < theta_p) continue;
        bool applicable = false;
        for (NodeId v = 0; v < net.node_count() && !applicable; ++v) {
            if (net.emitted(v)) continue;
            auto it = state.applied_at.find({c->id, v});
            applicable = (it == state.applied_at.end() || it->second < net.step_counter());
        }
        if (!applicable) continue;
        ChoiceKey key = key_of(*c, state);
        if (best == nullptr || choice_before(key, best_key)) {
            best = c;
            best_key = key;
        }
    }
    return best;
}

std::vector<DeletionRecord> apply_preference(ConstraintNetwork& net, const Grammar&,
                                             const ConstraintDef& rule, NodeId node) {
    if (rule.kind != Kind::Preference) {
        throw Error(Errc::DomainError, "apply_preference on a non-PREFERENCE rule");
    }
    std::vector<DeletionRecord> records;
    for (const auto& v : preference_victims(net, rule, node)) {
        if (net.erase_value(node, v, rule.id, rule.reliability)) {
            records.push_back(net.deletion_log().back());
        }
    }
    return records;
}

double score_value(const Grammar& g, const ConstraintNetwork& net, NodeId node,
                   const ModValue& value) {
    const WordNode& dep = net.node(node);
    double conf = dep.confidence;
    double bigram = 1.0, dominance = 1.0;
    if (value.head != kNilNode) {
        const WordNode& head = net.node(value.head);
        bigram = g.models.bigram_weight(head.form, dep.form);
        dominance = g.models.dominance_prior(head.category, value.label, dep.category);
    }
    return std::cbrt(conf * bigram * dominance);
}

std::vector<DeletionRecord> prune_low_scores(ConstraintNetwork& net, const Grammar& g,
                                             double pressure) {
    double theta = g.param_or("theta_prune_max", 0.5) * std::clamp(pressure, 0.0, 1.0);
    std::vector<DeletionRecord> records;
    for (NodeId v = 0; v < net.node_count(); ++v) {
        if (net.emitted(v) || net.domain(v).size() < 2) continue;
        const auto dom = net.domain(v);
        std::vector<double> scores(dom.size());
        std::size_t top = 0;
        for (std::size_t i = 0; i < dom.size(); ++i) {
            scores[i] = score_value(g, net, v, dom[i]);
            if (scores[i] > scores[top]) top = i;
        }
        for (std::size_t i = 0; i < dom.size(); ++i) {
            if (i == top || scores[i] >= theta) continue;
            if (net.erase_value(v, dom[i], "prune",
                                std::max(scores[i], kMinLoggedReliability))) {
                records.push_back(net.deletion_log().back());
            }
        }
    }
    return records;
}

// ---------------------------------------------------------------------------
// AnytimeEngine
// ---------------------------------------------------------------------------

AnytimeEngine::AnytimeEngine(const Grammar& g, ConstraintNetwork net, RunMode mode,
                             bool heuristics_enabled)
    : g_(g),
      net_(std::move(net)),
      mode_(mode),
      heuristics_enabled_(heuristics_enabled),
      theta_h_(g.param_or("theta_heuristic", 0.5)),
      theta_p_(g.param_or("theta_preference", 0.8)) {
    trace_.mode = mode;
    for (const auto& c : g_.constraints) {
        if (c.kind == Kind::Dynamic) has_dynamics_ = true;
        if (c.kind == Kind::Heuristic) has_heuristics_ = true;
        if (c.kind == Kind::Preference) has_preferences_ = true;
    }
    state_.heuristics_enabled = heuristics_enabled;
    leg_start_ = std::chrono::steady_clock::now();
    sample();  // step-0 baseline
}

AnytimeEngine AnytimeEngine::resume(AnytimeResult previous) {
    if (previous.grammar == nullptr) {
        throw Error(Errc::DomainError, "result carries no grammar to resume with");
    }
    AnytimeEngine e(*previous.grammar, std::move(previous.network), previous.trace.mode,
                    previous.state.heuristics_enabled);
    e.trace_ = std::move(previous.trace);  // drop the fresh baseline, keep history
    e.state_ = std::move(previous.state);
    e.emissions_ = std::move(previous.emissions);
    return e;
}

std::int64_t AnytimeEngine::elapsed_ms() const {
    if (net_.mode() == Mode::Lattice) return external_ms_;
    if (budget_.wall_ms) {
        auto real = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - leg_start_)
                        .count();
        return leg_base_ms_ + real;
    }
    return net_.step_counter();  // virtual clock: one step, one tick
}

void AnytimeEngine::sample() {
    double a = ambiguity_measure(net_);
    double r = mean_reliability(net_.deletion_log());
    QualitySample s;
    s.step = net_.step_counter();
    s.elapsed_ms = elapsed_ms();
    s.a = a;
    s.r = r;
    s.q = quality(a, r);
    trace_.samples.push_back(s);
}

void AnytimeEngine::sample_external_deletions() {
    if (!trace_.samples.empty() &&
        trace_.samples.back().step == net_.step_counter()) {
        return;  // nothing was deleted
    }
    sample();
}

void AnytimeEngine::invalidate_quiescence() { state_.applied_at.clear(); }

double AnytimeEngine::pressure() const {
    double p = 0.0;
    if (budget_.max_steps && *budget_.max_steps > 0) {
        p = std::max(p, static_cast<double>(leg_steps_ + 1) /
                            static_cast<double>(*budget_.max_steps));
    }
    if (budget_.wall_ms && *budget_.wall_ms > 0) {
        auto real = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - leg_start_)
                        .count();
        p = std::max(p, static_cast<double>(real) / static_cast<double>(*budget_.wall_ms));
    }
    return std::min(p, 1.0);
}

bool AnytimeEngine::budget_exhausted() const {
    if (budget_.max_steps && leg_steps_ >= *budget_.max_steps) return true;
    if (budget_.wall_ms) {
        auto real = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - leg_start_)
                        .count();
        if (real >= *budget_.wall_ms) return true;
    }
    return false;
}

bool AnytimeEngine::tier_allows(Kind kind, double p) const {
    switch (kind_rank(kind)) {
        case 0: return true;
        case 1:
            if (!heuristics_enabled_) return false;
            if (kind == Kind::Dynamic && mode_ != RunMode::Contract) return false;
            if (mode_ == RunMode::Contract) return p >= theta_h_;
            return state_.heur_unlocked;
        case 2:
            if (!heuristics_enabled_) return false;
            if (mode_ == RunMode::Contract) return p >= theta_p_;
            return state_.pref_unlocked;
        default: return false;
    }
}

AnytimeEngine::Pick AnytimeEngine::pick_work(double p) const {
    std::vector<NodeId> order;
    for (NodeId v = 0; v < net_.node_count(); ++v) {
        if (!net_.emitted(v) && !net_.domain(v).empty()) order.push_back(v);
    }
    std::sort(order.begin(), order.end(),
              [this](NodeId a, NodeId b) { return node_before(net_, a, b); });

    auto constraints = schedulable_constraints(g_, net_.mode());
    for (NodeId v : order) {
        const ConstraintDef* best = nullptr;
        ChoiceKey best_key{};
        for (const auto* c : constraints) {
            if (!tier_allows(c->kind, p)) continue;
            std::string key = c->id;
            if (c->kind == Kind::Dynamic) {
                // a changed bound makes the instance fresh again
                double beta = g_.param_or("beta", 1.0);
                long n = std::max<long>(1, std::lround(beta * (1.0 - p)));
                key += "@" + std::to_string(n);
            }
            auto it = state_.applied_at.find({key, v});
            if (it != state_.applied_at.end() && it->second >= net_.step_counter()) continue;
            ChoiceKey ck = key_of(*c, state_);
            if (best == nullptr || choice_before(ck, best_key)) {
                best = c;
                best_key = ck;
            }
        }
        if (best != nullptr) return Pick{best, v, best->kind == Kind::Dynamic};
    }
    return Pick{};
}

bool AnytimeEngine::apply_pick(const Pick& pick, double p,
                               const InterruptFn& interrupt) {
    const ConstraintDef* def = pick.def;
    ConstraintDef dynamic_instance;
    std::string quiescence_key = def->id;
    if (pick.is_dynamic) {
        dynamic_instance = instantiate_dynamic(*def, 1.0 - p, g_);
        double beta = g_.param_or("beta", 1.0);
        long n = std::max<long>(1, std::lround(beta * (1.0 - p)));
        quiescence_key += "@" + std::to_string(n);
        def = &dynamic_instance;
    }

    std::vector<ModValue> victims;
    std::int64_t deleted = 0;
    bool stopped = false;
    auto delete_batch = [&](const std::vector<ModValue>& batch) {
        for (const auto& v : batch) {
            if (budget_exhausted() || (interrupt && interrupt(net_.step_counter()))) {
                stopped = true;
                return;
            }
            if (net_.erase_value(pick.node, v, def->id, def->reliability)) {
                ++deleted;
                ++leg_steps_;
                sample();
            }
        }
    };

    if (def->kind == Kind::Preference) {
        delete_batch(preference_victims(net_, *def, pick.node));
    } else if (def->arity == 1) {
        delete_batch(unary_victims(net_, *def, pick.node));
    } else {
        for (NodeId u = 0; u < net_.node_count() && !stopped; ++u) {
            if (u == pick.node) continue;
            if (net_.mode() == Mode::Lattice) {
                // While input may still arrive, open neighbors can gain
                // values that would support what current revision would
                // delete; only frozen neighbors are sound evidence. Empty
                // neighbors are dead competitors, not constraint sources.
                bool closed = net_.emitted(u) || !stream_open_;
                if (!closed || net_.domain(u).empty()) continue;
            }
            delete_batch(revise_victims(net_, pick.node, *def, u));
        }
    }

    if (!stopped) {
        // an interrupted batch keeps its victims pending for the next leg
        state_.applied_at[{quiescence_key, pick.node}] = net_.step_counter();
        auto& rp = state_.rp[pick.def->id];
        rp.first += 1;
        rp.second += deleted;
    }
    return !stopped;
}

void AnytimeEngine::loop(const InterruptFn& interrupt) {
    for (;;) {
        if (net_.mode() == Mode::String) {
            // a lattice run keeps filtering around dead hypotheses instead
            if (check_status(net_) != Status::Ambiguous) return;
        }
        if (interrupt && interrupt(net_.step_counter())) return;
        if (budget_exhausted()) return;
        double p = pressure();
        Pick pick = pick_work(p);
        if (pick.def == nullptr) {
            // Nothing applicable at this tier. Contract runs on a wall clock
            // idle forward to the next unlock; interruptible runs with
            // heuristics enabled unlock the next tier outright.
            if (mode_ == RunMode::Contract && heuristics_enabled_ && budget_.wall_ms) {
                // only wait for tiers that hold actual constraints
                bool heur_locked = p < theta_h_ && (has_heuristics_ || has_dynamics_);
                bool pref_locked = p < theta_p_ && has_preferences_;
                double next = heur_locked ? theta_h_ : (pref_locked ? theta_p_ : -1.0);
                if (next < 0.0) return;
                auto target = leg_start_ + std::chrono::milliseconds(static_cast<std::int64_t>(
                                               std::ceil(next * *budget_.wall_ms)));
                while (std::chrono::steady_clock::now() < target) {
                    if (interrupt && interrupt(net_.step_counter())) return;
                    std::this_thread::sleep_for(std::chrono::milliseconds(1));
                }
                continue;
            }
            if (mode_ == RunMode::Interruptible && heuristics_enabled_) {
                if (!state_.heur_unlocked && has_heuristics_) {
                    state_.heur_unlocked = true;
                    continue;
                }
                if (!state_.pref_unlocked && has_preferences_) {
                    state_.heur_unlocked = true;
                    state_.pref_unlocked = true;
                    continue;
                }
            }
            return;
        }
        if (!apply_pick(pick, p, interrupt)) return;
    }
}

void AnytimeEngine::run_leg(const Budget& budget) {
    budget_ = budget;
    leg_steps_ = 0;
    leg_start_ = std::chrono::steady_clock::now();
    leg_base_ms_ = trace_.samples.empty() ? 0 : trace_.samples.back().elapsed_ms;
    loop(nullptr);
}

void AnytimeEngine::run_until(const InterruptFn& interrupt) {
    budget_ = Budget{};
    leg_steps_ = 0;
    leg_start_ = std::chrono::steady_clock::now();
    leg_base_ms_ = trace_.samples.empty() ? 0 : trace_.samples.back().elapsed_ms;
    loop(interrupt);
}

AnytimeResult AnytimeEngine::finish() && {
    AnytimeResult out;
    out.grammar = &g_;
    out.status = check_status(net_);
    out.network = std::move(net_);
    out.trace = std::move(trace_);
    out.state = std::move(state_);
    out.emissions = std::move(emissions_);
    return out;
}

AnytimeResult run_interruptible(const Grammar& g, const std::vector<WordNode>& nodes,
                                const InterruptFn& interrupt,
                                bool heuristics_enabled) {
    AnytimeEngine engine(g, license_domains(g, nodes), RunMode::Interruptible,
                         heuristics_enabled);
    engine.run_until(interrupt);
    return std::move(engine).finish();
}

AnytimeResult run_contract(const Grammar& g, const std::vector<WordNode>& nodes,
                           const Budget& budget, bool heuristics_enabled) {
    if (!budget.wall_ms && !budget.max_steps) {
        throw Error(Errc::DomainError, "contract mode needs a wall-clock or step budget");
    }
    AnytimeEngine engine(g, license_domains(g, nodes), RunMode::Contract,
                         heuristics_enabled);
    engine.run_leg(budget);
    return std::move(engine).finish();
}

AnytimeResult continue_run(AnytimeResult previous, const Budget& extra) {
    AnytimeEngine engine = AnytimeEngine::resume(std::move(previous));
    engine.run_leg(extra);
    return std::move(engine).finish();
}

}  // namespace cdparse
