#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cdparse/grammar.hpp"
#include "cdparse/propagate.hpp"
#include "cdparse/quality.hpp"

namespace cdparse {

// ---------------------------------------------------------------------------
// The anytime control loop. It repeatedly picks the most ambiguous node with
// pending work, picks a constraint for it, and applies that one constraint at
// that one node. Steps are logged deletions; budget and interrupt checks run
// between deletions.
//
// Constraint eligibility widens with time pressure P: hard constraints are
// always in; heuristic and dynamic ones join at theta_heuristic, preference
// rules at theta_preference. With a step budget P is the prospective fraction
// (steps_done + 1) / max_steps, so tight budgets escalate and generous ones
// never do. With a wall-clock budget P grows by itself; when no work is
// eligible yet, the loop idles forward to the next unlock. Interruptible runs
// carry no pressure; with heuristics enabled they unlock the next tier once
// the current one is exhausted.
// ---------------------------------------------------------------------------

struct Budget {
    std::optional<std::int64_t> wall_ms;
    std::optional<std::int64_t> max_steps;

    static Budget steps(std::int64_t n) { return Budget{std::nullopt, n}; }
    static Budget wall(std::int64_t ms) { return Budget{ms, std::nullopt}; }
};

struct SchedulerState {
    // restrictive-power bookkeeping: applications and deletions per constraint
    std::map<std::string, std::pair<std::int64_t, std::int64_t>> rp;  // id -> (apps, dels)
    // quiescence marks: step counter at last application of (constraint, node)
    std::map<std::pair<std::string, NodeId>, std::int64_t> applied_at;
    bool heur_unlocked = false;  // interruptible sticky escalation
    bool pref_unlocked = false;
    bool heuristics_enabled = true;

    double restrictive_power(const std::string& id) const;
};

// Polled between deletions with the network's current step counter; returning
// true stops the run.
using InterruptFn = std::function<bool(std::int64_t steps_done)>;

struct Emission {
    NodeId node = 0;
    ModValue value;
    bool forced = false;       // node was still ambiguous at emission
    std::int64_t at_ms = 0;    // virtual clock of the emitting tick
};

struct AnytimeResult {
    const Grammar* grammar = nullptr;
    ConstraintNetwork network;
    Status status = Status::Ambiguous;
    QualityTrace trace;
    SchedulerState state;
    std::vector<Emission> emissions;  // lattice runs

    DependencyAnalysis analysis() const { return extract_solution(network); }
};

// Most ambiguous node: maximal domain size, ties to the smallest position /
// earliest interval start, then smallest id. Throws NoAmbiguousNode when all
// domains are singletons.
NodeId select_node(const ConstraintNetwork& net);

// Constraint choice at pressure P over the whole network, honoring the
// state's quiescence marks: eligible tiers by P, then highest restrictive
// power, hard kinds before soft, reliability, phase, file order. Returns
// nullptr when nothing is applicable.
const ConstraintDef* select_constraint(const Grammar& g, const ConstraintNetwork& net,
                                       double pressure, const SchedulerState& state);

// Nonmonotonic preference application at one node: for every pair of values
// with distinct heads matching the rule's condition, the designated target
// value is deleted.
std::vector<DeletionRecord> apply_preference(ConstraintNetwork& net, const Grammar& g,
                                             const ConstraintDef& rule, NodeId node);

// Fuzzy link valuation: geometric mean of node confidence, bigram weight and
// dominance prior, each defaulting to 1.
double score_value(const Grammar& g, const ConstraintNetwork& net, NodeId node,
                   const ModValue& value);

// Drops values scoring below theta_prune_max * pressure, keeping every node's
// top-scored value. Reliability of each record is the deleted value's score.
std::vector<DeletionRecord> prune_low_scores(ConstraintNetwork& net, const Grammar& g,
                                             double pressure);

class AnytimeEngine {
public:
    AnytimeEngine(const Grammar& g, ConstraintNetwork net, RunMode mode,
                  bool heuristics_enabled);

    // Rebuilds an engine from a finished result to continue its run.
    static AnytimeEngine resume(AnytimeResult previous);

    // One contract leg under the given budget; returns at quiescence, budget
    // exhaustion, or loss of ambiguity.
    void run_leg(const Budget& budget);

    // Interruptible run: no budget, poll checked between deletions.
    void run_until(const InterruptFn& interrupt);

    // Lattice driver hooks.
    ConstraintNetwork& net() { return net_; }
    const ConstraintNetwork& net() const { return net_; }
    void invalidate_quiescence();           // after network extension/emission
    void sample_external_deletions();       // after emit/prune deletions
    void add_emission(Emission e) { emissions_.push_back(std::move(e)); }
    void advance_clock(std::int64_t virtual_ms) { external_ms_ = virtual_ms; }
    // While open, arc revision defers to frozen neighbors only; a complete
    // lattice (the default) revises freely.
    void set_stream_open(bool open) { stream_open_ = open; }

    AnytimeResult finish() &&;

private:
    struct Pick {
        const ConstraintDef* def = nullptr;
        NodeId node = kNilNode;
        bool is_dynamic = false;
    };

    double pressure() const;
    bool budget_exhausted() const;
    bool tier_allows(Kind kind, double p) const;
    Pick pick_work(double p) const;
    // applies one constraint at one node; returns false when the budget or
    // interrupt stopped the application mid-way
    bool apply_pick(const Pick& pick, double p, const InterruptFn& interrupt);
    void sample();
    std::int64_t elapsed_ms() const;
    void loop(const InterruptFn& interrupt);

    const Grammar& g_;
    ConstraintNetwork net_;
    RunMode mode_;
    bool heuristics_enabled_;
    double theta_h_, theta_p_;
    SchedulerState state_;
    QualityTrace trace_;
    std::vector<Emission> emissions_;
    Budget budget_;
    std::int64_t leg_steps_ = 0;
    std::int64_t leg_base_ms_ = 0;
    std::chrono::steady_clock::time_point leg_start_{};
    std::int64_t external_ms_ = 0;  // lattice tick clock
    bool stream_open_ = false;
    bool has_dynamics_ = false;
    bool has_heuristics_ = false;
    bool has_preferences_ = false;
};

// Licensing plus an interruptible run over the whole constraint stack.
AnytimeResult run_interruptible(const Grammar& g, const std::vector<WordNode>& nodes,
                                const InterruptFn& interrupt,
                                bool heuristics_enabled = true);

// Licensing plus one contract leg within the budget.
AnytimeResult run_contract(const Grammar& g, const std::vector<WordNode>& nodes,
                           const Budget& budget, bool heuristics_enabled = true);

// Resumes a finished run with a fresh budget; the trace is appended.
AnytimeResult continue_run(AnytimeResult previous, const Budget& extra);

}  // namespace cdparse
