#pragma once

#include <chrono>
#include <optional>
#include <vector>

#include "cdparse/grammar.hpp"

namespace cdparse {

// Builds nodes for a tokenized sentence; category-ambiguous forms yield one
// node per category at the shared surface position.
std::vector<WordNode> make_string_nodes(const Grammar& g,
                                        const std::vector<std::string>& tokens);

// Initial licensing: every (head, label) pair passing all phase-0 LICENSE
// constraints, plus the root value where licensed. A node left with no value
// is reported through check_status; the network is still returned.
ConstraintNetwork license_domains(const Grammar& g, const std::vector<WordNode>& nodes);

// Removes every value failing c across the whole network (or one node).
std::vector<DeletionRecord> apply_unary(ConstraintNetwork& net, const ConstraintDef& c);
std::vector<DeletionRecord> apply_unary_at(ConstraintNetwork& net, const ConstraintDef& c,
                                           NodeId node);

// Arc revision: drops values of x lacking a partner in y's domain under both
// orientations of c.
std::vector<DeletionRecord> revise(ConstraintNetwork& net, NodeId x, const ConstraintDef& c,
                                   NodeId y);

struct StepBudget {
    std::optional<std::int64_t> max_steps;  // counted in logged deletions
    std::optional<std::chrono::steady_clock::time_point> deadline;

    static StepBudget unlimited() { return {}; }
    static StepBudget steps(std::int64_t n) { return {n, std::nullopt}; }
};

struct PropagationOutcome {
    bool fixpoint_reached = false;
    std::vector<DeletionRecord> deletions;
};

// FIFO agenda over (constraint, node[, node]) tasks, re-enqueueing arcs
// incident to nodes that lost values. The anticycle built-in (and, in lattice
// mode, the pairwise overlap built-in) joins the given constraints. Budget
// checks run between deletions; interruption is a normal outcome.
PropagationOutcome propagate(ConstraintNetwork& net,
                             const std::vector<const ConstraintDef*>& constraints,
                             const StepBudget& budget = StepBudget::unlimited());

// Convenience: pointers to every grammar constraint of the given kinds, phase
// then file order.
std::vector<const ConstraintDef*> constraints_of(const Grammar& g,
                                                 std::initializer_list<Kind> kinds);

}  // namespace cdparse
