#pragma once

#include <string>
#include <vector>

#include "cdparse/scheduler.hpp"

namespace cdparse {

// Interval order: a precedes b when a ends no later than b starts; touching
// intervals precede, zero-length intersections never overlap. Both throw
// ModeMismatch on nodes without intervals.
bool precedes(const WordNode& a, const WordNode& b);
bool overlap(const WordNode& a, const WordNode& b);

// The pairwise overlap condition over {x, head(x), y, head(y)} evaluated for
// one value pair (the built-in binary used by lattice propagation).
bool overlap_constraint(const ConstraintNetwork& net, NodeId x, const ModValue& vx,
                        NodeId y, const ModValue& vy);

struct StreamEvent {
    std::int64_t arrival_ms = 0;  // clock time the hypothesis becomes available
    WordNode hypothesis;          // interval + confidence set; ext_id is the file id
};

struct Horizon {
    std::int64_t window_ms = 0;  // revisable span behind the newest input
};

// Adds the hypothesis with its licensed domain and extends unemitted nodes
// with newly licensed values headed at it. Initial domain sizes grow with the
// additions, keeping ambiguity_measure within [0,1]. Returns the added
// (node, value) pairs.
std::vector<std::pair<NodeId, ModValue>> extend_network(ConstraintNetwork& net,
                                                        WordNode hypothesis,
                                                        const Grammar& g);

// Finalizes every unemitted node whose interval ends at or before
// now - window: singleton domains emit as-is, ambiguous ones emit their
// best-scored value with the forced deletions logged at their scores.
std::vector<Emission> emit_expired(ConstraintNetwork& net, const Grammar& g,
                                   std::int64_t now_ms, const Horizon& horizon);

// Time-synchronous replay: ingest arrivals, run a contract leg per tick,
// prune low scores under horizon urgency, emit expired nodes, then flush.
AnytimeResult simulate_stream(const std::vector<StreamEvent>& events, const Grammar& g,
                              const Horizon& horizon, const Budget& budget_per_tick,
                              bool heuristics_enabled = true);

// JSONL lattice input: one hypothesis object per line, sorted by arrival_ms.
std::vector<StreamEvent> parse_lattice(const std::string& text, const Grammar& g);
std::vector<StreamEvent> load_lattice_file(const std::string& path, const Grammar& g);

}  // namespace cdparse
