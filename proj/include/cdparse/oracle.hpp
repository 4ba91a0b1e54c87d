#pragma once

#include <cstdint>
#include <vector>

#include "cdparse/grammar.hpp"

namespace cdparse {

struct OracleResult {
    // One entry per complete consistent assignment, node order = network order.
    std::vector<std::vector<ModValue>> assignments;
};

inline constexpr std::uint64_t kOracleGuard = 1'000'000;

// Exhaustive enumeration over the licensed domains: keeps assignments that
// satisfy every HARD (and, when asked, HEURISTIC) constraint unarily and
// pairwise plus tree validity. Checks values directly against the formulas —
// no agenda, no revision — so it is an independent witness for the
// propagation path. Throws TooLarge past the guard.
OracleResult oracle_enumerate(const Grammar& g, const std::vector<WordNode>& nodes,
                              bool include_heuristics);

// Same enumeration over an already-licensed network (used after extensions).
OracleResult oracle_enumerate_network(const Grammar& g, const ConstraintNetwork& net,
                                      bool include_heuristics);

}  // namespace cdparse
