#pragma once

#include <cstdint>
#include <vector>

#include "cdparse/grammar.hpp"

namespace cdparse::kernels {

// Data-parallel inner loops. Each kernel has a serial reference and an OpenMP
// variant producing identical results; the dispatching entry points pick the
// parallel path for large inputs only. cdparse_bench compares the two.

// Minimum element count before the parallel paths engage.
inline constexpr std::size_t kParallelThreshold = 4096;

void set_force_parallel(bool on);  // test hook
bool force_parallel();

// mask[i] = 1 iff xdom[i] has a partner in ydom satisfying both orientations
// of the binary constraint c.
std::vector<char> support_mask_serial(const ConstraintDef& c, const ConstraintNetwork& net,
                                      NodeId x, const std::vector<ModValue>& xdom,
                                      NodeId y, const std::vector<ModValue>& ydom);
std::vector<char> support_mask_parallel(const ConstraintDef& c, const ConstraintNetwork& net,
                                        NodeId x, const std::vector<ModValue>& xdom,
                                        NodeId y, const std::vector<ModValue>& ydom);
std::vector<char> support_mask(const ConstraintDef& c, const ConstraintNetwork& net,
                               NodeId x, const std::vector<ModValue>& xdom,
                               NodeId y, const std::vector<ModValue>& ydom);

// Exhaustive scan over the mixed-radix assignment space spanned by `domains`.
// Checks every unary and pairwise constraint in both orientations plus tree
// validity, returning the satisfying flat indices in ascending order.
struct AssignmentSpace {
    const ConstraintNetwork* net = nullptr;
    const std::vector<std::vector<ModValue>>* domains = nullptr;
    std::vector<const ConstraintDef*> unary;
    std::vector<const ConstraintDef*> binary;

    std::uint64_t size() const;
    void decode(std::uint64_t index, std::vector<ModValue>& out) const;
    bool check(const std::vector<ModValue>& assignment) const;
};

std::vector<std::uint64_t> assignment_scan_serial(const AssignmentSpace& space);
std::vector<std::uint64_t> assignment_scan_parallel(const AssignmentSpace& space);
std::vector<std::uint64_t> assignment_scan(const AssignmentSpace& space);

}  // namespace cdparse::kernels
