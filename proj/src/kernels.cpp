#include "cdparse/kernels.hpp"

#include <algorithm>
#include <atomic>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cdparse::kernels {

namespace {
std::atomic<bool> g_force_parallel{false};
}

void set_force_parallel(bool on) { g_force_parallel.store(on); }
bool force_parallel() { return g_force_parallel.load(); }

std::vector<char> support_mask_serial(const ConstraintDef& c, const ConstraintNetwork& net,
                                      NodeId x, const std::vector<ModValue>& xdom,
                                      NodeId y, const std::vector<ModValue>& ydom) {
    std::vector<char> mask(xdom.size(), 0);
    for (std::size_t i = 0; i < xdom.size(); ++i) {
        for (const auto& vy : ydom) {
            if (eval_pair(c, net, x, xdom[i], y, vy)) {
                mask[i] = 1;
                break;
            }
        }
    }
    return mask;
}

std::vector<char> support_mask_parallel(const ConstraintDef& c, const ConstraintNetwork& net,
                                        NodeId x, const std::vector<ModValue>& xdom,
                                        NodeId y, const std::vector<ModValue>& ydom) {
    std::vector<char> mask(xdom.size(), 0);
    const auto n = static_cast<std::int64_t>(xdom.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        for (const auto& vy : ydom) {
            if (eval_pair(c, net, x, xdom[static_cast<std::size_t>(i)], y, vy)) {
                mask[static_cast<std::size_t>(i)] = 1;
                break;
            }
        }
    }
    return mask;
}

std::vector<char> support_mask(const ConstraintDef& c, const ConstraintNetwork& net,
                               NodeId x, const std::vector<ModValue>& xdom,
                               NodeId y, const std::vector<ModValue>& ydom) {
    if (force_parallel() || xdom.size() * ydom.size() >= kParallelThreshold) {
        return support_mask_parallel(c, net, x, xdom, y, ydom);
    }
    return support_mask_serial(c, net, x, xdom, y, ydom);
}

std::uint64_t AssignmentSpace::size() const {
    std::uint64_t total = 1;
    for (const auto& d : *domains) total *= static_cast<std::uint64_t>(d.size());
    return total;
}

void AssignmentSpace::decode(std::uint64_t index, std::vector<ModValue>& out) const {
    out.resize(domains->size());
    for (std::size_t i = domains->size(); i-- > 0;) {
        const auto& d = (*domains)[i];
        out[i] = d[static_cast<std::size_t>(index % d.size())];
        index /= d.size();
    }
}

bool AssignmentSpace::check(const std::vector<ModValue>& assignment) const {
    const int n = static_cast<int>(assignment.size());
    for (NodeId i = 0; i < n; ++i) {
        for (const auto* c : unary) {
            if (!eval_unary(*c, *net, i, assignment[static_cast<std::size_t>(i)])) return false;
        }
    }
    for (NodeId i = 0; i < n; ++i) {
        for (NodeId j = i + 1; j < n; ++j) {
            for (const auto* c : binary) {
                if (!eval_pair(*c, *net, i, assignment[static_cast<std::size_t>(i)], j,
                               assignment[static_cast<std::size_t>(j)])) {
                    return false;
                }
            }
        }
    }
    // tree validity: exactly one root, no cycles
    int roots = 0;
    for (const auto& v : assignment) {
        if (v.head == kNilNode) ++roots;
    }
    if (roots != 1) return false;
    for (NodeId start = 0; start < n; ++start) {
        NodeId cur = start;
        int hops = 0;
        while (cur != kNilNode) {
            cur = assignment[static_cast<std::size_t>(cur)].head;
            if (++hops > n) return false;
        }
    }
    return true;
}

std::vector<std::uint64_t> assignment_scan_serial(const AssignmentSpace& space) {
    std::vector<std::uint64_t> hits;
    const std::uint64_t total = space.size();
    std::vector<ModValue> scratch;
    for (std::uint64_t idx = 0; idx < total; ++idx) {
        space.decode(idx, scratch);
        if (space.check(scratch)) hits.push_back(idx);
    }
    return hits;
}

std::vector<std::uint64_t> assignment_scan_parallel(const AssignmentSpace& space) {
    const std::uint64_t total = space.size();
    std::vector<std::vector<std::uint64_t>> partial;
#ifdef _OPENMP
    const int max_threads = omp_get_max_threads();
#else
    const int max_threads = 1;
#endif
    partial.resize(static_cast<std::size_t>(max_threads));
#pragma omp parallel
    {
#ifdef _OPENMP
        const int tid = omp_get_thread_num();
#else
        const int tid = 0;
#endif
        auto& mine = partial[static_cast<std::size_t>(tid)];
        std::vector<ModValue> scratch;
#pragma omp for schedule(static)
        for (std::int64_t idx = 0; idx < static_cast<std::int64_t>(total); ++idx) {
            space.decode(static_cast<std::uint64_t>(idx), scratch);
            if (space.check(scratch)) mine.push_back(static_cast<std::uint64_t>(idx));
        }
    }
    std::vector<std::uint64_t> hits;
    for (auto& p : partial) hits.insert(hits.end(), p.begin(), p.end());
    std::sort(hits.begin(), hits.end());
    return hits;
}

std::vector<std::uint64_t> assignment_scan(const AssignmentSpace& space) {
    if (force_parallel() || space.size() >= kParallelThreshold) {
        return assignment_scan_parallel(space);
    }
    return assignment_scan_serial(space);
}

}  // namespace cdparse::kernels
