#include "cdparse/oracle.hpp"

#include "cdparse/kernels.hpp"
#include "cdparse/propagate.hpp"

namespace cdparse {

OracleResult oracle_enumerate_network(const Grammar& g, const ConstraintNetwork& net,
                                      bool include_heuristics) {
    std::vector<std::vector<ModValue>> domains;
    domains.reserve(static_cast<std::size_t>(net.node_count()));
    for (NodeId i = 0; i < net.node_count(); ++i) domains.push_back(net.domain(i));

    std::uint64_t product = 1;
    for (const auto& d : domains) {
        if (d.empty()) return {};  // no completion exists
        if (product > kOracleGuard / d.size()) {
            throw Error(Errc::TooLarge, "assignment space exceeds the enumeration guard");
        }
        product *= d.size();
    }

    kernels::AssignmentSpace space;
    space.net = &net;
    space.domains = &domains;
    auto kinds = include_heuristics
                     ? constraints_of(g, {Kind::Hard, Kind::Heuristic})
                     : constraints_of(g, {Kind::Hard});
    for (const auto* c : kinds) {
        (c->arity == 1 ? space.unary : space.binary).push_back(c);
    }
    if (net.mode() == Mode::Lattice) space.binary.push_back(&builtin_overlap());
    // two-cycles are already excluded by the tree check

    OracleResult out;
    std::vector<ModValue> scratch;
    for (std::uint64_t idx : kernels::assignment_scan(space)) {
        space.decode(idx, scratch);
        out.assignments.push_back(scratch);
    }
    return out;
}

OracleResult oracle_enumerate(const Grammar& g, const std::vector<WordNode>& nodes,
                              bool include_heuristics) {
    ConstraintNetwork net = license_domains(g, nodes);
    return oracle_enumerate_network(g, net, include_heuristics);
}

}  // namespace cdparse
