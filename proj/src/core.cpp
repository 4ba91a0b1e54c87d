#include "cdparse/core.hpp"

#include <algorithm>

namespace cdparse {

const char* errc_name(Errc code) {
    switch (code) {
        case Errc::UnknownForm: return "UNKNOWN_FORM";
        case Errc::SyntaxError: return "SYNTAX_ERROR";
        case Errc::UndeclaredSymbol: return "UNDECLARED_SYMBOL";
        case Errc::BadReliability: return "BAD_RELIABILITY";
        case Errc::NonlocalFormula: return "NONLOCAL_FORMULA";
        case Errc::MissingParam: return "MISSING_PARAM";
        case Errc::EmptyDomain: return "EMPTY_DOMAIN";
        case Errc::Inconsistent: return "INCONSISTENT";
        case Errc::MalformedTree: return "MALFORMED_TREE";
        case Errc::TooLarge: return "TOO_LARGE";
        case Errc::DuplicateId: return "DUPLICATE_ID";
        case Errc::UnsortedEvents: return "UNSORTED_EVENTS";
        case Errc::ModeMismatch: return "MODE_MISMATCH";
        case Errc::DomainError: return "DOMAIN_ERROR";
        case Errc::NoAmbiguousNode: return "NO_AMBIGUOUS_NODE";
        case Errc::NoApplicableConstraint: return "NO_APPLICABLE_CONSTRAINT";
        case Errc::IoError: return "IO_ERROR";
    }
    return "UNKNOWN";
}

const char* status_name(Status s) {
    switch (s) {
        case Status::Unique: return "UNIQUE";
        case Status::Ambiguous: return "AMBIGUOUS";
        case Status::Inconsistent: return "INCONSISTENT";
    }
    return "UNKNOWN";
}

void ConstraintNetwork::add_node(WordNode n) {
    if (n.id != node_count()) {
        throw Error(Errc::DuplicateId, "node id must be dense: expected " +
                                           std::to_string(node_count()));
    }
    if (mode_ == Mode::String && n.interval.has_value()) {
        throw Error(Errc::ModeMismatch, "interval on a string-mode node");
    }
    if (mode_ == Mode::Lattice && !n.interval.has_value()) {
        throw Error(Errc::ModeMismatch, "lattice-mode node without interval");
    }
    nodes_.push_back(std::move(n));
    domains_.emplace_back();
    initial_sizes_.push_back(0);
    emitted_.push_back(false);
}

void ConstraintNetwork::admit_value(NodeId id, ModValue v) {
    if (v.head == id) {
        throw Error(Errc::DomainError, "value may not name its own node as head");
    }
    auto& dom = domains_.at(static_cast<size_t>(id));
    auto it = std::lower_bound(dom.begin(), dom.end(), v);
    if (it != dom.end() && *it == v) return;
    dom.insert(it, v);
    initial_sizes_[static_cast<size_t>(id)] += 1;
}

bool ConstraintNetwork::contains(NodeId id, const ModValue& v) const {
    const auto& dom = domains_.at(static_cast<size_t>(id));
    return std::binary_search(dom.begin(), dom.end(), v);
}

bool ConstraintNetwork::erase_value(NodeId id, const ModValue& v,
                                    const std::string& constraint_id,
                                    double reliability) {
    auto& dom = domains_.at(static_cast<size_t>(id));
    auto it = std::lower_bound(dom.begin(), dom.end(), v);
    if (it == dom.end() || !(*it == v)) return false;
    dom.erase(it);
    log_.push_back(DeletionRecord{step_counter() + 1, id, v, constraint_id, reliability});
    return true;
}

void ConstraintNetwork::mark_emitted(NodeId id) {
    emitted_.at(static_cast<size_t>(id)) = true;
    const auto& n = node(id);
    if (n.interval && n.interval->end_ms > emitted_frontier_ms_) {
        emitted_frontier_ms_ = n.interval->end_ms;
    }
}

std::vector<NodeId> ConstraintNetwork::empty_nodes() const {
    std::vector<NodeId> out;
    for (NodeId i = 0; i < node_count(); ++i) {
        if (domains_[static_cast<size_t>(i)].empty()) out.push_back(i);
    }
    return out;
}

Status check_status(const ConstraintNetwork& net) {
    bool all_singleton = true;
    for (NodeId i = 0; i < net.node_count(); ++i) {
        size_t sz = net.domain(i).size();
        if (sz == 0) return Status::Inconsistent;
        if (sz > 1) all_singleton = false;
    }
    return all_singleton ? Status::Unique : Status::Ambiguous;
}

DependencyAnalysis extract_solution(const ConstraintNetwork& net) {
    DependencyAnalysis out;
    for (NodeId i = 0; i < net.node_count(); ++i) {
        const auto& dom = net.domain(i);
        if (dom.empty()) {
            throw Error(Errc::Inconsistent,
                        "empty domain at node " + std::to_string(i) + " (" +
                            net.node(i).form + ")");
        }
        if (dom.size() == 1) {
            out.resolved.push_back(ResolvedNode{i, dom.front()});
        } else {
            out.unresolved.push_back(UnresolvedNode{i, dom});
        }
    }
    out.complete = out.unresolved.empty();
    if (!out.complete || net.node_count() == 0) return out;

    // Tree validation on the induced assignment: one root, no cycles.
    int roots = 0;
    for (const auto& r : out.resolved) {
        if (r.value.head == kNilNode) ++roots;
    }
    if (roots != 1) {
        throw Error(Errc::MalformedTree,
                    "assignment has " + std::to_string(roots) + " roots");
    }
    std::vector<NodeId> head_of(static_cast<size_t>(net.node_count()), kNilNode);
    for (const auto& r : out.resolved) head_of[static_cast<size_t>(r.node)] = r.value.head;
    // 0 = unvisited, 1 = on current chain, 2 = done
    std::vector<int> mark(static_cast<size_t>(net.node_count()), 0);
    for (NodeId start = 0; start < net.node_count(); ++start) {
        NodeId cur = start;
        std::vector<NodeId> chain;
        while (cur != kNilNode && mark[static_cast<size_t>(cur)] == 0) {
            mark[static_cast<size_t>(cur)] = 1;
            chain.push_back(cur);
            cur = head_of[static_cast<size_t>(cur)];
        }
        if (cur != kNilNode && mark[static_cast<size_t>(cur)] == 1) {
            throw Error(Errc::MalformedTree, "assignment contains a cycle");
        }
        for (NodeId n : chain) mark[static_cast<size_t>(n)] = 2;
    }
    return out;
}

}  // namespace cdparse
