#include "cdparse/propagate.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include "cdparse/kernels.hpp"

namespace cdparse {

std::vector<WordNode> make_string_nodes(const Grammar& g,
                                        const std::vector<std::string>& tokens) {
    std::vector<WordNode> nodes;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        for (int cat : lexicon_lookup(g, tokens[i])) {
            WordNode n;
            n.id = static_cast<NodeId>(nodes.size());
            n.ext_id = static_cast<std::int64_t>(i) + 1;
            n.form = tokens[i];
            n.category = cat;
            n.position = static_cast<int>(i) + 1;
            nodes.push_back(std::move(n));
        }
    }
    return nodes;
}

namespace {

Mode infer_mode(const std::vector<WordNode>& nodes) {
    bool any_interval = false, any_position = false;
    for (const auto& n : nodes) {
        if (n.interval) any_interval = true;
        else any_position = true;
    }
    if (any_interval && any_position) {
        throw Error(Errc::ModeMismatch, "mixed positional and interval nodes");
    }
    return any_interval ? Mode::Lattice : Mode::String;
}

}  // namespace

ConstraintNetwork license_domains(const Grammar& g, const std::vector<WordNode>& nodes) {
    if (nodes.empty()) return ConstraintNetwork(Mode::String);
    Mode mode = infer_mode(nodes);
    validate_for_mode(g, mode);
    ConstraintNetwork net(mode);
    for (const auto& n : nodes) net.add_node(n);

    std::vector<const ConstraintDef*> licenses = constraints_of(g, {Kind::License});
    const int label_count = static_cast<int>(g.labels.size());
    for (NodeId x = 0; x < net.node_count(); ++x) {
        auto admit_if_licensed = [&](ModValue v) {
            for (const auto* c : licenses) {
                if (c->arity != 1) continue;
                if (!eval_unary(*c, net, x, v)) return;
            }
            net.admit_value(x, v);
        };
        admit_if_licensed(ModValue{kNilNode, g.root_label});
        for (NodeId h = 0; h < net.node_count(); ++h) {
            if (h == x) continue;
            for (int l = 0; l < label_count; ++l) {
                if (l == g.root_label) continue;
                admit_if_licensed(ModValue{h, l});
            }
        }
    }
    return net;
}

std::vector<DeletionRecord> apply_unary_at(ConstraintNetwork& net, const ConstraintDef& c,
                                           NodeId node) {
    std::vector<ModValue> victims;
    for (const auto& v : net.domain(node)) {
        if (!eval_unary(c, net, node, v)) victims.push_back(v);
    }
    std::vector<DeletionRecord> records;
    for (const auto& v : victims) {
        if (net.erase_value(node, v, c.id, c.reliability)) {
            records.push_back(net.deletion_log().back());
        }
    }
    return records;
}

std::vector<DeletionRecord> apply_unary(ConstraintNetwork& net, const ConstraintDef& c) {
    std::vector<DeletionRecord> records;
    for (NodeId x = 0; x < net.node_count(); ++x) {
        if (net.emitted(x)) continue;
        auto batch = apply_unary_at(net, c, x);
        records.insert(records.end(), batch.begin(), batch.end());
    }
    return records;
}

std::vector<DeletionRecord> revise(ConstraintNetwork& net, NodeId x, const ConstraintDef& c,
                                   NodeId y) {
    auto mask = kernels::support_mask(c, net, x, net.domain(x), y, net.domain(y));
    std::vector<ModValue> victims;
    const auto& dom = net.domain(x);
    for (std::size_t i = 0; i < dom.size(); ++i) {
        if (!mask[i]) victims.push_back(dom[i]);
    }
    std::vector<DeletionRecord> records;
    for (const auto& v : victims) {
        if (net.erase_value(x, v, c.id, c.reliability)) {
            records.push_back(net.deletion_log().back());
        }
    }
    return records;
}

std::vector<const ConstraintDef*> constraints_of(const Grammar& g,
                                                 std::initializer_list<Kind> kinds) {
    std::vector<const ConstraintDef*> out;
    for (const auto& c : g.constraints) {
        for (Kind k : kinds) {
            if (c.kind == k) {
                out.push_back(&c);
                break;
            }
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const auto* a, const auto* b) {
        if (a->phase != b->phase) return a->phase < b->phase;
        return a->file_order < b->file_order;
    });
    return out;
}

namespace {

struct Task {
    int cidx;     // index into the working constraint list
    NodeId x;     // node whose domain is filtered
    NodeId y;     // partner for binary tasks, kNilNode for unary
};

bool budget_done(const StepBudget& budget, std::int64_t used) {
    if (budget.max_steps && used >= *budget.max_steps) return true;
    if (budget.deadline && std::chrono::steady_clock::now() >= *budget.deadline) return true;
    return false;
}

}  // namespace

PropagationOutcome propagate(ConstraintNetwork& net,
                             const std::vector<const ConstraintDef*>& constraints,
                             const StepBudget& budget) {
    PropagationOutcome out;
    std::vector<const ConstraintDef*> work = constraints;
    work.push_back(&builtin_anticycle());
    if (net.mode() == Mode::Lattice) {
        work.push_back(&builtin_self_overlap());
        work.push_back(&builtin_overlap());
    }

    std::int64_t used = 0;
    if (budget_done(budget, used)) return out;  // zero budget: nothing attempted

    std::deque<Task> agenda;
    std::set<std::tuple<int, NodeId, NodeId>> queued;
    auto enqueue = [&](int cidx, NodeId x, NodeId y) {
        if (net.emitted(x)) return;
        if (!queued.insert({cidx, x, y}).second) return;
        agenda.push_back(Task{cidx, x, y});
    };

    for (int ci = 0; ci < static_cast<int>(work.size()); ++ci) {
        const auto* c = work[static_cast<std::size_t>(ci)];
        // preferences and uninstantiated dynamics are scheduler territory
        if (c->kind == Kind::Preference || c->kind == Kind::Dynamic) continue;
        for (NodeId x = 0; x < net.node_count(); ++x) {
            if (c->arity == 1) {
                enqueue(ci, x, kNilNode);
            } else {
                for (NodeId y = 0; y < net.node_count(); ++y) {
                    if (y != x) enqueue(ci, x, y);
                }
            }
        }
    }

    std::vector<ModValue> victims;
    while (!agenda.empty()) {
        Task t = agenda.front();
        agenda.pop_front();
        queued.erase({t.cidx, t.x, t.y});
        const auto* c = work[static_cast<std::size_t>(t.cidx)];

        if (net.mode() == Mode::String) {
            // a wiped-out domain makes further filtering pointless
            if (!net.empty_nodes().empty()) return out;
        } else if (t.y != kNilNode && net.domain(t.y).empty()) {
            // lattice: an empty competitor is a dead hypothesis, not a
            // constraint source
            continue;
        }

        victims.clear();
        if (t.y == kNilNode) {
            for (const auto& v : net.domain(t.x)) {
                if (!eval_unary(*c, net, t.x, v)) victims.push_back(v);
            }
        } else {
            auto mask = kernels::support_mask(*c, net, t.x, net.domain(t.x), t.y,
                                              net.domain(t.y));
            const auto& dom = net.domain(t.x);
            for (std::size_t i = 0; i < dom.size(); ++i) {
                if (!mask[i]) victims.push_back(dom[i]);
            }
        }
        if (victims.empty()) continue;

        for (const auto& v : victims) {
            if (budget_done(budget, used)) return out;
            if (net.erase_value(t.x, v, c->id, c->reliability)) {
                ++used;
                out.deletions.push_back(net.deletion_log().back());
            }
        }
        // arcs pointing at the shrunk domain need re-checking
        for (int ci = 0; ci < static_cast<int>(work.size()); ++ci) {
            if (work[static_cast<std::size_t>(ci)]->arity != 2) continue;
            for (NodeId u = 0; u < net.node_count(); ++u) {
                if (u != t.x) enqueue(ci, u, t.x);
            }
        }
    }
    out.fixpoint_reached = true;
    return out;
}

}  // namespace cdparse
