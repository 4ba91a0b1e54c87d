#include "cdparse/lattice.hpp"

#include <algorithm>
#include <limits>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace cdparse {

namespace {

constexpr double kMinLoggedReliability = 1e-9;

void require_interval(const WordNode& n) {
    if (!n.interval) {
        throw Error(Errc::ModeMismatch, "node '" + n.form + "' carries no time interval");
    }
}

}  // namespace

bool precedes(const WordNode& a, const WordNode& b) {
    require_interval(a);
    require_interval(b);
    return a.interval->end_ms <= b.interval->start_ms;
}

bool overlap(const WordNode& a, const WordNode& b) {
    require_interval(a);
    require_interval(b);
    if (a.id == b.id) return false;
    return std::max(a.interval->start_ms, b.interval->start_ms) <
           std::min(a.interval->end_ms, b.interval->end_ms);
}

bool overlap_constraint(const ConstraintNetwork& net, NodeId x, const ModValue& vx,
                        NodeId y, const ModValue& vy) {
    return eval_pair(builtin_overlap(), net, x, vx, y, vy);
}

std::vector<std::pair<NodeId, ModValue>> extend_network(ConstraintNetwork& net,
                                                        WordNode hypothesis,
                                                        const Grammar& g) {
    if (net.mode() != Mode::Lattice) {
        throw Error(Errc::ModeMismatch, "extend_network applies to lattice networks");
    }
    require_interval(hypothesis);
    if (hypothesis.id != net.node_count()) {
        throw Error(Errc::DuplicateId, "hypothesis id must be the next free node id");
    }
    for (const auto& n : net.nodes()) {
        if (n.ext_id == hypothesis.ext_id) {
            throw Error(Errc::DuplicateId,
                        "hypothesis id " + std::to_string(hypothesis.ext_id) + " already present");
        }
    }
    hypothesis.late = hypothesis.interval->end_ms <= net.emitted_frontier_ms();

    NodeId fresh = hypothesis.id;
    net.add_node(std::move(hypothesis));

    auto licenses = constraints_of(g, {Kind::License});
    auto licensed = [&](NodeId node, const ModValue& v) {
        for (const auto* c : licenses) {
            if (c->arity != 1) continue;
            if (!eval_unary(*c, net, node, v)) return false;
        }
        return true;
    };

    std::vector<std::pair<NodeId, ModValue>> added;
    auto admit = [&](NodeId node, ModValue v) {
        if (!licensed(node, v)) return;
        net.admit_value(node, v);
        added.emplace_back(node, v);
    };

    const int label_count = static_cast<int>(g.labels.size());
    // the new node's own domain: root plus links to unemitted nodes
    admit(fresh, ModValue{kNilNode, g.root_label});
    for (NodeId h = 0; h < net.node_count(); ++h) {
        if (h == fresh || net.emitted(h)) continue;
        for (int l = 0; l < label_count; ++l) {
            if (l == g.root_label) continue;
            admit(fresh, ModValue{h, l});
        }
    }
    // existing unemitted nodes may now modify the newcomer
    for (NodeId x = 0; x < net.node_count(); ++x) {
        if (x == fresh || net.emitted(x)) continue;
        for (int l = 0; l < label_count; ++l) {
            if (l == g.root_label) continue;
            admit(x, ModValue{fresh, l});
        }
    }
    return added;
}

std::vector<Emission> emit_expired_limited(ConstraintNetwork& net, const Grammar& g,
                                           std::int64_t now_ms, const Horizon& horizon,
                                           std::size_t max_count) {
    if (net.mode() != Mode::Lattice) {
        throw Error(Errc::ModeMismatch, "emit_expired applies to lattice networks");
    }
    std::vector<NodeId> due;
    for (NodeId v = 0; v < net.node_count(); ++v) {
        if (net.emitted(v)) continue;
        if (net.node(v).interval->end_ms > now_ms - horizon.window_ms) continue;
        due.push_back(v);
    }
    std::sort(due.begin(), due.end(), [&net](NodeId a, NodeId b) {
        auto ea = net.node(a).interval->end_ms, eb = net.node(b).interval->end_ms;
        if (ea != eb) return ea < eb;
        return a < b;
    });

    std::vector<Emission> out;
    for (NodeId v : due) {
        if (out.size() >= max_count) break;
        const auto dom = net.domain(v);
        if (dom.empty()) continue;  // dead hypothesis; nothing to output

        std::size_t best = 0;
        if (dom.size() > 1) {
            double best_score = -1.0;
            for (std::size_t i = 0; i < dom.size(); ++i) {
                double s = score_value(g, net, v, dom[i]);
                if (s > best_score) {
                    best_score = s;
                    best = i;
                }
            }
            for (std::size_t i = 0; i < dom.size(); ++i) {
                if (i == best) continue;
                double s = score_value(g, net, v, dom[i]);
                net.erase_value(v, dom[i], "emit", std::max(s, kMinLoggedReliability));
            }
        }
        net.mark_emitted(v);
        out.push_back(Emission{v, dom[best], dom.size() > 1, now_ms});
    }
    return out;
}

std::vector<Emission> emit_expired(ConstraintNetwork& net, const Grammar& g,
                                   std::int64_t now_ms, const Horizon& horizon) {
    return emit_expired_limited(net, g, now_ms, horizon,
                                std::numeric_limits<std::size_t>::max());
}

AnytimeResult simulate_stream(const std::vector<StreamEvent>& events, const Grammar& g,
                              const Horizon& horizon, const Budget& budget_per_tick,
                              bool heuristics_enabled) {
    if (horizon.window_ms <= 0) {
        throw Error(Errc::DomainError, "horizon window must be positive");
    }
    for (std::size_t i = 0; i < events.size(); ++i) {
        if (i > 0 && events[i].arrival_ms < events[i - 1].arrival_ms) {
            throw Error(Errc::UnsortedEvents, "stream events out of arrival order");
        }
        const auto& h = events[i].hypothesis;
        if (!h.interval || !h.interval->valid()) {
            throw Error(Errc::DomainError, "hypothesis '" + h.form + "' has a bad interval");
        }
        if (events[i].arrival_ms < h.interval->end_ms) {
            throw Error(Errc::DomainError,
                        "hypothesis '" + h.form + "' arrives before it ends");
        }
    }
    validate_for_mode(g, Mode::Lattice);

    AnytimeEngine engine(g, ConstraintNetwork(Mode::Lattice), RunMode::Contract,
                         heuristics_enabled);
    engine.set_stream_open(true);

    auto urgency = [&](std::int64_t now) {
        double worst = 0.0;
        const auto& net = engine.net();
        for (NodeId v = 0; v < net.node_count(); ++v) {
            if (net.emitted(v)) continue;
            auto lag = static_cast<double>(now - net.node(v).interval->end_ms);
            worst = std::max(worst, lag / static_cast<double>(horizon.window_ms));
        }
        return std::clamp(worst, 0.0, 1.0);
    };

    auto tick = [&](std::int64_t now) {
        engine.advance_clock(now);
        engine.run_leg(budget_per_tick);
        auto pruned = prune_low_scores(engine.net(), g, urgency(now));
        if (!pruned.empty()) engine.sample_external_deletions();
        // emit one node at a time; each newly frozen node is fresh evidence
        // for the nodes still behind the horizon
        for (;;) {
            auto emitted = emit_expired_limited(engine.net(), g, now, horizon, 1);
            if (emitted.empty()) break;
            engine.sample_external_deletions();
            for (auto& e : emitted) engine.add_emission(std::move(e));
            engine.invalidate_quiescence();
            engine.run_leg(budget_per_tick);
        }
    };

    std::size_t i = 0;
    std::int64_t last_end = 0;
    while (i < events.size()) {
        std::int64_t now = events[i].arrival_ms;
        while (i < events.size() && events[i].arrival_ms == now) {
            WordNode h = events[i].hypothesis;
            h.id = engine.net().node_count();
            last_end = std::max(last_end, h.interval->end_ms);
            extend_network(engine.net(), std::move(h), g);
            engine.invalidate_quiescence();
            ++i;
        }
        tick(now);
    }
    if (engine.net().node_count() > 0) {
        engine.set_stream_open(false);
        engine.invalidate_quiescence();
        tick(last_end + horizon.window_ms + 1);  // flush the residue
    }
    return std::move(engine).finish();
}

std::vector<StreamEvent> parse_lattice(const std::string& text, const Grammar& g) {
    std::vector<StreamEvent> events;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    std::int64_t prev_arrival = -1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw Error(Errc::SyntaxError,
                        "lattice line " + std::to_string(lineno) + ": " + e.what());
        }
        StreamEvent ev;
        try {
            ev.hypothesis.ext_id = j.at("id").get<std::int64_t>();
            ev.hypothesis.form = j.at("form").get<std::string>();
            std::string cat = j.at("cat").get<std::string>();
            int ci = g.category_index(cat);
            if (ci < 0) {
                throw Error(Errc::UndeclaredSymbol, "lattice line " + std::to_string(lineno) +
                                                        ": category '" + cat + "'");
            }
            ev.hypothesis.category = ci;
            ev.hypothesis.interval =
                TimeInterval{j.at("start_ms").get<std::int64_t>(),
                             j.at("end_ms").get<std::int64_t>()};
            ev.hypothesis.confidence = j.value("conf", 1.0);
            ev.arrival_ms = j.at("arrival_ms").get<std::int64_t>();
        } catch (const nlohmann::json::exception& e) {
            throw Error(Errc::SyntaxError,
                        "lattice line " + std::to_string(lineno) + ": " + e.what());
        }
        if (ev.hypothesis.ext_id < 1) {
            throw Error(Errc::SyntaxError,
                        "lattice line " + std::to_string(lineno) + ": id must be >= 1");
        }
        if (!ev.hypothesis.interval->valid()) {
            throw Error(Errc::SyntaxError,
                        "lattice line " + std::to_string(lineno) + ": start must precede end");
        }
        if (ev.hypothesis.confidence < 0.0 || ev.hypothesis.confidence > 1.0) {
            throw Error(Errc::SyntaxError,
                        "lattice line " + std::to_string(lineno) + ": conf outside [0,1]");
        }
        if (ev.arrival_ms < ev.hypothesis.interval->end_ms) {
            throw Error(Errc::SyntaxError, "lattice line " + std::to_string(lineno) +
                                               ": arrival precedes the hypothesis end");
        }
        if (ev.arrival_ms < prev_arrival) {
            throw Error(Errc::UnsortedEvents,
                        "lattice line " + std::to_string(lineno) + ": arrivals out of order");
        }
        prev_arrival = ev.arrival_ms;
        events.push_back(std::move(ev));
    }
    return events;
}

std::vector<StreamEvent> load_lattice_file(const std::string& path, const Grammar& g) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::IoError, "cannot open lattice file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_lattice(buf.str(), g);
}

}  // namespace cdparse
