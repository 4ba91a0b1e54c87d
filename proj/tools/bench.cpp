// Times the serial reference kernels against their OpenMP variants on
// synthetic dense instances and reports the speedup.

#include <chrono>
#include <cstdio>
#include <random>

#include "cdparse/kernels.hpp"
#include "cdparse/oracle.hpp"
#include "cdparse/propagate.hpp"

namespace {

using namespace cdparse;
using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// A permissive grammar over many labels so domains get large.
Grammar dense_grammar(int labels) {
    std::string text = R"({"categories": ["w"], "labels": ["ROOT")";
    for (int i = 0; i < labels; ++i) text += ",\"L" + std::to_string(i) + "\"";
    text += R"(], "lexicon": {"w": ["w"]}, "constraints": [
        {"id": "lic", "arity": 1, "kind": "LICENSE", "reliability": 1.0, "phase": 0,
         "formula": ["->", ["=", ["cat","x"], "w"], ["=", ["cat","x"], "w"]]},
        {"id": "left-head", "arity": 1, "kind": "HARD", "reliability": 1.0, "phase": 1,
         "formula": ["->", ["!=", ["lab","x"], "ROOT"],
                     ["<", ["pos",["mod","x"]], ["pos","x"]]]},
        {"id": "uniq", "arity": 2, "kind": "HARD", "reliability": 1.0, "phase": 1,
         "formula": ["->", ["and", ["=", ["mod","x"], ["mod","y"]],
                                   ["=", ["lab","x"], ["lab","y"]]],
                           ["=", "x", "y"]]},
        {"id": "proj", "arity": 2, "kind": "HARD", "reliability": 1.0, "phase": 1,
         "formula": ["->", ["and", ["<", ["pos",["mod","x"]], ["pos","y"]],
                                   ["<", ["pos","y"], ["pos","x"]]],
                           ["and", ["<=", ["pos",["mod","x"]], ["pos",["mod","y"]]],
                                   ["<=", ["pos",["mod","y"]], ["pos","x"]]]]}
    ]})";
    return parse_grammar(text);
}

void bench_oracle(int words, int labels) {
    Grammar g = dense_grammar(labels);
    std::vector<std::string> tokens(static_cast<std::size_t>(words), "w");
    auto nodes = make_string_nodes(g, tokens);
    ConstraintNetwork net = license_domains(g, nodes);

    std::vector<std::vector<ModValue>> domains;
    for (NodeId i = 0; i < net.node_count(); ++i) domains.push_back(net.domain(i));
    kernels::AssignmentSpace space;
    space.net = &net;
    space.domains = &domains;
    for (const auto* c : constraints_of(g, {Kind::Hard})) {
        (c->arity == 1 ? space.unary : space.binary).push_back(c);
    }

    auto t0 = Clock::now();
    auto serial = kernels::assignment_scan_serial(space);
    double serial_ms = ms_since(t0);
    t0 = Clock::now();
    auto parallel = kernels::assignment_scan_parallel(space);
    double parallel_ms = ms_since(t0);

    std::printf("oracle scan   %9llu assignments  %4zu hits  serial %8.1f ms  parallel %8.1f ms  speedup %.2fx  %s\n",
                static_cast<unsigned long long>(space.size()), serial.size(), serial_ms,
                parallel_ms, serial_ms / parallel_ms,
                serial == parallel ? "match" : "MISMATCH");
}

void bench_support(int values) {
    Grammar g = dense_grammar(8);
    // two fat artificial domains over a long sentence
    std::vector<std::string> tokens(64, "w");
    auto nodes = make_string_nodes(g, tokens);
    ConstraintNetwork net = license_domains(g, nodes);

    std::mt19937_64 rng(7);
    std::vector<ModValue> xdom, ydom;
    const auto& dx = net.domain(0);
    const auto& dy = net.domain(1);
    std::uniform_int_distribution<std::size_t> px(0, dx.size() - 1), py(0, dy.size() - 1);
    for (int i = 0; i < values; ++i) {
        xdom.push_back(dx[px(rng)]);
        ydom.push_back(dy[py(rng)]);
    }

    const ConstraintDef* proj = nullptr;
    for (const auto& c : g.constraints) {
        if (c.id == "proj") proj = &c;
    }

    // values of the leftmost word fail the left-head rule outright, so the
    // scan cannot bail out after the first supporting partner
    const ConstraintDef* probe = nullptr;
    for (const auto& c : g.constraints) {
        if (c.id == "left-head") probe = &c;
    }
    (void)proj;
    auto t0 = Clock::now();
    auto serial = kernels::support_mask_serial(*probe, net, 0, xdom, 1, ydom);
    double serial_ms = ms_since(t0);
    t0 = Clock::now();
    auto parallel = kernels::support_mask_parallel(*probe, net, 0, xdom, 1, ydom);
    double parallel_ms = ms_since(t0);

    std::printf("support mask  %9d x %-9d pairs   serial %8.1f ms  parallel %8.1f ms  speedup %.2fx  %s\n",
                values, values, serial_ms, parallel_ms, serial_ms / parallel_ms,
                serial == parallel ? "match" : "MISMATCH");
}

}  // namespace

int main() {
    bench_oracle(5, 4);
    bench_oracle(4, 12);
    bench_support(3000);
    bench_support(8000);
    return 0;
}
