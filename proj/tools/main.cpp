#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cdparse/format.hpp"
#include "cdparse/lattice.hpp"
#include "cdparse/oracle.hpp"

namespace {

using namespace cdparse;

std::string slurp(const std::string& path) {
    if (path == "-") {
        std::ostringstream buf;
        buf << std::cin.rdbuf();
        return buf.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::IoError, "cannot open input file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<std::string> tokenize(const std::string& text) {
    std::istringstream in(text);
    std::vector<std::string> tokens;
    std::string t;
    while (in >> t) tokens.push_back(t);
    return tokens;
}

void write_out(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::IoError, "cannot write output file: " + path);
    out << content;
}

int exit_code(Status s) {
    switch (s) {
        case Status::Unique: return 0;
        case Status::Ambiguous: return 2;
        case Status::Inconsistent: return 3;
    }
    return 1;
}

struct ParseArgs {
    std::string grammar;
    std::string input;
    std::string mode = "string";
    std::string run = "contract";
    std::string heuristics = "auto";
    std::string format = "tsv";
    std::string out;
    std::string trace_out;
    std::int64_t budget_ms = -1;
    std::int64_t budget_steps = -1;
    std::int64_t interrupt_at_step = -1;
    std::int64_t horizon_ms = 1000;
    std::uint64_t seed = 0;
};

int run_parse(const ParseArgs& args) {
    Grammar g = load_grammar_file(args.grammar);
    bool heuristics = args.heuristics != "off";

    Budget budget;
    if (args.budget_ms >= 0) budget.wall_ms = args.budget_ms;
    if (args.budget_steps >= 0) budget.max_steps = args.budget_steps;

    AnytimeResult result;
    if (args.mode == "lattice") {
        auto events = load_lattice_file(args.input, g);
        Budget per_tick = budget;
        if (!per_tick.wall_ms && !per_tick.max_steps) {
            per_tick.max_steps = 1'000'000;  // effectively unbounded per tick
        }
        result = simulate_stream(events, g, Horizon{args.horizon_ms}, per_tick, heuristics);
    } else {
        auto nodes = make_string_nodes(g, tokenize(slurp(args.input)));
        if (args.run == "interruptible") {
            InterruptFn hook;
            if (args.interrupt_at_step >= 0) {
                std::int64_t limit = args.interrupt_at_step;
                hook = [limit](std::int64_t steps) { return steps >= limit; };
            }
            result = run_interruptible(g, nodes, hook, heuristics);
        } else {
            if (!budget.wall_ms && !budget.max_steps) {
                throw CLI::ValidationError(
                    "contract mode needs --budget-ms or --budget-steps");
            }
            result = run_contract(g, nodes, budget, heuristics);
        }
    }

    write_out(args.out, format_output(result, g,
                                      args.format == "json" ? OutputFormat::Json
                                                            : OutputFormat::Tsv));
    if (!args.trace_out.empty()) {
        write_out(args.trace_out, trace_to_csv(result.trace));
    }
    return exit_code(result.status);
}

struct OracleArgs {
    std::string grammar;
    std::string input;
    bool with_heuristics = false;
};

int run_oracle(const OracleArgs& args) {
    Grammar g = load_grammar_file(args.grammar);
    auto nodes = make_string_nodes(g, tokenize(slurp(args.input)));
    ConstraintNetwork net = license_domains(g, nodes);
    OracleResult oracle = oracle_enumerate_network(g, net, args.with_heuristics);
    std::cout << format_oracle(oracle, g, net);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"anytime constraint dependency parser"};
    app.require_subcommand(1);

    ParseArgs pa;
    auto* parse = app.add_subcommand("parse", "parse a sentence or word lattice");
    parse->add_option("--grammar", pa.grammar, "grammar file")->required();
    parse->add_option("--input", pa.input, "input file, or - for stdin")->required();
    parse->add_option("--mode", pa.mode, "string|lattice")
        ->check(CLI::IsMember({"string", "lattice"}));
    parse->add_option("--run", pa.run, "interruptible|contract")
        ->check(CLI::IsMember({"interruptible", "contract"}));
    parse->add_option("--budget-ms", pa.budget_ms, "wall-clock budget (contract)");
    parse->add_option("--budget-steps", pa.budget_steps, "deletion-step budget (contract)");
    parse->add_option("--interrupt-at-step", pa.interrupt_at_step,
                      "interruptible test hook: stop after N deletions");
    parse->add_option("--heuristics", pa.heuristics, "off|auto")
        ->check(CLI::IsMember({"off", "auto"}));
    parse->add_option("--horizon-ms", pa.horizon_ms, "emission horizon (lattice)");
    parse->add_option("--trace-out", pa.trace_out, "write the quality trace CSV here");
    parse->add_option("--out", pa.out, "output file (default stdout)");
    parse->add_option("--format", pa.format, "tsv|json")
        ->check(CLI::IsMember({"tsv", "json"}));
    parse->add_option("--seed", pa.seed, "random seed (reserved for fuzz tooling)");

    OracleArgs oa;
    auto* oracle = app.add_subcommand("oracle", "enumerate all consistent parses");
    oracle->add_option("--grammar", oa.grammar, "grammar file")->required();
    oracle->add_option("--input", oa.input, "input file, or - for stdin")->required();
    oracle->add_flag("--with-heuristics", oa.with_heuristics,
                     "treat heuristic constraints as filters too");

    try {
        app.parse(argc, argv);
        if (parse->parsed()) return run_parse(pa);
        if (oracle->parsed()) return run_oracle(oa);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    } catch (const cdparse::Error& e) {
        std::cerr << "error [" << errc_name(e.code()) << "]: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
