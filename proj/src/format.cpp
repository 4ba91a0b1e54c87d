#include "cdparse/format.hpp"

#include <json.hpp>

namespace cdparse {

using nlohmann::ordered_json;

namespace {

std::int64_t head_ext_id(const ConstraintNetwork& net, NodeId head) {
    return head == kNilNode ? 0 : net.node(head).ext_id;
}

std::string value_text(const ConstraintNetwork& net, const Grammar& g, const ModValue& v) {
    return "(" + std::to_string(head_ext_id(net, v.head)) + "," +
           g.labels[static_cast<size_t>(v.label)] + ")";
}

}  // namespace

std::string format_output(const AnytimeResult& result, const Grammar& g, OutputFormat fmt) {
    const ConstraintNetwork& net = result.network;

    if (fmt == OutputFormat::Tsv) {
        std::string out = "id\tform\tcat\thead\tlabel\n";
        std::string ambiguous;
        for (NodeId i = 0; i < net.node_count(); ++i) {
            const WordNode& n = net.node(i);
            const auto& dom = net.domain(i);
            if (dom.size() == 1) {
                const ModValue& v = dom.front();
                out += std::to_string(n.ext_id) + "\t" + n.form + "\t" +
                       g.categories[static_cast<size_t>(n.category)] + "\t" +
                       std::to_string(head_ext_id(net, v.head)) + "\t" +
                       g.labels[static_cast<size_t>(v.label)] + "\n";
            } else {
                std::string values = "{";
                for (std::size_t k = 0; k < dom.size(); ++k) {
                    if (k > 0) values += ",";
                    values += value_text(net, g, dom[k]);
                }
                values += "}";
                ambiguous += std::to_string(n.ext_id) + "\t" + n.form + "\t" +
                             g.categories[static_cast<size_t>(n.category)] + "\t" + values +
                             "\n";
            }
        }
        if (!ambiguous.empty()) out += "# ambiguous\n" + ambiguous;
        return out;
    }

    ordered_json doc;
    doc["status"] = status_name(result.status);
    doc["mode"] = net.mode() == Mode::Lattice ? "lattice" : "string";
    ordered_json resolved = ordered_json::array();
    ordered_json ambiguous = ordered_json::array();
    for (NodeId i = 0; i < net.node_count(); ++i) {
        const WordNode& n = net.node(i);
        const auto& dom = net.domain(i);
        if (dom.size() == 1) {
            resolved.push_back({{"id", n.ext_id},
                                {"form", n.form},
                                {"cat", g.categories[static_cast<size_t>(n.category)]},
                                {"head", head_ext_id(net, dom.front().head)},
                                {"label", g.labels[static_cast<size_t>(dom.front().label)]}});
        } else {
            ordered_json values = ordered_json::array();
            for (const auto& v : dom) {
                values.push_back({{"head", head_ext_id(net, v.head)},
                                  {"label", g.labels[static_cast<size_t>(v.label)]}});
            }
            ambiguous.push_back({{"id", n.ext_id},
                                 {"form", n.form},
                                 {"cat", g.categories[static_cast<size_t>(n.category)]},
                                 {"domain", values}});
        }
    }
    doc["nodes"] = resolved;
    doc["ambiguous"] = ambiguous;
    if (!result.emissions.empty()) {
        ordered_json ems = ordered_json::array();
        for (const auto& e : result.emissions) {
            const WordNode& n = net.node(e.node);
            ems.push_back({{"id", n.ext_id},
                           {"form", n.form},
                           {"head", head_ext_id(net, e.value.head)},
                           {"label", g.labels[static_cast<size_t>(e.value.label)]},
                           {"forced", e.forced},
                           {"at_ms", e.at_ms}});
        }
        doc["emissions"] = ems;
    }
    ordered_json samples = ordered_json::array();
    for (const auto& s : result.trace.samples) {
        samples.push_back({{"step", s.step},
                           {"elapsed_ms", s.elapsed_ms},
                           {"a", s.a},
                           {"r", s.r},
                           {"q", s.q}});
    }
    doc["trace"] = {{"mode", result.trace.mode == RunMode::Contract ? "contract"
                                                                    : "interruptible"},
                    {"samples", samples}};
    return doc.dump(2) + "\n";
}

std::string format_oracle(const OracleResult& oracle, const Grammar& g,
                          const ConstraintNetwork& net) {
    std::string out;
    for (const auto& assignment : oracle.assignments) {
        std::string line;
        for (NodeId i = 0; i < net.node_count(); ++i) {
            if (i > 0) line += " ";
            const ModValue& v = assignment[static_cast<size_t>(i)];
            line += net.node(i).form + ":" + std::to_string(head_ext_id(net, v.head)) + ":" +
                    g.labels[static_cast<size_t>(v.label)];
        }
        out += line + "\n";
    }
    out += "count " + std::to_string(oracle.assignments.size()) + "\n";
    return out;
}

}  // namespace cdparse
