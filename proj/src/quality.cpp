#include "cdparse/quality.hpp"

#include <cmath>
#include <cstdio>

namespace cdparse {

double ambiguity_measure(const ConstraintNetwork& net) {
    double current = 0.0, initial = 0.0;
    for (NodeId i = 0; i < net.node_count(); ++i) {
        auto cur = static_cast<double>(std::max<std::size_t>(net.domain(i).size(), 1));
        auto init = static_cast<double>(std::max(net.initial_size(i), 1));
        current += std::log(cur);
        initial += std::log(init);
    }
    if (initial <= 0.0) return 0.0;
    return current / initial;
}

double mean_reliability(const std::vector<DeletionRecord>& log) {
    if (log.empty()) return 1.0;
    double sum = 0.0;
    for (const auto& rec : log) sum += rec.reliability;
    return sum / static_cast<double>(log.size());
}

double quality(double a, double r) {
    if (!(a >= 0.0 && a <= 1.0) || !(r > 0.0 && r <= 1.0)) {
        throw Error(Errc::DomainError, "quality needs a in [0,1] and r in (0,1]");
    }
    return std::expm1(r * (1.0 - a)) / std::expm1(1.0);
}

std::string trace_to_csv(const QualityTrace& trace) {
    std::string out = "step,elapsed_ms,a,r,q\n";
    char buf[128];
    for (const auto& s : trace.samples) {
        std::snprintf(buf, sizeof(buf), "%lld,%lld,%.6f,%.6f,%.6f\n",
                      static_cast<long long>(s.step), static_cast<long long>(s.elapsed_ms),
                      s.a, s.r, s.q);
        out += buf;
    }
    return out;
}

}  // namespace cdparse
