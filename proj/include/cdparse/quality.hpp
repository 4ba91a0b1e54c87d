#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cdparse/core.hpp"

namespace cdparse {

enum class RunMode { Interruptible, Contract };

struct QualitySample {
    std::int64_t step = 0;
    std::int64_t elapsed_ms = 0;
    double a = 1.0;
    double r = 1.0;
    double q = 0.0;
};

struct QualityTrace {
    RunMode mode = RunMode::Contract;
    std::vector<QualitySample> samples;
};

// Remaining ambiguity normalized by the initial one: log of the domain-size
// product over the log of the initial product, 0 when the initial product is
// 1. Empty domains contribute factor 1; the network is inconsistent then and
// check_status already says so.
double ambiguity_measure(const ConstraintNetwork& net);

// Arithmetic mean of the logged reliabilities, 1 for an empty log.
double mean_reliability(const std::vector<DeletionRecord>& log);

// q = (e^{r(1-a)} - 1) / (e - 1); throws DomainError outside a in [0,1],
// r in (0,1].
double quality(double a, double r);

// CSV with header step,elapsed_ms,a,r,q; floats at six decimals.
std::string trace_to_csv(const QualityTrace& trace);

}  // namespace cdparse
