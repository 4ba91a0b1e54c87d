#pragma once

#include <string>

#include "cdparse/oracle.hpp"
#include "cdparse/scheduler.hpp"

namespace cdparse {

enum class OutputFormat { Tsv, Json };

// TSV: id, form, cat, head (external id, 0 for root), label for every
// resolved node; unresolved nodes follow a "# ambiguous" marker with their
// remaining domains. JSON mirrors the same content with the trace inline.
std::string format_output(const AnytimeResult& result, const Grammar& g, OutputFormat fmt);

// One line per complete assignment plus a trailing count line.
std::string format_oracle(const OracleResult& oracle, const Grammar& g,
                          const ConstraintNetwork& net);

}  // namespace cdparse
