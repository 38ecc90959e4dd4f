#pragma once

// Machine-readable run output: a JSON-lines trace (one record per tick with
// stable field names) and a single-object JSON summary.

#include <ostream>

#include "ppsim/scenario.hpp"

namespace ppsim {

void write_trace_jsonl(std::ostream& os, const Simulation& sim);
void write_summary_json(std::ostream& os, const Simulation& sim);

}  // namespace ppsim
