#pragma once

#include <string>
#include <vector>

#include "sausagelab/runio.hpp"

namespace sausagelab::experiments {

// Dispatches to the module operation named by config.experiment, appends a
// JSONL record to <out>/runs.jsonl, refreshes <out>/summary.csv, and emits the
// experiment's SVG plots. Partial failures are recorded in the record's error
// field (and rethrown only for config validation problems).
runio::RunRecord run(const runio::ExperimentConfig& config);

// Merged CSV + trend checks over existing records; returns a human-readable
// report and sets `ok` false if an embedded assertion (e.g. the lln monotone
// trend) fails.
std::string report(const std::vector<runio::RunRecord>& records, bool* ok);

}  // namespace sausagelab::experiments
