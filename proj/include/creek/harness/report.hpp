#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "creek/harness/checkers.hpp"
#include "creek/harness/metrics.hpp"

namespace creek::harness {

struct RunReport {
  MetricsReport metrics;
  std::vector<Verdict> verdicts;
};

inline const char* kResultsHeader = "system,seed,load,kind,p50_ms,p95_ms,p99_ms,throughput_tps,accuracy,exec_ratio";

// One row per (run, latency kind with samples).
void write_results_csv(std::ostream& os, const std::vector<RunReport>& runs, const std::vector<std::string>& echo);

// Whitespace-separated plot data against achieved throughput.
void write_latency_dat(std::ostream& os, const std::vector<RunReport>& runs, const std::vector<std::string>& echo);
void write_accuracy_dat(std::ostream& os, const std::vector<RunReport>& runs, const std::vector<std::string>& echo);
void write_exec_ratio_dat(std::ostream& os, const std::vector<RunReport>& runs, const std::vector<std::string>& echo);
void write_messages_csv(std::ostream& os, const std::vector<RunReport>& runs, const std::vector<std::string>& echo);
void write_verdicts(std::ostream& os, const std::vector<RunReport>& runs, const std::vector<std::string>& echo);

// Writes all of the above into `dir` (created if missing). Throws
// std::runtime_error when a file cannot be written.
void emit_report(const std::string& dir, const std::vector<RunReport>& runs, const std::vector<std::string>& echo);

// Short human-readable summary of one run.
std::string summary_line(const RunReport& r);

}  // namespace creek::harness
