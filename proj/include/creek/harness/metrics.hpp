#pragma once

#include <map>
#include <string>
#include <vector>

#include "creek/harness/cluster.hpp"

namespace creek::harness {

// Latency kinds, all measured on the replica that received the op, from
// invocation to the response record:
//   tentative-weak / tentative-strong  first tentative response
//   stable-weak / stable-strong        stable response
//   stable-all                         stable response of any op
//   response-all                       the op's final response: stable when one
//                                      was sent, else the tentative one
//   predicted-tentative                first entry into the executed prefix
inline const std::vector<std::string> kLatencyKinds = {
    "tentative-weak", "tentative-strong", "stable-weak", "stable-strong",
    "stable-all",     "response-all",     "predicted-tentative"};

struct LatencyStats {
  std::size_t count = 0;
  double mean_ms = 0;
  double p50_ms = 0;
  double p95_ms = 0;
  double p99_ms = 0;
};

struct MetricsReport {
  std::string system;
  std::uint64_t seed = 0;
  double load = 0;  // offered arrival rate, tx/s
  std::map<std::string, LatencyStats> latency;
  std::size_t invoked = 0;
  std::size_t completed = 0;
  double throughput_tps = 0;
  double accuracy = 1.0;
  std::size_t accuracy_samples = 0;
  double exec_ratio = 1.0;
  double utilization = 0;
  ChannelTable channels{};
};

// Nearest-rank percentile of an unsorted sample; 0 for an empty one.
double percentile(std::vector<double> v, double p);
LatencyStats summarize(std::vector<double> samples_ms);

MetricsReport compute_metrics(const RunResult& run);

// Fraction of local client ops whose first speculative response equals the
// response of the same op in a sequential re-execution of the final order of
// the replica that received it.
double speculation_accuracy(const RunResult& run, std::size_t* samples = nullptr);

// Execution attempts per distinct (replica, op) pair.
double execution_ratio(const RunResult& run);

}  // namespace creek::harness
