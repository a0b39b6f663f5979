#pragma once

#include <string>
#include <vector>

#include "creek/harness/cluster.hpp"

namespace creek::harness {

struct Verdict {
  std::string property;
  bool pass = true;
  std::string detail;  // counterexample on failure
  std::uint64_t seed = 0;
  std::size_t event_index = 0;  // offending trace record (trace size when none)
};

inline const std::vector<std::string> kCheckers = {"prefix-agreement", "linearizability", "convergence",
                                                   "minority-stable"};

// The committed sequences of all replicas are pairwise prefix-comparable at
// every commit record, and each replica's commit records add up to its final
// committed log.
Verdict check_prefix_agreement(const RunResult& run);

// On the longest committed sequence in the trace: (a) strong ops respect
// real-time order of stable response before invocation, (b) every stable
// response equals the sequential re-execution of the committed order, and
// (c) the causal context of each strong op is committed before it.
Verdict check_linearizability(const RunResult& run);

// Correct replicas in the same final partition group hold identical orders
// and stores, and the store equals the sequential execution of that order.
Verdict check_convergence(const RunResult& run);

// While a partition is active, replicas in a group without a majority emit
// stable responses only for ops that a majority had accepted before it began.
Verdict check_minority_stable(const RunResult& run);

// `names` may hold "all"; unknown names throw sim::ConfigError.
std::vector<Verdict> run_checks(const RunResult& run, const std::vector<std::string>& names);

// Longest committed sequence recorded in the trace.
std::vector<const Request*> global_committed(const RunResult& run);

}  // namespace creek::harness
