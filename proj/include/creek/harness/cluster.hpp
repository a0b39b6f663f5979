#pragma once

#include <array>
#include <memory>
#include <vector>

#include "creek/core/request.hpp"
#include "creek/harness/config.hpp"
#include "creek/sim/trace.hpp"

namespace creek::harness {

struct ReplicaFinal {
  ReplicaId id = 0;
  bool crashed = false;
  std::size_t group = 0;  // partition group at the end of the run
  std::vector<const Request*> committed;
  std::vector<const Request*> order;
  StoreDump store;
  engine::ExecStats exec;
  std::size_t slots = 1;
};

using ChannelTable = std::array<sim::ChannelStats, static_cast<std::size_t>(sim::Channel::kCount)>;

// Everything a finished run leaves behind. Copies share the request pool,
// so a copy can be mutated freely for checker tests.
struct RunResult {
  ExperimentConfig config;
  std::shared_ptr<const RequestPool> pool;
  StoreMap base;
  sim::Trace trace;
  std::vector<ReplicaFinal> replicas;  // index = id - 1
  sim::RunSummary summary;
  ChannelTable channels{};
  std::size_t arrivals = 0;
  std::size_t arrivals_dropped = 0;  // targeted a crashed replica
};

// Builds the cluster for cfg.system, injects the workload and the fault
// schedule, and runs to quiescence. Throws sim::ConfigError and
// sim::SimulationError.
RunResult run_experiment(const ExperimentConfig& cfg);

}  // namespace creek::harness
