#pragma once

#include <istream>
#include <string>
#include <vector>

#include "creek/engine/executor.hpp"
#include "creek/sim/network.hpp"
#include "creek/workload/tpcc.hpp"

namespace creek::harness {

enum class SystemKind { kCreek, kSmr, kBayou, kArchie };

const char* to_string(SystemKind s);
SystemKind parse_system(const std::string& s);
engine::EngineKind parse_engine(const std::string& s);

struct CrashEvent {
  ReplicaId replica = 0;
  sim::SimTime at = 0;
};

struct ExperimentConfig {
  SystemKind system = SystemKind::kCreek;
  std::size_t replicas = 5;
  std::uint64_t seed = 1;
  engine::EngineKind engine = engine::EngineKind::kMultiversion;
  std::size_t slots = 16;

  sim::NetworkConfig network;
  std::vector<sim::PartitionWindow> partitions;
  std::vector<CrashEvent> crashes;

  double skew_ms = 1.0;  // each replica's clock offset ~ U[-skew, +skew]
  double fd_delay_ms = 20.0;
  double anti_entropy_ms = 50.0;
  double retry_ms = 10.0;
  double rollback_ms = 0.02;
  std::size_t gc_threshold = 64;
  bool readonly_shortcut = false;
  double noop_flush_ms = 0.0;

  workload::WorkloadConfig workload;

  std::uint64_t event_limit = 200'000'000;
  double grace_ms = 120.0;

  // Throws sim::ConfigError.
  void set(const std::string& key, const std::string& value);
  void validate() const;

  // Every field as `key=value`, one per line, in a fixed order.
  std::vector<std::string> echo() const;
};

// Flat key=value lines; `#` starts a comment. Unknown keys are errors.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);

}  // namespace creek::harness
