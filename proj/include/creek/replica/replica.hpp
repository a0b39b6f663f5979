#pragma once

#include <memory>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "creek/core/request.hpp"
#include "creek/engine/executor.hpp"
#include "creek/sim/network.hpp"
#include "creek/sim/simulator.hpp"
#include "creek/sim/trace.hpp"

namespace creek::replica {

// Cluster-wide plumbing shared by the replicas of one run.
struct Env {
  sim::Simulator& sim;
  sim::Network& net;
  sim::Trace* trace;
  RequestPool& pool;
  const StoreMap& base;
  std::size_t replicas;
};

struct ReplicaConfig {
  engine::EngineKind engine = engine::EngineKind::kMultiversion;
  std::size_t slots = 16;
  sim::SimTime rollback_time = sim::from_ms(0.02);
  std::size_t gc_threshold = 64;
  sim::SimTime skew = 0;
  sim::SimTime anti_entropy = sim::from_ms(50);
  sim::SimTime retry = sim::from_ms(10);
  bool readonly_shortcut = false;
  sim::SimTime noop_flush = 0;  // 0 disables
  sim::SimTime noop_service = sim::from_ms(0.01);
};

// Common bookkeeping: local clock, request creation, response and trace
// records. Subclasses implement the replication protocol.
class Replica {
 public:
  Replica(Env env, ReplicaId self, ReplicaConfig cfg);
  virtual ~Replica() = default;
  Replica(const Replica&) = delete;
  Replica& operator=(const Replica&) = delete;

  ReplicaId id() const { return self_; }

  // Client invocation at this replica.
  virtual void invoke(const workload::TxProgram& op, bool strong, sim::SimTime service) = 0;

  // Failure-detector notification.
  virtual void suspect(ReplicaId) {}

  virtual void start() {}

  // Final committed sequence and full current order (committed prefix first).
  virtual std::vector<const Request*> committed() const = 0;
  virtual std::vector<const Request*> order() const = 0;

  StoreDump dump() const { return executor_->dump(); }
  const engine::Executor& executor() const { return *executor_; }

 protected:
  std::int64_t next_timestamp();
  // New request with a fresh id and timestamp; publish() freezes it.
  Request draft(const workload::TxProgram& op, bool strong, sim::SimTime service, bool internal = false);
  const Request* publish(Request r);
  // Answers a weak read-only op from the executed-prefix state without
  // broadcasting it. Returns false when the shortcut does not apply.
  bool try_shortcut(const workload::TxProgram& op, bool strong, sim::SimTime service);
  void emit_response(const Request* r, const Response& resp, bool stable);
  // SPEC record on the first entry of a local client op into the executed prefix.
  void note_first_execution(const Request* r, const Response& resp);
  void record(sim::Rec kind, const Dot& id, std::vector<Dot> ids = {}, std::uint8_t flag = 0);
  std::unique_ptr<engine::Executor> build_executor(engine::EngineKind kind, std::size_t slots);

  virtual void on_enter(const Request* r, const Response& resp) = 0;

  Env env_;
  ReplicaId self_;
  ReplicaConfig cfg_;
  std::uint64_t curr_event_no_ = 0;
  std::int64_t last_ts_ = 0;
  std::unique_ptr<engine::Executor> executor_;
  std::unordered_set<const Request*> spec_seen_;
};

}  // namespace creek::replica
