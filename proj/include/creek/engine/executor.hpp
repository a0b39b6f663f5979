#pragma once

#include <deque>
#include <functional>
#include <memory>
#include <unordered_map>
#include <vector>

#include "creek/core/request.hpp"
#include "creek/engine/mv_engine.hpp"
#include "creek/engine/undo_store.hpp"
#include "creek/sim/simulator.hpp"
#include "creek/sim/trace.hpp"

namespace creek::engine {

enum class EngineKind { kReference, kMultiversion };

const char* to_string(EngineKind k);

struct ExecStats {
  std::uint64_t attempts = 0;   // completed execution attempts, discarded ones included
  std::uint64_t discarded = 0;
  std::uint64_t rollbacks = 0;  // undo rollbacks or version invalidations
  sim::SimTime busy = 0;        // summed slot occupancy
};

// Drives the execution of an order (committed prefix followed by a revisable
// suffix) against a state engine, simulating execution time on the replica's
// slots. `on_enter` fires whenever a request becomes part of the executed
// prefix, with the response it produced there.
class Executor {
 public:
  using EnterFn = std::function<void(const Request*, const Response&)>;

  Executor(sim::Simulator& sim, ReplicaId self, sim::Trace* trace, EnterFn on_enter)
      : sim_(sim), self_(self), trace_(trace), on_enter_(std::move(on_enter)) {}
  virtual ~Executor() = default;

  // `order` must extend the first `committed_len` entries of every earlier
  // order unchanged.
  virtual void adjust(const std::vector<const Request*>& order, std::size_t committed_len) = 0;

  virtual bool in_prefix(const Request* r) const = 0;
  virtual const Response* response(const Request* r) const = 0;
  virtual std::size_t executed_len() const = 0;
  virtual bool idle() const = 0;
  virtual StoreDump dump() const = 0;
  // Runs a read-only program on the state of the executed prefix.
  virtual Response read_snapshot(const workload::TxProgram& op) const = 0;

  const ExecStats& stats() const { return stats_; }
  virtual std::size_t slots() const = 0;

 protected:
  void record(sim::Rec kind, const Request* r, std::uint8_t flag = 0, Response resp = {}) {
    if (!trace_) return;
    sim::TraceRecord rec;
    rec.time = sim_.now();
    rec.replica = self_;
    rec.kind = kind;
    rec.id = r->id;
    rec.flag = flag;
    rec.response = std::move(resp);
    trace_->add(std::move(rec));
  }

  sim::Simulator& sim_;
  ReplicaId self_;
  sim::Trace* trace_;
  EnterFn on_enter_;
  ExecStats stats_;
};

// One slot over the undo-log store: rollbacks strictly before executions,
// executions strictly in order. An execution whose request is no longer the
// next one when it completes is discarded.
class SequentialExecutor final : public Executor {
 public:
  SequentialExecutor(sim::Simulator& sim, ReplicaId self, sim::Trace* trace, EnterFn on_enter, const StoreMap& base,
                     sim::SimTime rollback_time);

  void adjust(const std::vector<const Request*>& order, std::size_t committed_len) override;
  bool in_prefix(const Request* r) const override { return responses_.count(r) > 0; }
  const Response* response(const Request* r) const override;
  std::size_t executed_len() const override { return executed_.size(); }
  bool idle() const override { return !busy_ && to_rollback_.empty() && executed_.size() == order_.size(); }
  StoreDump dump() const override { return store_.dump(); }
  Response read_snapshot(const workload::TxProgram& op) const override;
  std::size_t slots() const override { return 1; }

  const std::deque<const Request*>& to_rollback() const { return to_rollback_; }
  const std::vector<const Request*>& executed() const { return executed_; }
  const UndoStore& store() const { return store_; }

 private:
  void pump();
  void finish_execution(const Request* r);
  void finish_rollback(const Request* r);
  void trim_undo();

  UndoStore store_;
  sim::SimTime rollback_time_;
  std::vector<const Request*> order_;
  std::vector<const Request*> executed_;
  std::deque<const Request*> to_rollback_;
  std::unordered_map<const Request*, Response> responses_;
  std::size_t committed_len_ = 0;
  std::size_t undo_trimmed_ = 0;
  bool busy_ = false;
};

// Multiversion engine with `slots` concurrent attempts. Attempts read a
// snapshot at start and are validated and installed atomically at completion.
class ConcurrentExecutor final : public Executor {
 public:
  ConcurrentExecutor(sim::Simulator& sim, ReplicaId self, sim::Trace* trace, EnterFn on_enter, const StoreMap& base,
                     std::size_t slots, std::size_t gc_threshold = 64);

  void adjust(const std::vector<const Request*>& order, std::size_t committed_len) override;
  bool in_prefix(const Request* r) const override;
  const Response* response(const Request* r) const override { return engine_.response(r); }
  std::size_t executed_len() const override { return prefix_len_; }
  bool idle() const override { return inflight_.empty() && prefix_len_ == engine_.order().size(); }
  StoreDump dump() const override { return engine_.dump(prefix_len_); }
  Response read_snapshot(const workload::TxProgram& op) const override {
    return engine_.execute_at(op, prefix_len_);
  }
  std::size_t slots() const override { return slots_; }

  const MvEngine& engine() const { return engine_; }
  std::size_t reclaimed() const { return reclaimed_; }

 private:
  void pump();
  void finish(const Request* r);
  void note_invalidated(const std::vector<const Request*>& inv);
  void refresh_prefix(std::size_t scan_from);
  void collect(bool force);

  MvEngine engine_;
  std::size_t slots_;
  std::size_t gc_threshold_;
  std::unordered_map<const Request*, MvEngine::Attempt> inflight_;
  std::size_t prefix_len_ = 0;
  std::size_t committed_len_ = 0;
  std::size_t folded_upto_ = 0;
  std::size_t reclaimed_ = 0;
  bool in_callback_ = false;
};

std::unique_ptr<Executor> make_executor(EngineKind kind, sim::Simulator& sim, ReplicaId self, sim::Trace* trace,
                                        Executor::EnterFn on_enter, const StoreMap& base, std::size_t slots,
                                        sim::SimTime rollback_time, std::size_t gc_threshold = 64);

}  // namespace creek::engine
