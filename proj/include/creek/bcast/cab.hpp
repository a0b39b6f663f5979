#pragma once

#include <deque>
#include <functional>
#include <map>
#include <string>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "creek/bcast/paxos.hpp"

namespace creek::bcast {

// Conditional atomic broadcast reduced to consensus on identifiers. Each cast
// id carries a named predicate; decided ids are delivered strictly in decision
// order, and the head of the queue waits until its predicate holds locally.
class Cab {
 public:
  using Predicate = std::function<bool(const Dot&)>;
  using DeliverFn = std::function<void(const Dot&)>;

  Cab(sim::Simulator& sim, sim::Network& net, ReplicaId self, Consensus& consensus, sim::Trace* trace);

  void connect(std::vector<Cab*> peers) { peers_ = std::move(peers); }

  // Every replica must register the same names in the same order.
  void register_predicate(const std::string& name, Predicate p);
  void set_deliver(DeliverFn fn) { deliver_ = std::move(fn); }

  // order_ts orders ids inside a proposed batch: (order_ts, id).
  void cast(const Dot& id, const std::string& predicate, std::int64_t order_ts);

  // Re-evaluates the delivery gate and lets the leader propose; call after
  // every local event that can change predicate truth.
  void on_local_change();

  // Pops the queue head while its predicate holds. Returns delivered ids.
  std::vector<Dot> try_deliver();

  void start_sync(sim::SimTime period);

  const std::vector<Dot>& delivered() const { return delivered_; }
  bool was_delivered(const Dot& id) const { return delivered_set_.count(id) > 0; }
  std::size_t queued() const { return queue_.size(); }
  const Dot* head() const { return queue_.empty() ? nullptr : &queue_.front().id; }
  std::size_t pending() const { return pending_.size(); }
  Consensus& consensus() { return consensus_; }

 private:
  using OrderKey = std::pair<std::int64_t, Dot>;

  Batch next_batch();
  void on_decide(std::uint64_t k, const Batch& v);
  void on_submit(const CabItem& item, std::int64_t ts);
  void on_sync(ReplicaId from, std::uint64_t upto, const std::vector<std::pair<CabItem, std::int64_t>>& pending);
  void schedule_sync();

  sim::Simulator& sim_;
  sim::Network& net_;
  ReplicaId self_;
  Consensus& consensus_;
  sim::Trace* trace_;
  std::vector<Cab*> peers_;
  std::vector<std::pair<std::string, Predicate>> predicates_;
  DeliverFn deliver_;

  std::map<OrderKey, CabItem> pending_;
  std::unordered_map<Dot, std::int64_t, DotHash> pending_ts_;
  std::unordered_set<Dot, DotHash> decided_ids_;
  std::deque<CabItem> queue_;
  std::vector<Dot> delivered_;
  std::unordered_set<Dot, DotHash> delivered_set_;
  bool delivering_ = false;
  bool again_ = false;
  sim::SimTime sync_period_ = 0;
};

}  // namespace creek::bcast
