#pragma once

#include "creek/bcast/cab.hpp"
#include "creek/bcast/gossip.hpp"
#include "creek/bcast/paxos.hpp"
#include "creek/replica/replica.hpp"

namespace creek::replica {

// Mixed-consistency replica: weak ops are ordered by (timestamp, id) and
// executed speculatively; strong ops are additionally CAB-cast and, when
// delivered, commit together with the weak ops of their causal context.
class CreekReplica final : public Replica {
 public:
  static constexpr const char* kCheckDep = "checkDep";

  CreekReplica(Env env, ReplicaId self, ReplicaConfig cfg);

  void connect(const std::vector<CreekReplica*>& peers);
  void start() override;
  void invoke(const workload::TxProgram& op, bool strong, sim::SimTime service) override;
  void suspect(ReplicaId r) override { consensus_.suspect(r); }

  std::vector<const Request*> committed() const override { return committed_; }
  std::vector<const Request*> order() const override;

  bool check_dep(const Dot& id) const;
  const DotSet& causal_ctx() const { return causal_ctx_; }
  const std::vector<const Request*>& tentative() const { return tentative_; }
  const bcast::Cab& cab() const { return cab_; }
  bcast::Consensus& consensus() { return consensus_; }

 private:
  void on_rb_deliver(const Request* r);
  void on_cab_deliver(const Dot& id);
  void adjust_tentative_order(const Request* r);
  void adjust_execution();
  void commit(const Request* r);
  void on_enter(const Request* r, const Response& resp) override;
  void schedule_flush();

  bcast::Gossip<const Request*> gossip_;
  bcast::Consensus consensus_;
  bcast::Cab cab_;

  std::vector<const Request*> committed_;
  std::vector<const Request*> tentative_;
  DotSet causal_ctx_;
  std::unordered_map<Dot, const Request*, DotHash> known_;  // ids in committed · tentative
  std::unordered_set<Dot, DotHash> committed_ids_;
  // Local requests awaiting a (further) response, with the last response sent.
  std::unordered_map<const Request*, std::optional<Response>> awaiting_;
  bool flush_outstanding_ = false;
};

}  // namespace creek::replica
