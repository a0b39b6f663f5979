#pragma once

#include <map>

#include "creek/bcast/cab.hpp"
#include "creek/bcast/gossip.hpp"
#include "creek/bcast/paxos.hpp"
#include "creek/replica/replica.hpp"

namespace creek::replica {

// Sequential state machine replication: payloads by gossip, order by atomic
// broadcast of identifiers, one execution slot, responses after execution.
class SmrReplica final : public Replica {
 public:
  static constexpr const char* kReceived = "received";

  SmrReplica(Env env, ReplicaId self, ReplicaConfig cfg);
  void connect(const std::vector<SmrReplica*>& peers);
  void start() override;
  void invoke(const workload::TxProgram& op, bool strong, sim::SimTime service) override;
  void suspect(ReplicaId r) override { consensus_.suspect(r); }
  std::vector<const Request*> committed() const override { return log_; }
  std::vector<const Request*> order() const override { return log_; }

 private:
  void on_rb_deliver(const Request* r);
  void on_ab_deliver(const Dot& id);
  void on_enter(const Request* r, const Response& resp) override;

  bcast::Gossip<const Request*> gossip_;
  bcast::Consensus consensus_;
  bcast::Cab cab_;
  std::unordered_map<Dot, const Request*, DotHash> known_;
  std::vector<const Request*> log_;
  std::unordered_set<const Request*> awaiting_;
};

// Bayou-style replication: tentative order by (timestamp, id), final order
// by commit sequence numbers that a primary (replica 1) assigns in its
// delivery order. Sequential execution with undo.
class BayouReplica final : public Replica {
 public:
  struct CsnRecord {
    std::uint64_t csn;
    Dot id;
  };
  static constexpr ReplicaId kPrimary = 1;

  BayouReplica(Env env, ReplicaId self, ReplicaConfig cfg);
  void connect(const std::vector<BayouReplica*>& peers);
  void start() override;
  void invoke(const workload::TxProgram& op, bool strong, sim::SimTime service) override;
  std::vector<const Request*> committed() const override { return committed_; }
  std::vector<const Request*> order() const override;

 private:
  void on_rb_deliver(const Request* r);
  void on_csn(const CsnRecord& rec);
  void accept(const Request* r);
  void assign_csn(const Request* r);
  void try_commit();
  void on_enter(const Request* r, const Response& resp) override;

  bcast::Gossip<const Request*> gossip_;
  bcast::Gossip<CsnRecord> csn_gossip_;
  std::unordered_map<Dot, const Request*, DotHash> known_;
  std::map<std::uint64_t, Dot> csn_log_;
  std::uint64_t next_csn_ = 1;
  std::vector<const Request*> committed_;
  std::vector<const Request*> tentative_;
  std::unordered_set<Dot, DotHash> committed_ids_;
  std::unordered_map<const Request*, std::optional<Response>> awaiting_;
};

// Speculative SMR with optimistic delivery: each replica executes the
// leader's proposals as soon as it accepts them and withholds every response
// until the op's final delivery confirms it.
class ArchieReplica final : public Replica {
 public:
  static constexpr const char* kReceived = "received";

  ArchieReplica(Env env, ReplicaId self, ReplicaConfig cfg);
  void connect(const std::vector<ArchieReplica*>& peers);
  void start() override;
  void invoke(const workload::TxProgram& op, bool strong, sim::SimTime service) override;
  void suspect(ReplicaId r) override { consensus_.suspect(r); }
  std::vector<const Request*> committed() const override { return final_; }
  std::vector<const Request*> order() const override { return order_; }

 private:
  void on_rb_deliver(const Request* r);
  void on_accept(std::uint64_t k, const bcast::Batch& v);
  void on_final(const Dot& id);
  void rebuild_order();
  void on_enter(const Request* r, const Response& resp) override;

  bcast::Gossip<const Request*> gossip_;
  bcast::Consensus consensus_;
  bcast::Cab cab_;
  std::unordered_map<Dot, const Request*, DotHash> known_;
  std::map<std::uint64_t, bcast::Batch> proposals_;
  std::vector<const Request*> final_;
  std::unordered_set<Dot, DotHash> final_ids_;
  std::vector<const Request*> order_;
  std::uint64_t base_k_ = 1;
  std::unordered_set<const Request*> awaiting_;
};

}  // namespace creek::replica
