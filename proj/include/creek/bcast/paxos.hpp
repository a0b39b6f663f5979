#pragma once

#include <compare>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <vector>

#include "creek/core/dot.hpp"
#include "creek/sim/network.hpp"
#include "creek/sim/simulator.hpp"
#include "creek/sim/trace.hpp"

namespace creek::bcast {

// One proposed message: identifier plus the index of its delivery predicate.
struct CabItem {
  Dot id;
  std::uint32_t predicate = 0;
  friend bool operator==(const CabItem&, const CabItem&) = default;
};
using Batch = std::vector<CabItem>;

struct Ballot {
  std::uint64_t round = 0;
  ReplicaId id = 0;
  friend auto operator<=>(const Ballot&, const Ballot&) = default;
};

// Multi-Paxos over message identifiers, one instance in flight at a time.
// The leader is the lowest-numbered replica not suspected by the local
// failure detector; replica 1 starts as leader with phase 1 already done.
// Payloads never travel through consensus.
class Consensus {
 public:
  struct Hooks {
    std::function<Batch()> next_batch;                             // leader: what to propose next
    std::function<void(std::uint64_t, const Batch&)> on_decide;    // called in instance order
    std::function<void(std::uint64_t, const Batch&)> on_accept;    // acceptor accepted a proposal
  };

  Consensus(sim::Simulator& sim, sim::Network& net, ReplicaId self, std::size_t replicas, sim::SimTime retry,
            sim::Trace* trace);

  void connect(std::vector<Consensus*> peers) { peers_ = std::move(peers); }
  void set_hooks(Hooks h) { hooks_ = std::move(h); }
  void set_on_accept(std::function<void(std::uint64_t, const Batch&)> fn) { hooks_.on_accept = std::move(fn); }
  void start();

  // Failure-detector output: r has crashed.
  void suspect(ReplicaId r);
  ReplicaId leader() const;
  bool leading() const { return leading_; }

  // Leader: propose the next batch if no instance is in flight.
  void poke();

  // A decided value learnt from a peer (catch-up).
  void learn(std::uint64_t k, const Batch& v);

  // Instances 1..delivered_upto() have been reported through on_decide.
  std::uint64_t delivered_upto() const { return next_deliver_ - 1; }
  const Batch* decision(std::uint64_t k) const;
  std::size_t majority() const { return replicas_ / 2 + 1; }

 private:
  struct Accepted {
    Ballot ballot;
    Batch value;
  };
  struct Votes {
    std::set<ReplicaId> voters;
    Batch value;
  };

  void become_leader();
  void send_1a(bool include_self = true);
  void send_2a(bool include_self = true);
  void propose_next();
  void decide(std::uint64_t k, const Batch& v);
  void schedule_retry();

  void on_1a(ReplicaId from, Ballot b, std::uint64_t from_k);
  void on_1b(ReplicaId from, Ballot b, const std::map<std::uint64_t, Accepted>& entries);
  void on_2a(ReplicaId from, Ballot b, std::uint64_t k, const Batch& v);
  void on_2b(ReplicaId from, Ballot b, std::uint64_t k, const Batch& v);
  void on_nack(Ballot promised);

  void broadcast(sim::Channel ch, std::size_t bytes, const std::function<void(Consensus&)>& fn,
                 bool include_self = true);

  sim::Simulator& sim_;
  sim::Network& net_;
  ReplicaId self_;
  std::size_t replicas_;
  sim::SimTime retry_;
  sim::Trace* trace_;
  Hooks hooks_;
  std::vector<Consensus*> peers_;
  std::set<ReplicaId> suspected_;

  // acceptor
  Ballot promised_{1, 1};
  std::map<std::uint64_t, Accepted> accepted_;
  // learner
  std::map<std::uint64_t, std::map<Ballot, Votes>> votes_;
  std::map<std::uint64_t, Batch> decided_;
  std::uint64_t next_deliver_ = 1;
  bool delivering_ = false;
  // leader
  bool leading_ = false;
  Ballot ballot_;
  std::uint64_t max_round_ = 1;
  bool phase1_done_ = false;
  sim::SimTime phase1_since_ = 0;
  std::map<ReplicaId, std::map<std::uint64_t, Accepted>> promises_;
  std::deque<std::pair<std::uint64_t, Batch>> recovery_;
  std::uint64_t next_k_ = 1;
  std::uint64_t inflight_k_ = 0;
  Batch inflight_v_;
  sim::SimTime inflight_since_ = 0;
};

}  // namespace creek::bcast
