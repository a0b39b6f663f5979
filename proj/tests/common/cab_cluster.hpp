#pragma once

// Stand-alone CAB deployment for property tests: integer payloads travel by
// gossip, ids are CAB-cast with the predicate "payload received".

#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "creek/bcast/cab.hpp"
#include "creek/bcast/gossip.hpp"
#include "creek/bcast/paxos.hpp"

namespace creek::testing {

class CabCluster {
 public:
  struct Node {
    std::unique_ptr<bcast::Gossip<int>> gossip;
    std::unique_ptr<bcast::Consensus> consensus;
    std::unique_ptr<bcast::Cab> cab;
    DotSet received;
    std::vector<Dot> delivered;
    std::uint64_t events = 0;
  };

  CabCluster(std::size_t n, std::uint64_t seed, sim::NetworkConfig net = {}, sim::SimTime retry = sim::from_ms(10))
      : n_(n), sim_(n), net_(sim_, net, seed, n), nodes_(n + 1) {
    std::vector<bcast::Gossip<int>*> g(n + 1, nullptr);
    std::vector<bcast::Consensus*> c(n + 1, nullptr);
    std::vector<bcast::Cab*> b(n + 1, nullptr);
    for (ReplicaId r = 1; r <= n; ++r) {
      Node& node = nodes_[r];
      node.gossip = std::make_unique<bcast::Gossip<int>>(
          sim_, net_, r, sim::Channel::kGossip, [this, r](const Dot& id, const int&) { on_rb(r, id); },
          [](const int&) { return std::size_t{8}; });
      node.consensus = std::make_unique<bcast::Consensus>(sim_, net_, r, n, retry, &trace_);
      node.cab = std::make_unique<bcast::Cab>(sim_, net_, r, *node.consensus, &trace_);
      node.cab->register_predicate("received", [&node](const Dot& id) { return node.received.contains(id); });
      node.cab->set_deliver([this, r](const Dot& id) { on_deliver(r, id); });
      g[r] = node.gossip.get();
      c[r] = node.consensus.get();
      b[r] = node.cab.get();
    }
    for (ReplicaId r = 1; r <= n; ++r) {
      nodes_[r].gossip->connect(g);
      nodes_[r].consensus->connect(c);
      nodes_[r].cab->connect(b);
    }
    for (ReplicaId r = 1; r <= n; ++r) {
      nodes_[r].gossip->start(sim::from_ms(50));
      nodes_[r].cab->start_sync(sim::from_ms(50));
      nodes_[r].consensus->start();
    }
  }

  // RB-casts a payload and CAB-casts its id at `at`.
  void cast_at(ReplicaId r, sim::SimTime at) {
    sim_.schedule(at, r, sim::EventKind::kTimer, [this, r] {
      Node& node = nodes_[r];
      const Dot id{r, ++node.events};
      casts_.emplace(id, r);
      node.received.insert(id);
      node.gossip->cast(id, static_cast<int>(id.event));
      node.cab->cast(id, "received", sim_.now());
      node.cab->on_local_change();
    });
  }

  // Casts an id whose payload reaches nobody but the caster until `reveal`.
  void cast_hidden_payload(ReplicaId r, sim::SimTime at, sim::SimTime reveal) {
    sim_.schedule(at, r, sim::EventKind::kTimer, [this, r, reveal] {
      Node& node = nodes_[r];
      const Dot id{r, ++node.events};
      casts_.emplace(id, r);
      node.received.insert(id);
      node.cab->cast(id, "received", sim_.now());
      node.cab->on_local_change();
      sim_.schedule(reveal, r, sim::EventKind::kTimer, [this, r, id] {
        nodes_[r].gossip->cast(id, static_cast<int>(id.event));
      });
    });
  }

  void crash_at(ReplicaId r, sim::SimTime at, sim::SimTime fd_delay) {
    sim_.extend_horizon(at + fd_delay);
    sim_.schedule(at, sim::kNoReplica, sim::EventKind::kTimer, [this, r, fd_delay] {
      sim_.crash(r);
      for (ReplicaId j = 1; j <= n_; ++j)
        if (j != r)
          sim_.schedule_after(fd_delay, j, sim::EventKind::kTimer, [this, j, r] { nodes_[j].consensus->suspect(r); });
    });
  }

  sim::RunSummary run() { return sim_.run_to_quiescence(); }

  // Empty when uniform total order, integrity, validity, agreement and
  // deferral all hold.
  std::vector<std::string> violations() const {
    blocked_ = 0;
    std::vector<std::string> out = violations_;
    for (ReplicaId a = 1; a <= n_; ++a) {
      for (ReplicaId b = a + 1; b <= n_; ++b) {
        const auto& x = nodes_[a].delivered;
        const auto& y = nodes_[b].delivered;
        for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i)
          if (x[i] != y[i]) {
            out.push_back(str("total order: replicas ", a, " and ", b, " differ at position ", i));
            break;
          }
      }
    }
    std::set<Dot> delivered_anywhere;
    for (ReplicaId r = 1; r <= n_; ++r)
      for (const Dot& id : nodes_[r].delivered) {
        delivered_anywhere.insert(id);
        if (!casts_.count(id)) out.push_back(str("integrity: ", id, " delivered but never cast"));
      }
    for (ReplicaId r = 1; r <= n_; ++r) {
      if (sim_.crashed(r)) continue;
      // Validity and agreement are owed only for ids whose predicate becomes
      // true for good. A queue head whose payload no correct replica holds
      // never will, and nothing behind it can be delivered.
      if (const Dot* head = nodes_[r].cab->head(); head && !held_by_correct(*head)) {
        ++blocked_;
        continue;
      }
      const std::set<Dot> mine(nodes_[r].delivered.begin(), nodes_[r].delivered.end());
      for (const auto& [id, caster] : casts_) {
        if (!sim_.crashed(caster) && !mine.count(id)) out.push_back(str("validity: ", r, " never delivered ", id));
      }
      for (const Dot& id : delivered_anywhere)
        if (!mine.count(id)) out.push_back(str("agreement: ", r, " never delivered ", id));
    }
    return out;
  }

  // Correct replicas excused by the last violations() call because their
  // queue head lost its payload with a crashed replica.
  std::size_t blocked() const { return blocked_; }

  const Node& node(ReplicaId r) const { return nodes_[r]; }
  sim::Simulator& sim() { return sim_; }
  sim::Network& net() { return net_; }
  const sim::Trace& trace() const { return trace_; }
  std::size_t casts() const { return casts_.size(); }

 private:
  template <class... Ts>
  static std::string str(const Ts&... parts) {
    std::ostringstream os;
    (os << ... << parts);
    return os.str();
  }

  bool held_by_correct(const Dot& id) const {
    for (ReplicaId r = 1; r <= n_; ++r)
      if (!sim_.crashed(r) && nodes_[r].received.contains(id)) return true;
    return false;
  }

  void on_rb(ReplicaId r, const Dot& id) {
    nodes_[r].received.insert(id);
    nodes_[r].cab->on_local_change();
  }

  void on_deliver(ReplicaId r, const Dot& id) {
    Node& node = nodes_[r];
    if (!node.received.contains(id)) violations_.push_back(str("deferral: ", r, " delivered ", id, " before its payload"));
    for (const Dot& d : node.delivered)
      if (d == id) violations_.push_back(str("integrity: ", r, " delivered ", id, " twice"));
    node.delivered.push_back(id);
  }

  std::size_t n_;
  sim::Simulator sim_;
  sim::Network net_;
  sim::Trace trace_;
  std::vector<Node> nodes_;
  std::map<Dot, ReplicaId> casts_;
  std::vector<std::string> violations_;
  mutable std::size_t blocked_ = 0;
};

}  // namespace creek::testing
