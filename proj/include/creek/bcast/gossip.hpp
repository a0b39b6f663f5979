#pragma once

#include <functional>
#include <map>
#include <vector>

#include "creek/core/dot_set.hpp"
#include "creek/sim/network.hpp"
#include "creek/sim/simulator.hpp"

namespace creek::bcast {

// Reliable broadcast by direct send plus periodic anti-entropy. The caster
// sends the message to every peer; every anti-entropy period each replica
// sends its delivered-set frontier to every peer, and a peer answers with the
// messages the frontier lacks. This repairs losses from partitions and from
// casters that crash mid-broadcast.
template <class T>
class Gossip {
 public:
  using DeliverFn = std::function<void(const Dot&, const T&)>;
  using SizeFn = std::function<std::size_t(const T&)>;

  Gossip(sim::Simulator& sim, sim::Network& net, ReplicaId self, sim::Channel channel, DeliverFn deliver,
         SizeFn size)
      : sim_(sim), net_(net), self_(self), channel_(channel), deliver_(std::move(deliver)), size_(std::move(size)) {}

  // peers[r] is replica r's instance (index 0 unused).
  void connect(std::vector<Gossip*> peers) { peers_ = std::move(peers); }

  // `id` must be fresh and originate at this replica. The caller performs its
  // own local delivery.
  void cast(const Dot& id, T body) {
    store(id, body);
    for (ReplicaId r = 1; r < peers_.size(); ++r) {
      if (r == self_) continue;
      send_message(r, id, body);
    }
  }

  void start(sim::SimTime period) {
    period_ = period;
    if (period_ > 0) schedule_round();
  }

  bool delivered(const Dot& id) const { return seen_.contains(id); }
  const DotSet& frontier() const { return seen_; }
  std::size_t count() const { return seen_.size(); }

 private:
  void store(const Dot& id, const T& body) {
    seen_.insert(id);
    log_[id.replica].emplace(id.event, body);
  }

  void send_message(ReplicaId to, const Dot& id, const T& body) {
    Gossip* peer = peers_[to];
    net_.send(self_, to, channel_, 16 + size_(body), [peer, id, body] { peer->receive(id, body); });
  }

  void receive(const Dot& id, const T& body) {
    if (seen_.contains(id)) return;
    store(id, body);
    deliver_(id, body);
  }

  void schedule_round() {
    sim_.schedule_after(
        period_, self_, sim::EventKind::kTimer,
        [this] {
          for (ReplicaId r = 1; r < peers_.size(); ++r) {
            if (r == self_) continue;
            Gossip* peer = peers_[r];
            net_.send(
                self_, r, sim::Channel::kAntiEntropy, 8 + 12 * seen_.encoded_entries(),
                [peer, from = self_, f = seen_] { peer->on_frontier(from, f); }, true);
          }
          schedule_round();
        },
        true);
  }

  void on_frontier(ReplicaId from, const DotSet& theirs) {
    for (const auto& [origin, msgs] : log_) {
      for (auto it = msgs.upper_bound(theirs.prefix(origin)); it != msgs.end(); ++it) {
        const Dot id{origin, it->first};
        if (!theirs.contains(id)) send_message(from, id, it->second);
      }
    }
  }

  sim::Simulator& sim_;
  sim::Network& net_;
  ReplicaId self_;
  sim::Channel channel_;
  DeliverFn deliver_;
  SizeFn size_;
  std::vector<Gossip*> peers_;
  DotSet seen_;
  std::map<ReplicaId, std::map<std::uint64_t, T>> log_;
  sim::SimTime period_ = 0;
};

}  // namespace creek::bcast
