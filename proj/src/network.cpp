#include "creek/sim/network.hpp"

#include <set>
#include <sstream>

namespace creek::sim {

const char* to_string(Channel c) {
  switch (c) {
    case Channel::kGossip: return "gossip";
    case Channel::kAntiEntropy: return "anti-entropy";
    case Channel::kCabSubmit: return "cab-submit";
    case Channel::kCabSync: return "cab-sync";
    case Channel::kPaxos1a: return "paxos-1a";
    case Channel::kPaxos1b: return "paxos-1b";
    case Channel::kPaxos2a: return "paxos-2a";
    case Channel::kPaxos2b: return "paxos-2b";
    case Channel::kPaxosNack: return "paxos-nack";
    case Channel::kDecision: return "decision";
    case Channel::kBayouCsn: return "bayou-csn";
    case Channel::kCount: break;
  }
  return "?";
}

Network::Network(Simulator& sim, NetworkConfig cfg, std::uint64_t seed, std::size_t replicas)
    : sim_(sim), cfg_(cfg), seed_(seed), replicas_(replicas) {
  if (!(cfg_.latency_low_ms >= 0) || cfg_.latency_low_ms > cfg_.latency_high_ms)
    throw ConfigError("network latency range must satisfy 0 <= low <= high");
}

void Network::set_partition(std::vector<std::vector<ReplicaId>> groups, SimTime from, SimTime to) {
  if (from >= to) throw ConfigError("partition window must satisfy from < to");
  std::set<ReplicaId> seen;
  for (const auto& g : groups) {
    for (ReplicaId r : g) {
      if (r < 1 || r > replicas_) throw ConfigError("partition names unknown replica " + std::to_string(r));
      if (!seen.insert(r).second) throw ConfigError("partition groups overlap at replica " + std::to_string(r));
    }
  }
  if (seen.size() != replicas_) throw ConfigError("partition groups must cover every replica");
  for (const auto& w : partitions_)
    if (from < w.to && w.from < to) throw ConfigError("partition windows overlap in time");
  partitions_.push_back(PartitionWindow{std::move(groups), from, to});
  // A partition that never heals must not keep the run alive forever.
  sim_.extend_horizon(to == kTimeInfinity ? from : to);
}

std::size_t Network::group_of(ReplicaId r, SimTime t) const {
  for (const auto& w : partitions_) {
    if (t < w.from || t >= w.to) continue;
    for (std::size_t i = 0; i < w.groups.size(); ++i)
      for (ReplicaId x : w.groups[i])
        if (x == r) return i;
  }
  return 0;
}

bool Network::connected(ReplicaId a, ReplicaId b, SimTime t) const { return group_of(a, t) == group_of(b, t); }

Rng& Network::link(ReplicaId src, ReplicaId dst) {
  auto key = std::make_pair(src, dst);
  auto it = links_.find(key);
  if (it == links_.end()) {
    const std::uint64_t tag = (static_cast<std::uint64_t>(Stream::kNetwork) << 40) | (std::uint64_t{src} << 20) | dst;
    it = links_.emplace(key, Rng::stream(seed_, tag)).first;
  }
  return it->second;
}

SimTime Network::sample_latency(ReplicaId src, ReplicaId dst) {
  if (src == dst) throw ConfigError("sample_latency requires src != dst");
  return from_ms(link(src, dst).uniform(cfg_.latency_low_ms, cfg_.latency_high_ms));
}

void Network::send(ReplicaId src, ReplicaId dst, Channel ch, std::size_t bytes, std::function<void()> deliver,
                   bool background) {
  if (sim_.crashed(src)) return;
  if (src == dst) {
    sim_.schedule(sim_.now(), dst, EventKind::kMessageArrival, std::move(deliver), background);
    return;
  }
  auto& st = stats_[static_cast<std::size_t>(ch)];
  ++st.messages;
  st.bytes += bytes;
  const SimTime lat = sample_latency(src, dst);
  if (!connected(src, dst, sim_.now()) || sim_.crashed(dst)) {
    ++st.dropped;
    return;
  }
  sim_.schedule(
      sim_.now() + lat, dst, EventKind::kMessageArrival,
      [this, src, dst, ch, d = std::move(deliver)]() {
        if (!connected(src, dst, sim_.now())) {
          ++stats_[static_cast<std::size_t>(ch)].dropped;
          return;
        }
        d();
      },
      background);
}

}  // namespace creek::sim
