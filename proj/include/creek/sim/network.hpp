#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <map>
#include <vector>

#include "creek/sim/rng.hpp"
#include "creek/sim/simulator.hpp"

namespace creek::sim {

enum class Channel : std::uint8_t {
  kGossip,
  kAntiEntropy,
  kCabSubmit,
  kCabSync,
  kPaxos1a,
  kPaxos1b,
  kPaxos2a,
  kPaxos2b,
  kPaxosNack,
  kDecision,
  kBayouCsn,
  kCount
};

const char* to_string(Channel c);

struct ChannelStats {
  std::uint64_t messages = 0;
  std::uint64_t bytes = 0;
  std::uint64_t dropped = 0;
};

struct NetworkConfig {
  double latency_low_ms = 0.2;
  double latency_high_ms = 0.3;
};

struct PartitionWindow {
  std::vector<std::vector<ReplicaId>> groups;
  SimTime from = 0;
  SimTime to = 0;
};

// Point-to-point message delivery with uniform latency, partitions and
// crash-stop replicas. Every ordered pair of replicas has its own latency
// stream, so the latency of a message depends only on how many messages were
// sent earlier on the same link.
class Network {
 public:
  Network(Simulator& sim, NetworkConfig cfg, std::uint64_t seed, std::size_t replicas);

  // Messages between different groups are dropped while [from, to) is active.
  void set_partition(std::vector<std::vector<ReplicaId>> groups, SimTime from, SimTime to);

  bool connected(ReplicaId a, ReplicaId b, SimTime t) const;

  // Group index of r at time t (0 when no partition is active).
  std::size_t group_of(ReplicaId r, SimTime t) const;

  SimTime sample_latency(ReplicaId src, ReplicaId dst);

  // Self-sends are delivered at the current instant and not counted.
  void send(ReplicaId src, ReplicaId dst, Channel ch, std::size_t bytes, std::function<void()> deliver,
            bool background = false);

  const ChannelStats& stats(Channel c) const { return stats_[static_cast<std::size_t>(c)]; }
  const std::vector<PartitionWindow>& partitions() const { return partitions_; }
  std::size_t replicas() const { return replicas_; }

 private:
  Rng& link(ReplicaId src, ReplicaId dst);

  Simulator& sim_;
  NetworkConfig cfg_;
  std::uint64_t seed_;
  std::size_t replicas_;
  std::map<std::pair<ReplicaId, ReplicaId>, Rng> links_;
  std::vector<PartitionWindow> partitions_;
  std::array<ChannelStats, static_cast<std::size_t>(Channel::kCount)> stats_{};
};

}  // namespace creek::sim
