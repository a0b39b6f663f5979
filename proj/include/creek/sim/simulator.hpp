#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "creek/sim/time.hpp"

namespace creek::sim {

using ReplicaId = std::uint32_t;

// Target for events that belong to no replica (fault injection, drivers).
inline constexpr ReplicaId kNoReplica = 0;

enum class EventKind : std::uint8_t { kMessageArrival, kExecutionComplete, kRollbackComplete, kTimer };

struct EventHandle {
  std::uint64_t seq = 0;
  explicit operator bool() const { return seq != 0; }
};

class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunSummary {
  SimTime end_time = 0;
  std::uint64_t events_processed = 0;
  bool quiescent = false;
};

// Deterministic discrete-event kernel. Events fire in (fire_time, insertion
// sequence) order. Background events (periodic gossip and timers) do not keep
// the simulation alive: run_to_quiescence() stops once no foreground work is
// pending, the fault horizon has passed, and a grace period of background
// activity produced no new foreground work.
class Simulator {
 public:
  using Handler = std::function<void()>;

  explicit Simulator(std::size_t replicas = 0) : crashed_(replicas + 1, false) {}

  SimTime now() const { return now_; }

  std::size_t replica_count() const { return crashed_.size() - 1; }

  EventHandle schedule(SimTime fire_time, ReplicaId target, EventKind kind, Handler handler, bool background = false);

  EventHandle schedule_after(SimTime delay, ReplicaId target, EventKind kind, Handler handler, bool background = false) {
    return schedule(now_ + delay, target, kind, std::move(handler), background);
  }

  // Returns false when the event already fired or was cancelled.
  bool cancel(EventHandle handle);

  void crash(ReplicaId r);
  bool crashed(ReplicaId r) const { return r != kNoReplica && r < crashed_.size() && crashed_[r]; }

  // Faults may still change the world until this time; quiescence is not
  // declared before it.
  void extend_horizon(SimTime t) { horizon_ = std::max(horizon_, t); }
  void set_quiescence_grace(SimTime g) { grace_ = g; }
  void set_event_limit(std::uint64_t limit) { event_limit_ = limit; }

  RunSummary run_until(SimTime until);
  RunSummary run_to_quiescence();

  bool finished() const { return finished_; }
  std::size_t pending_foreground() const { return foreground_pending_; }
  std::uint64_t events_processed() const { return processed_; }

 private:
  struct Event {
    SimTime time;
    std::uint64_t seq;
    ReplicaId target;
    EventKind kind;
    bool background;
    Handler handler;
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      return a.time != b.time ? a.time > b.time : a.seq > b.seq;
    }
  };

  RunSummary run(SimTime until, bool to_quiescence);
  void fire(Event& ev);

  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::unordered_set<std::uint64_t> live_;
  std::unordered_set<std::uint64_t> cancelled_;
  std::vector<bool> crashed_;
  SimTime now_ = 0;
  SimTime horizon_ = 0;
  SimTime grace_ = from_ms(120);
  SimTime last_foreground_ = 0;
  std::uint64_t next_seq_ = 1;
  std::uint64_t processed_ = 0;
  std::uint64_t event_limit_ = 200'000'000;
  std::size_t foreground_pending_ = 0;
  bool finished_ = false;
};

}  // namespace creek::sim
