#include "creek/sim/simulator.hpp"

#include <sstream>

namespace creek::sim {

EventHandle Simulator::schedule(SimTime fire_time, ReplicaId target, EventKind kind, Handler handler, bool background) {
  if (finished_) throw SimulationError("schedule() after the simulation finished");
  if (fire_time < now_) {
    std::ostringstream os;
    os << "event scheduled in the past: fire_time=" << fire_time << " now=" << now_;
    throw ConfigError(os.str());
  }
  const std::uint64_t seq = next_seq_++;
  queue_.push(Event{fire_time, seq, target, kind, background, std::move(handler)});
  live_.insert(seq);
  if (!background) ++foreground_pending_;
  return EventHandle{seq};
}

bool Simulator::cancel(EventHandle handle) {
  if (!handle || live_.erase(handle.seq) == 0) return false;
  cancelled_.insert(handle.seq);
  return true;
}

void Simulator::crash(ReplicaId r) {
  if (r >= crashed_.size()) crashed_.resize(r + 1, false);
  crashed_[r] = true;
}

void Simulator::fire(Event& ev) {
  now_ = ev.time;
  ++processed_;
  if (crashed(ev.target)) return;
  ev.handler();
}

RunSummary Simulator::run_until(SimTime until) { return run(until, false); }

RunSummary Simulator::run_to_quiescence() { return run(kTimeInfinity, true); }

RunSummary Simulator::run(SimTime until, bool to_quiescence) {
  RunSummary summary;
  while (!queue_.empty()) {
    const Event& top = queue_.top();
    if (top.time > until) break;
    if (to_quiescence && top.background && foreground_pending_ == 0 && top.time >= horizon_ &&
        top.time - last_foreground_ >= grace_) {
      summary.quiescent = true;
      break;
    }
    Event ev = std::move(const_cast<Event&>(top));
    queue_.pop();
    if (cancelled_.erase(ev.seq) > 0) {
      if (!ev.background) --foreground_pending_;
      continue;
    }
    live_.erase(ev.seq);
    if (!ev.background) {
      --foreground_pending_;
      last_foreground_ = ev.time;
    }
    if (processed_ >= event_limit_) {
      std::ostringstream os;
      os << "event limit " << event_limit_ << " exceeded at t=" << to_ms(ev.time)
         << "ms (likely livelock); foreground pending=" << foreground_pending_;
      throw SimulationError(os.str());
    }
    fire(ev);
  }
  if (queue_.empty()) summary.quiescent = true;
  if (to_quiescence) finished_ = true;
  summary.end_time = now_;
  summary.events_processed = processed_;
  return summary;
}

}  // namespace creek::sim
