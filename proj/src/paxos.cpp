#include "creek/bcast/paxos.hpp"

#include <sstream>

#include "creek/core/errors.hpp"

namespace creek::bcast {

namespace {
std::size_t batch_bytes(const Batch& v) { return 24 + 14 * v.size(); }
}  // namespace

Consensus::Consensus(sim::Simulator& sim, sim::Network& net, ReplicaId self, std::size_t replicas,
                     sim::SimTime retry, sim::Trace* trace)
    : sim_(sim), net_(net), self_(self), replicas_(replicas), retry_(retry), trace_(trace) {
  if (self_ == 1) {
    leading_ = true;
    ballot_ = Ballot{1, 1};
    phase1_done_ = true;
  }
}

void Consensus::start() {
  if (retry_ > 0) schedule_retry();
}

ReplicaId Consensus::leader() const {
  for (ReplicaId r = 1; r <= replicas_; ++r)
    if (!suspected_.count(r)) return r;
  return sim::kNoReplica;
}

void Consensus::suspect(ReplicaId r) {
  if (!suspected_.insert(r).second) return;
  if (leader() == self_ && !leading_) become_leader();
}

void Consensus::broadcast(sim::Channel ch, std::size_t bytes, const std::function<void(Consensus&)>& fn,
                          bool include_self) {
  for (ReplicaId r = 1; r < peers_.size(); ++r) {
    if (r == self_ && !include_self) continue;
    Consensus* peer = peers_[r];
    net_.send(self_, r, ch, bytes, [peer, fn] { fn(*peer); });
  }
}

void Consensus::become_leader() {
  leading_ = true;
  ballot_ = Ballot{max_round_ + 1, self_};
  max_round_ = ballot_.round;
  phase1_done_ = false;
  promises_.clear();
  recovery_.clear();
  inflight_k_ = 0;
  send_1a();
}

void Consensus::send_1a(bool include_self) {
  phase1_since_ = sim_.now();
  const Ballot b = ballot_;
  const std::uint64_t from_k = next_deliver_;
  const ReplicaId me = self_;
  broadcast(
      sim::Channel::kPaxos1a, 24, [me, b, from_k](Consensus& c) { c.on_1a(me, b, from_k); }, include_self);
}

void Consensus::on_1a(ReplicaId from, Ballot b, std::uint64_t from_k) {
  max_round_ = std::max(max_round_, b.round);
  Consensus* leader = peers_[from];
  if (b < promised_) {
    const Ballot p = promised_;
    net_.send(self_, from, sim::Channel::kPaxosNack, 16, [leader, p] { leader->on_nack(p); });
    return;
  }
  promised_ = b;
  std::map<std::uint64_t, Accepted> entries(accepted_.lower_bound(from_k), accepted_.end());
  std::size_t bytes = 24;
  for (const auto& [k, a] : entries) bytes += batch_bytes(a.value);
  const ReplicaId me = self_;
  net_.send(self_, from, sim::Channel::kPaxos1b, bytes,
            [leader, me, b, entries = std::move(entries)] { leader->on_1b(me, b, entries); });
}

void Consensus::on_1b(ReplicaId from, Ballot b, const std::map<std::uint64_t, Accepted>& entries) {
  if (!leading_ || phase1_done_ || b != ballot_) return;
  promises_[from] = entries;
  if (promises_.size() < majority()) return;
  phase1_done_ = true;
  std::map<std::uint64_t, Accepted> best;
  for (const auto& [r, es] : promises_) {
    for (const auto& [k, a] : es) {
      auto it = best.find(k);
      if (it == best.end() || it->second.ballot < a.ballot) best[k] = a;
    }
  }
  promises_.clear();
  std::uint64_t last = next_deliver_ - 1;
  if (!best.empty()) last = std::max(last, best.rbegin()->first);
  if (!decided_.empty()) last = std::max(last, decided_.rbegin()->first);
  recovery_.clear();
  for (std::uint64_t k = next_deliver_; k <= last; ++k) {
    if (decided_.count(k)) continue;
    auto it = best.find(k);
    recovery_.emplace_back(k, it == best.end() ? Batch{} : it->second.value);
  }
  next_k_ = last + 1;
  propose_next();
}

void Consensus::on_nack(Ballot promised) {
  max_round_ = std::max(max_round_, promised.round);
  if (leading_ && ballot_ < promised) become_leader();
}

void Consensus::poke() { propose_next(); }

void Consensus::propose_next() {
  if (!leading_ || !phase1_done_ || inflight_k_ != 0 || delivering_) return;
  if (sim_.crashed(self_)) return;
  while (!recovery_.empty()) {
    auto [k, v] = std::move(recovery_.front());
    recovery_.pop_front();
    if (decided_.count(k)) continue;
    inflight_k_ = k;
    inflight_v_ = std::move(v);
    send_2a();
    return;
  }
  while (decided_.count(next_k_)) ++next_k_;
  Batch v = hooks_.next_batch ? hooks_.next_batch() : Batch{};
  if (v.empty()) return;
  inflight_k_ = next_k_++;
  inflight_v_ = std::move(v);
  send_2a();
}

void Consensus::send_2a(bool include_self) {
  inflight_since_ = sim_.now();
  const Ballot b = ballot_;
  const std::uint64_t k = inflight_k_;
  const ReplicaId me = self_;
  broadcast(sim::Channel::kPaxos2a, batch_bytes(inflight_v_),
            [me, b, k, v = inflight_v_](Consensus& c) { c.on_2a(me, b, k, v); }, include_self);
}

void Consensus::on_2a(ReplicaId from, Ballot b, std::uint64_t k, const Batch& v) {
  max_round_ = std::max(max_round_, b.round);
  if (b < promised_) {
    Consensus* leader = peers_[from];
    const Ballot p = promised_;
    net_.send(self_, from, sim::Channel::kPaxosNack, 16, [leader, p] { leader->on_nack(p); });
    return;
  }
  promised_ = b;
  accepted_[k] = Accepted{b, v};
  if (trace_) {
    sim::TraceRecord rec;
    rec.time = sim_.now();
    rec.replica = self_;
    rec.kind = sim::Rec::kAccept;
    rec.aux = k;
    for (const auto& item : v) rec.ids.push_back(item.id);
    trace_->add(std::move(rec));
  }
  if (hooks_.on_accept && !decided_.count(k)) hooks_.on_accept(k, v);
  const ReplicaId me = self_;
  broadcast(sim::Channel::kPaxos2b, batch_bytes(v), [me, b, k, v](Consensus& c) { c.on_2b(me, b, k, v); });
}

void Consensus::on_2b(ReplicaId from, Ballot b, std::uint64_t k, const Batch& v) {
  if (decided_.count(k)) return;
  Votes& votes = votes_[k][b];
  votes.voters.insert(from);
  votes.value = v;
  if (votes.voters.size() >= majority()) decide(k, v);
}

void Consensus::learn(std::uint64_t k, const Batch& v) {
  if (!decided_.count(k)) decide(k, v);
}

const Batch* Consensus::decision(std::uint64_t k) const {
  auto it = decided_.find(k);
  return it == decided_.end() ? nullptr : &it->second;
}

void Consensus::decide(std::uint64_t k, const Batch& v) {
  if (auto it = decided_.find(k); it != decided_.end()) {
    if (it->second != v) {
      std::ostringstream os;
      os << "conflicting decisions for instance " << k << " at replica " << self_;
      throw ProtocolViolation(os.str());
    }
    return;
  }
  decided_.emplace(k, v);
  votes_.erase(k);
  if (k == inflight_k_) inflight_k_ = 0;
  if (delivering_) return;
  delivering_ = true;
  for (auto it = decided_.find(next_deliver_); it != decided_.end(); it = decided_.find(next_deliver_)) {
    const std::uint64_t kk = next_deliver_++;
    if (trace_) {
      sim::TraceRecord rec;
      rec.time = sim_.now();
      rec.replica = self_;
      rec.kind = sim::Rec::kDecide;
      rec.aux = kk;
      for (const auto& item : it->second) rec.ids.push_back(item.id);
      trace_->add(std::move(rec));
    }
    if (hooks_.on_decide) hooks_.on_decide(kk, it->second);
  }
  delivering_ = false;
  propose_next();
}

void Consensus::schedule_retry() {
  sim_.schedule_after(
      retry_, self_, sim::EventKind::kTimer,
      [this] {
        if (leading_) {
          // Retransmissions skip the leader itself: its own promise and
          // acceptance are already recorded.
          if (!phase1_done_ && sim_.now() - phase1_since_ >= retry_) {
            send_1a(false);
          } else if (phase1_done_ && inflight_k_ != 0 && sim_.now() - inflight_since_ >= retry_) {
            send_2a(false);
          } else {
            propose_next();
          }
        }
        schedule_retry();
      },
      true);
}

}  // namespace creek::bcast
