#include "creek/bcast/cab.hpp"

#include "creek/core/errors.hpp"

namespace creek::bcast {

Cab::Cab(sim::Simulator& sim, sim::Network& net, ReplicaId self, Consensus& consensus, sim::Trace* trace)
    : sim_(sim), net_(net), self_(self), consensus_(consensus), trace_(trace) {
  Consensus::Hooks hooks;
  hooks.next_batch = [this] { return next_batch(); };
  hooks.on_decide = [this](std::uint64_t k, const Batch& v) { on_decide(k, v); };
  consensus_.set_hooks(std::move(hooks));
}

void Cab::register_predicate(const std::string& name, Predicate p) {
  for (const auto& [n, q] : predicates_)
    if (n == name) throw sim::ConfigError("predicate registered twice: " + name);
  predicates_.emplace_back(name, std::move(p));
}

void Cab::cast(const Dot& id, const std::string& predicate, std::int64_t order_ts) {
  std::uint32_t index = 0;
  while (index < predicates_.size() && predicates_[index].first != predicate) ++index;
  if (index == predicates_.size()) throw sim::ConfigError("unknown CAB predicate: " + predicate);
  const CabItem item{id, index};
  if (trace_) {
    sim::TraceRecord rec;
    rec.time = sim_.now();
    rec.replica = self_;
    rec.kind = sim::Rec::kCabCast;
    rec.id = id;
    rec.aux = index;
    trace_->add(std::move(rec));
  }
  for (ReplicaId r = 1; r < peers_.size(); ++r) {
    if (r == self_) continue;
    Cab* peer = peers_[r];
    net_.send(self_, r, sim::Channel::kCabSubmit, 30, [peer, item, order_ts] { peer->on_submit(item, order_ts); });
  }
  on_submit(item, order_ts);
}

void Cab::on_submit(const CabItem& item, std::int64_t ts) {
  if (item.predicate >= predicates_.size()) throw sim::ConfigError("CAB predicate index not registered here");
  if (decided_ids_.count(item.id) || pending_ts_.count(item.id)) return;
  pending_.emplace(OrderKey{ts, item.id}, item);
  pending_ts_.emplace(item.id, ts);
  consensus_.poke();
}

Batch Cab::next_batch() {
  Batch out;
  for (const auto& [key, item] : pending_)
    if (predicates_[item.predicate].second(item.id)) out.push_back(item);
  return out;
}

void Cab::on_decide(std::uint64_t, const Batch& v) {
  for (const CabItem& item : v) {
    if (!decided_ids_.insert(item.id).second) continue;
    if (auto it = pending_ts_.find(item.id); it != pending_ts_.end()) {
      pending_.erase(OrderKey{it->second, item.id});
      pending_ts_.erase(it);
    }
    queue_.push_back(item);
  }
  try_deliver();
}

std::vector<Dot> Cab::try_deliver() {
  std::vector<Dot> out;
  if (delivering_) {
    again_ = true;
    return out;
  }
  delivering_ = true;
  do {
    again_ = false;
    while (!queue_.empty()) {
      const CabItem head = queue_.front();
      if (!predicates_[head.predicate].second(head.id)) break;
      queue_.pop_front();
      if (!delivered_set_.insert(head.id).second) throw ProtocolViolation("CAB id delivered twice");
      delivered_.push_back(head.id);
      out.push_back(head.id);
      if (trace_) {
        sim::TraceRecord rec;
        rec.time = sim_.now();
        rec.replica = self_;
        rec.kind = sim::Rec::kCabDeliver;
        rec.id = head.id;
        trace_->add(std::move(rec));
      }
      if (deliver_) deliver_(head.id);
    }
  } while (again_);
  delivering_ = false;
  return out;
}

void Cab::on_local_change() {
  try_deliver();
  consensus_.poke();
}

void Cab::start_sync(sim::SimTime period) {
  sync_period_ = period;
  if (sync_period_ > 0) schedule_sync();
}

void Cab::schedule_sync() {
  sim_.schedule_after(
      sync_period_, self_, sim::EventKind::kTimer,
      [this] {
        std::vector<std::pair<CabItem, std::int64_t>> pend;
        pend.reserve(pending_.size());
        for (const auto& [key, item] : pending_) pend.emplace_back(item, key.first);
        const std::uint64_t upto = consensus_.delivered_upto();
        for (ReplicaId r = 1; r < peers_.size(); ++r) {
          if (r == self_) continue;
          Cab* peer = peers_[r];
          net_.send(
              self_, r, sim::Channel::kCabSync, 16 + 22 * pend.size(),
              [peer, from = self_, upto, pend] { peer->on_sync(from, upto, pend); }, true);
        }
        schedule_sync();
      },
      true);
}

void Cab::on_sync(ReplicaId from, std::uint64_t upto,
                  const std::vector<std::pair<CabItem, std::int64_t>>& pending) {
  Cab* peer = peers_[from];
  for (std::uint64_t k = upto + 1; k <= consensus_.delivered_upto(); ++k) {
    const Batch v = *consensus_.decision(k);
    net_.send(self_, from, sim::Channel::kDecision, 24 + 14 * v.size(),
              [peer, k, v] { peer->consensus().learn(k, v); });
  }
  for (const auto& [item, ts] : pending) {
    if (decided_ids_.count(item.id) || pending_ts_.count(item.id)) continue;
    pending_.emplace(OrderKey{ts, item.id}, item);
    pending_ts_.emplace(item.id, ts);
  }
  consensus_.poke();
}

}  // namespace creek::bcast
