#include "creek/replica/baselines.hpp"

namespace creek::replica {

ArchieReplica::ArchieReplica(Env env, ReplicaId self, ReplicaConfig cfg)
    : Replica(env, self, cfg),
      gossip_(
          env.sim, env.net, self, sim::Channel::kGossip, [this](const Dot&, const Request* r) { on_rb_deliver(r); },
          [](const Request* r) { return r->wire_bytes(); }),
      consensus_(env.sim, env.net, self, env.replicas, cfg.retry, env.trace),
      cab_(env.sim, env.net, self, consensus_, env.trace) {
  executor_ = build_executor(engine::EngineKind::kMultiversion, cfg.slots);
  cab_.register_predicate(kReceived, [this](const Dot& id) { return known_.count(id) > 0; });
  cab_.set_deliver([this](const Dot& id) { on_final(id); });
  consensus_.set_on_accept([this](std::uint64_t k, const bcast::Batch& v) { on_accept(k, v); });
}

void ArchieReplica::connect(const std::vector<ArchieReplica*>& peers) {
  std::vector<bcast::Gossip<const Request*>*> g(peers.size(), nullptr);
  std::vector<bcast::Consensus*> c(peers.size(), nullptr);
  std::vector<bcast::Cab*> b(peers.size(), nullptr);
  for (std::size_t i = 1; i < peers.size(); ++i) {
    g[i] = &peers[i]->gossip_;
    c[i] = &peers[i]->consensus_;
    b[i] = &peers[i]->cab_;
  }
  gossip_.connect(std::move(g));
  consensus_.connect(std::move(c));
  cab_.connect(std::move(b));
}

void ArchieReplica::start() {
  gossip_.start(cfg_.anti_entropy);
  cab_.start_sync(cfg_.anti_entropy);
  consensus_.start();
}

void ArchieReplica::invoke(const workload::TxProgram& op, bool strong, sim::SimTime service) {
  const Request* r = publish(draft(op, strong, service));
  known_.emplace(r->id, r);
  awaiting_.insert(r);
  gossip_.cast(r->id, r);
  cab_.cast(r->id, kReceived, r->timestamp);
  rebuild_order();
  cab_.on_local_change();
}

void ArchieReplica::on_rb_deliver(const Request* r) {
  record(sim::Rec::kRbDeliver, r->id);
  known_.emplace(r->id, r);
  rebuild_order();
  cab_.on_local_change();
}

void ArchieReplica::on_accept(std::uint64_t k, const bcast::Batch& v) {
  if (k < base_k_) return;
  proposals_[k] = v;
  rebuild_order();
}

void ArchieReplica::on_final(const Dot& id) {
  const Request* r = known_.at(id);
  final_.push_back(r);
  final_ids_.insert(id);
  record(sim::Rec::kCommit, id, {id});
  rebuild_order();
  if (awaiting_.count(r) && executor_->in_prefix(r)) {
    awaiting_.erase(r);
    emit_response(r, *executor_->response(r), true);
  }
}

void ArchieReplica::rebuild_order() {
  auto batch_at = [this](std::uint64_t k) -> const bcast::Batch* {
    if (const bcast::Batch* d = consensus_.decision(k)) return d;
    auto it = proposals_.find(k);
    return it == proposals_.end() ? nullptr : &it->second;
  };
  for (const bcast::Batch* d = consensus_.decision(base_k_); d; d = consensus_.decision(base_k_)) {
    bool all_final = true;
    for (const auto& item : *d) all_final = all_final && final_ids_.count(item.id);
    if (!all_final) break;
    proposals_.erase(base_k_++);
  }
  order_ = final_;
  std::unordered_set<Dot, DotHash> added;
  bool stalled = false;
  for (std::uint64_t k = base_k_; !stalled; ++k) {
    const bcast::Batch* v = batch_at(k);
    if (!v) break;
    for (const auto& item : *v) {
      if (final_ids_.count(item.id) || added.count(item.id)) continue;
      auto it = known_.find(item.id);
      if (it == known_.end()) {
        stalled = true;
        break;
      }
      order_.push_back(it->second);
      added.insert(item.id);
    }
  }
  executor_->adjust(order_, final_.size());
}

void ArchieReplica::on_enter(const Request* r, const Response& resp) {
  note_first_execution(r, resp);
  if (final_ids_.count(r->id) && awaiting_.erase(r)) emit_response(r, resp, true);
}

}  // namespace creek::replica
