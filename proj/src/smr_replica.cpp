#include "creek/replica/baselines.hpp"

namespace creek::replica {

SmrReplica::SmrReplica(Env env, ReplicaId self, ReplicaConfig cfg)
    : Replica(env, self, cfg),
      gossip_(
          env.sim, env.net, self, sim::Channel::kGossip, [this](const Dot&, const Request* r) { on_rb_deliver(r); },
          [](const Request* r) { return r->wire_bytes(); }),
      consensus_(env.sim, env.net, self, env.replicas, cfg.retry, env.trace),
      cab_(env.sim, env.net, self, consensus_, env.trace) {
  executor_ = build_executor(engine::EngineKind::kReference, 1);
  cab_.register_predicate(kReceived, [this](const Dot& id) { return known_.count(id) > 0; });
  cab_.set_deliver([this](const Dot& id) { on_ab_deliver(id); });
}

void SmrReplica::connect(const std::vector<SmrReplica*>& peers) {
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

void SmrReplica::start() {
  gossip_.start(cfg_.anti_entropy);
  cab_.start_sync(cfg_.anti_entropy);
  consensus_.start();
}

void SmrReplica::invoke(const workload::TxProgram& op, bool strong, sim::SimTime service) {
  const Request* r = publish(draft(op, strong, service));
  known_.emplace(r->id, r);
  awaiting_.insert(r);
  gossip_.cast(r->id, r);
  cab_.cast(r->id, kReceived, r->timestamp);
  cab_.on_local_change();
}

void SmrReplica::on_rb_deliver(const Request* r) {
  record(sim::Rec::kRbDeliver, r->id);
  known_.emplace(r->id, r);
  cab_.on_local_change();
}

void SmrReplica::on_ab_deliver(const Dot& id) {
  log_.push_back(known_.at(id));
  record(sim::Rec::kCommit, id, {id});
  executor_->adjust(log_, log_.size());
}

void SmrReplica::on_enter(const Request* r, const Response& resp) {
  note_first_execution(r, resp);
  if (awaiting_.erase(r)) emit_response(r, resp, true);
}

}  // namespace creek::replica
