#include "creek/replica/baselines.hpp"

#include <algorithm>

namespace creek::replica {

BayouReplica::BayouReplica(Env env, ReplicaId self, ReplicaConfig cfg)
    : Replica(env, self, cfg),
      gossip_(
          env.sim, env.net, self, sim::Channel::kGossip, [this](const Dot&, const Request* r) { on_rb_deliver(r); },
          [](const Request* r) { return r->wire_bytes(); }),
      csn_gossip_(
          env.sim, env.net, self, sim::Channel::kBayouCsn, [this](const Dot&, const CsnRecord& c) { on_csn(c); },
          [](const CsnRecord&) { return std::size_t{20}; }) {
  executor_ = build_executor(engine::EngineKind::kReference, 1);
}

void BayouReplica::connect(const std::vector<BayouReplica*>& peers) {
  std::vector<bcast::Gossip<const Request*>*> g(peers.size(), nullptr);
  std::vector<bcast::Gossip<CsnRecord>*> c(peers.size(), nullptr);
  for (std::size_t i = 1; i < peers.size(); ++i) {
    g[i] = &peers[i]->gossip_;
    c[i] = &peers[i]->csn_gossip_;
  }
  gossip_.connect(std::move(g));
  csn_gossip_.connect(std::move(c));
}

void BayouReplica::start() {
  gossip_.start(cfg_.anti_entropy);
  csn_gossip_.start(cfg_.anti_entropy);
}

std::vector<const Request*> BayouReplica::order() const {
  std::vector<const Request*> out(committed_);
  out.insert(out.end(), tentative_.begin(), tentative_.end());
  return out;
}

void BayouReplica::invoke(const workload::TxProgram& op, bool strong, sim::SimTime service) {
  if (try_shortcut(op, strong, service)) return;
  const Request* r = publish(draft(op, strong, service));
  awaiting_.emplace(r, std::nullopt);
  gossip_.cast(r->id, r);
  accept(r);
}

void BayouReplica::on_rb_deliver(const Request* r) {
  record(sim::Rec::kRbDeliver, r->id);
  accept(r);
}

void BayouReplica::accept(const Request* r) {
  known_.emplace(r->id, r);
  if (!committed_ids_.count(r->id))
    tentative_.insert(std::lower_bound(tentative_.begin(), tentative_.end(), r, RequestOrder{}), r);
  if (self_ == kPrimary) assign_csn(r);
  try_commit();
}

void BayouReplica::assign_csn(const Request* r) {
  const CsnRecord rec{next_csn_++, r->id};
  csn_log_.emplace(rec.csn, rec.id);
  csn_gossip_.cast(Dot{kPrimary, rec.csn}, rec);
}

void BayouReplica::on_csn(const CsnRecord& rec) {
  csn_log_.emplace(rec.csn, rec.id);
  try_commit();
}

void BayouReplica::try_commit() {
  std::vector<const Request*> newly;
  for (auto it = csn_log_.find(committed_.size() + 1); it != csn_log_.end(); it = csn_log_.find(committed_.size() + 1)) {
    auto k = known_.find(it->second);
    if (k == known_.end()) break;
    const Request* r = k->second;
    tentative_.erase(std::find(tentative_.begin(), tentative_.end(), r));
    committed_.push_back(r);
    committed_ids_.insert(r->id);
    record(sim::Rec::kCommit, r->id, {r->id});
    newly.push_back(r);
  }
  executor_->adjust(order(), committed_.size());
  for (const Request* r : newly) {
    auto it = awaiting_.find(r);
    if (it != awaiting_.end() && executor_->in_prefix(r)) {
      emit_response(r, *executor_->response(r), true);
      awaiting_.erase(it);
    }
  }
}

void BayouReplica::on_enter(const Request* r, const Response& resp) {
  note_first_execution(r, resp);
  auto it = awaiting_.find(r);
  if (it == awaiting_.end()) return;
  if (!r->strong) {
    emit_response(r, resp, false);
    awaiting_.erase(it);
  } else if (!committed_ids_.count(r->id)) {
    if (!it->second || *it->second != resp) emit_response(r, resp, false);
    it->second = resp;
  } else {
    emit_response(r, resp, true);
    awaiting_.erase(it);
  }
}

}  // namespace creek::replica
