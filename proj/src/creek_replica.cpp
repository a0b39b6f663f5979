#include "creek/replica/creek_replica.hpp"

#include <algorithm>
#include <sstream>

#include "creek/core/errors.hpp"

namespace creek::replica {

CreekReplica::CreekReplica(Env env, ReplicaId self, ReplicaConfig cfg)
    : Replica(env, self, cfg),
      gossip_(
          env.sim, env.net, self, sim::Channel::kGossip, [this](const Dot&, const Request* r) { on_rb_deliver(r); },
          [](const Request* r) { return r->wire_bytes(); }),
      consensus_(env.sim, env.net, self, env.replicas, cfg.retry, env.trace),
      cab_(env.sim, env.net, self, consensus_, env.trace) {
  executor_ = build_executor(cfg.engine, cfg.slots);
  cab_.register_predicate(kCheckDep, [this](const Dot& id) { return check_dep(id); });
  cab_.set_deliver([this](const Dot& id) { on_cab_deliver(id); });
}

void CreekReplica::connect(const std::vector<CreekReplica*>& peers) {
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

void CreekReplica::start() {
  gossip_.start(cfg_.anti_entropy);
  cab_.start_sync(cfg_.anti_entropy);
  consensus_.start();
  if (cfg_.noop_flush > 0) schedule_flush();
}

std::vector<const Request*> CreekReplica::order() const {
  std::vector<const Request*> out;
  out.reserve(committed_.size() + tentative_.size());
  out.insert(out.end(), committed_.begin(), committed_.end());
  out.insert(out.end(), tentative_.begin(), tentative_.end());
  return out;
}

bool CreekReplica::check_dep(const Dot& id) const {
  auto it = known_.find(id);
  if (it == known_.end()) return false;
  return causal_ctx_.includes(it->second->causal_ctx);
}

void CreekReplica::invoke(const workload::TxProgram& op, bool strong, sim::SimTime service) {
  if (try_shortcut(op, strong, service)) return;
  Request draft_req = draft(op, strong, service);
  if (strong) {
    draft_req.causal_ctx = causal_ctx_;
    for (const Request* x : tentative_)
      if (precedes(draft_req, *x)) draft_req.causal_ctx.erase(x->id);
  }
  const Request* r = publish(std::move(draft_req));
  if (strong)
    cab_.cast(r->id, kCheckDep, r->timestamp);
  else
    causal_ctx_.insert(r->id);
  gossip_.cast(r->id, r);
  awaiting_.emplace(r, std::nullopt);
  adjust_tentative_order(r);
  cab_.on_local_change();
}

void CreekReplica::on_rb_deliver(const Request* r) {
  record(sim::Rec::kRbDeliver, r->id);
  if (r->id.replica == self_) return;
  if (!r->strong) causal_ctx_.insert(r->id);
  adjust_tentative_order(r);
  cab_.on_local_change();
}

void CreekReplica::on_cab_deliver(const Dot& id) {
  auto it = known_.find(id);
  if (it == known_.end() || committed_ids_.count(id)) {
    std::ostringstream os;
    os << "CAB-delivered " << id << " is not tentative at replica " << self_;
    throw ProtocolViolation(os.str());
  }
  causal_ctx_.insert(id);
  commit(it->second);
  cab_.on_local_change();
}

void CreekReplica::adjust_tentative_order(const Request* r) {
  auto pos = std::lower_bound(tentative_.begin(), tentative_.end(), r, RequestOrder{});
  tentative_.insert(pos, r);
  known_.emplace(r->id, r);
  adjust_execution();
}

void CreekReplica::adjust_execution() { executor_->adjust(order(), committed_.size()); }

void CreekReplica::commit(const Request* r) {
  std::vector<Dot> appended;
  std::vector<const Request*> rest;
  rest.reserve(tentative_.size());
  for (const Request* x : tentative_) {
    if (x == r) continue;
    if (r->causal_ctx.contains(x->id)) {
      committed_.push_back(x);
      committed_ids_.insert(x->id);
      appended.push_back(x->id);
    } else {
      rest.push_back(x);
    }
  }
  committed_.push_back(r);
  committed_ids_.insert(r->id);
  appended.push_back(r->id);
  tentative_ = std::move(rest);
  record(sim::Rec::kCommit, r->id, std::move(appended));
  adjust_execution();
  auto it = awaiting_.find(r);
  if (it != awaiting_.end() && executor_->in_prefix(r)) {
    emit_response(r, *executor_->response(r), true);
    awaiting_.erase(it);
  }
  if (r->internal) flush_outstanding_ = false;
}

void CreekReplica::on_enter(const Request* r, const Response& resp) {
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

void CreekReplica::schedule_flush() {
  env_.sim.schedule_after(
      cfg_.noop_flush, self_, sim::EventKind::kTimer,
      [this] {
        const bool weak_pending =
            std::any_of(tentative_.begin(), tentative_.end(), [](const Request* x) { return !x->strong; });
        if (weak_pending && !flush_outstanding_) {
          flush_outstanding_ = true;
          Request d = draft(workload::TxProgram{}, true, cfg_.noop_service, true);
          d.causal_ctx = causal_ctx_;
          for (const Request* x : tentative_)
            if (precedes(d, *x)) d.causal_ctx.erase(x->id);
          const Request* r = publish(std::move(d));
          cab_.cast(r->id, kCheckDep, r->timestamp);
          gossip_.cast(r->id, r);
          adjust_tentative_order(r);
          cab_.on_local_change();
        }
        schedule_flush();
      },
      true);
}

}  // namespace creek::replica
