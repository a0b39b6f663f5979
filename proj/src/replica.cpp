#include "creek/replica/replica.hpp"

#include <algorithm>

namespace creek::replica {

Replica::Replica(Env env, ReplicaId self, ReplicaConfig cfg) : env_(env), self_(self), cfg_(cfg) {}

std::unique_ptr<engine::Executor> Replica::build_executor(engine::EngineKind kind, std::size_t slots) {
  return engine::make_executor(
      kind, env_.sim, self_, env_.trace, [this](const Request* r, const Response& resp) { on_enter(r, resp); },
      env_.base, slots, cfg_.rollback_time, cfg_.gc_threshold);
}

std::int64_t Replica::next_timestamp() {
  last_ts_ = std::max(last_ts_ + 1, env_.sim.now() + cfg_.skew);
  return last_ts_;
}

Request Replica::draft(const workload::TxProgram& op, bool strong, sim::SimTime service, bool internal) {
  Request r;
  r.timestamp = next_timestamp();
  r.id = Dot{self_, ++curr_event_no_};
  r.op = op;
  r.strong = strong;
  r.service = service;
  r.invoked_at = env_.sim.now();
  r.internal = internal;
  return r;
}

const Request* Replica::publish(Request r) {
  const Request* p = env_.pool.add(std::move(r));
  if (env_.trace) {
    sim::TraceRecord rec;
    rec.time = env_.sim.now();
    rec.replica = self_;
    rec.kind = sim::Rec::kInvoke;
    rec.id = p->id;
    rec.flag = p->strong ? 1 : 0;
    rec.aux = p->op.digest();
    rec.ids = p->causal_ctx.to_vector();
    env_.trace->add(std::move(rec));
  }
  return p;
}

bool Replica::try_shortcut(const workload::TxProgram& op, bool strong, sim::SimTime service) {
  if (!cfg_.readonly_shortcut || strong || !op.read_only()) return false;
  Request r = draft(op, false, service);
  r.shortcut = true;
  const Request* p = publish(std::move(r));
  Response resp = executor_->read_snapshot(op);
  env_.sim.schedule_after(service, self_, sim::EventKind::kExecutionComplete,
                          [this, p, resp = std::move(resp)] { emit_response(p, resp, false); });
  return true;
}

void Replica::record(sim::Rec kind, const Dot& id, std::vector<Dot> ids, std::uint8_t flag) {
  if (!env_.trace) return;
  sim::TraceRecord rec;
  rec.time = env_.sim.now();
  rec.replica = self_;
  rec.kind = kind;
  rec.id = id;
  rec.flag = flag;
  rec.ids = std::move(ids);
  env_.trace->add(std::move(rec));
}

void Replica::emit_response(const Request* r, const Response& resp, bool stable) {
  if (!env_.trace) return;
  sim::TraceRecord rec;
  rec.time = env_.sim.now();
  rec.replica = self_;
  rec.kind = sim::Rec::kResponse;
  rec.id = r->id;
  rec.flag = stable ? 1 : 0;
  rec.response = resp;
  env_.trace->add(std::move(rec));
}

void Replica::note_first_execution(const Request* r, const Response& resp) {
  if (r->id.replica != self_ || r->internal || r->shortcut) return;
  if (!spec_seen_.insert(r).second) return;
  if (!env_.trace) return;
  sim::TraceRecord rec;
  rec.time = env_.sim.now();
  rec.replica = self_;
  rec.kind = sim::Rec::kSpec;
  rec.id = r->id;
  rec.response = resp;
  env_.trace->add(std::move(rec));
}

}  // namespace creek::replica
