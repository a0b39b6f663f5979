#include "creek/harness/cluster.hpp"

#include "creek/replica/baselines.hpp"
#include "creek/replica/creek_replica.hpp"

namespace creek::harness {

namespace {

using replica::Replica;

template <class R>
void build(std::vector<std::unique_ptr<Replica>>& out, replica::Env env,
           const std::vector<replica::ReplicaConfig>& cfgs) {
  std::vector<R*> typed(out.size(), nullptr);
  for (std::size_t i = 1; i < out.size(); ++i) {
    auto r = std::make_unique<R>(env, static_cast<ReplicaId>(i), cfgs[i]);
    typed[i] = r.get();
    out[i] = std::move(r);
  }
  for (std::size_t i = 1; i < out.size(); ++i) typed[i]->connect(typed);
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.replicas;

  RunResult res;
  res.config = cfg;
  auto pool = std::make_shared<RequestPool>();
  res.pool = pool;
  res.base = workload::initial_store(cfg.workload, cfg.seed);

  sim::Simulator sim(n);
  sim.set_quiescence_grace(sim::from_ms(cfg.grace_ms));
  sim.set_event_limit(cfg.event_limit);
  sim::Network net(sim, cfg.network, cfg.seed, n);
  for (const auto& p : cfg.partitions) net.set_partition(p.groups, p.from, p.to);

  replica::Env env{sim, net, &res.trace, *pool, res.base, n};
  sim::Rng clock = sim::make_stream(cfg.seed, sim::Stream::kClock);
  std::vector<replica::ReplicaConfig> rcfg(n + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    auto& rc = rcfg[i];
    rc.engine = cfg.engine;
    rc.slots = cfg.slots;
    rc.rollback_time = sim::from_ms(cfg.rollback_ms);
    rc.gc_threshold = cfg.gc_threshold;
    rc.skew = cfg.skew_ms > 0 ? sim::from_ms(clock.uniform(-cfg.skew_ms, cfg.skew_ms)) : 0;
    rc.anti_entropy = sim::from_ms(cfg.anti_entropy_ms);
    rc.retry = sim::from_ms(cfg.retry_ms);
    if (cfg.system == SystemKind::kCreek) {
      rc.readonly_shortcut = cfg.readonly_shortcut;
      rc.noop_flush = sim::from_ms(cfg.noop_flush_ms);
    }
  }

  std::vector<std::unique_ptr<Replica>> reps(n + 1);
  switch (cfg.system) {
    case SystemKind::kCreek: build<replica::CreekReplica>(reps, env, rcfg); break;
    case SystemKind::kSmr: build<replica::SmrReplica>(reps, env, rcfg); break;
    case SystemKind::kBayou: build<replica::BayouReplica>(reps, env, rcfg); break;
    case SystemKind::kArchie: build<replica::ArchieReplica>(reps, env, rcfg); break;
  }
  for (std::size_t i = 1; i <= n; ++i) reps[i]->start();

  workload::Generator gen(cfg.workload, n);
  sim::Rng wl = sim::make_stream(cfg.seed, sim::Stream::kWorkload);
  auto arrivals = gen.schedule(wl);
  res.arrivals = arrivals.size();
  for (auto& a : arrivals) {
    sim.schedule(a.at, sim::kNoReplica, sim::EventKind::kTimer, [&sim, &reps, &res, a = std::move(a)] {
      if (sim.crashed(a.target)) {
        ++res.arrivals_dropped;
        return;
      }
      reps[a.target]->invoke(a.program, a.strong, a.service);
    });
  }

  const sim::SimTime fd_delay = sim::from_ms(cfg.fd_delay_ms);
  for (const auto& c : cfg.crashes) {
    if (c.at == sim::kTimeInfinity) continue;
    sim.extend_horizon(c.at + fd_delay);
    sim.schedule(c.at, sim::kNoReplica, sim::EventKind::kTimer, [&sim, &reps, &res, c, fd_delay, n] {
      if (sim.crashed(c.replica)) return;
      sim.crash(c.replica);
      sim::TraceRecord rec;
      rec.time = sim.now();
      rec.replica = c.replica;
      rec.kind = sim::Rec::kCrash;
      res.trace.add(std::move(rec));
      for (ReplicaId j = 1; j <= n; ++j) {
        if (j == c.replica) continue;
        sim.schedule_after(fd_delay, j, sim::EventKind::kTimer, [&reps, j, r = c.replica] { reps[j]->suspect(r); });
      }
    });
  }

  res.summary = sim.run_to_quiescence();

  for (std::size_t c = 0; c < res.channels.size(); ++c) res.channels[c] = net.stats(static_cast<sim::Channel>(c));
  for (std::size_t i = 1; i <= n; ++i) {
    ReplicaFinal f;
    f.id = static_cast<ReplicaId>(i);
    f.crashed = sim.crashed(f.id);
    f.group = net.group_of(f.id, res.summary.end_time);
    f.committed = reps[i]->committed();
    f.order = reps[i]->order();
    f.store = reps[i]->dump();
    f.exec = reps[i]->executor().stats();
    f.slots = reps[i]->executor().slots();
    res.replicas.push_back(std::move(f));
  }
  return res;
}

}  // namespace creek::harness
