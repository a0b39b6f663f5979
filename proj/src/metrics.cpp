#include "creek/harness/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <unordered_map>

namespace creek::harness {

double percentile(std::vector<double> v, double p) {
  if (v.empty()) return 0;
  std::sort(v.begin(), v.end());
  const auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(v.size())));
  return v[std::clamp<std::size_t>(rank, 1, v.size()) - 1];
}

LatencyStats summarize(std::vector<double> s) {
  LatencyStats out;
  out.count = s.size();
  if (s.empty()) return out;
  double sum = 0;
  for (double x : s) sum += x;
  out.mean_ms = sum / static_cast<double>(s.size());
  out.p50_ms = percentile(s, 50);
  out.p95_ms = percentile(s, 95);
  out.p99_ms = percentile(s, 99);
  return out;
}

namespace {

struct OpTimes {
  const Request* req = nullptr;
  std::optional<sim::SimTime> tentative;
  std::optional<sim::SimTime> stable;
  std::optional<sim::SimTime> spec;
};

std::unordered_map<Dot, OpTimes, DotHash> collect(const RunResult& run) {
  std::unordered_map<Dot, OpTimes, DotHash> ops;
  for (const Request& r : run.pool->all())
    if (!r.internal) ops[r.id].req = &r;
  for (const auto& rec : run.trace.records()) {
    if (rec.replica != rec.id.replica) continue;
    auto it = ops.find(rec.id);
    if (it == ops.end()) continue;
    OpTimes& o = it->second;
    if (rec.kind == sim::Rec::kResponse) {
      auto& slot = rec.flag ? o.stable : o.tentative;
      if (!slot) slot = rec.time;
    } else if (rec.kind == sim::Rec::kSpec && !o.spec) {
      o.spec = rec.time;
    }
  }
  return ops;
}

}  // namespace

double speculation_accuracy(const RunResult& run, std::size_t* samples) {
  std::map<std::vector<const Request*>, std::unordered_map<const Request*, Response>> oracles;
  auto oracle_for = [&](const std::vector<const Request*>& order) -> const std::unordered_map<const Request*, Response>& {
    auto it = oracles.find(order);
    if (it != oracles.end()) return it->second;
    std::vector<const workload::TxProgram*> programs;
    programs.reserve(order.size());
    for (const Request* r : order) programs.push_back(&r->op);
    auto result = workload::oracle_execute(programs, run.base);
    std::unordered_map<const Request*, Response> m;
    for (std::size_t i = 0; i < order.size(); ++i) m.emplace(order[i], std::move(result.responses[i]));
    return oracles.emplace(order, std::move(m)).first->second;
  };

  std::size_t total = 0, matched = 0;
  for (const auto& rec : run.trace.records()) {
    if (rec.kind != sim::Rec::kSpec) continue;
    const auto& origin = run.replicas.at(rec.replica - 1);
    if (origin.crashed) continue;
    const Request* r = run.pool->find(rec.id);
    if (!r || r->internal || r->shortcut) continue;
    const auto& oracle = oracle_for(origin.order);
    auto it = oracle.find(r);
    if (it == oracle.end()) continue;
    ++total;
    if (it->second == rec.response) ++matched;
  }
  if (samples) *samples = total;
  return total == 0 ? 1.0 : static_cast<double>(matched) / static_cast<double>(total);
}

double execution_ratio(const RunResult& run) {
  std::set<std::pair<ReplicaId, Dot>> distinct;
  std::size_t execs = 0;
  for (const auto& rec : run.trace.records()) {
    if (rec.kind != sim::Rec::kExec) continue;
    ++execs;
    distinct.emplace(rec.replica, rec.id);
  }
  return distinct.empty() ? 1.0 : static_cast<double>(execs) / static_cast<double>(distinct.size());
}

MetricsReport compute_metrics(const RunResult& run) {
  MetricsReport m;
  m.system = to_string(run.config.system);
  m.seed = run.config.seed;
  m.load = run.config.workload.rate_tps;
  m.channels = run.channels;

  std::map<std::string, std::vector<double>> samples;
  for (const auto& k : kLatencyKinds) samples[k];
  sim::SimTime first_invoke = std::numeric_limits<sim::SimTime>::max();
  sim::SimTime last_done = 0;
  const auto ops = collect(run);
  for (const Request& r : run.pool->all()) {
    auto found = ops.find(r.id);
    if (found == ops.end()) continue;
    const OpTimes& o = found->second;
    ++m.invoked;
    first_invoke = std::min(first_invoke, r.invoked_at);
    auto lat = [&](sim::SimTime t) { return sim::to_ms(t - r.invoked_at); };
    const std::string type = r.strong ? "strong" : "weak";
    if (o.tentative) samples["tentative-" + type].push_back(lat(*o.tentative));
    if (o.stable) {
      samples["stable-" + type].push_back(lat(*o.stable));
      samples["stable-all"].push_back(lat(*o.stable));
    }
    if (o.spec) samples["predicted-tentative"].push_back(lat(*o.spec));
    std::optional<sim::SimTime> done = o.stable;
    if (!done && !r.strong) done = o.tentative;
    if (done) {
      ++m.completed;
      samples["response-all"].push_back(lat(*done));
      last_done = std::max(last_done, *done);
    }
  }
  for (auto& [k, v] : samples) m.latency[k] = summarize(std::move(v));
  if (m.completed > 0 && last_done > first_invoke)
    m.throughput_tps = static_cast<double>(m.completed) / (sim::to_ms(last_done - first_invoke) / 1000.0);

  m.accuracy = speculation_accuracy(run, &m.accuracy_samples);
  m.exec_ratio = execution_ratio(run);

  sim::SimTime busy = 0;
  std::size_t slots = 0;
  for (const auto& f : run.replicas) {
    busy += f.exec.busy;
    slots += f.slots;
  }
  if (m.completed > 0 && last_done > first_invoke && slots > 0)
    m.utilization = static_cast<double>(busy) / (static_cast<double>(slots) * static_cast<double>(last_done - first_invoke));
  return m;
}

}  // namespace creek::harness
