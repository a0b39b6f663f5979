#include "creek/harness/checkers.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <sstream>
#include <unordered_map>

namespace creek::harness {

namespace {

Verdict pass(const RunResult& run, const char* property) {
  Verdict v;
  v.property = property;
  v.seed = run.config.seed;
  v.event_index = run.trace.size();
  return v;
}

Verdict fail(Verdict v, std::size_t event_index, const std::string& detail) {
  v.pass = false;
  v.event_index = event_index;
  v.detail = detail;
  return v;
}

template <class... Ts>
std::string str(const Ts&... parts) {
  std::ostringstream os;
  (os << ... << parts);
  return os.str();
}

std::vector<Dot> ids_of(const std::vector<const Request*>& v) {
  std::vector<Dot> out;
  out.reserve(v.size());
  for (const Request* r : v) out.push_back(r->id);
  return out;
}

// First key where two dumps differ, or nullopt.
std::optional<ObjectKey> first_difference(const StoreDump& a, const StoreDump& b) {
  auto ia = a.begin(), ib = b.begin();
  while (ia != a.end() || ib != b.end()) {
    if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) return ia->first;
    if (ia == a.end() || ib->first < ia->first) return ib->first;
    if (ia->second != ib->second) return ia->first;
    ++ia;
    ++ib;
  }
  return std::nullopt;
}

std::string value_at(const StoreDump& d, ObjectKey k) {
  auto it = d.find(k);
  return it == d.end() ? "initial value" : std::to_string(it->second);
}

}  // namespace

std::vector<const Request*> global_committed(const RunResult& run) {
  std::vector<std::size_t> len(run.replicas.size() + 1, 0);
  std::vector<const Request*> global;
  for (const auto& rec : run.trace.records()) {
    if (rec.kind != sim::Rec::kCommit) continue;
    for (const Dot& id : rec.ids) {
      if (len[rec.replica]++ == global.size()) global.push_back(run.pool->find(id));
    }
  }
  return global;
}

Verdict check_prefix_agreement(const RunResult& run) {
  Verdict v = pass(run, "prefix-agreement");
  std::vector<std::vector<Dot>> seq(run.replicas.size() + 1);
  std::vector<std::unordered_map<Dot, std::size_t, DotHash>> seen(run.replicas.size() + 1);
  std::vector<Dot> global;
  std::vector<ReplicaId> first_by(1, 0);
  const auto& recs = run.trace.records();
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const auto& rec = recs[i];
    if (rec.kind != sim::Rec::kCommit) continue;
    for (const Dot& id : rec.ids) {
      auto& s = seq[rec.replica];
      const std::size_t pos = s.size();
      if (!seen[rec.replica].emplace(id, pos).second)
        return fail(v, i, str("replica ", rec.replica, " commits ", id, " twice"));
      if (pos < global.size() && global[pos] != id)
        return fail(v, i, str("replica ", rec.replica, " commits ", id, " at position ", pos, " where ", global[pos],
                              " was committed"));
      if (pos == global.size()) global.push_back(id);
      s.push_back(id);
    }
  }
  for (const auto& f : run.replicas) {
    if (seq[f.id] != ids_of(f.committed))
      return fail(v, recs.size(),
                  str("commit records of replica ", f.id, " (", seq[f.id].size(), " ops) disagree with its final log (",
                      f.committed.size(), " ops)"));
  }
  return v;
}

Verdict check_linearizability(const RunResult& run) {
  Verdict v = pass(run, "linearizability");
  const auto global = global_committed(run);
  std::unordered_map<Dot, std::size_t, DotHash> pos;
  for (std::size_t i = 0; i < global.size(); ++i) {
    if (!global[i]) return fail(v, run.trace.size(), str("committed id at position ", i, " has no request"));
    pos.emplace(global[i]->id, i);
  }

  std::vector<const workload::TxProgram*> programs;
  programs.reserve(global.size());
  for (const Request* r : global) programs.push_back(&r->op);
  const auto oracle = workload::oracle_execute(programs, run.base);

  const auto& recs = run.trace.records();
  constexpr auto kNever = std::numeric_limits<sim::SimTime>::max();
  std::unordered_map<Dot, std::pair<sim::SimTime, std::size_t>, DotHash> stable_at;  // time, record
  std::unordered_map<Dot, std::size_t, DotHash> invoke_rec;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const auto& rec = recs[i];
    if (rec.kind == sim::Rec::kInvoke) {
      invoke_rec.emplace(rec.id, i);
      continue;
    }
    if (rec.kind != sim::Rec::kResponse || !rec.flag) continue;
    auto p = pos.find(rec.id);
    if (p == pos.end()) return fail(v, i, str("stable response for ", rec.id, " which was never committed"));
    if (oracle.responses[p->second] != rec.response)
      return fail(v, i, str("stable response of ", rec.id, " at replica ", rec.replica,
                            " differs from sequential execution of the committed order (position ", p->second, ")"));
    stable_at.try_emplace(rec.id, rec.time, i);
  }

  // (a) scanning the strong ops from the back, the earliest stable response of
  // any later-ordered op must not precede the current op's invocation.
  sim::SimTime min_later = kNever;
  const Request* min_op = nullptr;
  for (std::size_t i = global.size(); i-- > 0;) {
    const Request* b = global[i];
    if (!b->strong) continue;
    if (min_later != kNever && min_later < b->invoked_at)
      return fail(v, stable_at.at(min_op->id).second,
                  str(min_op->id, " got its stable response at ", sim::to_ms(min_later), "ms, before ", b->id,
                      " was invoked at ", sim::to_ms(b->invoked_at), "ms, yet is committed after it"));
    auto s = stable_at.find(b->id);
    if (s != stable_at.end() && s->second.first < min_later) {
      min_later = s->second.first;
      min_op = b;
    }
  }

  // (c)
  for (std::size_t i = 0; i < global.size(); ++i) {
    const Request* r = global[i];
    if (!r->strong) continue;
    auto inv = invoke_rec.find(r->id);
    if (inv == invoke_rec.end()) continue;
    for (const Dot& dep : recs[inv->second].ids) {
      auto p = pos.find(dep);
      if (p == pos.end() || p->second > i)
        return fail(v, inv->second, str("causal context entry ", dep, " of strong op ", r->id, " is not committed before it"));
    }
  }
  return v;
}

Verdict check_convergence(const RunResult& run) {
  Verdict v = pass(run, "convergence");
  std::map<std::size_t, std::vector<const ReplicaFinal*>> groups;
  for (const auto& f : run.replicas)
    if (!f.crashed) groups[f.group].push_back(&f);
  for (const auto& [g, members] : groups) {
    const ReplicaFinal& ref = *members.front();
    const auto ref_ids = ids_of(ref.order);
    for (const ReplicaFinal* f : members) {
      const auto ids = ids_of(f->order);
      if (ids != ref_ids) {
        std::size_t p = 0;
        while (p < ids.size() && p < ref_ids.size() && ids[p] == ref_ids[p]) ++p;
        return fail(v, run.trace.size(),
                    str("replicas ", ref.id, " and ", f->id, " hold different orders from position ", p, " (lengths ",
                        ref_ids.size(), " and ", ids.size(), ")"));
      }
      if (auto k = first_difference(ref.store, f->store))
        return fail(v, run.trace.size(),
                    str("replicas ", ref.id, " and ", f->id, " diverge at ", workload::describe_key(*k), ": ",
                        value_at(ref.store, *k), " vs ", value_at(f->store, *k)));
    }
    std::vector<const workload::TxProgram*> programs;
    for (const Request* r : ref.order) programs.push_back(&r->op);
    const auto oracle = workload::oracle_execute(programs, run.base);
    if (auto k = first_difference(oracle.store, ref.store))
      return fail(v, run.trace.size(),
                  str("replica ", ref.id, " store differs from sequential execution of its order at ",
                      workload::describe_key(*k), ": expected ", value_at(oracle.store, *k), ", found ",
                      value_at(ref.store, *k)));
  }
  return v;
}

Verdict check_minority_stable(const RunResult& run) {
  Verdict v = pass(run, "minority-stable");
  const std::size_t n = run.replicas.size();
  const auto& recs = run.trace.records();
  for (const auto& w : run.config.partitions) {
    std::vector<bool> minority(n + 1, false);
    for (const auto& g : w.groups)
      if (2 * g.size() <= n)
        for (ReplicaId r : g) minority[r] = true;
    // Ops a majority of acceptors had accepted before the partition began
    // may still be learned inside it.
    std::unordered_map<Dot, std::set<ReplicaId>, DotHash> accepted_by;
    for (std::size_t i = 0; i < recs.size() && recs[i].time < w.from; ++i)
      if (recs[i].kind == sim::Rec::kAccept)
        for (const Dot& id : recs[i].ids) accepted_by[id].insert(recs[i].replica);
    for (std::size_t i = 0; i < recs.size(); ++i) {
      const auto& rec = recs[i];
      if (rec.kind != sim::Rec::kResponse || !rec.flag || rec.time < w.from || rec.time >= w.to) continue;
      if (rec.replica == 0 || rec.replica > n || !minority[rec.replica]) continue;
      auto a = accepted_by.find(rec.id);
      if (a == accepted_by.end() || 2 * a->second.size() <= n)
        return fail(v, i, str("minority replica ", rec.replica, " sent a stable response for ", rec.id, " at ",
                              sim::to_ms(rec.time), "ms during the partition"));
    }
  }
  return v;
}

std::vector<Verdict> run_checks(const RunResult& run, const std::vector<std::string>& names) {
  std::vector<std::string> todo;
  for (const auto& n : names) {
    if (n == "all") {
      todo = kCheckers;
      break;
    }
    if (n == "none") continue;
    if (std::find(kCheckers.begin(), kCheckers.end(), n) == kCheckers.end())
      throw sim::ConfigError("unknown checker '" + n + "'");
    todo.push_back(n);
  }
  std::vector<Verdict> out;
  for (const auto& n : todo) {
    if (n == "prefix-agreement") out.push_back(check_prefix_agreement(run));
    else if (n == "linearizability") out.push_back(check_linearizability(run));
    else if (n == "convergence") out.push_back(check_convergence(run));
    else out.push_back(check_minority_stable(run));
  }
  return out;
}

}  // namespace creek::harness
