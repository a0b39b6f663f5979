#pragma once

// Deliberate corruptions of a finished run; each one must make a checker fail.

#include <optional>
#include <string>
#include <unordered_map>

#include "creek/harness/checkers.hpp"
#include "creek/harness/cluster.hpp"

namespace creek::testing {

// Swaps two strong ops a, b of the committed order such that a's stable
// response preceded b's invocation, in every COMMIT record. Returns false
// when the run has no such pair.
inline bool swap_real_time_ordered_strong_ops(harness::RunResult& run) {
  std::unordered_map<Dot, sim::SimTime, DotHash> stable;
  for (const auto& rec : run.trace.records())
    if (rec.kind == sim::Rec::kResponse && rec.flag) stable.try_emplace(rec.id, rec.time);
  const auto global = harness::global_committed(run);
  std::optional<Dot> a, b;
  for (std::size_t i = 0; i < global.size() && !b; ++i) {
    if (!global[i]->strong || !stable.count(global[i]->id)) continue;
    for (std::size_t j = i + 1; j < global.size(); ++j) {
      if (global[j]->strong && stable.at(global[i]->id) < global[j]->invoked_at) {
        a = global[i]->id;
        b = global[j]->id;
        break;
      }
    }
  }
  if (!b) return false;
  for (auto& rec : run.trace.mutable_records()) {
    if (rec.kind != sim::Rec::kCommit) continue;
    for (Dot& id : rec.ids) {
      if (id == *a)
        id = *b;
      else if (id == *b)
        id = *a;
    }
  }
  return true;
}

// Removes the last COMMIT record of replica r.
inline bool drop_commit(harness::RunResult& run, ReplicaId r) {
  auto& recs = run.trace.mutable_records();
  for (std::size_t i = recs.size(); i-- > 0;) {
    if (recs[i].kind == sim::Rec::kCommit && recs[i].replica == r) {
      recs.erase(recs.begin() + static_cast<std::ptrdiff_t>(i));
      return true;
    }
  }
  return false;
}

// Changes one key of replica r's final store.
inline void corrupt_store(harness::RunResult& run, ReplicaId r) {
  auto& store = run.replicas.at(r - 1).store;
  if (store.empty())
    store[1] = 42;
  else
    store.begin()->second += 1;
}

inline bool verdict_fails(const harness::RunResult& run, const std::string& property) {
  for (const auto& v : harness::run_checks(run, {property}))
    if (!v.pass) return true;
  return false;
}

}  // namespace creek::testing
