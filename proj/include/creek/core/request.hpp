#pragma once

#include <deque>
#include <tuple>
#include <unordered_map>

#include "creek/core/dot.hpp"
#include "creek/core/dot_set.hpp"
#include "creek/sim/time.hpp"
#include "creek/workload/tpcc.hpp"

namespace creek {

// Replicated operation envelope. Immutable once created; replicas share it by
// pointer (the simulated wire carries the pointer, sizes are modelled).
struct Request {
  std::int64_t timestamp = 0;  // replica-local clock, ns
  Dot id;
  workload::TxProgram op;
  bool strong = false;
  DotSet causal_ctx;
  sim::SimTime service = 0;
  sim::SimTime invoked_at = 0;
  bool internal = false;  // strong no-op flush, not a client operation
  bool shortcut = false;  // read-only op answered locally, never broadcast

  std::size_t wire_bytes() const { return 48 + op.lines.size() * 12 + causal_ctx.encoded_entries() * 12; }
};

// Total order on requests: (timestamp, id) lexicographic.
inline bool precedes(const Request& a, const Request& b) {
  return std::tie(a.timestamp, a.id) < std::tie(b.timestamp, b.id);
}

struct RequestOrder {
  bool operator()(const Request* a, const Request* b) const { return precedes(*a, *b); }
};

// Owns every request created during one run.
class RequestPool {
 public:
  const Request* add(Request r) {
    items_.push_back(std::move(r));
    const Request* p = &items_.back();
    index_.emplace(p->id, p);
    return p;
  }
  const Request* find(const Dot& id) const {
    auto it = index_.find(id);
    return it == index_.end() ? nullptr : it->second;
  }
  const std::deque<Request>& all() const { return items_; }
  std::size_t size() const { return items_.size(); }

 private:
  std::deque<Request> items_;
  std::unordered_map<Dot, const Request*, DotHash> index_;
};

}  // namespace creek
