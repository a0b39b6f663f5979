#include "creek/engine/executor.hpp"

#include <algorithm>

#include "creek/core/errors.hpp"

namespace creek::engine {

const char* to_string(EngineKind k) { return k == EngineKind::kReference ? "reference" : "multiversion"; }

namespace {

class ReadOnlyContext final : public TxContext {
 public:
  explicit ReadOnlyContext(const UndoStore& s) : store_(s) {}
  Value read(ObjectKey key) override { return store_.get(key); }
  void write(ObjectKey, Value) override { throw ProtocolViolation("write in a read-only snapshot"); }

 private:
  const UndoStore& store_;
};

}  // namespace

// --- SequentialExecutor ---

SequentialExecutor::SequentialExecutor(sim::Simulator& sim, ReplicaId self, sim::Trace* trace, EnterFn on_enter,
                                       const StoreMap& base, sim::SimTime rollback_time)
    : Executor(sim, self, trace, std::move(on_enter)), store_(base), rollback_time_(rollback_time) {}

const Response* SequentialExecutor::response(const Request* r) const {
  auto it = responses_.find(r);
  return it == responses_.end() ? nullptr : &it->second;
}

Response SequentialExecutor::read_snapshot(const workload::TxProgram& op) const {
  ReadOnlyContext ctx(store_);
  return op.run(ctx);
}

void SequentialExecutor::adjust(const std::vector<const Request*>& order, std::size_t committed_len) {
  std::size_t lcp = 0;
  const std::size_t common = std::min(executed_.size(), order.size());
  while (lcp < common && executed_[lcp] == order[lcp]) ++lcp;
  if (lcp < undo_trimmed_) throw ProtocolViolation("reorder reaches into the committed executed prefix");
  for (std::size_t i = executed_.size(); i-- > lcp;) {
    to_rollback_.push_back(executed_[i]);
    responses_.erase(executed_[i]);
  }
  executed_.resize(lcp);
  order_ = order;
  committed_len_ = committed_len;
  trim_undo();
  pump();
}

void SequentialExecutor::trim_undo() {
  const std::size_t upto = std::min(executed_.size(), committed_len_);
  for (; undo_trimmed_ < upto; ++undo_trimmed_) store_.discard_undo(executed_[undo_trimmed_]->id);
}

void SequentialExecutor::pump() {
  if (busy_) return;
  if (!to_rollback_.empty()) {
    const Request* r = to_rollback_.front();
    busy_ = true;
    stats_.busy += rollback_time_;
    sim_.schedule_after(rollback_time_, self_, sim::EventKind::kRollbackComplete, [this, r] { finish_rollback(r); });
    return;
  }
  if (executed_.size() < order_.size()) {
    const Request* r = order_[executed_.size()];
    busy_ = true;
    stats_.busy += r->service;
    sim_.schedule_after(r->service, self_, sim::EventKind::kExecutionComplete, [this, r] { finish_execution(r); });
  }
}

void SequentialExecutor::finish_rollback(const Request* r) {
  busy_ = false;
  if (to_rollback_.empty() || to_rollback_.front() != r) throw ProtocolViolation("rollback queue changed under a rollback");
  to_rollback_.pop_front();
  store_.rollback(r->id);
  ++stats_.rollbacks;
  record(sim::Rec::kRollback, r);
  pump();
}

void SequentialExecutor::finish_execution(const Request* r) {
  busy_ = false;
  ++stats_.attempts;
  if (to_rollback_.empty() && executed_.size() < order_.size() && order_[executed_.size()] == r) {
    Response resp = store_.execute(*r);
    executed_.push_back(r);
    responses_[r] = resp;
    record(sim::Rec::kExec, r, 1, resp);
    trim_undo();
    on_enter_(r, resp);
  } else {
    ++stats_.discarded;
    record(sim::Rec::kExec, r, 0);
  }
  pump();
}

// --- ConcurrentExecutor ---

ConcurrentExecutor::ConcurrentExecutor(sim::Simulator& sim, ReplicaId self, sim::Trace* trace, EnterFn on_enter,
                                       const StoreMap& base, std::size_t slots, std::size_t gc_threshold)
    : Executor(sim, self, trace, std::move(on_enter)),
      engine_(base),
      slots_(std::max<std::size_t>(1, slots)),
      gc_threshold_(gc_threshold) {}

bool ConcurrentExecutor::in_prefix(const Request* r) const {
  auto pos = engine_.position(r);
  return pos && *pos < prefix_len_;
}

void ConcurrentExecutor::adjust(const std::vector<const Request*>& order, std::size_t committed_len) {
  if (in_callback_) throw ProtocolViolation("order changed from inside an execution callback");
  const std::size_t old_prefix = prefix_len_;
  std::vector<const Request*> inv;
  const std::size_t lcp = engine_.set_order(order, &inv);
  note_invalidated(inv);
  const bool committed_grew = committed_len > committed_len_;
  committed_len_ = committed_len;
  refresh_prefix(std::min(old_prefix, lcp));
  collect(committed_grew);
  pump();
}

void ConcurrentExecutor::note_invalidated(const std::vector<const Request*>& inv) {
  for (const Request* r : inv) {
    ++stats_.rollbacks;
    record(sim::Rec::kRollback, r);
  }
}

void ConcurrentExecutor::refresh_prefix(std::size_t scan_from) {
  const auto& ord = engine_.order();
  std::size_t len = std::min(scan_from, ord.size());
  while (len < ord.size() && engine_.installed(ord[len])) ++len;
  prefix_len_ = len;
  in_callback_ = true;
  for (std::size_t i = scan_from; i < len; ++i) on_enter_(ord[i], *engine_.response(ord[i]));
  in_callback_ = false;
  const std::size_t fold_to = std::min(prefix_len_, committed_len_);
  for (; folded_upto_ < fold_to; ++folded_upto_) engine_.fold(ord[folded_upto_]);
}

void ConcurrentExecutor::collect(bool force) {
  if (force || engine_.invalid_backlog() >= gc_threshold_) reclaimed_ += engine_.gc();
}

void ConcurrentExecutor::pump() {
  const auto& ord = engine_.order();
  for (std::size_t i = prefix_len_; i < ord.size() && inflight_.size() < slots_; ++i) {
    const Request* r = ord[i];
    if (engine_.installed(r) || inflight_.count(r)) continue;
    inflight_.emplace(r, engine_.execute(r));
    stats_.busy += r->service;
    sim_.schedule_after(r->service, self_, sim::EventKind::kExecutionComplete, [this, r] { finish(r); });
  }
}

void ConcurrentExecutor::finish(const Request* r) {
  auto node = inflight_.extract(r);
  if (node.empty()) throw ProtocolViolation("completion of an unknown execution attempt");
  MvEngine::Attempt a = std::move(node.mapped());
  ++stats_.attempts;
  if (engine_.validate(a)) {
    const std::size_t old_prefix = prefix_len_;
    std::vector<const Request*> inv;
    engine_.install(a, &inv);
    record(sim::Rec::kExec, r, 1, a.response);
    note_invalidated(inv);
    refresh_prefix(old_prefix);
  } else {
    ++stats_.discarded;
    record(sim::Rec::kExec, r, 0);
  }
  engine_.release(a);
  collect(false);
  pump();
}

std::unique_ptr<Executor> make_executor(EngineKind kind, sim::Simulator& sim, ReplicaId self, sim::Trace* trace,
                                        Executor::EnterFn on_enter, const StoreMap& base, std::size_t slots,
                                        sim::SimTime rollback_time, std::size_t gc_threshold) {
  if (kind == EngineKind::kReference)
    return std::make_unique<SequentialExecutor>(sim, self, trace, std::move(on_enter), base, rollback_time);
  return std::make_unique<ConcurrentExecutor>(sim, self, trace, std::move(on_enter), base, slots, gc_threshold);
}

}  // namespace creek::engine
