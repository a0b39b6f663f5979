#pragma once

#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "creek/core/request.hpp"
#include "creek/core/tx_context.hpp"

namespace creek::engine {

// Version identifier; 0 denotes the shared initial store.
using Uid = std::uint64_t;

// Multiversioned store. Every version remembers the request that created it;
// a version's position is that request's current index in the order, so
// reordering never leaves stale stamps behind. A reader at position p sees,
// per key, the live version whose creator has the greatest position below p.
class MvEngine {
 public:
  // Outcome of one execution attempt, taken on the snapshot at the request's
  // position when the attempt started.
  struct Attempt {
    const Request* req = nullptr;
    Response response;
    std::vector<std::pair<ObjectKey, Uid>> reads;    // keys read before any own write
    std::vector<std::pair<ObjectKey, Value>> writes;  // final value per key, first-write order
  };

  explicit MvEngine(const StoreMap& base) : base_(base) {}

  // Replaces the order. Installed requests whose snapshot no longer matches
  // their new position, and requests that left the order, are invalidated
  // (cascading) and appended to `invalidated`. Returns the length of the
  // longest common prefix of the old and new order.
  std::size_t set_order(const std::vector<const Request*>& order, std::vector<const Request*>* invalidated);

  const std::vector<const Request*>& order() const { return order_; }
  std::optional<std::size_t> position(const Request* r) const;

  // Runs r at its current position. The attempt holds references to the
  // versions it read until release().
  Attempt execute(const Request* r);
  // Runs a read-only program on the snapshot at `pos` without recording it.
  Response execute_at(const workload::TxProgram& op, std::size_t pos) const;
  void release(const Attempt& a);

  // Each read still resolves to the same version at r's current position.
  bool validate(const Attempt& a) const;

  // Installs a validated attempt and revalidates later installed requests
  // that read the written keys, cascading through their writes.
  void install(const Attempt& a, std::vector<const Request*>* invalidated);

  // Marks r's versions invalid. Returns installed requests ordered after r
  // whose reads intersect r's writes, in order.
  std::vector<const Request*> invalidate(const Request* r);

  bool installed(const Request* r) const;
  const Response* response(const Request* r) const;

  // Moves the versions of r into the committed layer. Callers fold committed
  // requests strictly in order.
  void fold(const Request* r);
  bool folded(const Request* r) const { return folded_.count(r) > 0; }

  // Removes invalidated versions that no open attempt references.
  std::size_t gc();

  // Versions currently held for key (chain plus committed-layer entry).
  std::size_t chain_length(ObjectKey key) const;
  std::size_t invalid_backlog() const { return invalid_count_; }

  StoreDump dump(std::size_t prefix_len) const;

 private:
  struct Version {
    Uid uid;
    const Request* creator;
    Value value;
    bool invalid;
  };
  struct Installed {
    Uid uid;
    std::unordered_map<ObjectKey, Uid> reads;
    std::vector<std::pair<ObjectKey, Value>> writes;
    Response response;
  };
  struct Resolved {
    Uid uid;
    Value value;
  };
  class Context;

  Resolved resolve(ObjectKey key, std::size_t pos) const;
  bool still_valid(const Installed& inst, std::size_t pos) const;
  void mark_invalid(const Request* r, Installed& inst);
  // Ascending pass over installed requests at positions >= start.
  void revalidate(std::size_t start, std::unordered_set<ObjectKey> dirty, std::vector<const Request*>* invalidated);

  const StoreMap& base_;
  std::vector<const Request*> order_;
  std::unordered_map<const Request*, std::size_t> pos_;
  std::unordered_map<const Request*, Installed> installed_;
  std::unordered_map<const Request*, Response> folded_;
  std::unordered_map<ObjectKey, std::vector<Version>> chains_;
  std::unordered_map<ObjectKey, std::pair<Uid, Value>> committed_;
  std::unordered_map<Uid, std::size_t> refs_;
  std::size_t invalid_count_ = 0;
  std::size_t superseded_ = 0;
  Uid next_uid_ = 1;
};

}  // namespace creek::engine
