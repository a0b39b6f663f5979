#pragma once

#include <unordered_map>

#include "creek/core/request.hpp"
#include "creek/core/tx_context.hpp"

namespace creek::engine {

// Single-copy store with a per-request undo log. Execution mutates the store
// in place; rollback restores the values that were present before the first
// write of each key.
class UndoStore {
 public:
  explicit UndoStore(const StoreMap& base) : base_(base) {}

  Response execute(const Request& r, AccessSets* sets = nullptr);

  // Must be called in reverse execution order.
  void rollback(const Dot& id);

  // Forget the undo record of a request that can no longer be rolled back.
  void discard_undo(const Dot& id) { undo_.erase(id); }
  bool has_undo(const Dot& id) const { return undo_.count(id) > 0; }
  std::size_t undo_records() const { return undo_.size(); }

  Value get(ObjectKey key) const;
  StoreDump dump() const;

 private:
  struct Prior {
    bool present;  // key was present in the overlay
    Value value;
  };
  class Context;

  const StoreMap& base_;
  std::unordered_map<ObjectKey, Value> overlay_;
  std::unordered_map<Dot, std::unordered_map<ObjectKey, Prior>, DotHash> undo_;
};

}  // namespace creek::engine
