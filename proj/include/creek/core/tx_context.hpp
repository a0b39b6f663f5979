#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <unordered_map>
#include <vector>

namespace creek {

using ObjectKey = std::uint64_t;
using Value = std::int64_t;

// Client-visible result of one transaction execution.
using Response = std::vector<std::int64_t>;

// Shared, immutable initial contents of the replicated store.
using StoreMap = std::unordered_map<ObjectKey, Value>;

// Sorted dump used for cross-replica and cross-engine comparison. It holds
// exactly the keys whose value differs from the initial store (absent keys
// count as 0), so two dumps are equal iff every read would agree.
using StoreDump = std::map<ObjectKey, Value>;

inline Value initial_value(const StoreMap& initial, ObjectKey key) {
  auto it = initial.find(key);
  return it == initial.end() ? 0 : it->second;
}

inline void dump_put(StoreDump& d, const StoreMap& initial, ObjectKey key, Value v) {
  if (v == initial_value(initial, key)) d.erase(key);
  else d[key] = v;
}

// Register-level access to a store; transaction programs are written against
// this interface. Reads of absent objects yield 0.
class TxContext {
 public:
  virtual ~TxContext() = default;
  virtual Value read(ObjectKey key) = 0;
  virtual void write(ObjectKey key, Value value) = 0;
};

// Readset and writeset of one execution, in first-access order.
struct AccessSets {
  std::vector<ObjectKey> reads;
  std::vector<ObjectKey> writes;
};

}  // namespace creek
