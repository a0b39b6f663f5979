#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "creek/core/dot.hpp"

namespace creek {

// Set of dots with per-replica contiguous-prefix compression, in the style of
// a dotted version vector: for each replica, events 1..prefix are members and
// `extras` holds the sparse members above the prefix.
class DotSet {
 public:
  DotSet() = default;

  bool contains(const Dot& d) const;
  void insert(const Dot& d);
  void erase(const Dot& d);

  // this := this ∪ other
  void merge(const DotSet& other);

  // other ⊆ this
  bool includes(const DotSet& other) const;

  bool empty() const { return entries_.empty(); }
  std::size_t size() const;

  // Highest event such that 1..event are all members.
  std::uint64_t prefix(ReplicaId r) const;

  std::vector<Dot> to_vector() const;

  // Number of (replica, range-or-dot) entries; used for message size accounting.
  std::size_t encoded_entries() const;

  friend bool operator==(const DotSet& a, const DotSet& b) { return a.entries_ == b.entries_; }

 private:
  struct Component {
    std::uint64_t prefix = 0;
    std::set<std::uint64_t> extras;
    friend bool operator==(const Component&, const Component&) = default;
  };

  static void compact(Component& c);

  std::map<ReplicaId, Component> entries_;
};

}  // namespace creek
