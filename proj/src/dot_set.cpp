#include "creek/core/dot_set.hpp"

namespace creek {

void DotSet::compact(Component& c) {
  auto it = c.extras.begin();
  while (it != c.extras.end() && *it == c.prefix + 1) {
    ++c.prefix;
    it = c.extras.erase(it);
  }
}

bool DotSet::contains(const Dot& d) const {
  auto it = entries_.find(d.replica);
  if (it == entries_.end() || d.event == 0) return false;
  return d.event <= it->second.prefix || it->second.extras.count(d.event) > 0;
}

void DotSet::insert(const Dot& d) {
  if (d.event == 0) return;
  Component& c = entries_[d.replica];
  if (d.event <= c.prefix) return;
  if (d.event == c.prefix + 1) {
    ++c.prefix;
    compact(c);
  } else {
    c.extras.insert(d.event);
  }
}

void DotSet::erase(const Dot& d) {
  auto it = entries_.find(d.replica);
  if (it == entries_.end()) return;
  Component& c = it->second;
  if (d.event > c.prefix) {
    c.extras.erase(d.event);
  } else if (d.event > 0) {
    for (std::uint64_t e = d.event + 1; e <= c.prefix; ++e) c.extras.insert(e);
    c.prefix = d.event - 1;
  }
  if (c.prefix == 0 && c.extras.empty()) entries_.erase(it);
}

void DotSet::merge(const DotSet& other) {
  for (const auto& [r, oc] : other.entries_) {
    Component& c = entries_[r];
    if (oc.prefix > c.prefix) {
      c.prefix = oc.prefix;
      c.extras.erase(c.extras.begin(), c.extras.upper_bound(c.prefix));
    }
    for (auto e : oc.extras)
      if (e > c.prefix) c.extras.insert(e);
    compact(c);
  }
}

bool DotSet::includes(const DotSet& other) const {
  for (const auto& [r, oc] : other.entries_) {
    auto it = entries_.find(r);
    if (it == entries_.end()) return false;
    const Component& c = it->second;
    if (oc.prefix > c.prefix) {
      // Every event in (c.prefix, oc.prefix] must be a sparse member.
      auto lo = c.extras.upper_bound(c.prefix);
      auto hi = c.extras.upper_bound(oc.prefix);
      if (static_cast<std::uint64_t>(std::distance(lo, hi)) != oc.prefix - c.prefix) return false;
    }
    for (auto e : oc.extras)
      if (e > c.prefix && c.extras.count(e) == 0) return false;
  }
  return true;
}

std::size_t DotSet::size() const {
  std::size_t n = 0;
  for (const auto& [r, c] : entries_) n += c.prefix + c.extras.size();
  return n;
}

std::uint64_t DotSet::prefix(ReplicaId r) const {
  auto it = entries_.find(r);
  return it == entries_.end() ? 0 : it->second.prefix;
}

std::vector<Dot> DotSet::to_vector() const {
  std::vector<Dot> out;
  for (const auto& [r, c] : entries_) {
    for (std::uint64_t e = 1; e <= c.prefix; ++e) out.push_back({r, e});
    for (auto e : c.extras) out.push_back({r, e});
  }
  return out;
}

std::size_t DotSet::encoded_entries() const {
  std::size_t n = 0;
  for (const auto& [r, c] : entries_) n += 1 + c.extras.size();
  return n;
}

}  // namespace creek
