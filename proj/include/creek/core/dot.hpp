#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>

#include "creek/sim/simulator.hpp"

namespace creek {

using sim::ReplicaId;

// Operation identifier: (replica number, event number).
struct Dot {
  ReplicaId replica = 0;
  std::uint64_t event = 0;

  friend constexpr auto operator<=>(const Dot&, const Dot&) = default;
};

inline std::ostream& operator<<(std::ostream& os, const Dot& d) { return os << d.replica << '.' << d.event; }

struct DotHash {
  std::size_t operator()(const Dot& d) const noexcept {
    return std::hash<std::uint64_t>{}((static_cast<std::uint64_t>(d.replica) << 48) ^ d.event);
  }
};

}  // namespace creek
