#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "creek/core/dot.hpp"
#include "creek/core/tx_context.hpp"
#include "creek/sim/time.hpp"

namespace creek::sim {

enum class Rec : std::uint8_t {
  kInvoke,      // flag: strong; aux: program digest; ids: causal context
  kRbDeliver,
  kCabCast,
  kCabDeliver,
  kDecide,      // aux: instance; ids: decided batch
  kCommit,      // ids: appended to the committed sequence
  kExec,        // flag: 1 installed / 0 discarded attempt; response
  kRollback,
  kSpec,        // first entry of a local op into the executed prefix; response
  kResponse,    // flag: 1 stable / 0 tentative; response
  kCrash,
  kAccept,     // acceptor stored a proposal; aux: instance; ids: batch
};

const char* to_string(Rec r);

struct TraceRecord {
  SimTime time = 0;
  ReplicaId replica = 0;
  Rec kind = Rec::kInvoke;
  Dot id;
  std::uint8_t flag = 0;
  std::uint64_t aux = 0;
  Response response;
  std::vector<Dot> ids;
};

// Append-only record stream of one run.
class Trace {
 public:
  void add(TraceRecord r) { records_.push_back(std::move(r)); }
  const std::vector<TraceRecord>& records() const { return records_; }
  std::vector<TraceRecord>& mutable_records() { return records_; }
  std::size_t size() const { return records_.size(); }

  void write(std::ostream& os) const;
  std::string str() const;

 private:
  std::vector<TraceRecord> records_;
};

std::ostream& operator<<(std::ostream& os, const TraceRecord& r);

}  // namespace creek::sim
