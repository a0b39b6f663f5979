#include "creek/sim/trace.hpp"

#include <sstream>

namespace creek::sim {

const char* to_string(Rec r) {
  switch (r) {
    case Rec::kInvoke: return "INVOKE";
    case Rec::kRbDeliver: return "RB_DELIVER";
    case Rec::kCabCast: return "CAB_CAST";
    case Rec::kCabDeliver: return "CAB_DELIVER";
    case Rec::kDecide: return "DECIDE";
    case Rec::kCommit: return "COMMIT";
    case Rec::kExec: return "EXEC";
    case Rec::kRollback: return "ROLLBACK";
    case Rec::kSpec: return "SPEC";
    case Rec::kResponse: return "RESPONSE";
    case Rec::kCrash: return "CRASH";
    case Rec::kAccept: return "ACCEPT";
  }
  return "?";
}

std::ostream& operator<<(std::ostream& os, const TraceRecord& r) {
  os << r.time << ' ' << r.replica << ' ' << to_string(r.kind) << ' ' << r.id << ' ' << int{r.flag} << ' ' << r.aux;
  if (!r.response.empty()) {
    os << " [";
    for (std::size_t i = 0; i < r.response.size(); ++i) os << (i ? "," : "") << r.response[i];
    os << ']';
  }
  if (!r.ids.empty()) {
    os << " {";
    for (std::size_t i = 0; i < r.ids.size(); ++i) os << (i ? " " : "") << r.ids[i];
    os << '}';
  }
  return os;
}

void Trace::write(std::ostream& os) const {
  for (const auto& r : records_) os << r << '\n';
}

std::string Trace::str() const {
  std::ostringstream os;
  write(os);
  return os.str();
}

}  // namespace creek::sim
