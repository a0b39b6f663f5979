#include "creek/harness/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace creek::harness {

namespace {

std::string num(double d, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, d);
  return buf;
}

void header(std::ostream& os, const std::vector<std::string>& echo) {
  for (const auto& line : echo) os << "# " << line << '\n';
}

template <class Fn>
void write_file(const std::filesystem::path& p, Fn fn) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  fn(out);
  if (!out) throw std::runtime_error("error while writing " + p.string());
}

}  // namespace

void write_results_csv(std::ostream& os, const std::vector<RunReport>& runs, const std::vector<std::string>& echo) {
  header(os, echo);
  os << kResultsHeader << '\n';
  for (const auto& r : runs) {
    const auto& m = r.metrics;
    for (const auto& kind : kLatencyKinds) {
      const auto& l = m.latency.at(kind);
      if (l.count == 0) continue;
      os << m.system << ',' << m.seed << ',' << num(m.load, 1) << ',' << kind << ',' << num(l.p50_ms) << ','
         << num(l.p95_ms) << ',' << num(l.p99_ms) << ',' << num(m.throughput_tps, 1) << ',' << num(m.accuracy) << ','
         << num(m.exec_ratio) << '\n';
    }
  }
}

void write_latency_dat(std::ostream& os, const std::vector<RunReport>& runs, const std::vector<std::string>& echo) {
  header(os, echo);
  os << "# system kind throughput_tps p50_ms p95_ms p99_ms mean_ms load seed\n";
  for (const auto& r : runs) {
    const auto& m = r.metrics;
    for (const auto& kind : kLatencyKinds) {
      const auto& l = m.latency.at(kind);
      if (l.count == 0) continue;
      os << m.system << ' ' << kind << ' ' << num(m.throughput_tps, 1) << ' ' << num(l.p50_ms) << ' '
         << num(l.p95_ms) << ' ' << num(l.p99_ms) << ' ' << num(l.mean_ms) << ' ' << num(m.load, 1) << ' ' << m.seed
         << '\n';
    }
  }
}

void write_accuracy_dat(std::ostream& os, const std::vector<RunReport>& runs, const std::vector<std::string>& echo) {
  header(os, echo);
  os << "# system throughput_tps accuracy samples load seed\n";
  for (const auto& r : runs) {
    const auto& m = r.metrics;
    os << m.system << ' ' << num(m.throughput_tps, 1) << ' ' << num(m.accuracy) << ' ' << m.accuracy_samples << ' '
       << num(m.load, 1) << ' ' << m.seed << '\n';
  }
}

void write_exec_ratio_dat(std::ostream& os, const std::vector<RunReport>& runs, const std::vector<std::string>& echo) {
  header(os, echo);
  os << "# system throughput_tps exec_ratio utilization load seed\n";
  for (const auto& r : runs) {
    const auto& m = r.metrics;
    os << m.system << ' ' << num(m.throughput_tps, 1) << ' ' << num(m.exec_ratio) << ' ' << num(m.utilization) << ' '
       << num(m.load, 1) << ' ' << m.seed << '\n';
  }
}

void write_messages_csv(std::ostream& os, const std::vector<RunReport>& runs, const std::vector<std::string>& echo) {
  header(os, echo);
  os << "system,seed,load,channel,messages,bytes,dropped\n";
  for (const auto& r : runs) {
    const auto& m = r.metrics;
    for (std::size_t c = 0; c < m.channels.size(); ++c) {
      const auto& s = m.channels[c];
      os << m.system << ',' << m.seed << ',' << num(m.load, 1) << ',' << sim::to_string(static_cast<sim::Channel>(c))
         << ',' << s.messages << ',' << s.bytes << ',' << s.dropped << '\n';
    }
  }
}

void write_verdicts(std::ostream& os, const std::vector<RunReport>& runs, const std::vector<std::string>& echo) {
  header(os, echo);
  os << "# system seed load property result event_index detail\n";
  for (const auto& r : runs) {
    for (const auto& v : r.verdicts) {
      os << r.metrics.system << ' ' << v.seed << ' ' << num(r.metrics.load, 1) << ' ' << v.property << ' '
         << (v.pass ? "PASS" : "FAIL") << ' ' << v.event_index;
      if (!v.detail.empty()) os << ' ' << v.detail;
      os << '\n';
    }
  }
}

void emit_report(const std::string& dir, const std::vector<RunReport>& runs, const std::vector<std::string>& echo) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir + ": " + ec.message());
  const fs::path base(dir);
  write_file(base / "results.csv", [&](std::ostream& os) { write_results_csv(os, runs, echo); });
  write_file(base / "latency.dat", [&](std::ostream& os) { write_latency_dat(os, runs, echo); });
  write_file(base / "accuracy.dat", [&](std::ostream& os) { write_accuracy_dat(os, runs, echo); });
  write_file(base / "exec_ratio.dat", [&](std::ostream& os) { write_exec_ratio_dat(os, runs, echo); });
  write_file(base / "messages.csv", [&](std::ostream& os) { write_messages_csv(os, runs, echo); });
  write_file(base / "verdicts.txt", [&](std::ostream& os) { write_verdicts(os, runs, echo); });
}

std::string summary_line(const RunReport& r) {
  const auto& m = r.metrics;
  std::string s = m.system + " seed=" + std::to_string(m.seed) + " load=" + num(m.load, 0) +
                  " tput=" + num(m.throughput_tps, 0) + " done=" + std::to_string(m.completed) + "/" +
                  std::to_string(m.invoked);
  for (const char* k : {"tentative-weak", "stable-strong", "response-all"}) {
    const auto& l = m.latency.at(k);
    if (l.count) s += std::string(" ") + k + "=" + num(l.mean_ms, 3) + "ms";
  }
  s += " acc=" + num(m.accuracy, 4) + " exec=" + num(m.exec_ratio, 3);
  for (const auto& v : r.verdicts) s += " " + v.property + "=" + (v.pass ? "ok" : "FAIL");
  return s;
}

}  // namespace creek::harness
