// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits non-zero when any fails. Arguments select criteria by number.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "../common/cab_cluster.hpp"
#include "../common/mutations.hpp"
#include "creek/harness/checkers.hpp"
#include "creek/harness/cluster.hpp"
#include "creek/harness/config.hpp"
#include "creek/harness/metrics.hpp"
#include "creek/harness/report.hpp"

namespace {

using namespace creek;
using harness::ExperimentConfig;
using harness::RunResult;
using harness::SystemKind;

const std::vector<std::string> kSafety = {"prefix-agreement", "linearizability", "convergence"};

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

ExperimentConfig base_config(SystemKind sys, std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.system = sys;
  cfg.seed = seed;
  cfg.replicas = 5;
  cfg.workload.ops = 500;
  cfg.workload.warehouses = 5;
  return cfg;
}

// First failing verdict among `names`, or empty.
std::string first_failure(const RunResult& run, const std::vector<std::string>& names) {
  for (const auto& v : harness::run_checks(run, names))
    if (!v.pass) return v.property + " (seed " + std::to_string(v.seed) + "): " + v.detail;
  return "";
}

// Per-op value of the first stable response.
std::map<Dot, Response> stable_responses(const RunResult& run) {
  std::map<Dot, Response> out;
  for (const auto& rec : run.trace.records())
    if (rec.kind == sim::Rec::kResponse && rec.flag) out.try_emplace(rec.id, rec.response);
  return out;
}

std::vector<Dot> ids(const std::vector<const Request*>& v) {
  std::vector<Dot> out;
  for (const Request* r : v) out.push_back(r->id);
  return out;
}

std::string engine_difference(const RunResult& a, const RunResult& b) {
  for (std::size_t i = 0; i < a.replicas.size(); ++i) {
    if (ids(a.replicas[i].committed) != ids(b.replicas[i].committed))
      return "committed order differs at replica " + std::to_string(i + 1);
    if (a.replicas[i].store != b.replicas[i].store) return "store differs at replica " + std::to_string(i + 1);
  }
  if (stable_responses(a) != stable_responses(b)) return "stable responses differ";
  return "";
}

// Criteria 1 and 3 share their runs: every seed runs under both engines.
struct SweepResult {
  Outcome safety;
  Outcome equivalence;
};

SweepResult safety_sweep(std::size_t seeds, std::size_t equivalence_seeds) {
  SweepResult out;
  std::size_t runs = 0, compared = 0;
  for (std::uint64_t seed = 1; seed <= seeds; ++seed) {
    auto cfg = base_config(SystemKind::kCreek, seed);
    cfg.engine = engine::EngineKind::kReference;
    const auto ref = harness::run_experiment(cfg);
    cfg.engine = engine::EngineKind::kMultiversion;
    const auto mv = harness::run_experiment(cfg);
    runs += 2;
    for (const RunResult* run : {&ref, &mv}) {
      if (run->pool->size() < 500) {
        out.safety = {false, "seed " + std::to_string(seed) + " produced fewer than 500 ops"};
        return out;
      }
      const auto f = first_failure(*run, kSafety);
      if (!f.empty() && out.safety.pass)
        out.safety = {false, std::string(to_string(run->config.engine)) + " engine, " + f};
    }
    if (seed <= equivalence_seeds) {
      ++compared;
      const auto d = engine_difference(ref, mv);
      if (!d.empty() && out.equivalence.pass) out.equivalence = {false, "seed " + std::to_string(seed) + ": " + d};
    }
  }
  if (out.safety.pass) out.safety.detail = std::to_string(runs) + " runs, all checkers pass";
  if (out.equivalence.pass)
    out.equivalence.detail = std::to_string(compared) + " seeds with identical stores, orders and stable responses";
  return out;
}

Outcome fault_sweep() {
  std::size_t crash_runs = 0, partition_runs = 0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    auto cfg = base_config(SystemKind::kCreek, 10'000 + seed);
    cfg.engine = seed % 2 ? engine::EngineKind::kMultiversion : engine::EngineKind::kReference;
    auto rng = sim::make_stream(cfg.seed, sim::Stream::kFaults);
    cfg.crashes.push_back({1, sim::from_ms(rng.uniform(5, 200))});
    const auto run = harness::run_experiment(cfg);
    ++crash_runs;
    const auto f = first_failure(run, kSafety);
    if (!f.empty()) return {false, "leader crash, " + f};
  }
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    auto cfg = base_config(SystemKind::kCreek, 20'000 + seed);
    cfg.engine = seed % 2 ? engine::EngineKind::kMultiversion : engine::EngineKind::kReference;
    auto rng = sim::make_stream(cfg.seed, sim::Stream::kFaults);
    std::vector<ReplicaId> all{1, 2, 3, 4, 5};
    for (std::size_t i = all.size(); i-- > 1;) std::swap(all[i], all[static_cast<std::size_t>(rng.uniform_int(0, i))]);
    const auto minority_size = static_cast<std::size_t>(rng.uniform_int(1, 2));
    std::vector<ReplicaId> minority(all.begin(), all.begin() + static_cast<long>(minority_size));
    std::vector<ReplicaId> majority(all.begin() + static_cast<long>(minority_size), all.end());
    const double from = rng.uniform(20, 120);
    const double to = from + rng.uniform(30, 120);
    cfg.partitions.push_back({{majority, minority}, sim::from_ms(from), sim::from_ms(to)});
    const auto run = harness::run_experiment(cfg);
    ++partition_runs;
    auto names = kSafety;
    names.push_back("minority-stable");
    const auto f = first_failure(run, names);
    if (!f.empty()) return {false, "minority partition, " + f};
  }
  return {true, std::to_string(crash_runs) + " leader-crash and " + std::to_string(partition_runs) +
                    " minority-partition runs pass"};
}

Outcome cab_properties() {
  std::size_t cases = 0, blocked = 0;
  for (std::uint64_t seed = 1; seed <= 2000; ++seed) {
    sim::Rng rng(seed);
    const std::size_t n = static_cast<std::size_t>(3 + 2 * rng.uniform_int(0, 2));
    const double low = rng.uniform(0.05, 0.5);
    testing::CabCluster c(n, seed, sim::NetworkConfig{low, low + rng.uniform(0, 1.0)});
    const int casts = static_cast<int>(rng.uniform_int(10, 40));
    for (int i = 0; i < casts; ++i) {
      const auto r = static_cast<ReplicaId>(rng.uniform_int(1, static_cast<std::int64_t>(n)));
      const auto at = sim::from_ms(rng.uniform(0, 40));
      if (rng.uniform01() < 0.15)
        c.cast_hidden_payload(r, at, at + sim::from_ms(rng.uniform(1, 30)));
      else
        c.cast_at(r, at);
    }
    const auto mode = rng.uniform_int(0, 2);
    if (mode == 1) {
      const auto crashes = rng.uniform_int(1, static_cast<std::int64_t>((n - 1) / 2));
      for (std::int64_t k = 0; k < crashes; ++k)
        c.crash_at(static_cast<ReplicaId>(rng.uniform_int(1, static_cast<std::int64_t>(n))),
                   sim::from_ms(rng.uniform(0, 40)), sim::from_ms(5));
    } else if (mode == 2) {
      const auto cut = static_cast<std::size_t>(rng.uniform_int(1, static_cast<std::int64_t>((n - 1) / 2)));
      std::vector<ReplicaId> a, b;
      for (ReplicaId r = 1; r <= n; ++r) (r <= cut ? a : b).push_back(r);
      const double from = rng.uniform(0, 20);
      c.net().set_partition({a, b}, sim::from_ms(from), sim::from_ms(from + rng.uniform(5, 60)));
    }
    c.run();
    ++cases;
    const auto v = c.violations();
    if (!v.empty()) return {false, "case " + std::to_string(seed) + ": " + v.front()};
    blocked += c.blocked() > 0;
  }
  return {true, std::to_string(cases) + " cases: total order, integrity, validity, agreement and deferral hold (" +
                    std::to_string(blocked) + " cases lost a payload with its only holder)"};
}

double mean_latency(const std::vector<harness::MetricsReport>& ms, const std::string& kind) {
  double sum = 0;
  for (const auto& m : ms) sum += m.latency.at(kind).mean_ms;
  return ms.empty() ? 0 : sum / static_cast<double>(ms.size());
}

std::vector<harness::MetricsReport> measure(SystemKind sys, const std::vector<std::uint64_t>& seeds,
                                            const std::function<void(ExperimentConfig&)>& tweak) {
  std::vector<harness::MetricsReport> out;
  for (auto seed : seeds) {
    auto cfg = base_config(sys, seed);
    tweak(cfg);
    out.push_back(harness::compute_metrics(harness::run_experiment(cfg)));
  }
  return out;
}

const std::vector<std::uint64_t> kSeeds = {1, 2, 3, 4, 5};

void low_load(ExperimentConfig& c) { c.workload.rate_tps = 500; }

Outcome latency() {
  const auto creek = measure(SystemKind::kCreek, kSeeds, low_load);
  const double tw = mean_latency(creek, "tentative-weak");
  const double ts = mean_latency(creek, "tentative-strong");
  const double ss = mean_latency(creek, "stable-strong");
  ExperimentConfig probe;
  const double delay = (probe.network.latency_low_ms + probe.network.latency_high_ms) / 2;
  const double expected = ts + 3 * delay;
  const bool ok_tw = tw >= 0.5 * 0.5 && tw <= 0.5 * 1.5;
  const bool ok_ss = ss >= expected * 0.5 && ss <= expected * 1.5 && ss >= 0.8 * 0.5 && ss <= 1.2 * 1.5;
  return {ok_tw && ok_ss, "tentative-weak " + fmt("%.3f", tw) + " ms, stable-strong " + fmt("%.3f", ss) +
                              " ms vs tentative-strong + 3 delays = " + fmt("%.3f", expected) + " ms"};
}

Outcome cross_system() {
  const std::vector<std::uint64_t> seeds = {1, 2, 3};
  const auto creek = measure(SystemKind::kCreek, seeds, low_load);
  const auto archie = measure(SystemKind::kArchie, seeds, low_load);
  const auto smr = measure(SystemKind::kSmr, seeds, low_load);
  const auto bayou = measure(SystemKind::kBayou, seeds, low_load);
  const double r1 = mean_latency(creek, "tentative-weak") / mean_latency(archie, "response-all");
  const double r2 = mean_latency(creek, "stable-strong") / mean_latency(archie, "stable-all");
  const double lb = mean_latency(bayou, "response-all"), ls = mean_latency(smr, "response-all");

  auto saturated = [&](SystemKind sys) {
    double sum = 0;
    for (const auto& m : measure(sys, seeds, [](ExperimentConfig& c) {
           c.workload.rate_tps = 16000;
           c.workload.ops = 2000;
         }))
      sum += m.throughput_tps;
    return sum / static_cast<double>(seeds.size());
  };
  const double t_creek = saturated(SystemKind::kCreek), t_archie = saturated(SystemKind::kArchie);
  const double t_smr = saturated(SystemKind::kSmr), t_bayou = saturated(SystemKind::kBayou);
  const double fast = std::min(t_creek, t_archie);

  const bool ok = r1 >= 0.3 && r1 <= 0.7 && r2 >= 0.7 && r2 <= 0.95 && lb < ls && t_smr <= 0.5 * fast &&
                  t_bayou <= 0.5 * fast;
  return {ok, "creek tentative-weak/archie " + fmt("%.2f", r1) + ", creek stable-strong/archie stable " +
                  fmt("%.2f", r2) + ", bayou " + fmt("%.3f", lb) + " ms vs smr " + fmt("%.3f", ls) +
                  " ms, throughput at 16000 tps offered: creek " + fmt("%.0f", t_creek) + " archie " +
                  fmt("%.0f", t_archie) + " smr " + fmt("%.0f", t_smr) + " bayou " + fmt("%.0f", t_bayou)};
}

double mean_of(const std::vector<harness::MetricsReport>& ms, double harness::MetricsReport::*field) {
  double sum = 0;
  for (const auto& m : ms) sum += m.*field;
  return sum / static_cast<double>(ms.size());
}

Outcome accuracy() {
  std::string detail;
  bool ok = true;
  for (double load : {2000.0, 8000.0}) {
    const auto medium = measure(SystemKind::kCreek, kSeeds, [&](ExperimentConfig& c) { c.workload.rate_tps = load; });
    const auto high = measure(SystemKind::kCreek, kSeeds, [&](ExperimentConfig& c) {
      c.workload.rate_tps = load;
      c.workload.warehouses = 1;
    });
    const auto archie = measure(SystemKind::kArchie, kSeeds, [&](ExperimentConfig& c) {
      c.workload.rate_tps = load;
      c.workload.warehouses = 1;
    });
    double archie_min = 1.0;
    for (const auto& m : archie) archie_min = std::min(archie_min, m.accuracy);
    const double am = mean_of(medium, &harness::MetricsReport::accuracy);
    const double ah = mean_of(high, &harness::MetricsReport::accuracy);
    ok = ok && am >= 0.90 && ah >= 0.85 && archie_min == 1.0;
    detail += (detail.empty() ? "" : "; ") + fmt("%.0f tps: ", load) + "creek medium " + fmt("%.4f", am) +
              ", creek high " + fmt("%.4f", ah) + ", archie min " + fmt("%.4f", archie_min);
  }
  return {ok, detail};
}

Outcome execution_ratio() {
  auto at = [](SystemKind sys, std::uint32_t warehouses, double load) {
    return mean_of(measure(sys, kSeeds,
                           [&](ExperimentConfig& c) {
                             c.workload.warehouses = warehouses;
                             c.workload.rate_tps = load;
                             c.workload.ops = 1000;
                           }),
                   &harness::MetricsReport::exec_ratio);
  };
  const double low_creek = at(SystemKind::kCreek, 20, 2000), low_archie = at(SystemKind::kArchie, 20, 2000);
  const double high_creek = at(SystemKind::kCreek, 1, 8000), high_archie = at(SystemKind::kArchie, 1, 8000);
  const bool ok = low_creek <= 1.1 && low_archie <= 1.1 && high_creek > 1.1 && high_archie > 1.1 &&
                  high_creek >= high_archie;
  return {ok, "low contention creek " + fmt("%.3f", low_creek) + " archie " + fmt("%.3f", low_archie) +
                  "; high contention creek " + fmt("%.3f", high_creek) + " archie " + fmt("%.3f", high_archie)};
}

Outcome mutations() {
  std::size_t swaps = 0, drops = 0, corruptions = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    for (auto sys : {SystemKind::kCreek, SystemKind::kArchie}) {
      const auto run = harness::run_experiment(base_config(sys, seed));
      const auto clean = first_failure(run, kSafety);
      if (!clean.empty()) return {false, "unmutated run fails: " + clean};
      auto a = run;
      if (testing::swap_real_time_ordered_strong_ops(a)) {
        if (!testing::verdict_fails(a, "linearizability"))
          return {false, "swapped strong ops not caught, seed " + std::to_string(seed)};
        ++swaps;
      }
      auto b = run;
      const auto victim = static_cast<ReplicaId>(1 + seed % 5);
      if (testing::drop_commit(b, victim)) {
        if (!testing::verdict_fails(b, "prefix-agreement"))
          return {false, "dropped commit not caught, seed " + std::to_string(seed)};
        ++drops;
      }
      auto c = run;
      testing::corrupt_store(c, victim);
      if (!testing::verdict_fails(c, "convergence"))
        return {false, "corrupted store not caught, seed " + std::to_string(seed)};
      ++corruptions;
    }
  }
  const bool ok = swaps > 0 && drops > 0;
  return {ok, std::to_string(swaps) + " swaps, " + std::to_string(drops) + " dropped commits, " +
                  std::to_string(corruptions) + " corrupted stores, all caught"};
}

std::string slurp_dir(const std::filesystem::path& dir) {
  std::string all;
  std::set<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) files.insert(e.path());
  for (const auto& f : files) {
    std::ifstream in(f, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    all += f.filename().string() + "\n" + os.str();
  }
  return all;
}

Outcome determinism() {
  const auto root = std::filesystem::temp_directory_path() / "creek_acceptance_determinism";
  std::size_t compared = 0;
  for (auto sys : {SystemKind::kCreek, SystemKind::kSmr, SystemKind::kBayou, SystemKind::kArchie}) {
    for (std::uint64_t seed : {7, 8}) {
      auto cfg = base_config(sys, seed);
      cfg.skew_ms = 0.2;
      cfg.crashes.push_back({2, sim::from_ms(60)});
      std::string trace[2], report[2];
      for (int k = 0; k < 2; ++k) {
        const auto run = harness::run_experiment(cfg);
        trace[k] = run.trace.str();
        const auto dir = root / std::to_string(k);
        std::filesystem::remove_all(dir);
        harness::emit_report(dir.string(), {harness::RunReport{harness::compute_metrics(run), harness::run_checks(run, {"all"})}},
                             cfg.echo());
        report[k] = slurp_dir(dir);
      }
      if (trace[0] != trace[1]) return {false, std::string(to_string(sys)) + " trace differs between runs"};
      if (report[0] != report[1]) return {false, std::string(to_string(sys)) + " report differs between runs"};
      ++compared;
    }
  }
  std::filesystem::remove_all(root);
  return {true, std::to_string(compared) + " configurations reproduce byte-identical traces and reports"};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  auto wanted = [&](int n) { return only.empty() || only.count(n) > 0; };

  std::map<int, Outcome> results;
  auto timed = [&](int n, const std::function<Outcome()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.detail += fmt(" [%.1f s]", secs);
    results[n] = o;
    std::printf("CRITERION %d %s: %s\n", n, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  };

  if (wanted(1) || wanted(3)) {
    const auto t0 = std::chrono::steady_clock::now();
    SweepResult sweep;
    try {
      sweep = safety_sweep(wanted(1) ? 1000 : 200, 200);
    } catch (const std::exception& e) {
      sweep.safety = sweep.equivalence = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (auto [n, o] : {std::pair{1, sweep.safety}, std::pair{3, sweep.equivalence}}) {
      if (!wanted(n)) continue;
      o.detail += fmt(" [shared sweep %.1f s]", secs);
      results[n] = o;
      std::printf("CRITERION %d %s: %s\n", n, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    }
    std::fflush(stdout);
  }
  if (wanted(2)) timed(2, fault_sweep);
  if (wanted(4)) timed(4, cab_properties);
  if (wanted(5)) timed(5, latency);
  if (wanted(6)) timed(6, cross_system);
  if (wanted(7)) timed(7, accuracy);
  if (wanted(8)) timed(8, execution_ratio);
  if (wanted(9)) timed(9, mutations);
  if (wanted(10)) timed(10, determinism);

  int failed = 0;
  for (const auto& [n, o] : results) failed += !o.pass;
  std::printf("%zu criteria run, %d failed\n", results.size(), failed);
  return failed == 0 ? 0 : 1;
}
