#include <gtest/gtest.h>

#include <sstream>

#include "../common/mutations.hpp"
#include "creek/harness/checkers.hpp"
#include "creek/harness/cluster.hpp"
#include "creek/harness/config.hpp"
#include "creek/harness/metrics.hpp"
#include "creek/harness/report.hpp"

namespace creek::harness {
namespace {

ExperimentConfig small(SystemKind s, std::uint64_t seed = 1) {
  ExperimentConfig cfg;
  cfg.system = s;
  cfg.seed = seed;
  cfg.workload.ops = 150;
  return cfg;
}

std::string join(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

TEST(Config, EchoRoundTrips) {
  std::istringstream in(
      "# comment\n"
      "system = archie\n"
      "seed=9   # trailing\n"
      "engine=reference\n"
      "network.partition=1,2,3|4,5@10-inf\n"
      "network.crash=2@5.5;3@7\n"
      "workload.mix=0.2,0.2,0.2,0.2,0.2\n"
      "workload.strong_fraction=0.3\n"
      "creek.readonly_shortcut=true\n");
  const auto cfg = parse_config(in);
  EXPECT_EQ(cfg.system, SystemKind::kArchie);
  EXPECT_EQ(cfg.seed, 9u);
  ASSERT_EQ(cfg.partitions.size(), 1u);
  EXPECT_EQ(cfg.partitions[0].to, sim::kTimeInfinity);
  ASSERT_EQ(cfg.crashes.size(), 2u);
  EXPECT_EQ(cfg.crashes[0].at, sim::from_ms(5.5));
  std::istringstream again(join(cfg.echo()));
  EXPECT_EQ(parse_config(again).echo(), cfg.echo());
}

TEST(Config, RejectsBadInput) {
  auto parse = [](const std::string& s) {
    std::istringstream in(s);
    return parse_config(in);
  };
  EXPECT_THROW(parse("bogus.key=1\n"), sim::ConfigError);
  EXPECT_THROW(parse("replicas\n"), sim::ConfigError);
  EXPECT_THROW(parse("replicas=-1\n"), sim::ConfigError);
  EXPECT_THROW(parse("seed=1x\n"), sim::ConfigError);
  EXPECT_THROW(parse("system=paxos\n"), sim::ConfigError);
  EXPECT_THROW(parse("workload.mix=1,0\n"), sim::ConfigError);
  EXPECT_THROW(parse("workload.mix=0.5,0.5,0.5,0,0\n"), sim::ConfigError);
  EXPECT_THROW(parse("network.latency_low_ms=2\nnetwork.latency_high_ms=1\n"), sim::ConfigError);
  EXPECT_THROW(parse("network.crash=9@1\n"), sim::ConfigError);
  EXPECT_THROW(parse("network.partition=1,2@5\n"), sim::ConfigError);
  EXPECT_THROW(parse("creek.readonly_shortcut=maybe\n"), sim::ConfigError);
  EXPECT_THROW(load_config("/nonexistent/creek.cfg"), sim::ConfigError);
}

TEST(Config, BadPartitionFailsWhenTheRunStarts) {
  auto cfg = small(SystemKind::kCreek);
  cfg.set("network.partition", "1,2|2,3,4,5@0-10");
  EXPECT_THROW(run_experiment(cfg), sim::ConfigError);
}

TEST(Metrics, NearestRankPercentile) {
  EXPECT_EQ(percentile({}, 50), 0);
  EXPECT_EQ(percentile({3, 1, 2}, 50), 2);
  std::vector<double> v;
  for (int i = 1; i <= 100; ++i) v.push_back(i);
  EXPECT_EQ(percentile(v, 95), 95);
  EXPECT_EQ(percentile(v, 99), 99);
  EXPECT_EQ(percentile(v, 100), 100);
  const auto s = summarize(v);
  EXPECT_EQ(s.count, 100u);
  EXPECT_DOUBLE_EQ(s.mean_ms, 50.5);
}

TEST(Metrics, CreekRunHasPlausibleNumbers) {
  const auto run = run_experiment(small(SystemKind::kCreek));
  const auto m = compute_metrics(run);
  EXPECT_EQ(m.invoked, 150u);
  EXPECT_EQ(m.completed, 150u);
  EXPECT_NEAR(m.latency.at("tentative-weak").mean_ms, 0.5, 0.25);
  EXPECT_GT(m.latency.at("stable-strong").mean_ms, m.latency.at("tentative-strong").mean_ms);
  EXPECT_GE(m.accuracy, 0.9);
  EXPECT_GE(m.exec_ratio, 1.0);
  EXPECT_GT(m.utilization, 0);
  EXPECT_LE(m.utilization, 1);
  EXPECT_GT(m.channels[static_cast<std::size_t>(sim::Channel::kGossip)].messages, 0u);
}

class AllSystems : public ::testing::TestWithParam<SystemKind> {};

TEST_P(AllSystems, StableRunPassesEveryChecker) {
  const auto run = run_experiment(small(GetParam(), 3));
  for (const auto& v : run_checks(run, {"all"})) EXPECT_TRUE(v.pass) << v.property << ": " << v.detail;
}

TEST_P(AllSystems, RunsAreDeterministic) {
  auto cfg = small(GetParam(), 5);
  cfg.skew_ms = 0.3;
  const auto a = run_experiment(cfg);
  const auto b = run_experiment(cfg);
  EXPECT_EQ(a.trace.str(), b.trace.str());
  std::ostringstream ra, rb;
  write_results_csv(ra, {RunReport{compute_metrics(a), run_checks(a, {"all"})}}, cfg.echo());
  write_results_csv(rb, {RunReport{compute_metrics(b), run_checks(b, {"all"})}}, cfg.echo());
  EXPECT_EQ(ra.str(), rb.str());
  cfg.seed = 6;
  EXPECT_NE(run_experiment(cfg).trace.str(), a.trace.str());
}

INSTANTIATE_TEST_SUITE_P(Systems, AllSystems,
                         ::testing::Values(SystemKind::kCreek, SystemKind::kSmr, SystemKind::kBayou,
                                           SystemKind::kArchie),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(Checkers, UnknownNameIsAConfigError) {
  const auto run = run_experiment(small(SystemKind::kSmr));
  EXPECT_THROW(run_checks(run, {"serializability"}), sim::ConfigError);
  EXPECT_TRUE(run_checks(run, {"none"}).empty());
  EXPECT_EQ(run_checks(run, {"all"}).size(), kCheckers.size());
}

TEST(Checkers, MutationsAreCaught) {
  const auto run = run_experiment(small(SystemKind::kCreek, 2));
  for (const auto& v : run_checks(run, {"all"})) ASSERT_TRUE(v.pass) << v.property;

  auto swapped = run;
  ASSERT_TRUE(testing::swap_real_time_ordered_strong_ops(swapped));
  EXPECT_TRUE(testing::verdict_fails(swapped, "linearizability"));

  auto dropped = run;
  ASSERT_TRUE(testing::drop_commit(dropped, 3));
  EXPECT_TRUE(testing::verdict_fails(dropped, "prefix-agreement"));

  auto corrupted = run;
  testing::corrupt_store(corrupted, 4);
  const auto v = check_convergence(corrupted);
  EXPECT_FALSE(v.pass);
  EXPECT_NE(v.detail.find("t"), std::string::npos);
}

TEST(Checkers, MinorityStableCatchesASplitBrain) {
  auto cfg = small(SystemKind::kCreek, 4);
  cfg.set("network.partition", "1,2,3|4,5@20-60");
  auto run = run_experiment(cfg);
  EXPECT_TRUE(check_minority_stable(run).pass);
  // Forge a stable response in the minority during the window.
  sim::TraceRecord rec;
  rec.time = sim::from_ms(30);
  rec.replica = 5;
  rec.kind = sim::Rec::kResponse;
  rec.flag = 1;
  for (const auto& r : run.pool->all())
    if (r.strong && r.invoked_at > sim::from_ms(25)) {
      rec.id = r.id;
      break;
    }
  run.trace.add(rec);
  EXPECT_FALSE(check_minority_stable(run).pass);
}

TEST(Report, EmptyRunSetIsHeaderOnly) {
  std::ostringstream os;
  write_results_csv(os, {}, {"seed=1"});
  EXPECT_EQ(os.str(), std::string("# seed=1\n") + kResultsHeader + "\n");
}

TEST(Report, ResultsRowsPerLatencyKind) {
  const auto run = run_experiment(small(SystemKind::kSmr));
  std::ostringstream os;
  write_results_csv(os, {RunReport{compute_metrics(run), {}}}, {});
  std::string line;
  std::istringstream in(os.str());
  std::getline(in, line);
  EXPECT_EQ(line, kResultsHeader);
  int rows = 0;
  while (std::getline(in, line)) {
    EXPECT_EQ(line.rfind("smr,1,", 0), 0u) << line;
    ++rows;
  }
  EXPECT_GE(rows, 3);
}

}  // namespace
}  // namespace creek::harness
