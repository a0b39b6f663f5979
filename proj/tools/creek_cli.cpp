#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "creek/harness/checkers.hpp"
#include "creek/harness/cluster.hpp"
#include "creek/harness/config.hpp"
#include "creek/harness/metrics.hpp"
#include "creek/harness/report.hpp"

namespace {

using namespace creek;
using namespace creek::harness;

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep))
    if (!cur.empty()) out.push_back(cur);
  return out;
}

std::string run_tag(const ExperimentConfig& c) {
  std::ostringstream os;
  os << to_string(c.system) << "_s" << c.seed << "_l" << static_cast<long long>(c.workload.rate_tps);
  return os.str();
}

void write_counterexample(const std::filesystem::path& path, const RunResult& run, const Verdict& v) {
  std::ofstream out(path);
  for (const auto& line : run.config.echo()) out << "# " << line << '\n';
  out << "# property=" << v.property << "\n# event_index=" << v.event_index << "\n# " << v.detail << '\n';
  const auto& recs = run.trace.records();
  const std::size_t from = v.event_index > 40 ? v.event_index - 40 : 0;
  const std::size_t to = std::min(recs.size(), v.event_index + 5);
  for (std::size_t i = from; i < to; ++i) out << i << ": " << recs[i] << '\n';
}

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::size_t runs = 1;
  std::string systems;
  std::string engine;
  std::string out = "out";
  std::string check = "all";
  std::string sweep;
  std::vector<std::string> overrides;
  bool no_trace = false;
};

int run(const Options& o) {
  ExperimentConfig base = o.config_path.empty() ? ExperimentConfig{} : load_config(o.config_path);
  for (const auto& kv : o.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw sim::ConfigError("--set expects key=value, got '" + kv + "'");
    base.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (o.seed) base.seed = *o.seed;
  if (!o.engine.empty()) base.engine = parse_engine(o.engine);

  std::vector<SystemKind> systems;
  for (const auto& s : split(o.systems, ',')) systems.push_back(parse_system(s));
  if (systems.empty()) systems.push_back(base.system);

  std::vector<double> loads;
  if (!o.sweep.empty()) {
    if (o.sweep.rfind("load=", 0) != 0) throw sim::ConfigError("--sweep expects load=a,b,c");
    for (const auto& v : split(o.sweep.substr(5), ',')) {
      ExperimentConfig probe;
      probe.set("workload.rate_tps", v);
      loads.push_back(probe.workload.rate_tps);
    }
  }
  if (loads.empty()) loads.push_back(base.workload.rate_tps);
  const auto checks = split(o.check, ',');
  base.validate();

  auto echo = base.echo();
  echo.push_back("cli.systems=" + o.systems);
  echo.push_back("cli.sweep=" + o.sweep);
  echo.push_back("cli.runs=" + std::to_string(o.runs));
  echo.push_back("cli.check=" + o.check);

  namespace fs = std::filesystem;
  fs::create_directories(o.out);
  std::vector<RunReport> reports;
  bool all_pass = true;
  for (SystemKind sys : systems) {
    for (double load : loads) {
      for (std::size_t k = 0; k < o.runs; ++k) {
        ExperimentConfig cfg = base;
        cfg.system = sys;
        cfg.seed = base.seed + k;
        cfg.workload.rate_tps = load;
        const RunResult result = run_experiment(cfg);
        RunReport rep{compute_metrics(result), run_checks(result, checks)};
        const std::string tag = run_tag(cfg);
        if (!o.no_trace) {
          std::ofstream tf(fs::path(o.out) / ("trace_" + tag + ".txt"));
          for (const auto& line : cfg.echo()) tf << "# " << line << '\n';
          result.trace.write(tf);
        }
        for (const auto& v : rep.verdicts) {
          if (v.pass) continue;
          all_pass = false;
          const auto path = fs::path(o.out) / ("counterexample_" + tag + "_" + v.property + ".txt");
          write_counterexample(path, result, v);
          std::cerr << "FAIL " << v.property << " seed=" << v.seed << " event=" << v.event_index << ": " << v.detail
                    << "\n  counterexample: " << path.string() << '\n';
        }
        std::cout << summary_line(rep) << '\n';
        reports.push_back(std::move(rep));
      }
    }
  }
  emit_report(o.out, reports, echo);
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete-event simulator for mixed-consistency replication (creek, smr, bayou, archie)"};
  app.require_subcommand(1);
  Options o;
  auto* cmd = app.add_subcommand("run", "Run experiments, extract metrics and check consistency properties");
  cmd->add_option("--config", o.config_path, "key=value configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "Seed (overrides the config)");
  cmd->add_option("--runs", o.runs, "Number of consecutive seeds per system and load")->check(CLI::PositiveNumber);
  cmd->add_option("--system", o.systems, "Comma-separated systems: creek, smr, bayou, archie");
  cmd->add_option("--engine", o.engine, "reference or multiversion")->check(CLI::IsMember({"reference", "multiversion"}));
  cmd->add_option("--out", o.out, "Output directory")->capture_default_str();
  cmd->add_option("--check", o.check, "all, none, or a comma-separated list of checkers")->capture_default_str();
  cmd->add_option("--sweep", o.sweep, "Offered-load sweep, e.g. load=500,1000,2000 (tx/s)");
  cmd->add_option("--set", o.overrides, "Override a config key (key=value), repeatable");
  cmd->add_flag("--no-trace", o.no_trace, "Do not write trace files");
  CLI11_PARSE(app, argc, argv);
  try {
    return run(o);
  } catch (const sim::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const sim::SimulationError& e) {
    std::cerr << "simulation error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
}
