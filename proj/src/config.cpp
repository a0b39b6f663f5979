#include "creek/harness/config.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>
#include <sstream>

namespace creek::harness {

using sim::ConfigError;

const char* to_string(SystemKind s) {
  switch (s) {
    case SystemKind::kCreek: return "creek";
    case SystemKind::kSmr: return "smr";
    case SystemKind::kBayou: return "bayou";
    case SystemKind::kArchie: return "archie";
  }
  return "?";
}

SystemKind parse_system(const std::string& s) {
  if (s == "creek") return SystemKind::kCreek;
  if (s == "smr") return SystemKind::kSmr;
  if (s == "bayou") return SystemKind::kBayou;
  if (s == "archie") return SystemKind::kArchie;
  throw ConfigError("unknown system '" + s + "'");
}

engine::EngineKind parse_engine(const std::string& s) {
  if (s == "reference") return engine::EngineKind::kReference;
  if (s == "multiversion") return engine::EngineKind::kMultiversion;
  throw ConfigError("unknown engine '" + s + "'");
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": expected a number, got '" + v + "'");
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    if (!v.empty() && v[0] != '-') {
      const auto n = std::stoull(v, &used);
      if (used == v.size()) return n;
    }
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "on") return true;
  if (v == "false" || v == "0" || v == "off") return false;
  throw ConfigError(key + ": expected a boolean, got '" + v + "'");
}

sim::SimTime to_time(const std::string& key, const std::string& v) {
  if (v == "inf") return sim::kTimeInfinity;
  return sim::from_ms(to_double(key, v));
}

std::string fmt(double d) {
  std::ostringstream os;
  os.precision(12);
  os << d;
  return os.str();
}

std::string fmt_time(sim::SimTime t) { return t == sim::kTimeInfinity ? "inf" : fmt(sim::to_ms(t)); }

// "1,2,3|4,5@100-200"
sim::PartitionWindow parse_partition(const std::string& key, const std::string& spec) {
  const auto at = spec.find('@');
  const auto dash = spec.find('-', at == std::string::npos ? 0 : at);
  if (at == std::string::npos || dash == std::string::npos)
    throw ConfigError(key + ": expected groups@from-to, got '" + spec + "'");
  sim::PartitionWindow w;
  for (const auto& g : split(spec.substr(0, at), '|')) {
    std::vector<ReplicaId> group;
    for (const auto& r : split(g, ',')) group.push_back(static_cast<ReplicaId>(to_uint(key, r)));
    w.groups.push_back(std::move(group));
  }
  w.from = to_time(key, trim(spec.substr(at + 1, dash - at - 1)));
  w.to = to_time(key, trim(spec.substr(dash + 1)));
  return w;
}

}  // namespace

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  const std::string& v = value;
  auto& w = workload;
  if (key == "system") system = parse_system(v);
  else if (key == "replicas") replicas = to_uint(key, v);
  else if (key == "seed") seed = to_uint(key, v);
  else if (key == "engine") engine = parse_engine(v);
  else if (key == "slots") slots = to_uint(key, v);
  else if (key == "network.latency_low_ms") network.latency_low_ms = to_double(key, v);
  else if (key == "network.latency_high_ms") network.latency_high_ms = to_double(key, v);
  else if (key == "network.partition") {
    partitions.clear();
    for (const auto& p : split(v, ';'))
      if (!p.empty()) partitions.push_back(parse_partition(key, p));
  } else if (key == "network.crash") {
    crashes.clear();
    for (const auto& c : split(v, ';')) {
      if (c.empty()) continue;
      const auto at = c.find('@');
      if (at == std::string::npos) throw ConfigError(key + ": expected replica@ms, got '" + c + "'");
      crashes.push_back({static_cast<ReplicaId>(to_uint(key, trim(c.substr(0, at)))), to_time(key, trim(c.substr(at + 1)))});
    }
  } else if (key == "clock.skew_ms") skew_ms = to_double(key, v);
  else if (key == "fd.delay_ms") fd_delay_ms = to_double(key, v);
  else if (key == "gossip.anti_entropy_ms") anti_entropy_ms = to_double(key, v);
  else if (key == "paxos.retry_ms") retry_ms = to_double(key, v);
  else if (key == "engine.rollback_ms") rollback_ms = to_double(key, v);
  else if (key == "engine.gc_threshold") gc_threshold = to_uint(key, v);
  else if (key == "creek.readonly_shortcut") readonly_shortcut = to_bool(key, v);
  else if (key == "creek.noop_flush_ms") noop_flush_ms = to_double(key, v);
  else if (key == "workload.warehouses") w.warehouses = static_cast<std::uint32_t>(to_uint(key, v));
  else if (key == "workload.customers_per_district") w.customers_per_district = static_cast<std::uint32_t>(to_uint(key, v));
  else if (key == "workload.items") w.items = static_cast<std::uint32_t>(to_uint(key, v));
  else if (key == "workload.mix") {
    const auto parts = split(v, ',');
    if (parts.size() != workload::kTxTypeCount)
      throw ConfigError(key + ": expected " + std::to_string(workload::kTxTypeCount) + " probabilities");
    for (std::size_t i = 0; i < parts.size(); ++i) w.mix[i] = to_double(key, parts[i]);
  } else if (key == "workload.strong_fraction") {
    if (v == "none") w.strong_fraction.reset();
    else w.strong_fraction = to_double(key, v);
  } else if (key == "workload.remote_order_probability") w.remote_order_probability = to_double(key, v);
  else if (key == "workload.rate_tps") w.rate_tps = to_double(key, v);
  else if (key == "workload.ops") w.ops = to_uint(key, v);
  else if (key == "workload.weak_service_ms") w.weak_service_ms = to_double(key, v);
  else if (key == "workload.payment_service_ms") w.payment_service_ms = to_double(key, v);
  else if (key == "workload.service_multiplier") w.service_multiplier = to_double(key, v);
  else if (key == "workload.service_jitter") w.service_jitter = to_double(key, v);
  else if (key == "sim.event_limit") event_limit = to_uint(key, v);
  else if (key == "sim.grace_ms") grace_ms = to_double(key, v);
  else throw ConfigError("unknown configuration key '" + key + "'");
}

void ExperimentConfig::validate() const {
  if (replicas < 1 || replicas > 255) throw ConfigError("replicas must be in 1..255");
  if (slots < 1) throw ConfigError("slots must be at least 1");
  if (!(network.latency_low_ms >= 0) || network.latency_low_ms > network.latency_high_ms)
    throw ConfigError("network latency range must satisfy 0 <= low <= high");
  if (skew_ms < 0 || fd_delay_ms < 0 || rollback_ms < 0 || noop_flush_ms < 0)
    throw ConfigError("durations must be non-negative");
  if (!(anti_entropy_ms > 0) || !(retry_ms > 0) || !(grace_ms > 0))
    throw ConfigError("periods must be positive");
  for (const auto& c : crashes)
    if (c.replica < 1 || c.replica > replicas) throw ConfigError("crash names unknown replica");
  try {
    workload.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

std::vector<std::string> ExperimentConfig::echo() const {
  std::vector<std::string> out;
  auto add = [&](const std::string& k, const std::string& v) { out.push_back(k + "=" + v); };
  add("system", to_string(system));
  add("replicas", std::to_string(replicas));
  add("seed", std::to_string(seed));
  add("engine", engine == engine::EngineKind::kReference ? "reference" : "multiversion");
  add("slots", std::to_string(slots));
  add("network.latency_low_ms", fmt(network.latency_low_ms));
  add("network.latency_high_ms", fmt(network.latency_high_ms));
  std::string parts;
  for (const auto& p : partitions) {
    if (!parts.empty()) parts += ';';
    for (std::size_t g = 0; g < p.groups.size(); ++g) {
      if (g) parts += '|';
      for (std::size_t i = 0; i < p.groups[g].size(); ++i) parts += (i ? "," : "") + std::to_string(p.groups[g][i]);
    }
    parts += "@" + fmt_time(p.from) + "-" + fmt_time(p.to);
  }
  add("network.partition", parts);
  std::string crash;
  for (const auto& c : crashes) crash += (crash.empty() ? "" : ";") + std::to_string(c.replica) + "@" + fmt_time(c.at);
  add("network.crash", crash);
  add("clock.skew_ms", fmt(skew_ms));
  add("fd.delay_ms", fmt(fd_delay_ms));
  add("gossip.anti_entropy_ms", fmt(anti_entropy_ms));
  add("paxos.retry_ms", fmt(retry_ms));
  add("engine.rollback_ms", fmt(rollback_ms));
  add("engine.gc_threshold", std::to_string(gc_threshold));
  add("creek.readonly_shortcut", readonly_shortcut ? "true" : "false");
  add("creek.noop_flush_ms", fmt(noop_flush_ms));
  const auto& w = workload;
  add("workload.warehouses", std::to_string(w.warehouses));
  add("workload.customers_per_district", std::to_string(w.customers_per_district));
  add("workload.items", std::to_string(w.items));
  std::string mix;
  for (std::size_t i = 0; i < w.mix.size(); ++i) mix += (i ? "," : "") + fmt(w.mix[i]);
  add("workload.mix", mix);
  add("workload.strong_fraction", w.strong_fraction ? fmt(*w.strong_fraction) : "none");
  add("workload.remote_order_probability", fmt(w.remote_order_probability));
  add("workload.rate_tps", fmt(w.rate_tps));
  add("workload.ops", std::to_string(w.ops));
  add("workload.weak_service_ms", fmt(w.weak_service_ms));
  add("workload.payment_service_ms", fmt(w.payment_service_ms));
  add("workload.service_multiplier", fmt(w.service_multiplier));
  add("workload.service_jitter", fmt(w.service_jitter));
  add("sim.event_limit", std::to_string(event_limit));
  add("sim.grace_ms", fmt(grace_ms));
  return out;
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
    cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

}  // namespace creek::harness
