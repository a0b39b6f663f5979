#include "creek/workload/tpcc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace creek::workload {

const char* to_string(TxType t) {
  switch (t) {
    case TxType::kNewOrder: return "new-order";
    case TxType::kPayment: return "payment";
    case TxType::kDelivery: return "delivery";
    case TxType::kOrderStatus: return "order-status";
    case TxType::kStockLevel: return "stock-level";
    case TxType::kNoop: return "noop";
  }
  return "?";
}

std::string describe_key(ObjectKey k) {
  std::ostringstream os;
  os << "t" << static_cast<int>(key_table(k)) << "/w" << ((k >> 48) & 0xff) << "/d" << ((k >> 40) & 0xff) << "/"
     << (k & ((1ULL << 40) - 1));
  return os.str();
}

namespace {

using namespace table;

constexpr std::uint64_t order_line_id(std::uint64_t order, std::uint32_t line) { return order * 16 + line; }

Response run_new_order(const TxProgram& p, TxContext& ctx) {
  const auto w = p.warehouse, d = p.district, c = p.customer;
  const Value w_tax = ctx.read(make_key(kWarehouseTax, w, 0, 0));
  const Value d_tax = ctx.read(make_key(kDistrictTax, w, d, 0));
  const Value order = ctx.read(make_key(kDistrictNextOrder, w, d, 0));
  ctx.write(make_key(kDistrictNextOrder, w, d, 0), order + 1);
  const Value discount = ctx.read(make_key(kCustomerDiscount, w, d, c));

  Value total = 0;
  std::uint32_t ol = 0;
  for (const auto& line : p.lines) {
    ++ol;
    const Value price = ctx.read(make_key(kItemPrice, 0, 0, line.item));
    const auto sw = line.supply_warehouse;
    const ObjectKey qty_key = make_key(kStockQuantity, sw, 0, line.item);
    const Value qty = ctx.read(qty_key);
    const Value q = static_cast<Value>(line.quantity);
    ctx.write(qty_key, qty - q >= 10 ? qty - q : qty - q + 91);
    const ObjectKey ytd_key = make_key(kStockYtd, sw, 0, line.item);
    ctx.write(ytd_key, ctx.read(ytd_key) + q);
    const ObjectKey cnt_key = make_key(kStockOrderCount, sw, 0, line.item);
    ctx.write(cnt_key, ctx.read(cnt_key) + 1);
    if (sw != w) {
      const ObjectKey remote_key = make_key(kStockRemoteCount, sw, 0, line.item);
      ctx.write(remote_key, ctx.read(remote_key) + 1);
    }
    const Value amount = q * price;
    total += amount;
    ctx.write(make_key(kOrderLineItem, w, d, order_line_id(order, ol)), line.item);
    ctx.write(make_key(kOrderLineAmount, w, d, order_line_id(order, ol)), amount);
  }
  ctx.write(make_key(kOrderCustomer, w, d, order), c);
  ctx.write(make_key(kOrderLineCount, w, d, order), ol);
  ctx.write(make_key(kOrderCarrier, w, d, order), 0);
  total = total * (100 - discount) * (100 + w_tax + d_tax) / 10000;
  ctx.write(make_key(kOrderTotal, w, d, order), total);
  ctx.write(make_key(kCustomerLastOrder, w, d, c), order);
  return {order, total};
}

Response run_payment(const TxProgram& p, TxContext& ctx) {
  const auto w = p.warehouse, d = p.district, c = p.customer;
  const ObjectKey w_ytd = make_key(kWarehouseYtd, w, 0, 0);
  ctx.write(w_ytd, ctx.read(w_ytd) + p.amount);
  const ObjectKey d_ytd = make_key(kDistrictYtd, w, d, 0);
  ctx.write(d_ytd, ctx.read(d_ytd) + p.amount);
  const ObjectKey bal_key = make_key(kCustomerBalance, w, d, c);
  const Value balance = ctx.read(bal_key) - p.amount;
  ctx.write(bal_key, balance);
  const ObjectKey ytd_key = make_key(kCustomerYtdPayment, w, d, c);
  ctx.write(ytd_key, ctx.read(ytd_key) + p.amount);
  const ObjectKey cnt_key = make_key(kCustomerPaymentCount, w, d, c);
  ctx.write(cnt_key, ctx.read(cnt_key) + 1);
  return {balance};
}

Response run_delivery(const TxProgram& p, TxContext& ctx) {
  const auto w = p.warehouse;
  Value delivered = 0;
  for (std::uint32_t d = 1; d <= kDistrictsPerWarehouse; ++d) {
    const ObjectKey next_key = make_key(kDistrictNextDelivery, w, d, 0);
    const Value next = ctx.read(next_key);
    const Value next_order = ctx.read(make_key(kDistrictNextOrder, w, d, 0));
    if (next >= next_order) continue;
    const auto c = static_cast<std::uint32_t>(ctx.read(make_key(kOrderCustomer, w, d, next)));
    const Value total = ctx.read(make_key(kOrderTotal, w, d, next));
    ctx.write(make_key(kOrderCarrier, w, d, next), p.carrier);
    const ObjectKey bal_key = make_key(kCustomerBalance, w, d, c);
    ctx.write(bal_key, ctx.read(bal_key) + total);
    const ObjectKey cnt_key = make_key(kCustomerDeliveryCount, w, d, c);
    ctx.write(cnt_key, ctx.read(cnt_key) + 1);
    ctx.write(next_key, next + 1);
    ++delivered;
  }
  return {delivered};
}

Response run_order_status(const TxProgram& p, TxContext& ctx) {
  const auto w = p.warehouse, d = p.district, c = p.customer;
  const Value balance = ctx.read(make_key(kCustomerBalance, w, d, c));
  const Value order = ctx.read(make_key(kCustomerLastOrder, w, d, c));
  if (order == 0) return {balance, 0, 0, 0};
  const Value carrier = ctx.read(make_key(kOrderCarrier, w, d, order));
  const Value total = ctx.read(make_key(kOrderTotal, w, d, order));
  return {balance, order, carrier, total};
}

Response run_stock_level(const TxProgram& p, TxContext& ctx) {
  const auto w = p.warehouse, d = p.district;
  const Value next = ctx.read(make_key(kDistrictNextOrder, w, d, 0));
  std::set<Value> low;
  for (Value o = std::max<Value>(1, next - 20); o < next; ++o) {
    const Value lines = ctx.read(make_key(kOrderLineCount, w, d, o));
    for (Value ol = 1; ol <= lines; ++ol) {
      const Value item = ctx.read(make_key(kOrderLineItem, w, d, order_line_id(o, static_cast<std::uint32_t>(ol))));
      if (ctx.read(make_key(kStockQuantity, w, 0, static_cast<std::uint64_t>(item))) < p.threshold) low.insert(item);
    }
  }
  return {static_cast<Value>(low.size())};
}

}  // namespace

Response TxProgram::run(TxContext& ctx) const {
  switch (type) {
    case TxType::kNewOrder: return run_new_order(*this, ctx);
    case TxType::kPayment: return run_payment(*this, ctx);
    case TxType::kDelivery: return run_delivery(*this, ctx);
    case TxType::kOrderStatus: return run_order_status(*this, ctx);
    case TxType::kStockLevel: return run_stock_level(*this, ctx);
    case TxType::kNoop: return {};
  }
  return {};
}

std::uint64_t TxProgram::digest() const {
  // FNV-1a over the parameter fields.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  };
  feed(static_cast<std::uint64_t>(type));
  feed(warehouse);
  feed(district);
  feed(customer);
  feed(static_cast<std::uint64_t>(amount));
  feed(carrier);
  feed(threshold);
  for (const auto& l : lines) {
    feed(l.item);
    feed(l.supply_warehouse);
    feed(l.quantity);
  }
  return h;
}

void WorkloadConfig::validate() const {
  if (warehouses < 1 || warehouses > 255) throw std::invalid_argument("workload.warehouses must be in [1, 255]");
  if (customers_per_district < 1 || items < 15) throw std::invalid_argument("workload cardinalities too small");
  double sum = 0;
  for (double m : mix) {
    if (m < 0) throw std::invalid_argument("workload.mix entries must be non-negative");
    sum += m;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("workload.mix must sum to 1");
  if (strong_fraction && (*strong_fraction < 0 || *strong_fraction > 1))
    throw std::invalid_argument("workload.strong_fraction must be in [0, 1]");
  if (rate_tps <= 0) throw std::invalid_argument("workload.rate_tps must be positive");
  if (service_jitter < 0 || service_jitter >= 1) throw std::invalid_argument("workload.service_jitter must be in [0, 1)");
  if (remote_order_probability < 0 || remote_order_probability > 1)
    throw std::invalid_argument("workload.remote_order_probability must be in [0, 1]");
  if (!(weak_service_ms > 0) || !(payment_service_ms > 0) || !(service_multiplier > 0))
    throw std::invalid_argument("workload service times must be positive");
}

StoreMap initial_store(const WorkloadConfig& cfg, std::uint64_t seed) {
  auto rng = sim::make_stream(seed, sim::Stream::kStore);
  StoreMap s;
  s.reserve(cfg.warehouses * (cfg.items * 4 + kDistrictsPerWarehouse * (cfg.customers_per_district * 5 + 5)) +
            cfg.items + 16);
  for (std::uint32_t i = 1; i <= cfg.items; ++i) s[make_key(kItemPrice, 0, 0, i)] = rng.uniform_int(100, 10000);
  for (std::uint32_t w = 1; w <= cfg.warehouses; ++w) {
    s[make_key(kWarehouseYtd, w, 0, 0)] = 300000;
    s[make_key(kWarehouseTax, w, 0, 0)] = rng.uniform_int(0, 20);
    for (std::uint32_t i = 1; i <= cfg.items; ++i) {
      s[make_key(kStockQuantity, w, 0, i)] = rng.uniform_int(10, 100);
      s[make_key(kStockYtd, w, 0, i)] = 0;
      s[make_key(kStockOrderCount, w, 0, i)] = 0;
      s[make_key(kStockRemoteCount, w, 0, i)] = 0;
    }
    for (std::uint32_t d = 1; d <= kDistrictsPerWarehouse; ++d) {
      s[make_key(kDistrictYtd, w, d, 0)] = 30000;
      s[make_key(kDistrictTax, w, d, 0)] = rng.uniform_int(0, 20);
      s[make_key(kDistrictNextOrder, w, d, 0)] = 1;
      s[make_key(kDistrictNextDelivery, w, d, 0)] = 1;
      for (std::uint32_t c = 1; c <= cfg.customers_per_district; ++c) {
        s[make_key(kCustomerBalance, w, d, c)] = -1000;
        s[make_key(kCustomerYtdPayment, w, d, c)] = 1000;
        s[make_key(kCustomerPaymentCount, w, d, c)] = 1;
        s[make_key(kCustomerDiscount, w, d, c)] = rng.uniform_int(0, 50);
        s[make_key(kCustomerDeliveryCount, w, d, c)] = 0;
      }
    }
  }
  return s;
}

Generator::Generator(WorkloadConfig cfg, std::size_t replicas) : cfg_(std::move(cfg)), replicas_(replicas) {
  cfg_.validate();
  if (replicas_ == 0) throw std::invalid_argument("at least one replica required");
}

TxType Generator::draw_type(sim::Rng& rng) const {
  const double u = rng.uniform01();
  double acc = 0;
  for (std::size_t i = 0; i < kTxTypeCount; ++i) {
    acc += cfg_.mix[i];
    if (u < acc) return static_cast<TxType>(i);
  }
  // Rounding slack: last type with non-zero weight.
  for (std::size_t i = kTxTypeCount; i-- > 0;)
    if (cfg_.mix[i] > 0) return static_cast<TxType>(i);
  return TxType::kNewOrder;
}

TxProgram Generator::draw_program(TxType type, sim::Rng& rng) const {
  TxProgram p;
  p.type = type;
  p.warehouse = static_cast<std::uint32_t>(rng.uniform_int(1, cfg_.warehouses));
  p.district = static_cast<std::uint32_t>(rng.uniform_int(1, kDistrictsPerWarehouse));
  p.customer = static_cast<std::uint32_t>(rng.uniform_int(1, cfg_.customers_per_district));
  switch (type) {
    case TxType::kNewOrder: {
      const auto count = rng.uniform_int(5, 15);
      const bool remote = cfg_.warehouses > 1 && rng.bernoulli(cfg_.remote_order_probability);
      std::uint32_t other = p.warehouse;
      if (remote) {
        other = static_cast<std::uint32_t>(rng.uniform_int(1, cfg_.warehouses - 1));
        if (other >= p.warehouse) ++other;
      }
      std::set<std::uint32_t> used;
      while (static_cast<std::int64_t>(p.lines.size()) < count) {
        const auto item = static_cast<std::uint32_t>(rng.uniform_int(1, cfg_.items));
        if (!used.insert(item).second) continue;
        OrderLine line;
        line.item = item;
        line.supply_warehouse = remote && rng.bernoulli(0.5) ? other : p.warehouse;
        line.quantity = static_cast<std::uint32_t>(rng.uniform_int(1, 10));
        p.lines.push_back(line);
      }
      break;
    }
    case TxType::kPayment: p.amount = rng.uniform_int(1, 5000); break;
    case TxType::kDelivery: p.carrier = static_cast<std::uint32_t>(rng.uniform_int(1, 10)); break;
    case TxType::kOrderStatus: break;
    case TxType::kStockLevel: p.threshold = static_cast<std::uint32_t>(rng.uniform_int(10, 20)); break;
    case TxType::kNoop: break;
  }
  return p;
}

sim::SimTime Generator::service_time(TxType type, sim::Rng& rng) const {
  const double mean =
      (type == TxType::kPayment ? cfg_.payment_service_ms : cfg_.weak_service_ms) * cfg_.service_multiplier;
  const double j = cfg_.service_jitter;
  return std::max<sim::SimTime>(1, sim::from_ms(rng.uniform(mean * (1 - j), mean * (1 + j))));
}

Arrival Generator::next_request(sim::Rng& rng, sim::SimTime clock) {
  Arrival a;
  a.at = clock;
  const TxType type = draw_type(rng);
  a.program = draw_program(type, rng);
  a.strong = cfg_.strong_fraction ? rng.bernoulli(*cfg_.strong_fraction) : type == TxType::kPayment;
  a.service = service_time(type, rng);
  a.target = static_cast<sim::ReplicaId>(rng.uniform_int(1, static_cast<std::int64_t>(replicas_)));
  return a;
}

std::vector<Arrival> Generator::schedule(sim::Rng& rng, sim::SimTime start) {
  std::vector<Arrival> out;
  out.reserve(cfg_.ops);
  const double gap_ms = 1000.0 / cfg_.rate_tps;
  sim::SimTime t = start;
  for (std::size_t i = 0; i < cfg_.ops; ++i) {
    t += std::max<sim::SimTime>(1, sim::from_ms(rng.exponential(gap_ms)));
    out.push_back(next_request(rng, t));
  }
  return out;
}

namespace {

class OracleContext final : public TxContext {
 public:
  explicit OracleContext(const StoreMap& base) : base_(base) {}
  Value read(ObjectKey key) override {
    if (auto it = overlay_.find(key); it != overlay_.end()) return it->second;
    if (auto it = base_.find(key); it != base_.end()) return it->second;
    return 0;
  }
  void write(ObjectKey key, Value value) override { overlay_[key] = value; }
  StoreDump dump() const {
    StoreDump d;
    for (const auto& [k, v] : overlay_) dump_put(d, base_, k, v);
    return d;
  }

 private:
  const StoreMap& base_;
  std::unordered_map<ObjectKey, Value> overlay_;
};

}  // namespace

OracleResult oracle_execute(std::span<const TxProgram* const> programs, const StoreMap& initial) {
  OracleContext ctx(initial);
  OracleResult result;
  result.responses.reserve(programs.size());
  for (const TxProgram* p : programs) result.responses.push_back(p->run(ctx));
  result.store = ctx.dump();
  return result;
}

StoreDump to_dump(const StoreMap& state, const StoreMap& initial) {
  StoreDump d;
  for (const auto& [k, v] : state) dump_put(d, initial, k, v);
  for (const auto& [k, v] : initial)
    if (!state.count(k)) dump_put(d, initial, k, 0);
  return d;
}

}  // namespace creek::workload
