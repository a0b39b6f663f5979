#pragma once

// TPC-C-lite: down-scaled, deterministic versions of the five TPC-C
// transaction types, written as read/write scripts over a keyed store.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "creek/core/tx_context.hpp"
#include "creek/sim/rng.hpp"
#include "creek/sim/simulator.hpp"
#include "creek/sim/time.hpp"

namespace creek::workload {

enum class TxType : std::uint8_t { kNewOrder = 0, kPayment, kDelivery, kOrderStatus, kStockLevel, kNoop };

inline constexpr std::size_t kTxTypeCount = 5;

const char* to_string(TxType t);

inline constexpr std::uint32_t kDistrictsPerWarehouse = 10;

namespace table {
enum : std::uint8_t {
  kWarehouseYtd = 1,
  kWarehouseTax,
  kDistrictYtd,
  kDistrictTax,
  kDistrictNextOrder,
  kDistrictNextDelivery,
  kCustomerBalance,
  kCustomerYtdPayment,
  kCustomerPaymentCount,
  kCustomerDiscount,
  kCustomerLastOrder,
  kCustomerDeliveryCount,
  kItemPrice,
  kStockQuantity,
  kStockYtd,
  kStockOrderCount,
  kStockRemoteCount,
  kOrderCustomer,
  kOrderLineCount,
  kOrderCarrier,
  kOrderTotal,
  kOrderLineItem,
  kOrderLineAmount,
};
}  // namespace table

// table:8 | warehouse:8 | district:8 | id:40
constexpr ObjectKey make_key(std::uint8_t tbl, std::uint32_t w, std::uint32_t d, std::uint64_t id) {
  return (static_cast<ObjectKey>(tbl) << 56) | (static_cast<ObjectKey>(w & 0xff) << 48) |
         (static_cast<ObjectKey>(d & 0xff) << 40) | (id & ((1ULL << 40) - 1));
}
constexpr std::uint8_t key_table(ObjectKey k) { return static_cast<std::uint8_t>(k >> 56); }

std::string describe_key(ObjectKey k);

struct OrderLine {
  std::uint32_t item = 0;
  std::uint32_t supply_warehouse = 0;
  std::uint32_t quantity = 0;
  friend bool operator==(const OrderLine&, const OrderLine&) = default;
};

// One transaction with its drawn parameters. run() is a pure function of the
// parameters and the values it reads.
struct TxProgram {
  TxType type = TxType::kNoop;
  std::uint32_t warehouse = 0;
  std::uint32_t district = 0;
  std::uint32_t customer = 0;
  std::int64_t amount = 0;
  std::uint32_t carrier = 0;
  std::uint32_t threshold = 0;
  std::vector<OrderLine> lines;

  bool read_only() const { return type == TxType::kOrderStatus || type == TxType::kStockLevel || type == TxType::kNoop; }

  Response run(TxContext& ctx) const;

  // Stable parameter digest for trace identification.
  std::uint64_t digest() const;

  friend bool operator==(const TxProgram&, const TxProgram&) = default;
};

struct WorkloadConfig {
  std::uint32_t warehouses = 5;
  std::uint32_t customers_per_district = 100;
  std::uint32_t items = 1000;
  // New-order, Payment, Delivery, Order-status, Stock-level.
  std::array<double, kTxTypeCount> mix{0.45, 0.43, 0.04, 0.04, 0.04};
  // When set, each operation is strong with this probability regardless of
  // type; otherwise Payment is strong and everything else weak.
  std::optional<double> strong_fraction;
  double remote_order_probability = 0.1;
  double rate_tps = 2000.0;  // mean arrival rate across the whole cluster
  std::size_t ops = 500;
  double weak_service_ms = 0.5;
  double payment_service_ms = 0.1;
  double service_multiplier = 1.0;
  double service_jitter = 0.25;  // service ~ U[mean*(1-j), mean*(1+j)]

  void validate() const;
};

StoreMap initial_store(const WorkloadConfig& cfg, std::uint64_t seed);

struct Arrival {
  sim::SimTime at = 0;
  sim::ReplicaId target = 0;
  TxProgram program;
  bool strong = false;
  sim::SimTime service = 0;
};

class Generator {
 public:
  Generator(WorkloadConfig cfg, std::size_t replicas);

  // Draws one request: type per mix, parameters per scale, strong flag, and
  // a uniformly chosen target replica.
  Arrival next_request(sim::Rng& rng, sim::SimTime clock);

  TxProgram draw_program(TxType type, sim::Rng& rng) const;
  TxType draw_type(sim::Rng& rng) const;
  sim::SimTime service_time(TxType type, sim::Rng& rng) const;

  // Full arrival schedule with exponential inter-arrival gaps.
  std::vector<Arrival> schedule(sim::Rng& rng, sim::SimTime start = 0);

  const WorkloadConfig& config() const { return cfg_; }

 private:
  WorkloadConfig cfg_;
  std::size_t replicas_;
};

struct OracleResult {
  StoreDump store;
  std::vector<Response> responses;
};

// Strictly sequential execution of the programs over a private copy of the
// initial store; ground truth for the checkers.
OracleResult oracle_execute(std::span<const TxProgram* const> programs, const StoreMap& initial);

// Dump of a full store snapshot relative to `initial`.
StoreDump to_dump(const StoreMap& state, const StoreMap& initial);

}  // namespace creek::workload
