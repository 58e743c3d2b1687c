#pragma once

#include "wifimec/channel.hpp"
#include "wifimec/types.hpp"

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace wifimec {

struct ComputeTask {
  double data_bits = 0;   // d_m
  double cpu_cycles = 0;  // c_m
  double deadline = 0;    // tau_m, seconds
};

struct CommTask {
  double data_bits = 0;  // d_n
  double deadline = 0;   // tau_n, seconds
};

struct SlotTasks {
  std::vector<ComputeTask> compute;
  std::vector<CommTask> comm;
};

/// Delay (s) and energy (J) of one task. An unreachable link (no usable MCS)
/// is represented by infinite delay and energy.
struct CostPair {
  double delay = 0;
  double energy = 0;

  static constexpr CostPair unreachable() {
    return {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  }
  bool reachable() const { return delay < std::numeric_limits<double>::infinity(); }
  double weighted(double lambda) const { return lambda * delay + (1.0 - lambda) * energy; }
};

struct Range {
  double lo = 0;
  double hi = 0;
};

struct ScenarioConfig {
  int n_compute = 5;
  int n_comm = 3;
  double f_local = 1e9;        // cycles/s
  double f_mec_total = 1e10;   // cycles/s
  int bandwidth_units = 36;    // budget in 26-tone units
  double tx_power = 0.5;       // W
  double lambda = 0.8;
  double cell_radius = 20.0;   // m
  Range compute_data{2.4e6, 4e6};
  Range compute_cycles{9e8, 1.1e9};
  Range comm_data{1e7, 2e7};
  Range deadline_factor{0.8, 1.2};
  // tau_n = slack * d_n / rate(106-tone, MCS 7), slack drawn per task.
  Range comm_slack{0.3, 0.9};
  int slots_per_episode = 100;
  std::uint64_t seed = 1;
  std::array<double, 3> priority_weights{1.0 / 3, 1.0 / 3, 1.0 / 3};
  // Adds a -1 reward branch for compute deadline misses. Off by default.
  bool penalize_compute_violation = false;

  int n_stations() const { return n_compute + n_comm; }
  /// Throws std::invalid_argument describing the first violated constraint.
  void validate() const;
};

/// Effective switched capacitance of the local CPU energy model.
inline constexpr double kEffectiveCapacitance = 1e-27;

/// Rate of a 106-tone RU at MCS 7; communication deadlines are scaled from it.
double comm_reference_rate(const RateTable& table);

SlotTasks generate_tasks(Rng& rng, const ScenarioConfig& cfg, const RateTable& table);

CostPair local_cost(const ComputeTask& task, double f_local);
CostPair offload_cost(const ComputeTask& task, double f_alloc, double rate, double power);
CostPair comm_cost(const CommTask& task, double rate, double power);

struct TotalCost {
  double delay = 0;
  double energy = 0;
  double weighted = 0;
};

/// Weighted system objective. `offload` entries are read only where the
/// matching decision is 1.
TotalCost total_cost(std::span<const int> decisions, std::span<const CostPair> local,
                     std::span<const CostPair> offload, std::span<const CostPair> comm, double lambda);

}  // namespace wifimec
