#pragma once

#include "wifimec/allocator.hpp"
#include "wifimec/channel.hpp"
#include "wifimec/tasking.hpp"
#include "wifimec/types.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace wifimec {

struct EnvConfig {
  ScenarioConfig scenario;
  ChannelParams channel;
  RateTable table = RateTable::defaults();

  void validate() const;
};

/// Hungarian allocator for learned policies, even RU split for the naive
/// baselines.
enum class AllocationMode { hungarian, even_split };

/// Normalization scales of the state vector.
inline constexpr double kMecNormalizer = 1e10;

/// [d_1..d_M (compute), d_1..d_N (comm), c_1..c_M, f_mec]. `raw` keeps SI
/// units, `normalized` is what the networks see.
struct State {
  Vector raw;
  Vector normalized;
};

using Action = std::vector<int>;

int state_dim(const ScenarioConfig& cfg);
State make_state(const SlotTasks& tasks, const ScenarioConfig& cfg);

struct SlotMetrics {
  double total_cost = 0;  // weighted objective of the slot
  double delay = 0;
  double energy = 0;
  double c_local = 0;  // same slot with every compute task local
  int qos_hits = 0;
  int comm_hits = 0;
  int n_compute = 0;
  int n_comm = 0;
  bool unreachable = false;  // some scheduled link had no usable MCS
  double reward = 0;
};

struct Transition {
  Vector state;   // normalized
  Vector action;  // continuous, before binarization
  double reward = 0;
  Vector next_state;
  bool done = false;
};

/// Per-station costs of one slot under a given allocation.
struct SlotCosts {
  std::vector<CostPair> compute;  // the cost actually incurred (local or offload)
  std::vector<CostPair> comm;
  std::vector<bool> offloaded;    // after demotion
  std::vector<bool> unreachable;  // per station, global indexing
};

SlotCosts slot_costs(const SlotView& slot, const Allocation& alloc);

Allocation allocate_with(AllocationMode mode, const SlotView& slot, std::span<const int> decisions);

struct SlotOutcome {
  Allocation allocation;
  SlotCosts costs;
  SlotMetrics metrics;
};

/// Weighted cost of the slot with every compute task local and the
/// communication STAs allocated by the same mode.
double c_local_baseline(const SlotView& slot, AllocationMode mode);

/// (c_local - c_total) / c_local when every communication deadline holds,
/// -1 otherwise.
double compute_reward(double c_local, double c_total, bool comm_deadlines_met);

/// Allocation, costs, metrics and reward of one slot.
SlotOutcome evaluate_slot(const SlotView& slot, std::span<const int> decisions, AllocationMode mode);

struct StepResult {
  State next;
  double reward = 0;
  SlotMetrics metrics;
  bool done = false;
  Allocation allocation;
};

/// One AP cell. Owns its RNG; STA positions are redrawn at every reset and
/// tasks at every slot.
class Env {
 public:
  Env(EnvConfig cfg, AllocationMode mode);

  State reset(std::uint64_t seed);
  StepResult step(std::span<const int> action);

  const EnvConfig& config() const { return cfg_; }
  AllocationMode mode() const { return mode_; }
  const SlotTasks& tasks() const { return tasks_; }
  std::span<const double> gains() const { return gains_; }
  std::span<const double> distances() const { return distances_; }
  const State& state() const { return state_; }
  int slot() const { return slot_; }
  int state_dim() const { return wifimec::state_dim(cfg_.scenario); }
  int action_dim() const { return cfg_.scenario.n_compute; }
  SlotView view() const { return {tasks_, gains_, cfg_.scenario, cfg_.channel, cfg_.table}; }

 private:
  EnvConfig cfg_;
  AllocationMode mode_;
  Rng rng_;
  std::vector<double> distances_;
  std::vector<double> gains_;
  SlotTasks tasks_;
  State state_;
  int slot_ = 0;
  bool active_ = false;
};

}  // namespace wifimec
