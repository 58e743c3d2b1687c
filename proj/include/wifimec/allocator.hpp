#pragma once

#include "wifimec/channel.hpp"
#include "wifimec/hungarian.hpp"
#include "wifimec/tasking.hpp"
#include "wifimec/types.hpp"

#include <array>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace wifimec {

struct Priority {
  double value = 0;
  // Weighted data-rate, CPU-rate and inverse-capability fractions.
  std::array<double, 3> components{};
};

/// Capability used in the priority rule: MCS index + 1 at a 26-tone RU, or 1
/// when no MCS is usable.
int capability_from_mcs(Mcs mcs);

/// Task priorities over the given compute set; each component is normalized
/// over the set, so the values sum to 1.
std::vector<Priority> priority(std::span<const ComputeTask> tasks, std::span<const int> capabilities,
                               const std::array<double, 3>& weights);

/// CPU shares proportional to priority. Shares sum to f_mec.
std::vector<double> allocate_compute(std::span<const double> priorities, double f_mec);

/// Multiset of RU sizes in nondecreasing order, one per transmitting STA.
using RuPartition = std::vector<RuSize>;

int total_units(const RuPartition& partition);

/// Every multiset of `n_stas` legal RU sizes with unit sum <= budget_units,
/// each once, in lexicographic order of the nondecreasing sequences.
std::vector<RuPartition> enumerate_partitions(int n_stas, int budget_units);

/// A station that needs uplink airtime.
struct Transmitter {
  double data_bits = 0;
  double gain = 0;
  double power = 0;
};

/// n x 6 table of the weighted transmission cost of each transmitter on each
/// legal RU size (columns follow kRuSizes); +inf where the rate is zero.
Matrix transmit_cost_table(std::span<const Transmitter> stas, double lambda, const ChannelParams& params,
                           const RateTable& table);

/// Entry (i, j): weighted cost of STA i sending its data on partition[j].
Matrix efficiency_matrix(std::span<const Transmitter> stas, const RuPartition& partition, double lambda,
                         const ChannelParams& params, const RateTable& table);

/// Station indexing: compute STAs are 0..M-1, communication STAs M..M+N-1.
struct Allocation {
  std::map<int, RuSize> ru_assignment;
  std::map<int, double> cpu_shares;  // compute STA -> cycles/s
  std::set<int> demoted;             // compute STAs forced back to local execution
  RuPartition partition;
};

/// Everything the allocator needs to know about one slot.
struct SlotView {
  const SlotTasks& tasks;
  std::span<const double> gains;  // one per station, same indexing as Allocation
  const ScenarioConfig& cfg;
  const ChannelParams& channel;
  const RateTable& table;
};

std::vector<int> capabilities(const SlotView& slot, std::span<const int> compute_stas);

/// Priority-ordered demotion: removes the lowest-priority offloaders (ties
/// resolved toward the highest index) until at most `slots` remain.
/// Returns the demoted STAs; `offloaders` keeps the survivors in order.
std::set<int> demote_to_fit(const SlotView& slot, std::vector<int>& offloaders, int slots);

/// Priority-driven CPU shares, partition enumeration and Hungarian RU
/// assignment. Communication STAs are never demoted and partitions that
/// break a communication deadline rank below any that keep them all.
Allocation allocate(const SlotView& slot, std::span<const int> decisions);

/// Checks C3-C6 and the no-comm-demotion rule. Returns a description of the
/// first violation, or nullopt.
std::optional<std::string> check_constraints(const Allocation& alloc, std::span<const int> decisions,
                                             const ScenarioConfig& cfg);

}  // namespace wifimec
