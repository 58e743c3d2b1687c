#include "wifimec/allocator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <tuple>

namespace wifimec {

int capability_from_mcs(Mcs mcs) { return mcs ? mcs->index + 1 : 1; }

std::vector<Priority> priority(std::span<const ComputeTask> tasks, std::span<const int> caps,
                               const std::array<double, 3>& weights) {
  if (tasks.size() != caps.size()) throw std::invalid_argument("priority: one capability per task required");
  std::vector<Priority> out(tasks.size());
  if (tasks.empty()) return out;

  double ru_sum = 0, cpu_sum = 0, inv_cap_sum = 0;
  for (std::size_t m = 0; m < tasks.size(); ++m) {
    if (caps[m] < 1) throw std::invalid_argument("priority: capability must be >= 1");
    ru_sum += tasks[m].data_bits / tasks[m].deadline;
    cpu_sum += tasks[m].cpu_cycles / tasks[m].deadline;
    inv_cap_sum += 1.0 / caps[m];
  }
  for (std::size_t m = 0; m < tasks.size(); ++m) {
    auto& p = out[m];
    p.components[0] = weights[0] * (tasks[m].data_bits / tasks[m].deadline) / ru_sum;
    p.components[1] = weights[1] * (tasks[m].cpu_cycles / tasks[m].deadline) / cpu_sum;
    p.components[2] = weights[2] * (1.0 / caps[m]) / inv_cap_sum;
    p.value = p.components[0] + p.components[1] + p.components[2];
  }
  return out;
}

std::vector<double> allocate_compute(std::span<const double> priorities, double f_mec) {
  const double total = std::accumulate(priorities.begin(), priorities.end(), 0.0);
  std::vector<double> shares(priorities.size());
  if (priorities.empty()) return shares;
  if (!(total > 0)) throw std::invalid_argument("allocate_compute: priorities must sum to a positive value");
  std::transform(priorities.begin(), priorities.end(), shares.begin(),
                 [&](double p) { return p / total * f_mec; });
  return shares;
}

int total_units(const RuPartition& partition) {
  int sum = 0;
  for (RuSize ru : partition) sum += units(ru);
  return sum;
}

namespace {

void extend(int remaining, int budget, std::size_t min_size, RuPartition& current,
            std::vector<RuPartition>& out) {
  if (remaining == 0) {
    out.push_back(current);
    return;
  }
  for (std::size_t s = min_size; s < kRuSizes.size(); ++s) {
    const int u = units(kRuSizes[s]);
    // The cheapest completion repeats this size for every remaining slot.
    if (u * remaining > budget) break;
    current.push_back(kRuSizes[s]);
    extend(remaining - 1, budget - u, s, current, out);
    current.pop_back();
  }
}

const std::vector<RuPartition>& cached_partitions(int n, int budget) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::vector<RuPartition>> cache;
  std::lock_guard lock(mu);
  auto it = cache.find({n, budget});
  if (it == cache.end()) it = cache.emplace(std::pair{n, budget}, enumerate_partitions(n, budget)).first;
  return it->second;
}

}  // namespace

std::vector<RuPartition> enumerate_partitions(int n_stas, int budget_units) {
  if (n_stas < 1) throw std::invalid_argument("enumerate_partitions: n_stas must be >= 1");
  std::vector<RuPartition> out;
  RuPartition current;
  current.reserve(n_stas);
  extend(n_stas, budget_units, 0, current, out);
  return out;
}

Matrix transmit_cost_table(std::span<const Transmitter> stas, double lambda, const ChannelParams& params,
                           const RateTable& table) {
  Matrix out(static_cast<Eigen::Index>(stas.size()), static_cast<Eigen::Index>(kRuSizes.size()));
  for (std::size_t i = 0; i < stas.size(); ++i) {
    for (std::size_t j = 0; j < kRuSizes.size(); ++j) {
      const double r = achievable_rate(stas[i].power, stas[i].gain, kRuSizes[j], params, table);
      CostPair c = CostPair::unreachable();
      if (r > 0) c = {stas[i].data_bits / r, stas[i].power * stas[i].data_bits / r};
      out(i, j) = c.weighted(lambda);
    }
  }
  return out;
}

Matrix efficiency_matrix(std::span<const Transmitter> stas, const RuPartition& partition, double lambda,
                         const ChannelParams& params, const RateTable& table) {
  if (stas.size() != partition.size())
    throw std::invalid_argument("efficiency_matrix: one RU per transmitting STA required");
  const Matrix per_size = transmit_cost_table(stas, lambda, params, table);
  Matrix out(per_size.rows(), per_size.rows());
  for (std::size_t j = 0; j < partition.size(); ++j) out.col(j) = per_size.col(ru_index(partition[j]));
  return out;
}

std::vector<int> capabilities(const SlotView& slot, std::span<const int> compute_stas) {
  std::vector<int> caps;
  caps.reserve(compute_stas.size());
  for (int m : compute_stas) {
    const double s = snr(slot.cfg.tx_power, slot.gains[m], RuSize::k26, slot.channel);
    caps.push_back(capability_from_mcs(mcs_from_snr(s, slot.table)));
  }
  return caps;
}

namespace {

std::vector<Priority> priorities_of(const SlotView& slot, std::span<const int> stas) {
  std::vector<ComputeTask> tasks;
  tasks.reserve(stas.size());
  for (int m : stas) tasks.push_back(slot.tasks.compute[m]);
  return priority(tasks, capabilities(slot, stas), slot.cfg.priority_weights);
}

}  // namespace

std::set<int> demote_to_fit(const SlotView& slot, std::vector<int>& offloaders, int slots) {
  std::set<int> demoted;
  while (static_cast<int>(offloaders.size()) > std::max(slots, 0)) {
    const auto prio = priorities_of(slot, offloaders);
    std::size_t victim = 0;
    for (std::size_t i = 1; i < offloaders.size(); ++i)
      if (prio[i].value <= prio[victim].value) victim = i;  // <= prefers the highest index on ties
    demoted.insert(offloaders[victim]);
    offloaders.erase(offloaders.begin() + static_cast<std::ptrdiff_t>(victim));
  }
  return demoted;
}

Allocation allocate(const SlotView& slot, std::span<const int> decisions) {
  const ScenarioConfig& cfg = slot.cfg;
  const int M = cfg.n_compute;
  const int N = cfg.n_comm;
  if (static_cast<int>(decisions.size()) != M) throw std::invalid_argument("allocate: one decision per compute STA");
  if (static_cast<int>(slot.gains.size()) != M + N) throw std::invalid_argument("allocate: one gain per STA");

  Allocation alloc;
  std::vector<int> offloaders;
  for (int m = 0; m < M; ++m) {
    if (decisions[m] != 0 && decisions[m] != 1) throw std::invalid_argument("allocate: decisions must be binary");
    if (decisions[m]) offloaders.push_back(m);
  }
  alloc.demoted = demote_to_fit(slot, offloaders, cfg.bandwidth_units - N);

  if (!offloaders.empty()) {
    const auto prio = priorities_of(slot, offloaders);
    std::vector<double> values;
    for (const auto& p : prio) values.push_back(p.value);
    const auto shares = allocate_compute(values, cfg.f_mec_total);
    for (std::size_t i = 0; i < offloaders.size(); ++i) alloc.cpu_shares[offloaders[i]] = shares[i];
  }

  // Transmitting set: communication STAs first, then surviving offloaders.
  std::vector<int> stations;
  std::vector<Transmitter> tx;
  std::vector<double> comm_deadline;
  for (int n = 0; n < N; ++n) {
    stations.push_back(M + n);
    tx.push_back({slot.tasks.comm[n].data_bits, slot.gains[M + n], cfg.tx_power});
    comm_deadline.push_back(slot.tasks.comm[n].deadline);
  }
  for (int m : offloaders) {
    stations.push_back(m);
    tx.push_back({slot.tasks.compute[m].data_bits, slot.gains[m], cfg.tx_power});
  }
  const int n = static_cast<int>(stations.size());
  if (n == 0) return alloc;

  const Matrix per_size = transmit_cost_table(tx, cfg.lambda, slot.channel, slot.table);
  // Comm rows that miss their deadline on a size carry a penalty larger than
  // any achievable difference in finite total cost.
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> violates(n, per_size.cols());
  violates.setConstant(false);
  double largest = 0;
  for (Eigen::Index i = 0; i < per_size.rows(); ++i)
    for (Eigen::Index j = 0; j < per_size.cols(); ++j)
      if (std::isfinite(per_size(i, j))) largest = std::max(largest, per_size(i, j));
  for (int i = 0; i < N; ++i) {
    for (std::size_t j = 0; j < kRuSizes.size(); ++j) {
      const double r = achievable_rate(tx[i].power, tx[i].gain, kRuSizes[j], slot.channel, slot.table);
      violates(i, j) = !(r > 0) || tx[i].data_bits / r > comm_deadline[i];
    }
  }
  const double penalty = 2.0 * n * std::max(largest, 1e-12) + 1.0;

  using Key = std::tuple<int, int, double, int>;  // comm violations, infeasible links, cost, units
  std::optional<Key> best_key;
  RuPartition best_partition;
  std::vector<int> best_columns;

  Matrix cost(n, n);
  for (const RuPartition& partition : cached_partitions(n, cfg.bandwidth_units)) {
    for (int j = 0; j < n; ++j) {
      const int s = ru_index(partition[j]);
      for (int i = 0; i < n; ++i) {
        double c = per_size(i, s);
        if (i < N && violates(i, s) && std::isfinite(c)) c += penalty;
        cost(i, j) = c;
      }
    }
    const Assignment a = hungarian(cost);
    int comm_violations = 0, infeasible = 0;
    double weighted = 0;
    for (int i = 0; i < n; ++i) {
      const int s = ru_index(partition[a.column_of_row[i]]);
      if (i < N && violates(i, s)) ++comm_violations;
      if (!std::isfinite(per_size(i, s))) {
        ++infeasible;
        weighted += infeasible_surrogate(per_size);
      } else {
        weighted += per_size(i, s);
      }
    }
    const Key key{comm_violations, infeasible, weighted, total_units(partition)};
    if (!best_key || key < *best_key) {
      best_key = key;
      best_partition = partition;
      best_columns = a.column_of_row;
    }
  }
  if (!best_key) throw std::logic_error("allocate: no feasible RU partition for the transmitting set");

  alloc.partition = best_partition;
  for (int i = 0; i < n; ++i) alloc.ru_assignment[stations[i]] = best_partition[best_columns[i]];
  return alloc;
}

std::optional<std::string> check_constraints(const Allocation& alloc, std::span<const int> decisions,
                                             const ScenarioConfig& cfg) {
  const int M = cfg.n_compute;
  const int N = cfg.n_comm;
  for (int d : decisions)
    if (d != 0 && d != 1) return "C3: non-binary offloading decision";
  int used = 0;
  for (const auto& [sta, ru] : alloc.ru_assignment) {
    if (std::find(kRuSizes.begin(), kRuSizes.end(), ru) == kRuSizes.end()) return "C5: illegal RU size";
    used += units(ru);
    if (sta < M && (!decisions[sta] || alloc.demoted.count(sta))) return "RU assigned to a non-offloading STA";
  }
  if (used > cfg.bandwidth_units) return "C4: RU units exceed the budget";
  double cpu = 0;
  for (const auto& [sta, f] : alloc.cpu_shares) {
    if (f < 0) return "C6: negative CPU share";
    cpu += f;
  }
  if (cpu > cfg.f_mec_total * (1 + 1e-12)) return "C6: CPU shares exceed MEC capacity";
  if (!alloc.cpu_shares.empty() && std::abs(cpu - cfg.f_mec_total) > 1e-9 * cfg.f_mec_total)
    return "CPU shares do not exhaust MEC capacity";
  for (int n = 0; n < N; ++n)
    if (!alloc.ru_assignment.count(M + n)) return "communication STA without an RU";
  for (int d : alloc.demoted) {
    if (d >= M) return "communication STA demoted";
    if (alloc.ru_assignment.count(d)) return "demoted STA holds an RU";
  }
  for (int m = 0; m < M; ++m) {
    const bool transmitting = decisions[m] && !alloc.demoted.count(m);
    if (transmitting != static_cast<bool>(alloc.ru_assignment.count(m)))
      return "offloading STA without an RU";
    if (transmitting != static_cast<bool>(alloc.cpu_shares.count(m))) return "CPU share mismatch";
  }
  return std::nullopt;
}

}  // namespace wifimec
