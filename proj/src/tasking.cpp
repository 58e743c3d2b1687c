#include "wifimec/tasking.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace wifimec {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("scenario: ") + what);
}

bool valid_range(Range r) { return r.lo > 0 && r.hi >= r.lo; }

double uniform(Rng& rng, Range r) { return std::uniform_real_distribution<double>(r.lo, r.hi)(rng); }

}  // namespace

void ScenarioConfig::validate() const {
  require(n_compute >= 0, "n_compute must be >= 0");
  require(n_comm >= 0, "n_comm must be >= 0");
  require(n_comm <= bandwidth_units, "n_comm must not exceed the RU budget");
  require(f_local > 0 && f_mec_total > 0, "CPU capacities must be > 0");
  require(bandwidth_units > 0, "bandwidth_units must be > 0");
  require(tx_power > 0, "tx_power must be > 0");
  require(lambda >= 0 && lambda <= 1, "lambda must be in [0, 1]");
  require(cell_radius > 0, "cell_radius must be > 0");
  require(valid_range(compute_data) && valid_range(compute_cycles) && valid_range(comm_data),
          "task size ranges must be positive with lo <= hi");
  require(valid_range(deadline_factor), "deadline_factor range must lie in (0, inf)");
  require(valid_range(comm_slack), "comm_slack range must lie in (0, inf)");
  require(slots_per_episode > 0, "slots_per_episode must be > 0");
  double wsum = 0;
  for (double w : priority_weights) {
    require(w >= 0, "priority weights must be >= 0");
    wsum += w;
  }
  require(std::abs(wsum - 1.0) < 1e-9, "priority weights must sum to 1");
}

double comm_reference_rate(const RateTable& table) { return rate(RuSize::k106, McsIndex(7), table); }

SlotTasks generate_tasks(Rng& rng, const ScenarioConfig& cfg, const RateTable& table) {
  SlotTasks out;
  out.compute.reserve(cfg.n_compute);
  out.comm.reserve(cfg.n_comm);
  for (int m = 0; m < cfg.n_compute; ++m) {
    ComputeTask t;
    t.cpu_cycles = uniform(rng, cfg.compute_cycles);
    t.data_bits = uniform(rng, cfg.compute_data);
    t.deadline = uniform(rng, cfg.deadline_factor) * (t.cpu_cycles / cfg.f_local);
    out.compute.push_back(t);
  }
  const double ref = comm_reference_rate(table);
  for (int n = 0; n < cfg.n_comm; ++n) {
    CommTask t;
    t.data_bits = uniform(rng, cfg.comm_data);
    t.deadline = uniform(rng, cfg.comm_slack) * t.data_bits / ref;
    out.comm.push_back(t);
  }
  return out;
}

CostPair local_cost(const ComputeTask& task, double f_local) {
  return {task.cpu_cycles / f_local, kEffectiveCapacitance * f_local * f_local * task.cpu_cycles};
}

CostPair offload_cost(const ComputeTask& task, double f_alloc, double rate, double power) {
  if (!(rate > 0)) return CostPair::unreachable();
  const double upload = task.data_bits / rate;
  return {task.cpu_cycles / f_alloc + upload, power * upload};
}

CostPair comm_cost(const CommTask& task, double rate, double power) {
  if (!(rate > 0)) return CostPair::unreachable();
  const double delay = task.data_bits / rate;
  return {delay, power * delay};
}

TotalCost total_cost(std::span<const int> decisions, std::span<const CostPair> local,
                     std::span<const CostPair> offload, std::span<const CostPair> comm, double lambda) {
  if (decisions.size() != local.size() || decisions.size() != offload.size())
    throw std::invalid_argument("total_cost: one decision and cost pair per compute STA required");
  TotalCost t;
  for (std::size_t m = 0; m < decisions.size(); ++m) {
    const CostPair& c = decisions[m] ? offload[m] : local[m];
    t.delay += c.delay;
    t.energy += c.energy;
  }
  for (const CostPair& c : comm) {
    t.delay += c.delay;
    t.energy += c.energy;
  }
  t.weighted = lambda * t.delay + (1.0 - lambda) * t.energy;
  return t;
}

}  // namespace wifimec
