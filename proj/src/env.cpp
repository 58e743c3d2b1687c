#include "wifimec/env.hpp"

#include "wifimec/baselines.hpp"

#include <cmath>
#include <stdexcept>

namespace wifimec {

void EnvConfig::validate() const {
  scenario.validate();
  channel.validate();
  table.validate();
}

int state_dim(const ScenarioConfig& cfg) { return cfg.n_stations() + cfg.n_compute + 1; }

State make_state(const SlotTasks& tasks, const ScenarioConfig& cfg) {
  const int M = cfg.n_compute;
  const int N = cfg.n_comm;
  State s;
  s.raw.resize(state_dim(cfg));
  s.normalized.resize(state_dim(cfg));
  for (int m = 0; m < M; ++m) {
    s.raw[m] = tasks.compute[m].data_bits;
    s.normalized[m] = s.raw[m] / cfg.compute_data.hi;
    s.raw[M + N + m] = tasks.compute[m].cpu_cycles;
    s.normalized[M + N + m] = s.raw[M + N + m] / cfg.compute_cycles.hi;
  }
  for (int n = 0; n < N; ++n) {
    s.raw[M + n] = tasks.comm[n].data_bits;
    s.normalized[M + n] = s.raw[M + n] / cfg.comm_data.hi;
  }
  s.raw[2 * M + N] = cfg.f_mec_total;
  s.normalized[2 * M + N] = cfg.f_mec_total / kMecNormalizer;
  return s;
}

Allocation allocate_with(AllocationMode mode, const SlotView& slot, std::span<const int> decisions) {
  return mode == AllocationMode::hungarian ? allocate(slot, decisions) : allocate_even(slot, decisions);
}

namespace {

// Rate of a scheduled link. A link without a usable MCS is charged at the
// MCS 0 rate of its RU and flagged.
double link_rate(const SlotView& slot, int sta, RuSize ru, bool& unreachable) {
  const double r = achievable_rate(slot.cfg.tx_power, slot.gains[sta], ru, slot.channel, slot.table);
  unreachable = !(r > 0);
  return unreachable ? rate(ru, McsIndex(0), slot.table) : r;
}

}  // namespace

SlotCosts slot_costs(const SlotView& slot, const Allocation& alloc) {
  const ScenarioConfig& cfg = slot.cfg;
  const int M = cfg.n_compute;
  const int N = cfg.n_comm;
  SlotCosts out;
  out.compute.resize(M);
  out.comm.resize(N);
  out.offloaded.assign(M, false);
  out.unreachable.assign(M + N, false);
  for (int m = 0; m < M; ++m) {
    const auto it = alloc.ru_assignment.find(m);
    if (it == alloc.ru_assignment.end()) {
      out.compute[m] = local_cost(slot.tasks.compute[m], cfg.f_local);
      continue;
    }
    bool bad = false;
    const double r = link_rate(slot, m, it->second, bad);
    out.unreachable[m] = bad;
    out.offloaded[m] = true;
    out.compute[m] = offload_cost(slot.tasks.compute[m], alloc.cpu_shares.at(m), r, cfg.tx_power);
  }
  for (int n = 0; n < N; ++n) {
    bool bad = false;
    const double r = link_rate(slot, M + n, alloc.ru_assignment.at(M + n), bad);
    out.unreachable[M + n] = bad;
    out.comm[n] = comm_cost(slot.tasks.comm[n], r, cfg.tx_power);
  }
  return out;
}

double compute_reward(double c_local, double c_total, bool comm_deadlines_met) {
  if (!comm_deadlines_met) return -1.0;
  if (!(c_local > 0)) throw std::invalid_argument("compute_reward: c_local must be > 0");
  return (c_local - c_total) / c_local;
}

namespace {

TotalCost totals(const SlotView& slot, const SlotCosts& costs) {
  std::vector<int> decisions(costs.offloaded.begin(), costs.offloaded.end());
  return total_cost(decisions, costs.compute, costs.compute, costs.comm, slot.cfg.lambda);
}

}  // namespace

double c_local_baseline(const SlotView& slot, AllocationMode mode) {
  const Action none(slot.cfg.n_compute, 0);
  return totals(slot, slot_costs(slot, allocate_with(mode, slot, none))).weighted;
}

SlotOutcome evaluate_slot(const SlotView& slot, std::span<const int> decisions, AllocationMode mode) {
  const ScenarioConfig& cfg = slot.cfg;
  SlotOutcome out;
  out.allocation = allocate_with(mode, slot, decisions);
  out.costs = slot_costs(slot, out.allocation);
  const TotalCost t = totals(slot, out.costs);

  SlotMetrics& m = out.metrics;
  m.total_cost = t.weighted;
  m.delay = t.delay;
  m.energy = t.energy;
  m.n_compute = cfg.n_compute;
  m.n_comm = cfg.n_comm;
  for (int i = 0; i < cfg.n_compute; ++i)
    if (!out.costs.unreachable[i] && out.costs.compute[i].delay <= slot.tasks.compute[i].deadline) ++m.qos_hits;
  for (int n = 0; n < cfg.n_comm; ++n)
    if (!out.costs.unreachable[cfg.n_compute + n] && out.costs.comm[n].delay <= slot.tasks.comm[n].deadline)
      ++m.comm_hits;
  for (bool u : out.costs.unreachable) m.unreachable = m.unreachable || u;

  m.c_local = c_local_baseline(slot, mode);
  bool ok = m.comm_hits == cfg.n_comm && !m.unreachable;
  if (cfg.penalize_compute_violation) ok = ok && m.qos_hits == cfg.n_compute;
  m.reward = compute_reward(m.c_local, m.total_cost, ok);
  return out;
}

Env::Env(EnvConfig cfg, AllocationMode mode) : cfg_(std::move(cfg)), mode_(mode) { cfg_.validate(); }

State Env::reset(std::uint64_t seed) {
  rng_.seed(seed);
  const ScenarioConfig& sc = cfg_.scenario;
  const int L = sc.n_stations();
  distances_.resize(L);
  gains_.resize(L);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int l = 0; l < L; ++l) {
    // Distance of a point uniform in the disc; 1 - U keeps it positive.
    const double radius = sc.cell_radius * std::sqrt(1.0 - unit(rng_));
    distances_[l] = radius;
    gains_[l] = channel_gain(path_loss_db(radius, cfg_.channel));
  }
  tasks_ = generate_tasks(rng_, sc, cfg_.table);
  state_ = make_state(tasks_, sc);
  slot_ = 0;
  active_ = true;
  return state_;
}

StepResult Env::step(std::span<const int> action) {
  if (!active_) throw std::logic_error("Env::step: episode is not active; call reset()");
  if (static_cast<int>(action.size()) != cfg_.scenario.n_compute)
    throw std::invalid_argument("Env::step: action length must equal the number of compute STAs");
  SlotOutcome outcome = evaluate_slot(view(), action, mode_);

  StepResult res;
  res.metrics = outcome.metrics;
  res.reward = outcome.metrics.reward;
  res.allocation = std::move(outcome.allocation);
  ++slot_;
  res.done = slot_ >= cfg_.scenario.slots_per_episode;
  tasks_ = generate_tasks(rng_, cfg_.scenario, cfg_.table);
  state_ = make_state(tasks_, cfg_.scenario);
  res.next = state_;
  if (res.done) active_ = false;
  return res;
}

}  // namespace wifimec
