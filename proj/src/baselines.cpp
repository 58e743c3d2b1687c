#include "wifimec/baselines.hpp"

#include <stdexcept>

namespace wifimec {

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::local: return "local";
    case PolicyKind::full: return "full";
    case PolicyKind::random: return "random";
    case PolicyKind::dqn: return "dqn";
    case PolicyKind::dtd3: return "dtd3";
  }
  return "unknown";
}

std::optional<PolicyKind> parse_policy(std::string_view name) {
  for (PolicyKind k : kPolicyKinds)
    if (to_string(k) == name) return k;
  return std::nullopt;
}

Action local_policy(int n_compute) { return Action(n_compute, 0); }

Action full_policy(int n_compute) { return Action(n_compute, 1); }

Action random_policy(int n_compute, Rng& rng) {
  std::bernoulli_distribution coin(0.5);
  Action a(n_compute);
  for (int& x : a) x = coin(rng) ? 1 : 0;
  return a;
}

RuPartition even_ru_split(int n_transmitting, int budget_units) {
  if (n_transmitting < 1) throw std::invalid_argument("even_ru_split: n must be >= 1");
  for (auto it = kRuSizes.rbegin(); it != kRuSizes.rend(); ++it)
    if (n_transmitting * units(*it) <= budget_units) return RuPartition(n_transmitting, *it);
  return {};
}

Allocation allocate_even(const SlotView& slot, std::span<const int> decisions) {
  const ScenarioConfig& cfg = slot.cfg;
  const int M = cfg.n_compute;
  const int N = cfg.n_comm;
  if (static_cast<int>(decisions.size()) != M) throw std::invalid_argument("allocate_even: one decision per compute STA");

  Allocation alloc;
  std::vector<int> offloaders;
  for (int m = 0; m < M; ++m) {
    if (decisions[m] != 0 && decisions[m] != 1) throw std::invalid_argument("allocate_even: decisions must be binary");
    if (decisions[m]) offloaders.push_back(m);
  }
  alloc.demoted = demote_to_fit(slot, offloaders, cfg.bandwidth_units - N);

  const std::vector<double> equal(offloaders.size(), 1.0);
  const auto shares = allocate_compute(equal, cfg.f_mec_total);
  for (std::size_t i = 0; i < offloaders.size(); ++i) alloc.cpu_shares[offloaders[i]] = shares[i];

  const int n = N + static_cast<int>(offloaders.size());
  if (n == 0) return alloc;
  alloc.partition = even_ru_split(n, cfg.bandwidth_units);
  const RuSize size = alloc.partition.front();
  for (int i = 0; i < N; ++i) alloc.ru_assignment[M + i] = size;
  for (int m : offloaders) alloc.ru_assignment[m] = size;
  return alloc;
}

}  // namespace wifimec
