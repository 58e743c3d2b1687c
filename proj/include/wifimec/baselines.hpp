#pragma once

#include "wifimec/allocator.hpp"
#include "wifimec/env.hpp"
#include "wifimec/types.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace wifimec {

enum class PolicyKind { local, full, random, dqn, dtd3 };

inline constexpr std::array<PolicyKind, 5> kPolicyKinds = {PolicyKind::local, PolicyKind::full, PolicyKind::random,
                                                           PolicyKind::dqn, PolicyKind::dtd3};

std::string_view to_string(PolicyKind kind);
std::optional<PolicyKind> parse_policy(std::string_view name);

constexpr bool is_learned(PolicyKind kind) { return kind == PolicyKind::dqn || kind == PolicyKind::dtd3; }

/// Naive baselines share RUs evenly; learned policies go through the
/// Hungarian allocator.
constexpr AllocationMode allocation_mode(PolicyKind kind) {
  return is_learned(kind) ? AllocationMode::hungarian : AllocationMode::even_split;
}

Action local_policy(int n_compute);
Action full_policy(int n_compute);
Action random_policy(int n_compute, Rng& rng);

/// Every STA gets the largest legal size r with n * r <= budget_units; empty
/// when even a 26-tone RU each does not fit.
RuPartition even_ru_split(int n_transmitting, int budget_units);

/// Even RU split with equal CPU shares. Offloaders are demoted by priority
/// when the transmitting set exceeds the budget.
Allocation allocate_even(const SlotView& slot, std::span<const int> decisions);

}  // namespace wifimec
