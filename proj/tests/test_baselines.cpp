#include "wifimec/baselines.hpp"
#include "wifimec/env.hpp"

#include <doctest.h>

#include <cmath>

using namespace wifimec;

TEST_CASE("fixed baselines") {
  CHECK(local_policy(5) == Action{0, 0, 0, 0, 0});
  CHECK(full_policy(5) == Action{1, 1, 1, 1, 1});
  CHECK(local_policy(0).empty());
}

TEST_CASE("random policy") {
  Rng a(3), b(3);
  long ones = 0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    const Action x = random_policy(1, a);
    REQUIRE(x.size() == 1);
    ones += x[0];
  }
  CHECK(static_cast<double>(ones) / draws == doctest::Approx(0.5).epsilon(0.04));
  Rng c(9), d(9);
  for (int i = 0; i < 50; ++i) CHECK(random_policy(7, c) == random_policy(7, d));
  CHECK(random_policy(7, b).size() == 7);
}

TEST_CASE("even RU split") {
  CHECK(even_ru_split(2, 36) == RuPartition(2, RuSize::k484));
  CHECK(even_ru_split(5, 36) == RuPartition(5, RuSize::k106));
  CHECK(even_ru_split(36, 36) == RuPartition(36, RuSize::k26));
  CHECK(even_ru_split(1, 36) == RuPartition(1, RuSize::k996));
  CHECK(even_ru_split(37, 36).empty());
  CHECK_THROWS(even_ru_split(0, 36));
  for (int n = 1; n <= 36; ++n) CHECK(total_units(even_ru_split(n, 36)) <= 36);
}

TEST_CASE("policy names") {
  for (PolicyKind k : kPolicyKinds) CHECK(parse_policy(to_string(k)) == k);
  CHECK_FALSE(parse_policy("sac").has_value());
  CHECK(allocation_mode(PolicyKind::full) == AllocationMode::even_split);
  CHECK(allocation_mode(PolicyKind::dtd3) == AllocationMode::hungarian);
}

TEST_CASE("even allocation") {
  EnvConfig ec;
  ec.scenario.n_compute = 6;
  Env env(ec, AllocationMode::even_split);
  env.reset(4);
  const Allocation all = allocate_even(env.view(), full_policy(6));
  CHECK(all.ru_assignment.size() == 9);
  for (const auto& [sta, ru] : all.ru_assignment) CHECK(ru == RuSize::k106);
  for (const auto& [sta, f] : all.cpu_shares) CHECK(f == doctest::Approx(ec.scenario.f_mec_total / 6));
  CHECK_FALSE(check_constraints(all, full_policy(6), ec.scenario).has_value());

  ec.scenario.n_compute = 36;
  Env big(ec, AllocationMode::even_split);
  big.reset(4);
  const Allocation over = allocate_even(big.view(), full_policy(36));
  CHECK(over.demoted.size() == 3);
  CHECK(over.ru_assignment.size() == 36);
  CHECK_FALSE(check_constraints(over, full_policy(36), ec.scenario).has_value());
}

TEST_CASE("local policy meets about half of the deadlines") {
  EnvConfig ec;
  Env env(ec, AllocationMode::even_split);
  long hits = 0, total = 0;
  for (std::uint64_t e = 0; e < 20; ++e) {
    env.reset(100 + e);
    for (int t = 0; t < 100; ++t) {
      const StepResult r = env.step(local_policy(5));
      hits += r.metrics.qos_hits;
      total += r.metrics.n_compute;
      if (r.metrics.comm_hits == r.metrics.n_comm) CHECK(r.reward == 0.0);
    }
  }
  CHECK(static_cast<double>(hits) / total == doctest::Approx(0.5).epsilon(0.06));
}

TEST_CASE("full offloading loses communication success as M grows") {
  const auto comm_success = [](int M) {
    EnvConfig ec;
    ec.scenario.n_compute = M;
    Env env(ec, AllocationMode::even_split);
    long hits = 0, total = 0;
    for (std::uint64_t e = 0; e < 5; ++e) {
      env.reset(e);
      for (int t = 0; t < 100; ++t) {
        const StepResult r = env.step(full_policy(M));
        CHECK(r.allocation.ru_assignment.size() == static_cast<std::size_t>(M + 3));
        hits += r.metrics.comm_hits;
        total += r.metrics.n_comm;
      }
    }
    return static_cast<double>(hits) / total;
  };
  const double small = comm_success(1), large = comm_success(10);
  CHECK(small > large);
  CHECK(small == 1.0);
}
