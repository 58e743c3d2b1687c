#include "wifimec/baselines.hpp"
#include "wifimec/env.hpp"

#include <doctest.h>

#include <cmath>

using namespace wifimec;

namespace {

struct SlotFixture {
  SlotTasks tasks;
  std::vector<double> gains;
  ScenarioConfig cfg;
  ChannelParams channel;
  RateTable table = RateTable::defaults();
  SlotView view() const { return {tasks, gains, cfg, channel, table}; }
};

// 980 data subcarriers at MCS 11 over one 13.6 us symbol.
constexpr double kFullBandRate = 980 * (25.0 / 3) / 13.6e-6;

}  // namespace

TEST_CASE("state layout") {
  ScenarioConfig cfg;
  CHECK(state_dim(cfg) == 14);
  EnvConfig ec;
  Env env(ec, AllocationMode::hungarian);
  const State s = env.reset(3);
  REQUIRE(s.raw.size() == 14);
  CHECK(s.raw[13] == ec.scenario.f_mec_total);
  CHECK(s.normalized[13] == doctest::Approx(1.0));
  for (int m = 0; m < 5; ++m) {
    CHECK(s.raw[m] == env.tasks().compute[m].data_bits);
    CHECK(s.raw[8 + m] == env.tasks().compute[m].cpu_cycles);
  }
  for (int n = 0; n < 3; ++n) CHECK(s.raw[5 + n] == env.tasks().comm[n].data_bits);
  CHECK(s.normalized.maxCoeff() <= 1.0 + 1e-12);
  CHECK(s.normalized.minCoeff() > 0.0);
}

TEST_CASE("reset is deterministic") {
  EnvConfig ec;
  Env a(ec, AllocationMode::hungarian), b(ec, AllocationMode::hungarian);
  const State x = a.reset(11), y = b.reset(11);
  CHECK(x.raw == y.raw);
  CHECK(x.normalized == y.normalized);
  for (std::size_t l = 0; l < a.gains().size(); ++l) CHECK(a.gains()[l] == b.gains()[l]);
  for (double d : a.distances()) {
    CHECK(d > 0);
    CHECK(d <= ec.scenario.cell_radius);
  }
  CHECK(a.reset(12).raw != x.raw);
}

TEST_CASE("trajectories are a function of seed and actions") {
  EnvConfig ec;
  Env a(ec, AllocationMode::hungarian), b(ec, AllocationMode::hungarian);
  a.reset(5);
  b.reset(5);
  Rng pa(1), pb(1);
  for (int t = 0; t < 30; ++t) {
    const StepResult ra = a.step(random_policy(5, pa));
    const StepResult rb = b.step(random_policy(5, pb));
    CHECK(ra.reward == rb.reward);
    CHECK(ra.next.raw == rb.next.raw);
  }
}

TEST_CASE("step contract") {
  EnvConfig ec;
  ec.scenario.slots_per_episode = 3;
  Env env(ec, AllocationMode::hungarian);
  CHECK_THROWS_AS(env.step(std::vector<int>(5, 0)), std::logic_error);
  env.reset(1);
  CHECK_THROWS_AS(env.step(std::vector<int>(4, 0)), std::invalid_argument);
  CHECK_FALSE(env.step(std::vector<int>(5, 0)).done);
  CHECK_FALSE(env.step(std::vector<int>(5, 0)).done);
  CHECK(env.step(std::vector<int>(5, 0)).done);
  CHECK_THROWS_AS(env.step(std::vector<int>(5, 0)), std::logic_error);
}

TEST_CASE("reward formula") {
  CHECK(compute_reward(2.0, 2.0, true) == 0.0);
  CHECK(compute_reward(1.0, 0.6, true) == doctest::Approx(0.4));
  CHECK(compute_reward(1.0, 2.0, true) == -1.0);
  CHECK(compute_reward(1.0, 0.1, false) == -1.0);
}

TEST_CASE("all-local actions earn zero reward when communication succeeds") {
  for (AllocationMode mode : {AllocationMode::hungarian, AllocationMode::even_split}) {
    EnvConfig ec;
    Env env(ec, mode);
    int checked = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      env.reset(seed);
      for (int t = 0; t < 40; ++t) {
        const StepResult r = env.step(local_policy(5));
        if (r.metrics.comm_hits == r.metrics.n_comm && !r.metrics.unreachable) {
          CHECK(r.reward == 0.0);
          ++checked;
        } else {
          CHECK(r.reward == -1.0);
        }
      }
    }
    CHECK(checked > 0);
  }
}

TEST_CASE("a missed communication deadline costs exactly -1") {
  SlotFixture f;
  f.cfg.n_compute = 2;
  f.cfg.n_comm = 1;
  f.tasks.compute = {{3e6, 1e9, 1.0}, {3e6, 1e9, 1.0}};
  f.tasks.comm = {{2e7, 1e-6}};
  f.gains = {1e-7, 1e-7, 1e-7};
  for (AllocationMode mode : {AllocationMode::hungarian, AllocationMode::even_split}) {
    const SlotOutcome o = evaluate_slot(f.view(), std::vector<int>{1, 1}, mode);
    CHECK(o.metrics.reward == -1.0);
    CHECK(o.metrics.comm_hits == 0);
  }
}

TEST_CASE("offloading that halves the cost earns 0.5") {
  // One compute STA, no communication. Local: c = 1e9 at 1 GHz, weighted 1.0.
  // Offload over the whole band at MCS 11 with d / R = 0.1:
  //   0.8 (c / f + 0.1) + 0.2 * 0.5 * 0.1 = 0.8 c / f + 0.09 = 0.5  =>  c / f = 0.5125.
  SlotFixture f;
  f.cfg.n_compute = 1;
  f.cfg.n_comm = 0;
  f.cfg.f_mec_total = 1e9 / 0.5125;
  f.tasks.compute = {{0.1 * kFullBandRate, 1e9, 10.0}};
  f.gains = {1e-7};
  const SlotOutcome o = evaluate_slot(f.view(), std::vector<int>{1}, AllocationMode::hungarian);
  REQUIRE(o.allocation.ru_assignment.at(0) == RuSize::k996);
  CHECK(o.metrics.c_local == 1.0);
  CHECK(o.metrics.total_cost == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(o.metrics.reward == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("local baseline cost") {
  SlotFixture f;
  SUBCASE("single unit task") {
    f.cfg.n_compute = 1;
    f.cfg.n_comm = 0;
    f.tasks.compute = {{3e6, 1e9, 1.0}};
    f.gains = {1e-7};
    CHECK(c_local_baseline(f.view(), AllocationMode::hungarian) == 1.0);
  }
  SUBCASE("two compute and one communication task") {
    // Locals: (1, 1) and (2, 2). Comm STA alone gets the whole band at MCS 11:
    // T = 1e7 / R, E = 0.5 T. Weighted = 0.8 * 3 + 0.2 * 3 + 0.9 T.
    f.cfg.n_compute = 2;
    f.cfg.n_comm = 1;
    f.tasks.compute = {{3e6, 1e9, 1.0}, {3e6, 2e9, 2.0}};
    f.tasks.comm = {{1e7, 1.0}};
    f.gains = {1e-7, 1e-7, 1e-7};
    CHECK(c_local_baseline(f.view(), AllocationMode::hungarian) == doctest::Approx(3.0 + 0.9 * 1e7 / kFullBandRate));
  }
}

TEST_CASE("slot metrics agree with the allocation and cost terms") {
  EnvConfig ec;
  ec.scenario.n_compute = 8;
  for (AllocationMode mode : {AllocationMode::hungarian, AllocationMode::even_split}) {
    Env env(ec, mode);
    env.reset(21);
    Rng rng(4);
    for (int t = 0; t < 40; ++t) {
      const Action a = random_policy(8, rng);
      const SlotView v = env.view();
      const SlotOutcome o = evaluate_slot(v, a, mode);
      CHECK_FALSE(check_constraints(o.allocation, a, ec.scenario).has_value());
      int qos = 0, comm = 0;
      double cost = 0;
      for (int m = 0; m < 8; ++m) {
        const CostPair& c = o.costs.compute[m];
        if (c.delay <= v.tasks.compute[m].deadline && !o.costs.unreachable[m]) ++qos;
        cost += c.weighted(ec.scenario.lambda);
        CHECK(o.costs.offloaded[m] == (a[m] == 1 && o.allocation.demoted.count(m) == 0));
      }
      for (int n = 0; n < 3; ++n) {
        const CostPair& c = o.costs.comm[n];
        if (c.delay <= v.tasks.comm[n].deadline && !o.costs.unreachable[8 + n]) ++comm;
        cost += c.weighted(ec.scenario.lambda);
      }
      CHECK(o.metrics.qos_hits == qos);
      CHECK(o.metrics.comm_hits == comm);
      CHECK(o.metrics.total_cost == doctest::Approx(cost));
      const StepResult r = env.step(a);
      CHECK(r.metrics.total_cost == o.metrics.total_cost);
      CHECK(r.reward == o.metrics.reward);
    }
  }
}

TEST_CASE("compute deadline penalty switch") {
  SlotFixture f;
  f.cfg.n_compute = 1;
  f.cfg.n_comm = 0;
  f.tasks.compute = {{3e6, 1e9, 0.5}};  // local needs 1 s
  f.gains = {1e-7};
  CHECK(evaluate_slot(f.view(), std::vector<int>{0}, AllocationMode::hungarian).metrics.reward == 0.0);
  f.cfg.penalize_compute_violation = true;
  CHECK(evaluate_slot(f.view(), std::vector<int>{0}, AllocationMode::hungarian).metrics.reward == -1.0);
}
