#include "wifimec/checkpoint.hpp"
#include "wifimec/experiment.hpp"

#include <doctest.h>

#include <filesystem>

using namespace wifimec;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("wifimec_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

ExperimentConfig tiny(const fs::path& dir) {
  ExperimentConfig cfg;
  cfg.env.scenario.slots_per_episode = 20;
  cfg.dtd3.hidden_width = 8;
  cfg.dtd3.batch_size = 8;
  cfg.dtd3.warmup = 8;
  cfg.dtd3.episodes = 2;
  cfg.dqn.hidden_width = 8;
  cfg.dqn.batch_size = 8;
  cfg.dqn.warmup = 8;
  cfg.dqn.episodes = 2;
  cfg.sweep.eval_slots = 60;
  cfg.sweep.checkpoint_dir = (dir / "ckpt").string();
  return cfg;
}

}  // namespace

TEST_CASE("sweep record counts") {
  ExperimentConfig cfg = tiny(scratch_dir("counts"));
  cfg.sweep.values = {4e9};
  cfg.sweep.policies = {PolicyKind::full};
  cfg.sweep.seeds = {1};
  CHECK(run_sweep(cfg).size() == 1);
  cfg.sweep.values = {2e9, 6e9};
  cfg.sweep.policies = {PolicyKind::local, PolicyKind::random, PolicyKind::dqn};
  cfg.sweep.seeds = {1, 2, 3};
  const auto records = run_sweep(cfg);
  CHECK(records.size() == 18);
  for (std::size_t i = 1; i < records.size(); ++i) CHECK_FALSE(canonical_less(records[i], records[i - 1]));
  for (const auto& r : records) {
    CHECK(r.qos >= 0);
    CHECK(r.qos <= 1);
    CHECK(r.comm_success >= 0);
    CHECK(r.comm_success <= 1);
  }
}

TEST_CASE("local cost does not depend on MEC capacity") {
  ExperimentConfig cfg = tiny(scratch_dir("local"));
  cfg.sweep.policies = {PolicyKind::local};
  cfg.sweep.seeds = {4};
  const auto records = run_sweep(cfg);
  REQUIRE(records.size() == 5);
  for (const auto& r : records) CHECK(r.mean_total_cost == records.front().mean_total_cost);
}

TEST_CASE("aggregates equal recomputation from per-slot logs") {
  ExperimentConfig cfg = tiny(scratch_dir("logs"));
  cfg.sweep.values = {3e9};
  cfg.sweep.policies = {PolicyKind::random, PolicyKind::full};
  cfg.sweep.seeds = {1, 2};
  std::vector<std::vector<SlotMetrics>> logs;
  const auto records = run_sweep(cfg, {}, &logs);
  REQUIRE(logs.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    REQUIRE(logs[i].size() == 60);
    double cost = 0, reward = 0;
    long q = 0, qn = 0, c = 0, cn = 0;
    for (const auto& m : logs[i]) {
      cost += m.total_cost;
      reward += m.reward;
      q += m.qos_hits, qn += m.n_compute, c += m.comm_hits, cn += m.n_comm;
    }
    CHECK(records[i].mean_total_cost == doctest::Approx(cost / 60).epsilon(1e-12));
    CHECK(records[i].mean_reward == doctest::Approx(reward / 60).epsilon(1e-12));
    CHECK(records[i].qos == doctest::Approx(static_cast<double>(q) / qn));
    CHECK(records[i].comm_success == doctest::Approx(static_cast<double>(c) / cn));
  }
  const std::string csv = slot_log_csv(records, logs);
  CHECK(csv.rfind(kSlotLogCsvHeader, 0) == 0);
}

TEST_CASE("missing checkpoints are reported by path") {
  ExperimentConfig cfg = tiny(scratch_dir("missing"));
  cfg.sweep.values = {2e9};
  cfg.sweep.policies = {PolicyKind::dtd3};
  cfg.sweep.seeds = {5};
  cfg.sweep.train_missing = false;
  const std::string expected = checkpoint_path(cfg.sweep, PolicyKind::dtd3, 2e9, 5).string();
  CHECK_THROWS_WITH_AS(run_sweep(cfg), doctest::Contains(expected.c_str()), std::runtime_error);
  cfg.sweep.train_missing = true;
  CHECK(run_sweep(cfg).size() == 1);
  CHECK(fs::exists(expected));
  cfg.sweep.train_missing = false;
  CHECK(run_sweep(cfg).size() == 1);
}

TEST_CASE("shared checkpoints span MEC capacities only") {
  ExperimentConfig cfg = tiny(scratch_dir("shared"));
  cfg.sweep.checkpoint_scope = CheckpointScope::shared;
  cfg.sweep.values = {2e9, 8e9};
  cfg.sweep.policies = {PolicyKind::dqn};
  cfg.sweep.seeds = {1};
  CHECK(run_sweep(cfg).size() == 2);
  CHECK(fs::exists(base_checkpoint_path(cfg.sweep.checkpoint_dir, PolicyKind::dqn, 1)));
  cfg.sweep.parameter = SweptParameter::n_compute;
  cfg.sweep.values = {2, 4};
  CHECK_THROWS(cfg.sweep.validate());
}

TEST_CASE("n_compute sweep changes the scenario size") {
  ExperimentConfig cfg = tiny(scratch_dir("ncompute"));
  cfg.sweep.parameter = SweptParameter::n_compute;
  cfg.sweep.values = {2, 6};
  cfg.sweep.policies = {PolicyKind::full, PolicyKind::dtd3};
  cfg.sweep.seeds = {1};
  const auto records = run_sweep(cfg);
  CHECK(records.size() == 4);
  CHECK(with_swept_value(cfg.env, SweptParameter::n_compute, 6).scenario.n_compute == 6);
  CHECK(with_swept_value(cfg.env, SweptParameter::f_mec_total, 3e9).scenario.f_mec_total == 3e9);
}

TEST_CASE("sweep csv") {
  const std::vector<MetricsRecord> records{
      {PolicyKind::random, SweptParameter::f_mec_total, 4e9, 2, 3.25, 0.75, 0.5, 0.125},
      {PolicyKind::dqn, SweptParameter::f_mec_total, 2e9, 1, 4.5, 0.6, 1.0, -0.25},
  };
  const std::string csv = sweep_csv(records);
  CHECK(csv.substr(0, csv.find('\n')) == "policy,swept_param,swept_value,seed,mean_total_cost,qos,comm_success,mean_reward");
  CHECK(csv ==
        "policy,swept_param,swept_value,seed,mean_total_cost,qos,comm_success,mean_reward\n"
        "dqn,f_mec_total,2000000000,1,4.5,0.6,1,-0.25\n"
        "random,f_mec_total,4000000000,2,3.25,0.75,0.5,0.125\n");
  CHECK(sweep_csv(records) == csv);
  CHECK(sweep_csv(parse_sweep_csv(csv)) == csv);
  CHECK_THROWS(parse_sweep_csv("policy,seed\n"));

  const fs::path dir = scratch_dir("csv");
  write_text(dir / "a.csv", csv);
  write_text(dir / "b.csv", sweep_csv(records));
  CHECK(read_text(dir / "a.csv") == read_text(dir / "b.csv"));
  CHECK_THROWS(write_text("/proc/forbidden/x.csv", csv));
}

TEST_CASE("plots") {
  const fs::path dir = scratch_dir("plots");
  const std::vector<MetricsRecord> records{
      {PolicyKind::local, SweptParameter::f_mec_total, 2e9, 1, 5.0, 0.5, 1.0, 0.0},
      {PolicyKind::local, SweptParameter::f_mec_total, 4e9, 1, 5.0, 0.5, 1.0, 0.0},
      {PolicyKind::full, SweptParameter::n_compute, 2, 1, 2.0, 0.9, 0.6, 0.3},
  };
  const auto files = write_sweep_plots(dir, records);
  CHECK(files.size() == 6);
  for (const auto& f : files) {
    CHECK(fs::exists(f));
    CHECK(read_text(f).find("<svg") == 0);
  }
  const std::vector<RewardCurve> curves{{PolicyKind::dtd3, 1, {0.1, 0.2, 0.3}}, {PolicyKind::dqn, 1, {0.0, 0.1, 0.1}}};
  CHECK(fs::exists(write_curve_plot(dir, curves)));
  const std::string ccsv = curves_csv(curves);
  CHECK(ccsv.rfind(kCurveCsvHeader, 0) == 0);
  CHECK(curves_csv(parse_curves_csv(ccsv)) == ccsv);
}

TEST_CASE("convergence runs") {
  const fs::path dir = scratch_dir("convergence");
  ExperimentConfig cfg = tiny(dir);
  cfg.dtd3.episodes = 3;
  const auto a = run_convergence(cfg, {PolicyKind::dtd3, PolicyKind::dqn}, {1, 2}, dir / "ckpt");
  REQUIRE(a.size() == 4);
  CHECK(a[0].rewards.size() == 3);
  CHECK(a[2].rewards.size() == 2);
  const auto b = run_convergence(cfg, {PolicyKind::dtd3}, {1});
  CHECK(b[0].rewards == a[0].rewards);
  CHECK(fs::exists(base_checkpoint_path(dir / "ckpt", PolicyKind::dqn, 2)));
  CHECK_THROWS(run_convergence(cfg, {PolicyKind::full}, {1}));
}

TEST_CASE("plateau statistics") {
  std::vector<double> r(200, 1.0);
  for (int e = 0; e < 50; ++e) r[e] = e / 50.0;
  const PlateauStats st = plateau_stats(r, 100, 10, 0.95);
  CHECK(st.plateau == 1.0);
  CHECK(st.reach_episode > 40);
  CHECK(st.reach_episode < 60);
  std::vector<double> neg(150, -0.5);
  CHECK(plateau_stats(neg).reach_episode == 9);
  CHECK(plateau_stats(std::vector<double>{}).reach_episode == -1);
}

TEST_CASE("evaluation is common across policies") {
  EnvConfig cfg;
  const DecisionFn local = baseline_policy(PolicyKind::local, 5, 1);
  const EvalSummary a = evaluate(cfg, AllocationMode::even_split, local, 3, 150);
  const EvalSummary b = evaluate(cfg, AllocationMode::even_split, local, 3, 150);
  CHECK(a.mean_total_cost == b.mean_total_cost);
  CHECK(a.slots == 150);
  CHECK(a.mean_reward == 0.0);
  CHECK_THROWS(baseline_policy(PolicyKind::dqn, 5, 1));
}
