#include "wifimec/checkpoint.hpp"
#include "wifimec/config.hpp"
#include "wifimec/experiment.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace wifimec;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = "out";
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "INI configuration file (built-in defaults when omitted)");
  cmd->add_option("--seed", c.seed, "Seed of the run");
  cmd->add_option("--out", c.out, "Output directory; relative checkpoint directories live under it")->capture_default_str();
}

ExperimentConfig load(const Common& c) {
  ExperimentConfig cfg = c.config.empty() ? ExperimentConfig{} : load_config(c.config);
  if (c.config.empty()) cfg.validate();
  if (c.seed) cfg.sweep.seeds = {*c.seed};
  if (const std::filesystem::path dir(cfg.sweep.checkpoint_dir); dir.is_relative())
    cfg.sweep.checkpoint_dir = (std::filesystem::path(c.out) / dir).string();
  return cfg;
}

std::uint64_t seed_of(const Common& c, const ExperimentConfig& cfg) { return c.seed ? *c.seed : cfg.sweep.seeds.front(); }

void log(const std::string& line) { std::cerr << line << '\n'; }

PolicyKind policy_from(const std::string& name) {
  const auto p = parse_policy(name);
  if (!p) throw std::invalid_argument("unknown policy " + name);
  return *p;
}

int run_train(const Common& c, const std::string& policy_name, std::string checkpoint, int episodes) {
  const ExperimentConfig cfg = load(c);
  const PolicyKind policy = policy_from(policy_name);
  const std::uint64_t seed = seed_of(c, cfg);
  const std::filesystem::path out(c.out);
  if (checkpoint.empty()) checkpoint = (out / (policy_name + "_seed" + std::to_string(seed) + ".json")).string();
  RewardCurve curve{policy, seed, {}};
  const auto report = [&](int e, double r) {
    if ((e + 1) % 50 == 0) log(policy_name + " episode " + std::to_string(e + 1) + " reward " + std::to_string(r));
  };
  if (policy == PolicyKind::dtd3) {
    const int n = episodes > 0 ? episodes : cfg.dtd3.episodes;
    write_checkpoint(checkpoint, checkpoint_json(train_dtd3(cfg.env, cfg.dtd3, seed, n, &curve.rewards, report)));
  } else {
    const int n = episodes > 0 ? episodes : cfg.dqn.episodes;
    write_checkpoint(checkpoint, checkpoint_json(train_dqn_agent(cfg.env, cfg.dqn, seed, n, &curve.rewards, report)));
  }
  const std::vector<RewardCurve> curves{curve};
  write_text(out / ("train_" + policy_name + "_seed" + std::to_string(seed) + ".csv"), curves_csv(curves));
  std::cout << "checkpoint " << checkpoint << '\n';
  return 0;
}

int run_eval(const Common& c, const std::vector<std::string>& policies, const std::string& checkpoint, int slots,
             bool verbose) {
  const ExperimentConfig cfg = load(c);
  const std::uint64_t seed = seed_of(c, cfg);
  const int n_slots = slots > 0 ? slots : cfg.sweep.eval_slots;
  std::vector<MetricsRecord> records;
  std::vector<std::vector<SlotMetrics>> logs;
  for (const auto& name : policies) {
    const PolicyKind policy = policy_from(name);
    DecisionFn decide;
    if (is_learned(policy)) {
      if (checkpoint.empty()) throw std::invalid_argument("eval of " + name + " needs --checkpoint");
      decide = load_policy(checkpoint, cfg.env);
    } else {
      decide = baseline_policy(policy, cfg.env.scenario.n_compute, seed);
    }
    std::vector<SlotMetrics> log_slots;
    const EvalSummary s = evaluate(cfg.env, allocation_mode(policy), decide, seed, n_slots, &log_slots);
    records.push_back({policy, SweptParameter::f_mec_total, cfg.env.scenario.f_mec_total, seed, s.mean_total_cost,
                       s.qos, s.comm_success, s.mean_reward});
    logs.push_back(std::move(log_slots));
  }
  const std::filesystem::path out(c.out);
  write_text(out / "eval.csv", sweep_csv(records));
  if (verbose) write_text(out / "eval_slots.csv", slot_log_csv(records, logs));
  std::cout << sweep_csv(records);
  return 0;
}

int run_sweep_cmd(const Common& c, bool verbose) {
  const ExperimentConfig cfg = load(c);
  std::vector<std::vector<SlotMetrics>> logs;
  const auto records = run_sweep(cfg, log, verbose ? &logs : nullptr);
  const std::filesystem::path out(c.out);
  write_text(out / "sweep.csv", sweep_csv(records));
  if (verbose) write_text(out / "sweep_slots.csv", slot_log_csv(records, logs));
  for (const auto& p : write_sweep_plots(out, records)) std::cout << "plot " << p.string() << '\n';
  std::cout << "csv " << (out / "sweep.csv").string() << '\n';
  return 0;
}

int run_convergence_cmd(const Common& c, const std::vector<std::string>& names) {
  const ExperimentConfig cfg = load(c);
  std::vector<PolicyKind> policies;
  for (const auto& n : names) policies.push_back(policy_from(n));
  const std::filesystem::path out(c.out);
  const auto curves = run_convergence(cfg, policies, cfg.sweep.seeds, out / "checkpoints", log);
  write_text(out / "curves.csv", curves_csv(curves));
  std::cout << "plot " << write_curve_plot(out, curves).string() << '\n';
  for (const auto& curve : curves) {
    const PlateauStats st = plateau_stats(curve.rewards);
    std::cout << to_string(curve.policy) << " seed=" << curve.seed << " plateau=" << st.plateau
              << " reach_episode=" << st.reach_episode << '\n';
  }
  return 0;
}

int run_plot(const Common& c, const std::string& input) {
  const std::string text = read_text(input);
  const std::filesystem::path out(c.out);
  const std::string_view first = std::string_view(text).substr(0, text.find('\n'));
  if (first == kSweepCsvHeader) {
    for (const auto& p : write_sweep_plots(out, parse_sweep_csv(text))) std::cout << "plot " << p.string() << '\n';
  } else if (first == kCurveCsvHeader) {
    std::cout << "plot " << write_curve_plot(out, parse_curves_csv(text)).string() << '\n';
  } else {
    throw std::invalid_argument("plot: " + input + " is neither a sweep nor a curve CSV");
  }
  return 0;
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  std::replace(s.begin(), s.end(), '"', '\'');
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wi-Fi MEC offloading experiments"};
  app.require_subcommand(1);

  Common common;
  std::string policy, checkpoint, input;
  std::vector<std::string> policies{"dtd3", "dqn"};
  std::vector<std::string> eval_policies{"local", "full", "random"};
  int episodes = 0, slots = 0;
  bool verbose = false;

  auto* train = app.add_subcommand("train", "Train one learned policy and write its checkpoint");
  add_common(train, common);
  train->add_option("--policy", policy, "dtd3 or dqn")->required()->check(CLI::IsMember({"dtd3", "dqn"}));
  train->add_option("--checkpoint", checkpoint, "Checkpoint file to write");
  train->add_option("--episodes", episodes, "Override the configured episode count");

  auto* eval = app.add_subcommand("eval", "Evaluate policies on the configured scenario");
  add_common(eval, common);
  eval->add_option("--policy", eval_policies, "Policies to evaluate")
      ->check(CLI::IsMember({"local", "full", "random", "dqn", "dtd3"}));
  eval->add_option("--checkpoint", checkpoint, "Checkpoint of the learned policy");
  eval->add_option("--slots", slots, "Override the configured evaluation slots");
  eval->add_flag("--verbose", verbose, "Also write per-slot metrics");

  auto* sweep = app.add_subcommand("sweep", "Run the configured parameter sweep");
  add_common(sweep, common);
  sweep->add_flag("--verbose", verbose, "Also write per-slot metrics");

  auto* convergence = app.add_subcommand("convergence", "Train from scratch and record reward curves");
  add_common(convergence, common);
  convergence->add_option("--policy", policies, "Learned policies")->check(CLI::IsMember({"dtd3", "dqn"}));

  auto* plot = app.add_subcommand("plot", "Render SVG plots from a sweep or curve CSV");
  add_common(plot, common);
  plot->add_option("--input", input, "CSV file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error kind=usage message=\"" << one_line(e.what()) << "\"\n";
    return 2;
  }

  try {
    if (*train) return run_train(common, policy, checkpoint, episodes);
    if (*eval) return run_eval(common, eval_policies, checkpoint, slots, verbose);
    if (*sweep) return run_sweep_cmd(common, verbose);
    if (*convergence) return run_convergence_cmd(common, policies);
    if (*plot) return run_plot(common, input);
  } catch (const ConfigError& e) {
    std::cerr << "error kind=config message=\"" << one_line(e.what()) << "\"\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error kind=runtime message=\"" << one_line(e.what()) << "\"\n";
    return 1;
  }
  return 1;
}
