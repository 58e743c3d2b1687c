#pragma once

#include "wifimec/baselines.hpp"
#include "wifimec/dqn.hpp"
#include "wifimec/dtd3.hpp"
#include "wifimec/env.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wifimec {

enum class SweptParameter { n_compute, f_mec_total };

std::string_view to_string(SweptParameter p);
std::optional<SweptParameter> parse_swept_parameter(std::string_view name);

/// Where learned policies of a sweep get their parameters: one checkpoint
/// per swept value, or one per seed trained on the base scenario and reused
/// at every value (only meaningful when the state layout does not change).
enum class CheckpointScope { per_value, shared };

std::string_view to_string(CheckpointScope s);
std::optional<CheckpointScope> parse_checkpoint_scope(std::string_view name);

struct SweepSpec {
  SweptParameter parameter = SweptParameter::f_mec_total;
  std::vector<double> values{2e9, 4e9, 6e9, 8e9, 10e9};
  std::vector<PolicyKind> policies{kPolicyKinds.begin(), kPolicyKinds.end()};
  std::vector<std::uint64_t> seeds{1, 2, 3};
  int train_episodes = 0;  // 0: the episode count of each agent's hyperparameters
  int eval_slots = 1000;
  std::string checkpoint_dir = "checkpoints";
  bool train_missing = true;
  CheckpointScope checkpoint_scope = CheckpointScope::per_value;

  void validate() const;
};

struct ExperimentConfig {
  EnvConfig env;
  Dtd3Hyperparams dtd3;
  DqnHyperparams dqn;
  SweepSpec sweep;

  void validate() const;
};

/// The scenario with the swept parameter set to `value`.
EnvConfig with_swept_value(const EnvConfig& env, SweptParameter p, double value);

struct MetricsRecord {
  PolicyKind policy = PolicyKind::local;
  SweptParameter parameter = SweptParameter::f_mec_total;
  double swept_value = 0;
  std::uint64_t seed = 0;
  double mean_total_cost = 0;
  double qos = 0;           // compute tasks within their deadline
  double comm_success = 0;  // communication tasks within their deadline
  double mean_reward = 0;
};

/// Canonical order: policy name, swept parameter, swept value, seed.
bool canonical_less(const MetricsRecord& a, const MetricsRecord& b);

/// Maps a normalized state to binary offloading decisions.
using DecisionFn = std::function<Action(const State&)>;

struct EvalSummary {
  double mean_total_cost = 0;
  double qos = 0;
  double comm_success = 0;
  double mean_reward = 0;
  long slots = 0;
};

/// Runs `eval_slots` slots with environment seeds derived from `seed` alone,
/// so every policy sees the same positions and tasks. When `log` is set it
/// receives the raw metrics of every slot.
EvalSummary evaluate(const EnvConfig& env, AllocationMode mode, const DecisionFn& decide, std::uint64_t seed,
                     int eval_slots, std::vector<SlotMetrics>* log = nullptr);

/// Recomputes the aggregate from per-slot metrics.
EvalSummary summarize(std::span<const SlotMetrics> log);

std::filesystem::path checkpoint_path(const SweepSpec& spec, PolicyKind policy, double swept_value,
                                      std::uint64_t seed);
/// Checkpoint name used for the base scenario (convergence runs and shared sweeps).
std::filesystem::path base_checkpoint_path(const std::filesystem::path& dir, PolicyKind policy,
                                           std::uint64_t seed);

/// Seeds of the agent and of its training episodes for one run.
std::uint64_t agent_seed(std::uint64_t seed);
std::uint64_t training_seed(std::uint64_t seed);

Dtd3Agent train_dtd3(const EnvConfig& env, const Dtd3Hyperparams& hp, std::uint64_t seed, int episodes,
                     std::vector<double>* curve = nullptr, const EpisodeCallback& on_episode = {});
DqnAgent train_dqn_agent(const EnvConfig& env, const DqnHyperparams& hp, std::uint64_t seed, int episodes,
                         std::vector<double>* curve = nullptr, const EpisodeCallback& on_episode = {});

/// Deterministic decision function of a stored checkpoint.
DecisionFn load_policy(const std::filesystem::path& checkpoint, const EnvConfig& env);

/// Decision function of a baseline; `random` draws from a stream of `seed`.
DecisionFn baseline_policy(PolicyKind kind, int n_compute, std::uint64_t seed);

using ProgressFn = std::function<void(const std::string&)>;

/// Evaluates every (policy, value, seed) cell. Learned policies load their
/// checkpoint, or train and save it when `train_missing` is set; a missing
/// checkpoint otherwise throws naming the file. Records are returned in
/// canonical order.
std::vector<MetricsRecord> run_sweep(const ExperimentConfig& cfg, const ProgressFn& progress = {},
                                     std::vector<std::vector<SlotMetrics>>* logs = nullptr);

struct RewardCurve {
  PolicyKind policy = PolicyKind::dtd3;
  std::uint64_t seed = 0;
  std::vector<double> rewards;  // mean per-slot reward of each episode
};

/// Trains each learned policy from scratch per seed on the base scenario.
/// Checkpoints are written to `checkpoint_dir` when it is nonempty.
std::vector<RewardCurve> run_convergence(const ExperimentConfig& cfg, const std::vector<PolicyKind>& policies,
                                         const std::vector<std::uint64_t>& seeds,
                                         const std::filesystem::path& checkpoint_dir = {},
                                         const ProgressFn& progress = {});

struct PlateauStats {
  double plateau = 0;     // mean over the final `tail` episodes
  int reach_episode = -1; // first episode whose trailing window mean reaches the target, -1 if never
};

/// Target is `fraction` of the plateau, measured from the plateau's sign
/// so negative plateaus are handled: reach when window mean >= plateau - (1 - fraction)|plateau|.
PlateauStats plateau_stats(std::span<const double> rewards, int tail = 100, int window = 10,
                           double fraction = 0.95);

inline constexpr std::string_view kSweepCsvHeader =
    "policy,swept_param,swept_value,seed,mean_total_cost,qos,comm_success,mean_reward";
inline constexpr std::string_view kCurveCsvHeader = "policy,seed,episode,reward";

std::string sweep_csv(std::span<const MetricsRecord> records);
std::vector<MetricsRecord> parse_sweep_csv(std::string_view text);
std::string curves_csv(std::span<const RewardCurve> curves);
std::vector<RewardCurve> parse_curves_csv(std::string_view text);

inline constexpr std::string_view kSlotLogCsvHeader =
    "policy,swept_param,swept_value,seed,slot,total_cost,delay,energy,c_local,qos_hits,n_compute,comm_hits,n_comm,"
    "unreachable,reward";

/// Raw per-slot metrics of sweep cells; `logs[i]` belongs to `records[i]`.
std::string slot_log_csv(std::span<const MetricsRecord> records, std::span<const std::vector<SlotMetrics>> logs);

void write_text(const std::filesystem::path& path, std::string_view text);
std::string read_text(const std::filesystem::path& path);

/// One SVG per metric (cost, QoS, communication success) against the swept
/// value, a line per policy averaged over seeds. Returns the written files.
std::vector<std::filesystem::path> write_sweep_plots(const std::filesystem::path& dir,
                                                     std::span<const MetricsRecord> records);
/// Reward against episode, a line per policy averaged over seeds.
std::filesystem::path write_curve_plot(const std::filesystem::path& dir, std::span<const RewardCurve> curves);

}  // namespace wifimec
