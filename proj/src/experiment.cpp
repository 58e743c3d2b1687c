#include "wifimec/experiment.hpp"

#include "wifimec/checkpoint.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace wifimec {

namespace {

constexpr std::uint64_t kEvalStream = 0x65'7661'6cULL;
constexpr std::uint64_t kRandomPolicyStream = 0x72'616e'64ULL;
constexpr std::uint64_t kAgentStream = 0x61'6765'6eULL;
constexpr std::uint64_t kTrainStream = 0x74'7261'696eULL;

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.emplace_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("csv: bad number '" + s + "'");
  return v;
}

std::uint64_t parse_seed(const std::string& s) {
  std::size_t used = 0;
  const unsigned long long v = std::stoull(s, &used);
  if (used != s.size()) throw std::invalid_argument("csv: bad seed '" + s + "'");
  return v;
}

int episodes_or(int override_episodes, int fallback) { return override_episodes > 0 ? override_episodes : fallback; }

}  // namespace

std::string_view to_string(SweptParameter p) {
  return p == SweptParameter::n_compute ? "n_compute" : "f_mec_total";
}

std::optional<SweptParameter> parse_swept_parameter(std::string_view name) {
  if (name == "n_compute") return SweptParameter::n_compute;
  if (name == "f_mec_total") return SweptParameter::f_mec_total;
  return std::nullopt;
}

std::string_view to_string(CheckpointScope s) { return s == CheckpointScope::per_value ? "per_value" : "shared"; }

std::optional<CheckpointScope> parse_checkpoint_scope(std::string_view name) {
  if (name == "per_value") return CheckpointScope::per_value;
  if (name == "shared") return CheckpointScope::shared;
  return std::nullopt;
}

void SweepSpec::validate() const {
  if (values.empty()) throw std::invalid_argument("sweep: values must be nonempty");
  if (policies.empty()) throw std::invalid_argument("sweep: policies must be nonempty");
  if (seeds.empty()) throw std::invalid_argument("sweep: seeds must be nonempty");
  if (eval_slots < 1) throw std::invalid_argument("sweep: eval_slots must be positive");
  if (train_episodes < 0) throw std::invalid_argument("sweep: train_episodes must be nonnegative");
  for (double v : values) {
    if (!(v > 0) || !std::isfinite(v)) throw std::invalid_argument("sweep: values must be positive");
    if (parameter == SweptParameter::n_compute && v != std::floor(v))
      throw std::invalid_argument("sweep: n_compute values must be integers");
  }
  if (parameter == SweptParameter::n_compute && checkpoint_scope == CheckpointScope::shared)
    throw std::invalid_argument("sweep: shared checkpoints cannot span different n_compute values");
}

void ExperimentConfig::validate() const {
  env.validate();
  dtd3.validate();
  dqn.validate();
  sweep.validate();
  for (double v : sweep.values) with_swept_value(env, sweep.parameter, v).validate();
}

EnvConfig with_swept_value(const EnvConfig& env, SweptParameter p, double value) {
  EnvConfig out = env;
  if (p == SweptParameter::n_compute)
    out.scenario.n_compute = static_cast<int>(std::lround(value));
  else
    out.scenario.f_mec_total = value;
  return out;
}

bool canonical_less(const MetricsRecord& a, const MetricsRecord& b) {
  const auto key = [](const MetricsRecord& r) {
    return std::make_tuple(to_string(r.policy), to_string(r.parameter), r.swept_value, r.seed);
  };
  return key(a) < key(b);
}

EvalSummary summarize(std::span<const SlotMetrics> log) {
  EvalSummary s;
  double cost = 0, reward = 0;
  long qos = 0, comm = 0, n_compute = 0, n_comm = 0;
  for (const SlotMetrics& m : log) {
    cost += m.total_cost;
    reward += m.reward;
    qos += m.qos_hits;
    comm += m.comm_hits;
    n_compute += m.n_compute;
    n_comm += m.n_comm;
  }
  s.slots = static_cast<long>(log.size());
  if (s.slots == 0) return s;
  s.mean_total_cost = cost / s.slots;
  s.mean_reward = reward / s.slots;
  s.qos = n_compute > 0 ? static_cast<double>(qos) / n_compute : 1.0;
  s.comm_success = n_comm > 0 ? static_cast<double>(comm) / n_comm : 1.0;
  return s;
}

EvalSummary evaluate(const EnvConfig& cfg, AllocationMode mode, const DecisionFn& decide, std::uint64_t seed,
                     int eval_slots, std::vector<SlotMetrics>* log) {
  if (eval_slots < 1) throw std::invalid_argument("evaluate: eval_slots must be positive");
  Env env(cfg, mode);
  const std::uint64_t base = derive_seed(seed, kEvalStream);
  std::vector<SlotMetrics> slots;
  slots.reserve(static_cast<std::size_t>(eval_slots));
  for (std::uint64_t episode = 0; static_cast<int>(slots.size()) < eval_slots; ++episode) {
    State state = env.reset(derive_seed(base, episode));
    bool done = false;
    while (!done && static_cast<int>(slots.size()) < eval_slots) {
      StepResult res = env.step(decide(state));
      slots.push_back(res.metrics);
      done = res.done;
      state = std::move(res.next);
    }
  }
  const EvalSummary summary = summarize(slots);
  if (log) *log = std::move(slots);
  return summary;
}

std::filesystem::path checkpoint_path(const SweepSpec& spec, PolicyKind policy, double swept_value,
                                      std::uint64_t seed) {
  if (spec.checkpoint_scope == CheckpointScope::shared)
    return base_checkpoint_path(spec.checkpoint_dir, policy, seed);
  return std::filesystem::path(spec.checkpoint_dir) /
         (std::string(to_string(policy)) + "_" + std::string(to_string(spec.parameter)) + "_" +
          format_number(swept_value) + "_seed" + std::to_string(seed) + ".json");
}

std::filesystem::path base_checkpoint_path(const std::filesystem::path& dir, PolicyKind policy, std::uint64_t seed) {
  return dir / (std::string(to_string(policy)) + "_base_seed" + std::to_string(seed) + ".json");
}

std::uint64_t agent_seed(std::uint64_t seed) { return derive_seed(seed, kAgentStream); }
std::uint64_t training_seed(std::uint64_t seed) { return derive_seed(seed, kTrainStream); }

Dtd3Agent train_dtd3(const EnvConfig& cfg, const Dtd3Hyperparams& hp, std::uint64_t seed, int episodes,
                     std::vector<double>* curve, const EpisodeCallback& on_episode) {
  Env env(cfg, AllocationMode::hungarian);
  Dtd3Agent agent(env.state_dim(), env.action_dim(), hp, agent_seed(seed));
  TrainResult res = train(env, agent, episodes, training_seed(seed), on_episode);
  if (curve) *curve = std::move(res.episode_rewards);
  return agent;
}

DqnAgent train_dqn_agent(const EnvConfig& cfg, const DqnHyperparams& hp, std::uint64_t seed, int episodes,
                         std::vector<double>* curve, const EpisodeCallback& on_episode) {
  Env env(cfg, AllocationMode::hungarian);
  DqnAgent agent(env.state_dim(), env.action_dim(), hp, agent_seed(seed));
  TrainResult res = train_dqn(env, agent, episodes, training_seed(seed), on_episode);
  if (curve) *curve = std::move(res.episode_rewards);
  return agent;
}

DecisionFn load_policy(const std::filesystem::path& path, const EnvConfig& cfg) {
  const nlohmann::json j = read_checkpoint(path);
  const std::string kind = checkpoint_kind(j);
  const int S = state_dim(cfg.scenario);
  const int M = cfg.scenario.n_compute;
  if (j.at("state_dim").get<int>() != S || j.at("action_dim").get<int>() != M)
    throw std::runtime_error("checkpoint " + path.string() + " does not match the scenario dimensions");
  if (kind == "dtd3") {
    auto agent = std::make_shared<Dtd3Agent>(dtd3_from_checkpoint(j));
    return [agent](const State& s) { return agent->decide(s.normalized); };
  }
  if (kind == "dqn") {
    auto agent = std::make_shared<DqnAgent>(dqn_from_checkpoint(j));
    return [agent](const State& s) { return agent->decide(s.normalized); };
  }
  throw std::runtime_error("checkpoint " + path.string() + " has unknown kind " + kind);
}

DecisionFn baseline_policy(PolicyKind kind, int n_compute, std::uint64_t seed) {
  switch (kind) {
    case PolicyKind::local:
      return [n_compute](const State&) { return local_policy(n_compute); };
    case PolicyKind::full:
      return [n_compute](const State&) { return full_policy(n_compute); };
    case PolicyKind::random: {
      auto rng = std::make_shared<Rng>(derive_seed(seed, kRandomPolicyStream));
      return [n_compute, rng](const State&) { return random_policy(n_compute, *rng); };
    }
    default:
      throw std::invalid_argument("baseline_policy: " + std::string(to_string(kind)) + " is a learned policy");
  }
}

namespace {

void train_and_save(PolicyKind policy, const EnvConfig& cfg, const ExperimentConfig& exp, std::uint64_t seed,
                    int episodes, const std::filesystem::path& path) {
  if (policy == PolicyKind::dtd3)
    write_checkpoint(path, checkpoint_json(train_dtd3(cfg, exp.dtd3, seed, episodes)));
  else
    write_checkpoint(path, checkpoint_json(train_dqn_agent(cfg, exp.dqn, seed, episodes)));
}

int episodes_for(PolicyKind policy, const ExperimentConfig& exp) {
  return episodes_or(exp.sweep.train_episodes, policy == PolicyKind::dtd3 ? exp.dtd3.episodes : exp.dqn.episodes);
}

}  // namespace

std::vector<MetricsRecord> run_sweep(const ExperimentConfig& exp, const ProgressFn& progress,
                                     std::vector<std::vector<SlotMetrics>>* logs) {
  const SweepSpec& spec = exp.sweep;
  spec.validate();
  struct Cell {
    MetricsRecord record;
    std::vector<SlotMetrics> log;
  };
  std::vector<Cell> cells;
  for (double value : spec.values) {
    const EnvConfig cfg = with_swept_value(exp.env, spec.parameter, value);
    cfg.validate();
    for (PolicyKind policy : spec.policies) {
      for (std::uint64_t seed : spec.seeds) {
        DecisionFn decide;
        if (is_learned(policy)) {
          const std::filesystem::path path = checkpoint_path(spec, policy, value, seed);
          if (!std::filesystem::exists(path)) {
            if (!spec.train_missing) throw std::runtime_error("missing checkpoint " + path.string());
            const EnvConfig& train_cfg = spec.checkpoint_scope == CheckpointScope::shared ? exp.env : cfg;
            if (progress) progress("train " + std::string(to_string(policy)) + " -> " + path.string());
            train_and_save(policy, train_cfg, exp, seed, episodes_for(policy, exp), path);
          }
          decide = load_policy(path, cfg);
        } else {
          decide = baseline_policy(policy, cfg.scenario.n_compute, seed);
        }
        Cell cell;
        const EvalSummary s =
            evaluate(cfg, allocation_mode(policy), decide, seed, spec.eval_slots, logs ? &cell.log : nullptr);
        cell.record = {policy, spec.parameter, value, seed, s.mean_total_cost, s.qos, s.comm_success, s.mean_reward};
        if (progress)
          progress("eval " + std::string(to_string(policy)) + " " + std::string(to_string(spec.parameter)) + "=" +
                   format_number(value) + " seed=" + std::to_string(seed) +
                   " cost=" + format_number(s.mean_total_cost) + " comm=" + format_number(s.comm_success));
        cells.push_back(std::move(cell));
      }
    }
  }
  std::stable_sort(cells.begin(), cells.end(),
                   [](const Cell& a, const Cell& b) { return canonical_less(a.record, b.record); });
  std::vector<MetricsRecord> records;
  if (logs) logs->clear();
  for (Cell& c : cells) {
    records.push_back(c.record);
    if (logs) logs->push_back(std::move(c.log));
  }
  return records;
}

std::vector<RewardCurve> run_convergence(const ExperimentConfig& exp, const std::vector<PolicyKind>& policies,
                                         const std::vector<std::uint64_t>& seeds,
                                         const std::filesystem::path& checkpoint_dir, const ProgressFn& progress) {
  if (policies.empty() || seeds.empty()) throw std::invalid_argument("convergence: policies and seeds must be nonempty");
  exp.env.validate();
  std::vector<RewardCurve> curves;
  for (PolicyKind policy : policies) {
    if (!is_learned(policy))
      throw std::invalid_argument("convergence: " + std::string(to_string(policy)) + " is not a learned policy");
    for (std::uint64_t seed : seeds) {
      RewardCurve curve{policy, seed, {}};
      const auto report = [&](int e, double r) {
        if (progress && (e + 1) % 50 == 0)
          progress(std::string(to_string(policy)) + " seed=" + std::to_string(seed) + " episode " +
                   std::to_string(e + 1) + " reward " + format_number(r));
      };
      nlohmann::json ckpt;
      if (policy == PolicyKind::dtd3)
        ckpt = checkpoint_json(train_dtd3(exp.env, exp.dtd3, seed, exp.dtd3.episodes, &curve.rewards, report));
      else
        ckpt = checkpoint_json(train_dqn_agent(exp.env, exp.dqn, seed, exp.dqn.episodes, &curve.rewards, report));
      if (!checkpoint_dir.empty()) write_checkpoint(base_checkpoint_path(checkpoint_dir, policy, seed), ckpt);
      curves.push_back(std::move(curve));
    }
  }
  return curves;
}

PlateauStats plateau_stats(std::span<const double> rewards, int tail, int window, double fraction) {
  PlateauStats st;
  const int n = static_cast<int>(rewards.size());
  if (n == 0 || tail < 1 || window < 1) return st;
  const int t = std::min(tail, n);
  st.plateau = std::accumulate(rewards.end() - t, rewards.end(), 0.0) / t;
  const double target = st.plateau - (1.0 - fraction) * std::abs(st.plateau);
  double sum = 0;
  for (int e = 0; e < n; ++e) {
    sum += rewards[e];
    if (e >= window) sum -= rewards[e - window];
    const int len = std::min(e + 1, window);
    if (e + 1 >= window && sum / len >= target) {
      st.reach_episode = e;
      break;
    }
  }
  return st;
}

std::string sweep_csv(std::span<const MetricsRecord> records) {
  std::vector<MetricsRecord> sorted(records.begin(), records.end());
  std::stable_sort(sorted.begin(), sorted.end(), canonical_less);
  std::string out(kSweepCsvHeader);
  out += '\n';
  for (const MetricsRecord& r : sorted) {
    out += std::string(to_string(r.policy)) + ',' + std::string(to_string(r.parameter)) + ',' +
           format_number(r.swept_value) + ',' + std::to_string(r.seed) + ',' + format_number(r.mean_total_cost) +
           ',' + format_number(r.qos) + ',' + format_number(r.comm_success) + ',' + format_number(r.mean_reward) +
           '\n';
  }
  return out;
}

std::vector<MetricsRecord> parse_sweep_csv(std::string_view text) {
  const auto lines = lines_of(text);
  if (lines.empty() || lines.front() != kSweepCsvHeader) throw std::invalid_argument("csv: unexpected sweep header");
  std::vector<MetricsRecord> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = split(lines[i], ',');
    if (f.size() != 8) throw std::invalid_argument("csv: line " + std::to_string(i + 1) + " has wrong field count");
    const auto policy = parse_policy(f[0]);
    const auto param = parse_swept_parameter(f[1]);
    if (!policy || !param) throw std::invalid_argument("csv: line " + std::to_string(i + 1) + " has unknown names");
    out.push_back({*policy, *param, parse_double(f[2]), parse_seed(f[3]), parse_double(f[4]), parse_double(f[5]),
                   parse_double(f[6]), parse_double(f[7])});
  }
  return out;
}

std::string curves_csv(std::span<const RewardCurve> curves) {
  std::string out(kCurveCsvHeader);
  out += '\n';
  for (const RewardCurve& c : curves)
    for (std::size_t e = 0; e < c.rewards.size(); ++e)
      out += std::string(to_string(c.policy)) + ',' + std::to_string(c.seed) + ',' + std::to_string(e) + ',' +
             format_number(c.rewards[e]) + '\n';
  return out;
}

std::vector<RewardCurve> parse_curves_csv(std::string_view text) {
  const auto lines = lines_of(text);
  if (lines.empty() || lines.front() != kCurveCsvHeader) throw std::invalid_argument("csv: unexpected curve header");
  std::vector<RewardCurve> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = split(lines[i], ',');
    if (f.size() != 4) throw std::invalid_argument("csv: line " + std::to_string(i + 1) + " has wrong field count");
    const auto policy = parse_policy(f[0]);
    if (!policy) throw std::invalid_argument("csv: line " + std::to_string(i + 1) + " has an unknown policy");
    const std::uint64_t seed = parse_seed(f[1]);
    if (out.empty() || out.back().policy != *policy || out.back().seed != seed) out.push_back({*policy, seed, {}});
    if (parse_seed(f[2]) != out.back().rewards.size())
      throw std::invalid_argument("csv: line " + std::to_string(i + 1) + " breaks the episode sequence");
    out.back().rewards.push_back(parse_double(f[3]));
  }
  return out;
}

std::string slot_log_csv(std::span<const MetricsRecord> records, std::span<const std::vector<SlotMetrics>> logs) {
  if (records.size() != logs.size()) throw std::invalid_argument("slot_log_csv: records and logs differ in length");
  std::string out(kSlotLogCsvHeader);
  out += '\n';
  for (std::size_t i = 0; i < records.size(); ++i) {
    const MetricsRecord& r = records[i];
    const std::string key = std::string(to_string(r.policy)) + ',' + std::string(to_string(r.parameter)) + ',' +
                            format_number(r.swept_value) + ',' + std::to_string(r.seed) + ',';
    for (std::size_t t = 0; t < logs[i].size(); ++t) {
      const SlotMetrics& m = logs[i][t];
      out += key + std::to_string(t) + ',' + format_number(m.total_cost) + ',' + format_number(m.delay) + ',' +
             format_number(m.energy) + ',' + format_number(m.c_local) + ',' + std::to_string(m.qos_hits) + ',' +
             std::to_string(m.n_compute) + ',' + std::to_string(m.comm_hits) + ',' + std::to_string(m.n_comm) + ',' +
             (m.unreachable ? "1" : "0") + ',' + format_number(m.reward) + '\n';
    }
  }
  return out;
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

std::string_view color_of(std::string_view name) {
  static const std::map<std::string_view, std::string_view> colors{
      {"local", "#7f7f7f"}, {"full", "#d62728"}, {"random", "#ff7f0e"}, {"dqn", "#1f77b4"}, {"dtd3", "#2ca02c"}};
  const auto it = colors.find(name);
  return it == colors.end() ? "#000000" : it->second;
}

std::string svg_line_chart(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                           const std::vector<Series>& series) {
  constexpr double W = 640, H = 420, L = 70, R = 130, T = 40, B = 50;
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series)
    for (auto [x, y] : s.points) {
      x0 = std::min(x0, x), x1 = std::max(x1, x);
      y0 = std::min(y0, y), y1 = std::max(y1, y);
    }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x0 -= 0.5, x1 += 0.5;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad, y1 += pad;
  const auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  const auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << title << "</text>\n";
  o << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
    << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x0 + (x1 - x0) * i / 4, yv = y0 + (y1 - y0) * i / 4;
    o << "<text x=\"" << px(xv) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">" << format_number(xv)
      << "</text>\n";
    o << "<text x=\"" << L - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">"
      << format_number(std::round(yv * 1e4) / 1e4) << "</text>\n";
    o << "<line x1=\"" << L << "\" y1=\"" << py(yv) << "\" x2=\"" << W - R << "\" y2=\"" << py(yv)
      << "\" stroke=\"#dddddd\"/>\n";
  }
  o << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << xlabel
    << "</text>\n";
  o << "<text transform=\"translate(16," << (T + H - B) / 2 << ") rotate(-90)\" text-anchor=\"middle\">" << ylabel
    << "</text>\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const auto color = color_of(s.name);
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (auto [x, y] : s.points) o << px(x) << ',' << py(y) << ' ';
    o << "\"/>\n";
    const double ly = T + 10 + 18.0 * static_cast<double>(i);
    o << "<line x1=\"" << W - R + 12 << "\" y1=\"" << ly << "\" x2=\"" << W - R + 36 << "\" y2=\"" << ly
      << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << W - R + 42 << "\" y=\"" << ly + 4 << "\">" << s.name << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace

std::vector<std::filesystem::path> write_sweep_plots(const std::filesystem::path& dir,
                                                     std::span<const MetricsRecord> records) {
  struct Metric {
    const char* file;
    const char* label;
    double MetricsRecord::*field;
  };
  static constexpr std::array<Metric, 3> metrics{{{"cost", "mean total cost", &MetricsRecord::mean_total_cost},
                                                  {"qos", "QoS ratio", &MetricsRecord::qos},
                                                  {"comm_success", "communication success",
                                                   &MetricsRecord::comm_success}}};
  std::map<SweptParameter, std::vector<MetricsRecord>> by_param;
  for (const auto& r : records) by_param[r.parameter].push_back(r);
  std::vector<std::filesystem::path> written;
  for (const auto& [param, recs] : by_param) {
    const double scale = param == SweptParameter::f_mec_total ? 1e-9 : 1.0;
    const std::string xlabel = param == SweptParameter::f_mec_total ? "MEC capacity (GHz)" : "computing STAs";
    for (const Metric& m : metrics) {
      std::map<PolicyKind, std::map<double, std::pair<double, int>>> acc;
      for (const auto& r : recs) {
        auto& cell = acc[r.policy][r.swept_value];
        cell.first += r.*m.field;
        cell.second += 1;
      }
      std::vector<Series> series;
      for (PolicyKind p : kPolicyKinds) {
        const auto it = acc.find(p);
        if (it == acc.end()) continue;
        Series s{std::string(to_string(p)), {}};
        for (const auto& [x, sum] : it->second) s.points.emplace_back(x * scale, sum.first / sum.second);
        series.push_back(std::move(s));
      }
      const auto path = dir / (std::string(to_string(param)) + "_" + m.file + ".svg");
      write_text(path, svg_line_chart(std::string(m.label) + " vs " + xlabel, xlabel, m.label, series));
      written.push_back(path);
    }
  }
  return written;
}

std::filesystem::path write_curve_plot(const std::filesystem::path& dir, std::span<const RewardCurve> curves) {
  std::map<PolicyKind, std::vector<std::pair<double, int>>> acc;
  for (const auto& c : curves) {
    auto& v = acc[c.policy];
    if (v.size() < c.rewards.size()) v.resize(c.rewards.size());
    for (std::size_t e = 0; e < c.rewards.size(); ++e) v[e].first += c.rewards[e], v[e].second += 1;
  }
  std::vector<Series> series;
  for (PolicyKind p : kPolicyKinds) {
    const auto it = acc.find(p);
    if (it == acc.end()) continue;
    Series s{std::string(to_string(p)), {}};
    for (std::size_t e = 0; e < it->second.size(); ++e)
      s.points.emplace_back(static_cast<double>(e), it->second[e].first / it->second[e].second);
    series.push_back(std::move(s));
  }
  const auto path = dir / "convergence_reward.svg";
  write_text(path, svg_line_chart("mean reward vs episode", "episode", "mean reward", series));
  return path;
}

}  // namespace wifimec
