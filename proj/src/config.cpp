#include "wifimec/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <utility>

namespace wifimec {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

using Converter = std::function<double(double)>;

Converter scale(double factor) {
  return [factor](double v) { return v * factor; };
}

const std::vector<std::pair<std::string_view, Converter>>& suffixes(Quantity q) {
  static const std::map<Quantity, std::vector<std::pair<std::string_view, Converter>>> table{
      {Quantity::dimensionless, {}},
      {Quantity::frequency, {{"Hz", scale(1)}, {"kHz", scale(1e3)}, {"MHz", scale(1e6)}, {"GHz", scale(1e9)}}},
      {Quantity::power, {{"W", scale(1)}, {"mW", scale(1e-3)}, {"dBm", dbm_to_watts}}},
      {Quantity::bits,
       {{"bit", scale(1)},
        {"bits", scale(1)},
        {"kbit", scale(1e3)},
        {"kbits", scale(1e3)},
        {"Mbit", scale(1e6)},
        {"Mbits", scale(1e6)},
        {"Gbit", scale(1e9)},
        {"Gbits", scale(1e9)}}},
      {Quantity::cycles,
       {{"cycles", scale(1)},
        {"kcycles", scale(1e3)},
        {"Mcycles", scale(1e6)},
        {"Megacycles", scale(1e6)},
        {"Gcycles", scale(1e9)},
        {"Gigacycles", scale(1e9)}}},
      {Quantity::time, {{"s", scale(1)}, {"ms", scale(1e-3)}, {"us", scale(1e-6)}, {"ns", scale(1e-9)}}},
      {Quantity::length, {{"m", scale(1)}, {"cm", scale(1e-2)}, {"km", scale(1e3)}}},
      {Quantity::decibel, {{"dB", scale(1)}}},
      {Quantity::power_density, {{"W/Hz", scale(1)}, {"dBm/Hz", dbm_to_watts}}},
  };
  return table.at(q);
}

struct Setter {
  std::function<void(ExperimentConfig&, const std::string&)> apply;
};

using Section = std::map<std::string, Setter, std::less<>>;

int parse_int(std::string_view text) {
  const double v = parse_quantity(text, Quantity::dimensionless);
  if (v != std::floor(v) || std::abs(v) > 2147483647.0) throw ConfigError("expected an integer, got '" + std::string(text) + "'");
  return static_cast<int>(v);
}

std::uint64_t parse_u64(std::string_view text) {
  text = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw ConfigError("expected a nonnegative integer, got '" + std::string(text) + "'");
  return v;
}

Range parse_range(std::string_view text, Quantity q) {
  const auto items = parse_list(text);
  if (items.size() != 2) throw ConfigError("expected a range [lo, hi], got '" + std::string(text) + "'");
  return {parse_quantity(items[0], q), parse_quantity(items[1], q)};
}

Setter scenario_real(double ScenarioConfig::*field, Quantity q = Quantity::dimensionless) {
  return {[=](ExperimentConfig& c, const std::string& v) { c.env.scenario.*field = parse_quantity(v, q); }};
}

Setter scenario_int(int ScenarioConfig::*field) {
  return {[=](ExperimentConfig& c, const std::string& v) { c.env.scenario.*field = parse_int(v); }};
}

Setter scenario_range(Range ScenarioConfig::*field, Quantity q) {
  return {[=](ExperimentConfig& c, const std::string& v) { c.env.scenario.*field = parse_range(v, q); }};
}

Setter channel_real(double ChannelParams::*field, Quantity q = Quantity::dimensionless) {
  return {[=](ExperimentConfig& c, const std::string& v) { c.env.channel.*field = parse_quantity(v, q); }};
}

template <class Hp>
Setter hp_real(Hp ExperimentConfig::*hp, double Hp::*field) {
  return {[=](ExperimentConfig& c, const std::string& v) {
    (c.*hp).*field = parse_quantity(v, Quantity::dimensionless);
  }};
}

template <class Hp>
Setter hp_int(Hp ExperimentConfig::*hp, int Hp::*field) {
  return {[=](ExperimentConfig& c, const std::string& v) { (c.*hp).*field = parse_int(v); }};
}

struct Pending {
  std::optional<std::string> sweep_values;
};

std::map<std::string, Section, std::less<>> schema(Pending& pending) {
  using S = ScenarioConfig;
  using D = Dtd3Hyperparams;
  using Q = DqnHyperparams;
  constexpr auto dtd3 = &ExperimentConfig::dtd3;
  constexpr auto dqn = &ExperimentConfig::dqn;
  std::map<std::string, Section, std::less<>> s;

  s["scenario"] = {
      {"n_compute", scenario_int(&S::n_compute)},
      {"n_comm", scenario_int(&S::n_comm)},
      {"f_local", scenario_real(&S::f_local, Quantity::frequency)},
      {"f_mec_total", scenario_real(&S::f_mec_total, Quantity::frequency)},
      {"bandwidth_units", scenario_int(&S::bandwidth_units)},
      {"tx_power", scenario_real(&S::tx_power, Quantity::power)},
      {"lambda", scenario_real(&S::lambda)},
      {"cell_radius", scenario_real(&S::cell_radius, Quantity::length)},
      {"compute_data", scenario_range(&S::compute_data, Quantity::bits)},
      {"compute_cycles", scenario_range(&S::compute_cycles, Quantity::cycles)},
      {"comm_data", scenario_range(&S::comm_data, Quantity::bits)},
      {"deadline_factor", scenario_range(&S::deadline_factor, Quantity::dimensionless)},
      {"comm_slack", scenario_range(&S::comm_slack, Quantity::dimensionless)},
      {"slots_per_episode", scenario_int(&S::slots_per_episode)},
      {"seed", {[](ExperimentConfig& c, const std::string& v) { c.env.scenario.seed = parse_u64(v); }}},
      {"priority_weights",
       {[](ExperimentConfig& c, const std::string& v) {
         const auto items = parse_list(v);
         if (items.size() != 3) throw ConfigError("priority_weights needs three entries");
         for (int i = 0; i < 3; ++i) c.env.scenario.priority_weights[i] = parse_quantity(items[i], Quantity::dimensionless);
       }}},
      {"penalize_compute_violation",
       {[](ExperimentConfig& c, const std::string& v) { c.env.scenario.penalize_compute_violation = parse_bool(v); }}},
  };

  s["channel"] = {
      {"noise_psd", channel_real(&ChannelParams::noise_psd, Quantity::power_density)},
      {"ru_unit_bandwidth", channel_real(&ChannelParams::ru_unit_bandwidth, Quantity::frequency)},
      {"carrier_frequency", channel_real(&ChannelParams::carrier_frequency, Quantity::frequency)},
      {"pathloss_exponent", channel_real(&ChannelParams::pathloss_exponent)},
      {"pathloss_ref_db", channel_real(&ChannelParams::pathloss_ref_db, Quantity::decibel)},
      {"symbol_duration",
       {[](ExperimentConfig& c, const std::string& v) { c.env.table.symbol_duration = parse_quantity(v, Quantity::time); }}},
      {"snr_thresholds_db",
       {[](ExperimentConfig& c, const std::string& v) {
         const auto items = parse_list(v);
         if (items.size() != McsIndex::kCount) throw ConfigError("snr_thresholds_db needs 12 entries");
         std::vector<double> db;
         for (const auto& item : items) db.push_back(parse_quantity(item, Quantity::decibel));
         const double symbol = c.env.table.symbol_duration;
         c.env.table = RateTable::with_thresholds_db(db);
         c.env.table.symbol_duration = symbol;
       }}},
  };

  s["dtd3"] = {
      {"gamma", hp_real(dtd3, &D::gamma)},
      {"soft_update_rate", hp_real(dtd3, &D::soft_update_rate)},
      {"policy_delay", hp_int(dtd3, &D::policy_delay)},
      {"eta", hp_real(dtd3, &D::eta)},
      {"batch_size", hp_int(dtd3, &D::batch_size)},
      {"buffer_capacity", hp_int(dtd3, &D::buffer_capacity)},
      {"warmup", hp_int(dtd3, &D::warmup)},
      {"lr_policy", hp_real(dtd3, &D::lr_policy)},
      {"lr_critic", hp_real(dtd3, &D::lr_critic)},
      {"explore_std_start", hp_real(dtd3, &D::explore_std_start)},
      {"explore_std_end", hp_real(dtd3, &D::explore_std_end)},
      {"episodes", hp_int(dtd3, &D::episodes)},
      {"diffusion_steps", hp_int(dtd3, &D::diffusion_steps)},
      {"beta_min", hp_real(dtd3, &D::beta_min)},
      {"beta_max", hp_real(dtd3, &D::beta_max)},
      {"hidden_width", hp_int(dtd3, &D::hidden_width)},
      {"hidden_layers", hp_int(dtd3, &D::hidden_layers)},
      {"embed_dim", hp_int(dtd3, &D::embed_dim)},
      {"critic_on_target_action",
       {[](ExperimentConfig& c, const std::string& v) { c.dtd3.critic_on_target_action = parse_bool(v); }}},
  };

  s["dqn"] = {
      {"gamma", hp_real(dqn, &Q::gamma)},
      {"lr", hp_real(dqn, &Q::lr)},
      {"batch_size", hp_int(dqn, &Q::batch_size)},
      {"buffer_capacity", hp_int(dqn, &Q::buffer_capacity)},
      {"warmup", hp_int(dqn, &Q::warmup)},
      {"epsilon_start", hp_real(dqn, &Q::epsilon_start)},
      {"epsilon_end", hp_real(dqn, &Q::epsilon_end)},
      {"epsilon_decay_fraction", hp_real(dqn, &Q::epsilon_decay_fraction)},
      {"target_sync", hp_int(dqn, &Q::target_sync)},
      {"hidden_width", hp_int(dqn, &Q::hidden_width)},
      {"hidden_layers", hp_int(dqn, &Q::hidden_layers)},
      {"episodes", hp_int(dqn, &Q::episodes)},
  };

  s["sweep"] = {
      {"parameter",
       {[](ExperimentConfig& c, const std::string& v) {
         const auto p = parse_swept_parameter(trim(v));
         if (!p) throw ConfigError("unknown swept parameter '" + v + "'");
         c.sweep.parameter = *p;
       }}},
      {"values", {[&pending](ExperimentConfig&, const std::string& v) { pending.sweep_values = v; }}},
      {"policies",
       {[](ExperimentConfig& c, const std::string& v) {
         c.sweep.policies.clear();
         for (const auto& item : parse_list(v)) {
           const auto p = parse_policy(item);
           if (!p) throw ConfigError("unknown policy '" + item + "'");
           c.sweep.policies.push_back(*p);
         }
       }}},
      {"seeds",
       {[](ExperimentConfig& c, const std::string& v) {
         c.sweep.seeds.clear();
         for (const auto& item : parse_list(v)) c.sweep.seeds.push_back(parse_u64(item));
       }}},
      {"train_episodes", {[](ExperimentConfig& c, const std::string& v) { c.sweep.train_episodes = parse_int(v); }}},
      {"eval_slots", {[](ExperimentConfig& c, const std::string& v) { c.sweep.eval_slots = parse_int(v); }}},
      {"checkpoint_dir", {[](ExperimentConfig& c, const std::string& v) { c.sweep.checkpoint_dir = trim(v); }}},
      {"train_missing", {[](ExperimentConfig& c, const std::string& v) { c.sweep.train_missing = parse_bool(v); }}},
      {"checkpoint_scope",
       {[](ExperimentConfig& c, const std::string& v) {
         const auto s = parse_checkpoint_scope(trim(v));
         if (!s) throw ConfigError("unknown checkpoint scope '" + v + "'");
         c.sweep.checkpoint_scope = *s;
       }}},
  };
  return s;
}

}  // namespace

double parse_quantity(std::string_view text, Quantity q) {
  const std::string_view t = trim(text);
  double value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr == t.data()) throw ConfigError("expected a number, got '" + std::string(text) + "'");
  const std::string_view unit = trim(t.substr(static_cast<std::size_t>(ptr - t.data())));
  if (unit.empty()) return value;
  for (const auto& [suffix, convert] : suffixes(q))
    if (unit == suffix) return convert(value);
  throw ConfigError("unknown or misplaced unit '" + std::string(unit) + "' in '" + std::string(text) + "'");
}

std::vector<std::string> parse_list(std::string_view text) {
  std::string_view t = trim(text);
  if (!t.empty() && t.front() == '[') {
    if (t.back() != ']') throw ConfigError("unterminated list '" + std::string(text) + "'");
    t = trim(t.substr(1, t.size() - 2));
  }
  std::vector<std::string> items;
  if (t.empty()) return items;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = t.find(',', start);
    const std::string_view item = trim(t.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (item.empty()) throw ConfigError("empty list item in '" + std::string(text) + "'");
    items.emplace_back(item);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return items;
}

bool parse_bool(std::string_view text) {
  const std::string_view t = trim(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ConfigError("expected a boolean, got '" + std::string(text) + "'");
}

ExperimentConfig parse_config(std::string_view text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::istringstream in{std::string(text)};
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config: line " + std::to_string(e.line()) + ": " + e.message());
  }
  ExperimentConfig cfg;
  Pending pending;
  const auto sections = schema(pending);
  for (const auto& [name, section] : tree) {
    if (section.empty()) throw ConfigError("config: key '" + name + "' is outside any section");
    const auto sit = sections.find(name);
    if (sit == sections.end()) throw ConfigError("config: unknown section [" + name + "]");
    for (const auto& [key, node] : section) {
      const auto kit = sit->second.find(key);
      if (kit == sit->second.end()) throw ConfigError("config: unknown key '" + key + "' in [" + name + "]");
      try {
        kit->second.apply(cfg, node.data());
      } catch (const std::exception& e) {
        throw ConfigError("config: [" + name + "] " + key + ": " + e.what());
      }
    }
  }
  if (pending.sweep_values) {
    const Quantity q = cfg.sweep.parameter == SweptParameter::f_mec_total ? Quantity::frequency : Quantity::dimensionless;
    cfg.sweep.values.clear();
    try {
      for (const auto& item : parse_list(*pending.sweep_values)) cfg.sweep.values.push_back(parse_quantity(item, q));
    } catch (const std::exception& e) {
      throw ConfigError(std::string("config: [sweep] values: ") + e.what());
    }
  }
  try {
    cfg.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace wifimec
