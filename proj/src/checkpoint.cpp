#include "wifimec/checkpoint.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace wifimec {

using nlohmann::json;

namespace {

json to_json(const Eigen::Ref<const Vector>& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

std::string rng_state(const Rng& rng) {
  std::ostringstream os;
  os << rng;
  return os.str();
}

Rng rng_from_state(const std::string& state) {
  Rng rng;
  std::istringstream is(state);
  is >> rng;
  if (!is) throw std::runtime_error("checkpoint: corrupt RNG state");
  return rng;
}

json header(std::string_view kind, int state_dim, int action_dim) {
  json j;
  j["format"] = kCheckpointFormat;
  j["version"] = kCheckpointVersion;
  j["kind"] = kind;
  j["state_dim"] = state_dim;
  j["action_dim"] = action_dim;
  return j;
}

}  // namespace

json to_json(const Net& net) {
  json layers = json::array();
  for (int l = 0; l < net.layer_count(); ++l) {
    const Matrix& w = net.weights()[l];
    layers.push_back({{"weights", to_json(w.reshaped())}, {"bias", to_json(net.biases()[l])}});
  }
  return {{"sizes", net.sizes()}, {"layers", layers}};
}

Net net_from_json(const json& j) {
  const auto sizes = j.at("sizes").get<std::vector<int>>();
  Rng scratch;
  Net net(sizes, scratch);
  const json& layers = j.at("layers");
  if (static_cast<int>(layers.size()) != net.layer_count()) throw std::runtime_error("checkpoint: layer count mismatch");
  for (int l = 0; l < net.layer_count(); ++l) {
    const auto w = layers[l].at("weights").get<std::vector<double>>();
    const auto b = layers[l].at("bias").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(w.size()) != net.weights()[l].size() ||
        static_cast<Eigen::Index>(b.size()) != net.biases()[l].size())
      throw std::runtime_error("checkpoint: parameter count mismatch");
    net.weights()[l].reshaped() = Eigen::Map<const Vector>(w.data(), static_cast<Eigen::Index>(w.size()));
    net.biases()[l] = Eigen::Map<const Vector>(b.data(), static_cast<Eigen::Index>(b.size()));
  }
  return net;
}

json to_json(const Dtd3Hyperparams& hp) {
  return {{"gamma", hp.gamma},
          {"soft_update_rate", hp.soft_update_rate},
          {"policy_delay", hp.policy_delay},
          {"eta", hp.eta},
          {"batch_size", hp.batch_size},
          {"buffer_capacity", hp.buffer_capacity},
          {"warmup", hp.warmup},
          {"lr_policy", hp.lr_policy},
          {"lr_critic", hp.lr_critic},
          {"explore_std_start", hp.explore_std_start},
          {"explore_std_end", hp.explore_std_end},
          {"episodes", hp.episodes},
          {"diffusion_steps", hp.diffusion_steps},
          {"beta_min", hp.beta_min},
          {"beta_max", hp.beta_max},
          {"hidden_width", hp.hidden_width},
          {"hidden_layers", hp.hidden_layers},
          {"embed_dim", hp.embed_dim},
          {"critic_on_target_action", hp.critic_on_target_action}};
}

Dtd3Hyperparams dtd3_hyperparams_from_json(const json& j) {
  Dtd3Hyperparams hp;
  hp.gamma = j.at("gamma");
  hp.soft_update_rate = j.at("soft_update_rate");
  hp.policy_delay = j.at("policy_delay");
  hp.eta = j.at("eta");
  hp.batch_size = j.at("batch_size");
  hp.buffer_capacity = j.at("buffer_capacity");
  hp.warmup = j.at("warmup");
  hp.lr_policy = j.at("lr_policy");
  hp.lr_critic = j.at("lr_critic");
  hp.explore_std_start = j.at("explore_std_start");
  hp.explore_std_end = j.at("explore_std_end");
  hp.episodes = j.at("episodes");
  hp.diffusion_steps = j.at("diffusion_steps");
  hp.beta_min = j.at("beta_min");
  hp.beta_max = j.at("beta_max");
  hp.hidden_width = j.at("hidden_width");
  hp.hidden_layers = j.at("hidden_layers");
  hp.embed_dim = j.at("embed_dim");
  hp.critic_on_target_action = j.at("critic_on_target_action");
  return hp;
}

json to_json(const DqnHyperparams& hp) {
  return {{"gamma", hp.gamma},
          {"lr", hp.lr},
          {"batch_size", hp.batch_size},
          {"buffer_capacity", hp.buffer_capacity},
          {"warmup", hp.warmup},
          {"epsilon_start", hp.epsilon_start},
          {"epsilon_end", hp.epsilon_end},
          {"epsilon_decay_fraction", hp.epsilon_decay_fraction},
          {"target_sync", hp.target_sync},
          {"hidden_width", hp.hidden_width},
          {"hidden_layers", hp.hidden_layers},
          {"episodes", hp.episodes}};
}

DqnHyperparams dqn_hyperparams_from_json(const json& j) {
  DqnHyperparams hp;
  hp.gamma = j.at("gamma");
  hp.lr = j.at("lr");
  hp.batch_size = j.at("batch_size");
  hp.buffer_capacity = j.at("buffer_capacity");
  hp.warmup = j.at("warmup");
  hp.epsilon_start = j.at("epsilon_start");
  hp.epsilon_end = j.at("epsilon_end");
  hp.epsilon_decay_fraction = j.at("epsilon_decay_fraction");
  hp.target_sync = j.at("target_sync");
  hp.hidden_width = j.at("hidden_width");
  hp.hidden_layers = j.at("hidden_layers");
  hp.episodes = j.at("episodes");
  return hp;
}

json checkpoint_json(const Dtd3Agent& agent) {
  json j = header("dtd3", agent.state_dim(), agent.action_dim());
  j["hyperparams"] = to_json(agent.hyperparams());
  j["schedule"] = {{"betas", agent.schedule().betas}};
  j["embed_dim"] = agent.policy().embed_dim();
  j["networks"] = {{"policy", to_json(agent.policy().net())},
                   {"target_policy", to_json(agent.target_policy().net())},
                   {"critic1", to_json(agent.critic(0).net())},
                   {"critic2", to_json(agent.critic(1).net())},
                   {"target_critic1", to_json(agent.target_critic(0).net())},
                   {"target_critic2", to_json(agent.target_critic(1).net())}};
  j["rng"] = rng_state(agent.rng());
  return j;
}

json checkpoint_json(const DqnAgent& agent) {
  json j = header("dqn", agent.state_dim(), agent.action_dim());
  j["hyperparams"] = to_json(agent.hyperparams());
  j["networks"] = {{"q", to_json(agent.q_net())}, {"target_q", to_json(agent.target_net())}};
  j["rng"] = rng_state(agent.rng());
  return j;
}

std::string checkpoint_kind(const json& j) {
  if (!j.is_object() || j.value("format", "") != kCheckpointFormat)
    throw std::runtime_error("checkpoint: not a wifimec checkpoint");
  if (j.value("version", -1) != kCheckpointVersion)
    throw std::runtime_error("checkpoint: unsupported version " + std::to_string(j.value("version", -1)));
  return j.at("kind").get<std::string>();
}

Dtd3Agent dtd3_from_checkpoint(const json& j) {
  if (checkpoint_kind(j) != "dtd3") throw std::runtime_error("checkpoint: expected kind dtd3");
  const int S = j.at("state_dim");
  const int M = j.at("action_dim");
  const int E = j.at("embed_dim");
  const json& nets = j.at("networks");
  return Dtd3Agent::restore(
      S, M, dtd3_hyperparams_from_json(j.at("hyperparams")),
      DiffusionSchedule::from_betas(j.at("schedule").at("betas").get<std::vector<double>>()),
      NoiseNet(net_from_json(nets.at("policy")), M, S, E), NoiseNet(net_from_json(nets.at("target_policy")), M, S, E),
      {Critic(net_from_json(nets.at("critic1")), S, M), Critic(net_from_json(nets.at("critic2")), S, M)},
      {Critic(net_from_json(nets.at("target_critic1")), S, M), Critic(net_from_json(nets.at("target_critic2")), S, M)},
      rng_from_state(j.at("rng")));
}

DqnAgent dqn_from_checkpoint(const json& j) {
  if (checkpoint_kind(j) != "dqn") throw std::runtime_error("checkpoint: expected kind dqn");
  const json& nets = j.at("networks");
  return DqnAgent::restore(j.at("state_dim"), j.at("action_dim"), dqn_hyperparams_from_json(j.at("hyperparams")),
                           net_from_json(nets.at("q")), net_from_json(nets.at("target_q")), rng_from_state(j.at("rng")));
}

std::string serialize_checkpoint(const json& j) { return j.dump() + "\n"; }

void write_checkpoint(const std::filesystem::path& path, const json& j) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint " + path.string());
  out << serialize_checkpoint(j);
  if (!out) throw std::runtime_error("cannot write checkpoint " + path.string());
}

json read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("missing checkpoint " + path.string());
  json j = json::parse(in);
  checkpoint_kind(j);
  return j;
}

}  // namespace wifimec
