#pragma once

#include "wifimec/env.hpp"
#include "wifimec/nn.hpp"
#include "wifimec/replay.hpp"
#include "wifimec/types.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace wifimec {

using Net = nn::Mlp<Real>;

/// Noise schedule of the K-step diffusion chain. Vectors are indexed by k-1.
struct DiffusionSchedule {
  std::vector<double> betas;
  std::vector<double> alphas;      // 1 - beta_k
  std::vector<double> alpha_bars;  // prod_{i<=k} alpha_i

  int steps() const { return static_cast<int>(betas.size()); }
  double beta(int k) const { return betas.at(k - 1); }
  double alpha(int k) const { return alphas.at(k - 1); }
  double alpha_bar(int k) const { return alpha_bars.at(k - 1); }

  static DiffusionSchedule from_betas(std::vector<double> betas);
  /// beta_k = 1 - exp(-beta_min/K - (beta_max - beta_min)(2k - 1)/(2K^2)).
  static DiffusionSchedule variance_preserving(int K, double beta_min = 0.1, double beta_max = 10.0);
};

/// Sinusoidal embedding of the diffusion step, one column per entry.
Matrix timestep_embedding(std::span<const int> steps, int dim);

/// epsilon_theta(a^k, s, k): predicts the noise in a^k given the state.
class NoiseNet {
 public:
  NoiseNet() = default;
  NoiseNet(int action_dim, int state_dim, std::vector<int> hidden, int embed_dim, Rng& rng);
  NoiseNet(Net net, int action_dim, int state_dim, int embed_dim);

  Matrix predict(const Matrix& actions, const Matrix& states, std::span<const int> steps) const;
  Matrix predict(const Matrix& actions, const Matrix& states, std::span<const int> steps, Net::Tape& tape) const;
  /// Gradient with respect to the action input; parameter gradients go to `grad`.
  Matrix backward(const Net::Tape& tape, const Matrix& dout, Net::Grad* grad) const;

  int action_dim() const { return action_dim_; }
  int state_dim() const { return state_dim_; }
  int embed_dim() const { return embed_dim_; }
  Net& net() { return net_; }
  const Net& net() const { return net_; }

 private:
  Matrix input(const Matrix& actions, const Matrix& states, std::span<const int> steps) const;

  Net net_;
  int action_dim_ = 0;
  int state_dim_ = 0;
  int embed_dim_ = 0;
};

/// Q(s, a) with the action in [-1, 1]^M.
class Critic {
 public:
  Critic() = default;
  Critic(int state_dim, int action_dim, std::vector<int> hidden, Rng& rng);
  Critic(Net net, int state_dim, int action_dim);

  Matrix q(const Matrix& states, const Matrix& actions) const;  // 1 x B
  Matrix q(const Matrix& states, const Matrix& actions, Net::Tape& tape) const;
  /// Gradient with respect to the action input.
  Matrix backward(const Net::Tape& tape, const Matrix& dq, Net::Grad* grad) const;

  int state_dim() const { return state_dim_; }
  int action_dim() const { return action_dim_; }
  Net& net() { return net_; }
  const Net& net() const { return net_; }

 private:
  Net net_;
  int state_dim_ = 0;
  int action_dim_ = 0;
};

/// Gaussian draws of one reverse chain: the starting a^K and the noise
/// injected at steps k = K..2 (`injected[k]`; slots 0 and 1 stay empty).
struct ChainNoise {
  Matrix initial;
  std::vector<Matrix> injected;
};

ChainNoise draw_chain_noise(int action_dim, int batch, int steps, Rng& rng);

/// Reverse diffusion a^K -> a^0 with an arbitrary noise predictor
/// `eps(a_k, states, k) -> Matrix`. No noise is injected at k = 1. The
/// result is not clamped.
template <typename Predictor>
Matrix reverse_chain(Predictor&& eps, const Matrix& states, const DiffusionSchedule& schedule,
                     const ChainNoise& noise) {
  Matrix a = noise.initial;
  for (int k = schedule.steps(); k >= 1; --k) {
    const double alpha = schedule.alpha(k);
    const double coef = schedule.beta(k) / std::sqrt(alpha * (1.0 - schedule.alpha_bar(k)));
    Matrix next = a / std::sqrt(alpha) - coef * eps(a, states, k);
    if (k > 1) next += std::sqrt(schedule.beta(k)) * noise.injected.at(k);
    a = std::move(next);
  }
  return a;
}

Matrix clamp_unit(const Matrix& a);

/// Draws a continuous action in [-1, 1]^M per state column.
Matrix sample_action(const NoiseNet& policy, const Matrix& states, const DiffusionSchedule& schedule, Rng& rng);
Matrix sample_action(const NoiseNet& policy, const Matrix& states, const DiffusionSchedule& schedule,
                     const ChainNoise& noise);

/// a_m = 1 iff a_m > 0.
Action binarize(const Vector& a);

/// Per-sample diffusion step k and injected noise of the denoising loss.
struct DiffusionDraws {
  std::vector<int> steps;
  Matrix noise;
};

DiffusionDraws draw_diffusion(int action_dim, int batch, int steps, Rng& rng);

/// Mean over the batch of ||eps - eps_theta(sqrt(abar_k) a0 + sqrt(1 - abar_k) eps, s, k)||^2.
double diffusion_loss(const NoiseNet& policy, const Matrix& states, const Matrix& actions,
                      const DiffusionSchedule& schedule, const DiffusionDraws& draws, Net::Grad* grad = nullptr);
double diffusion_loss(const NoiseNet& policy, const Matrix& states, const Matrix& actions,
                      const DiffusionSchedule& schedule, Rng& rng);

/// Mean |Q(s, a)| over stored pairs; the constant scale of the Q loss.
double q_normalizer(const Critic& critic, const Matrix& states, const Matrix& actions);

/// -eta / normalizer * mean Q(s, a0) with a0 drawn through the reverse chain.
/// Gradients flow through the chain into the policy; the critic is frozen.
double q_loss(const NoiseNet& policy, const Critic& critic, const Matrix& states, double normalizer,
              const DiffusionSchedule& schedule, double eta, const ChainNoise& noise, Net::Grad* grad = nullptr);

struct PolicyLoss {
  double diffusion = 0;
  double q = 0;
  double total() const { return diffusion + q; }
};

/// Diffusion loss plus Q loss on one batch with fixed draws; accumulates the
/// combined gradient into `grad`.
PolicyLoss policy_loss(const NoiseNet& policy, const Critic& critic, const Batch& batch,
                       const DiffusionSchedule& schedule, double eta, const DiffusionDraws& draws,
                       const ChainNoise& chain, Net::Grad* grad = nullptr);

/// y = r + gamma * (1 - done) * min(q1_next, q2_next).
Vector td_targets(const Vector& rewards, const Vector& dones, const Matrix& q1_next, const Matrix& q2_next,
                  double gamma);

struct Dtd3Hyperparams {
  double gamma = 0.95;
  double soft_update_rate = 0.005;
  int policy_delay = 2;
  double eta = 1.0;
  int batch_size = 128;
  int buffer_capacity = 100000;
  int warmup = 128;  // transitions stored before updates start
  double lr_policy = 3e-4;
  double lr_critic = 3e-4;
  double explore_std_start = 0.1;
  double explore_std_end = 0.01;
  int episodes = 800;
  int diffusion_steps = 5;
  double beta_min = 0.1;
  double beta_max = 10.0;
  int hidden_width = 256;
  int hidden_layers = 2;
  int embed_dim = 16;
  // Regress critics at a' drawn from the target policy at s_t instead of the
  // stored action (ablation of the literal training loop).
  bool critic_on_target_action = false;

  void validate() const;
};

struct CriticLosses {
  double q1 = 0;
  double q2 = 0;
};

/// Diffusion policy with twin critics and target copies of all three.
class Dtd3Agent {
 public:
  Dtd3Agent(int state_dim, int action_dim, Dtd3Hyperparams hp, std::uint64_t seed);

  /// Continuous action for one state, Gaussian exploration of `explore_std`
  /// added before clamping.
  Vector act(const Vector& state, double explore_std);
  Action decide(const Vector& state) { return binarize(act(state, 0.0)); }

  CriticLosses critic_update(const Batch& batch);
  PolicyLoss policy_update(const Batch& batch);
  void soft_update_targets();

  int state_dim() const { return state_dim_; }
  int action_dim() const { return action_dim_; }
  const Dtd3Hyperparams& hyperparams() const { return hp_; }
  const DiffusionSchedule& schedule() const { return schedule_; }
  NoiseNet& policy() { return policy_; }
  const NoiseNet& policy() const { return policy_; }
  const NoiseNet& target_policy() const { return target_policy_; }
  Critic& critic(int i) { return i == 0 ? critic1_ : critic2_; }
  const Critic& critic(int i) const { return i == 0 ? critic1_ : critic2_; }
  const Critic& target_critic(int i) const { return i == 0 ? target_critic1_ : target_critic2_; }
  Rng& rng() { return rng_; }
  const Rng& rng() const { return rng_; }

  /// Rebuilds an agent from stored parameters (optimizer state starts fresh).
  static Dtd3Agent restore(int state_dim, int action_dim, Dtd3Hyperparams hp, DiffusionSchedule schedule,
                           NoiseNet policy, NoiseNet target_policy, std::array<Critic, 2> critics,
                           std::array<Critic, 2> targets, Rng rng);

 private:
  Dtd3Agent() = default;
  void make_optimizers();

  int state_dim_ = 0;
  int action_dim_ = 0;
  Dtd3Hyperparams hp_;
  DiffusionSchedule schedule_;
  Rng rng_;
  NoiseNet policy_, target_policy_;
  Critic critic1_, critic2_, target_critic1_, target_critic2_;
  nn::Adam<Real> policy_opt_, critic1_opt_, critic2_opt_;
};

struct TrainResult {
  std::vector<double> episode_rewards;  // mean per-slot reward of each episode
  long updates = 0;
};

using EpisodeCallback = std::function<void(int episode, double reward)>;

/// Off-policy training loop: act with exploration, store the continuous
/// action, update critics every step and the policy plus targets every
/// `policy_delay` critic updates. Episode e resets the env with
/// derive_seed(seed, e). Throws std::runtime_error on a non-finite loss.
TrainResult train(Env& env, Dtd3Agent& agent, int episodes, std::uint64_t seed,
                  const EpisodeCallback& on_episode = {});

}  // namespace wifimec
