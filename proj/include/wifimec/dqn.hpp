#pragma once

#include "wifimec/dtd3.hpp"
#include "wifimec/env.hpp"
#include "wifimec/nn.hpp"
#include "wifimec/replay.hpp"

#include <cstdint>

namespace wifimec {

/// Joint action space is 2^M; beyond this the output layer is unreasonable.
inline constexpr int kMaxDqnComputeStas = 12;

/// Bit m of the index is the decision of compute STA m (LSB = first STA).
int encode_action(std::span<const int> action);
Action decode_action(int index, int n_compute);

struct DqnHyperparams {
  double gamma = 0.95;
  double lr = 3e-4;
  int batch_size = 128;
  int buffer_capacity = 100000;
  int warmup = 128;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  double epsilon_decay_fraction = 0.5;  // of all training steps
  int target_sync = 200;                // gradient steps between hard target copies
  int hidden_width = 256;
  int hidden_layers = 2;
  int episodes = 800;

  void validate() const;
};

class DqnAgent {
 public:
  /// Throws std::invalid_argument when action_dim exceeds kMaxDqnComputeStas.
  DqnAgent(int state_dim, int action_dim, DqnHyperparams hp, std::uint64_t seed);

  /// Epsilon-greedy decision.
  Action act(const Vector& state, double epsilon);
  /// Greedy decision; ties go to the lowest joint index.
  Action decide(const Vector& state) const;
  /// One TD step on the batch; returns the mean squared TD error.
  double update(const Batch& batch);
  void sync_target();

  int state_dim() const { return state_dim_; }
  int action_dim() const { return action_dim_; }
  int joint_actions() const { return 1 << action_dim_; }
  const DqnHyperparams& hyperparams() const { return hp_; }
  Net& q_net() { return q_; }
  const Net& q_net() const { return q_; }
  const Net& target_net() const { return target_; }
  Rng& rng() { return rng_; }
  const Rng& rng() const { return rng_; }
  long updates() const { return updates_; }

  static DqnAgent restore(int state_dim, int action_dim, DqnHyperparams hp, Net q, Net target, Rng rng);

 private:
  DqnAgent() = default;

  int state_dim_ = 0;
  int action_dim_ = 0;
  DqnHyperparams hp_;
  Rng rng_;
  Net q_, target_;
  nn::Adam<Real> opt_;
  long updates_ = 0;
};

/// Epsilon-greedy DQN training with replay and periodic target sync.
/// Episode e resets the env with derive_seed(seed, e).
TrainResult train_dqn(Env& env, DqnAgent& agent, int episodes, std::uint64_t seed,
                      const EpisodeCallback& on_episode = {});

}  // namespace wifimec
