#include "wifimec/dqn.hpp"

#include <sstream>
#include <stdexcept>
#include <string>

namespace wifimec {

int encode_action(std::span<const int> action) {
  int index = 0;
  for (std::size_t m = 0; m < action.size(); ++m)
    if (action[m]) index |= 1 << m;
  return index;
}

Action decode_action(int index, int n_compute) {
  Action a(n_compute);
  for (int m = 0; m < n_compute; ++m) a[m] = (index >> m) & 1;
  return a;
}

void DqnHyperparams::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("dqn: ") + what);
  };
  require(gamma >= 0 && gamma < 1, "gamma must be in [0, 1)");
  require(lr > 0, "lr must be > 0");
  require(batch_size >= 1 && buffer_capacity >= batch_size, "need 1 <= batch_size <= buffer_capacity");
  require(warmup >= 0, "warmup must be >= 0");
  require(epsilon_start >= 0 && epsilon_start <= 1 && epsilon_end >= 0 && epsilon_end <= 1,
          "epsilon must be in [0, 1]");
  require(epsilon_decay_fraction > 0 && epsilon_decay_fraction <= 1, "epsilon_decay_fraction must be in (0, 1]");
  require(target_sync >= 1, "target_sync must be >= 1");
  require(hidden_width >= 1 && hidden_layers >= 1, "hidden layers must be non-empty");
  require(episodes >= 0, "episodes must be >= 0");
}

namespace {

std::vector<int> layer_sizes(int in, const DqnHyperparams& hp, int out) {
  std::vector<int> sizes{in};
  sizes.insert(sizes.end(), hp.hidden_layers, hp.hidden_width);
  sizes.push_back(out);
  return sizes;
}

}  // namespace

DqnAgent::DqnAgent(int state_dim, int action_dim, DqnHyperparams hp, std::uint64_t seed)
    : state_dim_(state_dim), action_dim_(action_dim), hp_(hp), rng_(seed) {
  hp_.validate();
  if (action_dim < 1 || action_dim > kMaxDqnComputeStas)
    throw std::invalid_argument("dqn: joint action space too large (n_compute must be in [1, " +
                                std::to_string(kMaxDqnComputeStas) + "])");
  q_ = Net(layer_sizes(state_dim, hp_, 1 << action_dim), rng_);
  target_ = q_;
  opt_ = nn::Adam<Real>(q_, hp_.lr);
}

DqnAgent DqnAgent::restore(int state_dim, int action_dim, DqnHyperparams hp, Net q, Net target, Rng rng) {
  hp.validate();
  if (q.input_dim() != state_dim || q.output_dim() != (1 << action_dim) || !q.same_shape(target))
    throw std::invalid_argument("dqn: network shapes do not match the scenario");
  DqnAgent a;
  a.state_dim_ = state_dim;
  a.action_dim_ = action_dim;
  a.hp_ = hp;
  a.rng_ = rng;
  a.q_ = std::move(q);
  a.target_ = std::move(target);
  a.opt_ = nn::Adam<Real>(a.q_, hp.lr);
  return a;
}

Action DqnAgent::decide(const Vector& state) const {
  const Matrix q = q_.forward(state);
  Eigen::Index best = 0;
  q.col(0).maxCoeff(&best);
  return decode_action(static_cast<int>(best), action_dim_);
}

Action DqnAgent::act(const Vector& state, double epsilon) {
  if (std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < epsilon)
    return decode_action(std::uniform_int_distribution<int>(0, joint_actions() - 1)(rng_), action_dim_);
  return decide(state);
}

double DqnAgent::update(const Batch& batch) {
  const Eigen::Index B = batch.size();
  const Matrix next_q = target_.forward(batch.next_states);
  Net::Tape tape;
  const Matrix q = q_.forward(batch.states, tape);
  Matrix dq = Matrix::Zero(q.rows(), B);
  double loss = 0;
  for (Eigen::Index b = 0; b < B; ++b) {
    std::vector<int> taken(static_cast<std::size_t>(action_dim_));
    for (int m = 0; m < action_dim_; ++m) taken[m] = batch.actions(m, b) > 0.5 ? 1 : 0;
    const int idx = encode_action(taken);
    const double y = batch.rewards[b] + (batch.dones[b] > 0.5 ? 0.0 : hp_.gamma * next_q.col(b).maxCoeff());
    const double diff = q(idx, b) - y;
    loss += diff * diff;
    dq(idx, b) = 2.0 * diff / static_cast<double>(B);
  }
  auto grad = q_.zero_grad();
  q_.backward(tape, dq, &grad);
  opt_.step(q_, grad);
  if (++updates_ % hp_.target_sync == 0) sync_target();
  return loss / static_cast<double>(B);
}

void DqnAgent::sync_target() { nn::soft_update(target_, q_, 1.0); }

TrainResult train_dqn(Env& env, DqnAgent& agent, int episodes, std::uint64_t seed, const EpisodeCallback& on_episode) {
  const DqnHyperparams& hp = agent.hyperparams();
  TrainResult result;
  if (episodes <= 0) return result;
  ReplayBuffer buffer(static_cast<std::size_t>(hp.buffer_capacity));
  const std::size_t ready = static_cast<std::size_t>(std::max(hp.warmup, hp.batch_size));
  const double decay_steps =
      std::max(1.0, hp.epsilon_decay_fraction * episodes * env.config().scenario.slots_per_episode);
  long step = 0;

  for (int e = 0; e < episodes; ++e) {
    State state = env.reset(derive_seed(seed, static_cast<std::uint64_t>(e)));
    double reward_sum = 0;
    int slots = 0;
    bool done = false;
    while (!done) {
      const double progress = std::min(1.0, step / decay_steps);
      const double epsilon = hp.epsilon_start + (hp.epsilon_end - hp.epsilon_start) * progress;
      const Action a = agent.act(state.normalized, epsilon);
      StepResult res = env.step(a);
      Vector stored(agent.action_dim());
      for (int m = 0; m < agent.action_dim(); ++m) stored[m] = a[m];
      buffer.push({state.normalized, stored, res.reward, res.next.normalized, res.done});
      reward_sum += res.reward;
      done = res.done;
      state = std::move(res.next);

      if (buffer.size() >= ready) {
        const double loss = agent.update(buffer.sample(static_cast<std::size_t>(hp.batch_size), agent.rng()));
        if (!std::isfinite(loss)) {
          std::ostringstream os;
          os << "divergence: non-finite dqn loss at episode " << e << " slot " << slots;
          throw std::runtime_error(os.str());
        }
        ++result.updates;
      }
      ++slots;
      ++step;
    }
    result.episode_rewards.push_back(reward_sum / slots);
    if (on_episode) on_episode(e, result.episode_rewards.back());
  }
  return result;
}

}  // namespace wifimec
