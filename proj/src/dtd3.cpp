#include "wifimec/dtd3.hpp"

#include <algorithm>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace wifimec {

DiffusionSchedule DiffusionSchedule::from_betas(std::vector<double> betas) {
  if (betas.empty()) throw std::invalid_argument("diffusion schedule: need at least one step");
  DiffusionSchedule s;
  double running = 1.0;
  for (double b : betas) {
    if (!(b > 0 && b < 1)) throw std::invalid_argument("diffusion schedule: betas must lie in (0, 1)");
    s.alphas.push_back(1.0 - b);
    running *= 1.0 - b;
    s.alpha_bars.push_back(running);
  }
  s.betas = std::move(betas);
  return s;
}

DiffusionSchedule DiffusionSchedule::variance_preserving(int K, double beta_min, double beta_max) {
  if (K < 1) throw std::invalid_argument("diffusion schedule: K must be >= 1");
  std::vector<double> betas;
  for (int k = 1; k <= K; ++k)
    betas.push_back(1.0 - std::exp(-beta_min / K - (beta_max - beta_min) * (2.0 * k - 1.0) / (2.0 * K * K)));
  return from_betas(std::move(betas));
}

Matrix timestep_embedding(std::span<const int> steps, int dim) {
  if (dim < 2 || dim % 2) throw std::invalid_argument("timestep_embedding: dim must be even and >= 2");
  const int half = dim / 2;
  const double scale = half > 1 ? std::log(10000.0) / (half - 1) : 0.0;
  Matrix out(dim, static_cast<Eigen::Index>(steps.size()));
  for (std::size_t c = 0; c < steps.size(); ++c) {
    for (int i = 0; i < half; ++i) {
      const double x = steps[c] * std::exp(-scale * i);
      out(i, c) = std::sin(x);
      out(half + i, c) = std::cos(x);
    }
  }
  return out;
}

namespace {

std::vector<int> hidden_sizes(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> sizes{in};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(out);
  return sizes;
}

}  // namespace

NoiseNet::NoiseNet(int action_dim, int state_dim, std::vector<int> hidden, int embed_dim, Rng& rng)
    : net_(hidden_sizes(action_dim + state_dim + embed_dim, hidden, action_dim), rng),
      action_dim_(action_dim),
      state_dim_(state_dim),
      embed_dim_(embed_dim) {}

NoiseNet::NoiseNet(Net net, int action_dim, int state_dim, int embed_dim)
    : net_(std::move(net)), action_dim_(action_dim), state_dim_(state_dim), embed_dim_(embed_dim) {
  if (net_.input_dim() != action_dim + state_dim + embed_dim || net_.output_dim() != action_dim)
    throw std::invalid_argument("NoiseNet: network shape does not match the action/state dimensions");
}

Matrix NoiseNet::input(const Matrix& actions, const Matrix& states, std::span<const int> steps) const {
  const Eigen::Index B = actions.cols();
  if (states.cols() != B || static_cast<Eigen::Index>(steps.size()) != B)
    throw std::invalid_argument("NoiseNet: batch sizes differ");
  Matrix x(action_dim_ + state_dim_ + embed_dim_, B);
  x.topRows(action_dim_) = actions;
  x.middleRows(action_dim_, state_dim_) = states;
  x.bottomRows(embed_dim_) = timestep_embedding(steps, embed_dim_);
  return x;
}

Matrix NoiseNet::predict(const Matrix& actions, const Matrix& states, std::span<const int> steps) const {
  return net_.forward(input(actions, states, steps));
}

Matrix NoiseNet::predict(const Matrix& actions, const Matrix& states, std::span<const int> steps,
                         Net::Tape& tape) const {
  return net_.forward(input(actions, states, steps), tape);
}

Matrix NoiseNet::backward(const Net::Tape& tape, const Matrix& dout, Net::Grad* grad) const {
  return net_.backward(tape, dout, grad).topRows(action_dim_);
}

Critic::Critic(int state_dim, int action_dim, std::vector<int> hidden, Rng& rng)
    : net_(hidden_sizes(state_dim + action_dim, hidden, 1), rng), state_dim_(state_dim), action_dim_(action_dim) {}

Critic::Critic(Net net, int state_dim, int action_dim)
    : net_(std::move(net)), state_dim_(state_dim), action_dim_(action_dim) {
  if (net_.input_dim() != state_dim + action_dim || net_.output_dim() != 1)
    throw std::invalid_argument("Critic: network shape does not match the action/state dimensions");
}

namespace {

Matrix stack(const Matrix& top, const Matrix& bottom) {
  if (top.cols() != bottom.cols()) throw std::invalid_argument("Critic: batch sizes differ");
  Matrix x(top.rows() + bottom.rows(), top.cols());
  x << top, bottom;
  return x;
}

}  // namespace

Matrix Critic::q(const Matrix& states, const Matrix& actions) const { return net_.forward(stack(states, actions)); }

Matrix Critic::q(const Matrix& states, const Matrix& actions, Net::Tape& tape) const {
  return net_.forward(stack(states, actions), tape);
}

Matrix Critic::backward(const Net::Tape& tape, const Matrix& dq, Net::Grad* grad) const {
  return net_.backward(tape, dq, grad).bottomRows(action_dim_);
}

namespace {

Matrix gaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = n01(rng);
  return m;
}

}  // namespace

ChainNoise draw_chain_noise(int action_dim, int batch, int steps, Rng& rng) {
  ChainNoise n;
  n.initial = gaussian(action_dim, batch, rng);
  n.injected.resize(steps + 1);
  for (int k = steps; k >= 2; --k) n.injected[k] = gaussian(action_dim, batch, rng);
  return n;
}

Matrix clamp_unit(const Matrix& a) { return a.cwiseMax(-1.0).cwiseMin(1.0); }

namespace {

auto predictor(const NoiseNet& policy) {
  return [&policy](const Matrix& a, const Matrix& s, int k) {
    const std::vector<int> steps(static_cast<std::size_t>(a.cols()), k);
    return policy.predict(a, s, steps);
  };
}

}  // namespace

Matrix sample_action(const NoiseNet& policy, const Matrix& states, const DiffusionSchedule& schedule,
                     const ChainNoise& noise) {
  return clamp_unit(reverse_chain(predictor(policy), states, schedule, noise));
}

Matrix sample_action(const NoiseNet& policy, const Matrix& states, const DiffusionSchedule& schedule, Rng& rng) {
  const auto noise = draw_chain_noise(policy.action_dim(), static_cast<int>(states.cols()), schedule.steps(), rng);
  return sample_action(policy, states, schedule, noise);
}

Action binarize(const Vector& a) {
  Action out(static_cast<std::size_t>(a.size()));
  for (Eigen::Index i = 0; i < a.size(); ++i) out[i] = a[i] > 0.0 ? 1 : 0;
  return out;
}

DiffusionDraws draw_diffusion(int action_dim, int batch, int steps, Rng& rng) {
  DiffusionDraws d;
  std::uniform_int_distribution<int> pick(1, steps);
  d.steps.resize(batch);
  for (int& k : d.steps) k = pick(rng);
  d.noise = gaussian(action_dim, batch, rng);
  return d;
}

double diffusion_loss(const NoiseNet& policy, const Matrix& states, const Matrix& actions,
                      const DiffusionSchedule& schedule, const DiffusionDraws& draws, Net::Grad* grad) {
  const Eigen::Index B = actions.cols();
  Matrix noisy(actions.rows(), B);
  for (Eigen::Index j = 0; j < B; ++j) {
    const double abar = schedule.alpha_bar(draws.steps[j]);
    noisy.col(j) = std::sqrt(abar) * actions.col(j) + std::sqrt(1.0 - abar) * draws.noise.col(j);
  }
  Net::Tape tape;
  const Matrix diff = policy.predict(noisy, states, draws.steps, tape) - draws.noise;
  if (grad) policy.backward(tape, 2.0 * diff / static_cast<double>(B), grad);
  return diff.squaredNorm() / static_cast<double>(B);
}

double diffusion_loss(const NoiseNet& policy, const Matrix& states, const Matrix& actions,
                      const DiffusionSchedule& schedule, Rng& rng) {
  const auto draws = draw_diffusion(policy.action_dim(), static_cast<int>(actions.cols()), schedule.steps(), rng);
  return diffusion_loss(policy, states, actions, schedule, draws);
}

double q_normalizer(const Critic& critic, const Matrix& states, const Matrix& actions) {
  return critic.q(states, actions).cwiseAbs().mean();
}

double q_loss(const NoiseNet& policy, const Critic& critic, const Matrix& states, double normalizer,
              const DiffusionSchedule& schedule, double eta, const ChainNoise& noise, Net::Grad* grad) {
  const int K = schedule.steps();
  const Eigen::Index B = states.cols();
  std::vector<Net::Tape> tapes(K + 1);
  Matrix a = noise.initial;
  for (int k = K; k >= 1; --k) {
    const std::vector<int> steps(static_cast<std::size_t>(B), k);
    const double alpha = schedule.alpha(k);
    const double coef = schedule.beta(k) / std::sqrt(alpha * (1.0 - schedule.alpha_bar(k)));
    Matrix next = a / std::sqrt(alpha) - coef * policy.predict(a, states, steps, tapes[k]);
    if (k > 1) next += std::sqrt(schedule.beta(k)) * noise.injected.at(k);
    a = std::move(next);
  }
  const Matrix a0 = clamp_unit(a);
  Net::Tape critic_tape;
  const Matrix q = critic.q(states, a0, critic_tape);
  const double scale = -eta / std::max(normalizer, 1e-12);
  const double loss = scale * q.mean();
  if (!grad || eta == 0.0) return loss;

  // d loss / d a0, zero where the clamp is active.
  Matrix g = critic.backward(critic_tape, Matrix::Constant(1, B, scale / static_cast<double>(B)), nullptr);
  g = (a.array().abs() <= 1.0).select(g, 0.0);
  for (int k = 1; k <= K; ++k) {
    const double alpha = schedule.alpha(k);
    const double coef = schedule.beta(k) / std::sqrt(alpha * (1.0 - schedule.alpha_bar(k)));
    const Matrix through_net = policy.backward(tapes[k], -coef * g, grad);
    g = g / std::sqrt(alpha) + through_net;
  }
  return loss;
}

PolicyLoss policy_loss(const NoiseNet& policy, const Critic& critic, const Batch& batch,
                       const DiffusionSchedule& schedule, double eta, const DiffusionDraws& draws,
                       const ChainNoise& chain, Net::Grad* grad) {
  PolicyLoss out;
  out.diffusion = diffusion_loss(policy, batch.states, batch.actions, schedule, draws, grad);
  if (eta != 0.0) {
    const double norm = q_normalizer(critic, batch.states, batch.actions);
    out.q = q_loss(policy, critic, batch.states, norm, schedule, eta, chain, grad);
  }
  return out;
}

Vector td_targets(const Vector& rewards, const Vector& dones, const Matrix& q1_next, const Matrix& q2_next,
                  double gamma) {
  const Eigen::Index B = rewards.size();
  if (dones.size() != B || q1_next.size() != B || q2_next.size() != B)
    throw std::invalid_argument("td_targets: batch sizes differ");
  Vector y(B);
  for (Eigen::Index i = 0; i < B; ++i) {
    const double bootstrap = std::min(q1_next(i), q2_next(i));
    y[i] = rewards[i] + (dones[i] > 0.5 ? 0.0 : gamma * bootstrap);
  }
  return y;
}

void Dtd3Hyperparams::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("dtd3: ") + what);
  };
  require(gamma >= 0 && gamma < 1, "gamma must be in [0, 1)");
  require(soft_update_rate > 0 && soft_update_rate <= 1, "soft_update_rate must be in (0, 1]");
  require(policy_delay >= 1, "policy_delay must be >= 1");
  require(eta >= 0, "eta must be >= 0");
  require(batch_size >= 1 && buffer_capacity >= batch_size, "need 1 <= batch_size <= buffer_capacity");
  require(warmup >= 0, "warmup must be >= 0");
  require(lr_policy > 0 && lr_critic > 0, "learning rates must be > 0");
  require(explore_std_start >= 0 && explore_std_end >= 0, "exploration std must be >= 0");
  require(episodes >= 0, "episodes must be >= 0");
  require(diffusion_steps >= 1, "diffusion_steps must be >= 1");
  require(beta_min > 0 && beta_max >= beta_min, "need 0 < beta_min <= beta_max");
  require(hidden_width >= 1 && hidden_layers >= 1, "hidden layers must be non-empty");
  require(embed_dim >= 2 && embed_dim % 2 == 0, "embed_dim must be even and >= 2");
}

Dtd3Agent::Dtd3Agent(int state_dim, int action_dim, Dtd3Hyperparams hp, std::uint64_t seed)
    : state_dim_(state_dim), action_dim_(action_dim), hp_(hp), rng_(seed) {
  hp_.validate();
  schedule_ = DiffusionSchedule::variance_preserving(hp_.diffusion_steps, hp_.beta_min, hp_.beta_max);
  const std::vector<int> hidden(hp_.hidden_layers, hp_.hidden_width);
  policy_ = NoiseNet(action_dim, state_dim, hidden, hp_.embed_dim, rng_);
  critic1_ = Critic(state_dim, action_dim, hidden, rng_);
  critic2_ = Critic(state_dim, action_dim, hidden, rng_);
  target_policy_ = policy_;
  target_critic1_ = critic1_;
  target_critic2_ = critic2_;
  make_optimizers();
}

Dtd3Agent Dtd3Agent::restore(int state_dim, int action_dim, Dtd3Hyperparams hp, DiffusionSchedule schedule,
                             NoiseNet policy, NoiseNet target_policy, std::array<Critic, 2> critics,
                             std::array<Critic, 2> targets, Rng rng) {
  hp.validate();
  Dtd3Agent a;
  a.state_dim_ = state_dim;
  a.action_dim_ = action_dim;
  a.hp_ = hp;
  a.schedule_ = std::move(schedule);
  a.rng_ = rng;
  a.policy_ = std::move(policy);
  a.target_policy_ = std::move(target_policy);
  a.critic1_ = std::move(critics[0]);
  a.critic2_ = std::move(critics[1]);
  a.target_critic1_ = std::move(targets[0]);
  a.target_critic2_ = std::move(targets[1]);
  a.make_optimizers();
  return a;
}

void Dtd3Agent::make_optimizers() {
  policy_opt_ = nn::Adam<Real>(policy_.net(), hp_.lr_policy);
  critic1_opt_ = nn::Adam<Real>(critic1_.net(), hp_.lr_critic);
  critic2_opt_ = nn::Adam<Real>(critic2_.net(), hp_.lr_critic);
}

Vector Dtd3Agent::act(const Vector& state, double explore_std) {
  const Matrix s = state;
  const auto noise = draw_chain_noise(action_dim_, 1, schedule_.steps(), rng_);
  Matrix a = reverse_chain(predictor(policy_), s, schedule_, noise);
  if (explore_std > 0) {
    std::normal_distribution<double> n01(0.0, explore_std);
    for (Eigen::Index i = 0; i < a.size(); ++i) a(i) += n01(rng_);
  }
  return clamp_unit(a).col(0);
}

CriticLosses Dtd3Agent::critic_update(const Batch& batch) {
  const int B = static_cast<int>(batch.size());
  const auto next_noise = draw_chain_noise(action_dim_, B, schedule_.steps(), rng_);
  const Matrix next_actions = sample_action(target_policy_, batch.next_states, schedule_, next_noise);
  const Vector y = td_targets(batch.rewards, batch.dones, target_critic1_.q(batch.next_states, next_actions),
                              target_critic2_.q(batch.next_states, next_actions), hp_.gamma);

  Matrix regress_actions = batch.actions;
  if (hp_.critic_on_target_action) {
    const auto noise = draw_chain_noise(action_dim_, B, schedule_.steps(), rng_);
    regress_actions = sample_action(target_policy_, batch.states, schedule_, noise);
  }

  CriticLosses out;
  auto fit = [&](Critic& critic, nn::Adam<Real>& opt) {
    Net::Tape tape;
    const Matrix diff = critic.q(batch.states, regress_actions, tape) - y.transpose();
    auto grad = critic.net().zero_grad();
    critic.backward(tape, 2.0 * diff / static_cast<double>(B), &grad);
    opt.step(critic.net(), grad);
    return diff.squaredNorm() / B;
  };
  out.q1 = fit(critic1_, critic1_opt_);
  out.q2 = fit(critic2_, critic2_opt_);
  return out;
}

PolicyLoss Dtd3Agent::policy_update(const Batch& batch) {
  const int B = static_cast<int>(batch.size());
  const auto draws = draw_diffusion(action_dim_, B, schedule_.steps(), rng_);
  const auto chain = draw_chain_noise(action_dim_, B, schedule_.steps(), rng_);
  auto grad = policy_.net().zero_grad();
  const PolicyLoss loss = policy_loss(policy_, critic1_, batch, schedule_, hp_.eta, draws, chain, &grad);
  policy_opt_.step(policy_.net(), grad);
  return loss;
}

void Dtd3Agent::soft_update_targets() {
  nn::soft_update(target_policy_.net(), policy_.net(), hp_.soft_update_rate);
  nn::soft_update(target_critic1_.net(), critic1_.net(), hp_.soft_update_rate);
  nn::soft_update(target_critic2_.net(), critic2_.net(), hp_.soft_update_rate);
}

namespace {

[[noreturn]] void diverged(const char* what, int episode, int slot) {
  std::ostringstream os;
  os << "divergence: non-finite " << what << " at episode " << episode << " slot " << slot;
  throw std::runtime_error(os.str());
}

}  // namespace

TrainResult train(Env& env, Dtd3Agent& agent, int episodes, std::uint64_t seed, const EpisodeCallback& on_episode) {
  const Dtd3Hyperparams& hp = agent.hyperparams();
  TrainResult result;
  if (episodes <= 0) return result;
  ReplayBuffer buffer(static_cast<std::size_t>(hp.buffer_capacity));
  const std::size_t ready = static_cast<std::size_t>(std::max(hp.warmup, hp.batch_size));
  const long total_steps = static_cast<long>(episodes) * env.config().scenario.slots_per_episode;
  long step = 0;
  long critic_updates = 0;

  for (int e = 0; e < episodes; ++e) {
    State state = env.reset(derive_seed(seed, static_cast<std::uint64_t>(e)));
    double reward_sum = 0;
    int slots = 0;
    bool done = false;
    while (!done) {
      const double progress = total_steps > 1 ? static_cast<double>(step) / (total_steps - 1) : 1.0;
      const double noise_std = hp.explore_std_start + (hp.explore_std_end - hp.explore_std_start) * progress;
      const Vector a = agent.act(state.normalized, noise_std);
      StepResult res = env.step(binarize(a));
      buffer.push({state.normalized, a, res.reward, res.next.normalized, res.done});
      reward_sum += res.reward;
      done = res.done;
      state = std::move(res.next);

      if (buffer.size() >= ready) {
        const Batch batch = buffer.sample(static_cast<std::size_t>(hp.batch_size), agent.rng());
        const CriticLosses cl = agent.critic_update(batch);
        if (!std::isfinite(cl.q1) || !std::isfinite(cl.q2)) diverged("critic loss", e, slots);
        if (++critic_updates % hp.policy_delay == 0) {
          const PolicyLoss pl = agent.policy_update(batch);
          if (!std::isfinite(pl.total())) diverged("policy loss", e, slots);
          agent.soft_update_targets();
          ++result.updates;
        }
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
