#pragma once

#include "wifimec/env.hpp"
#include "wifimec/types.hpp"

#include <vector>

namespace wifimec {

struct Batch {
  Matrix states;       // state_dim x B
  Matrix actions;      // action_dim x B
  Vector rewards;      // B
  Matrix next_states;  // state_dim x B
  Vector dones;        // B, 1 for terminal transitions
  Eigen::Index size() const { return rewards.size(); }
};

/// Fixed-capacity ring buffer of transitions.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(Transition t);
  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  const Transition& at(std::size_t i) const { return items_.at(i); }

  /// `count` distinct indices, uniform over the stored transitions.
  std::vector<std::size_t> sample_indices(std::size_t count, Rng& rng) const;
  Batch sample(std::size_t count, Rng& rng) const;
  Batch gather(const std::vector<std::size_t>& indices) const;

 private:
  std::size_t capacity_;
  std::size_t size_ = 0;
  std::size_t next_ = 0;
  std::vector<Transition> items_;
};

}  // namespace wifimec
