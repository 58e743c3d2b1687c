#include "wifimec/replay.hpp"

#include <stdexcept>
#include <unordered_set>

namespace wifimec {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("ReplayBuffer: capacity must be > 0");
  items_.reserve(std::min<std::size_t>(capacity, 4096));
}

void ReplayBuffer::push(Transition t) {
  if (items_.size() < capacity_) {
    items_.push_back(std::move(t));
  } else {
    items_[next_] = std::move(t);
  }
  next_ = (next_ + 1) % capacity_;
  size_ = std::min(size_ + 1, capacity_);
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t count, Rng& rng) const {
  if (count > size_) throw std::invalid_argument("ReplayBuffer: batch larger than buffer");
  // Floyd's subset sampling: O(count) draws, every subset equally likely.
  std::vector<std::size_t> out;
  out.reserve(count);
  std::unordered_set<std::size_t> seen;
  for (std::size_t j = size_ - count; j < size_; ++j) {
    const std::size_t t = std::uniform_int_distribution<std::size_t>(0, j)(rng);
    const std::size_t pick = seen.count(t) ? j : t;
    seen.insert(pick);
    out.push_back(pick);
  }
  return out;
}

Batch ReplayBuffer::sample(std::size_t count, Rng& rng) const { return gather(sample_indices(count, rng)); }

Batch ReplayBuffer::gather(const std::vector<std::size_t>& indices) const {
  if (indices.empty()) throw std::invalid_argument("ReplayBuffer: empty batch");
  const auto& first = items_.at(indices.front());
  const auto B = static_cast<Eigen::Index>(indices.size());
  Batch b;
  b.states.resize(first.state.size(), B);
  b.actions.resize(first.action.size(), B);
  b.rewards.resize(B);
  b.next_states.resize(first.next_state.size(), B);
  b.dones.resize(B);
  for (Eigen::Index i = 0; i < B; ++i) {
    const Transition& t = items_.at(indices[i]);
    b.states.col(i) = t.state;
    b.actions.col(i) = t.action;
    b.rewards[i] = t.reward;
    b.next_states.col(i) = t.next_state;
    b.dones[i] = t.done ? 1.0 : 0.0;
  }
  return b;
}

}  // namespace wifimec
