#include "archie/rl/replay.hpp"

#include <algorithm>

#include "archie/common/error.hpp"

namespace archie::rl {

ReplayBuffer::ReplayBuffer(std::size_t capacity, int obs_dim, int act_dim)
    : capacity_(capacity), obs_dim_(obs_dim), act_dim_(act_dim) {
  if (capacity == 0 || obs_dim < 1 || act_dim < 1) {
    throw Error(ErrorCode::kInvalidConfig, "replay buffer needs capacity and dims >= 1");
  }
}

void ReplayBuffer::add(std::span<const double> obs, std::span<const double> act, double rew,
                       std::span<const double> next_obs, bool done) {
  const auto od = static_cast<std::size_t>(obs_dim_);
  const auto ad = static_cast<std::size_t>(act_dim_);
  if (obs.size() != od || next_obs.size() != od || act.size() != ad) {
    throw Error(ErrorCode::kShapeMismatch, "transition shape does not match the replay buffer");
  }
  if (size_ < capacity_) {
    obs_.insert(obs_.end(), obs.begin(), obs.end());
    act_.insert(act_.end(), act.begin(), act.end());
    rew_.push_back(rew);
    next_obs_.insert(next_obs_.end(), next_obs.begin(), next_obs.end());
    done_.push_back(done ? 1.0 : 0.0);
    ++size_;
  } else {
    std::copy(obs.begin(), obs.end(), obs_.begin() + static_cast<std::ptrdiff_t>(next_ * od));
    std::copy(act.begin(), act.end(), act_.begin() + static_cast<std::ptrdiff_t>(next_ * ad));
    rew_[next_] = rew;
    std::copy(next_obs.begin(), next_obs.end(), next_obs_.begin() + static_cast<std::ptrdiff_t>(next_ * od));
    done_[next_] = done ? 1.0 : 0.0;
  }
  next_ = (next_ + 1) % capacity_;
}

void ReplayBuffer::sample(std::size_t batch_size, Rng& rng, Batch& out) const {
  if (size_ == 0) throw Error(ErrorCode::kInvalidConfig, "cannot sample an empty replay buffer");
  const auto n = static_cast<Eigen::Index>(batch_size);
  out.obs.resize(n, obs_dim_);
  out.act.resize(n, act_dim_);
  out.rew.resize(n);
  out.next_obs.resize(n, obs_dim_);
  out.done.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::size_t j = rng.index(size_);
    for (int k = 0; k < obs_dim_; ++k) {
      out.obs(i, k) = obs_[j * static_cast<std::size_t>(obs_dim_) + static_cast<std::size_t>(k)];
      out.next_obs(i, k) = next_obs_[j * static_cast<std::size_t>(obs_dim_) + static_cast<std::size_t>(k)];
    }
    for (int k = 0; k < act_dim_; ++k) {
      out.act(i, k) = act_[j * static_cast<std::size_t>(act_dim_) + static_cast<std::size_t>(k)];
    }
    out.rew[i] = rew_[j];
    out.done[i] = done_[j];
  }
}

std::size_t ReplayBuffer::slot(std::size_t i) const {
  if (i >= size_) throw Error(ErrorCode::kInvalidConfig, "replay index out of range");
  return size_ < capacity_ ? i : (next_ + i) % capacity_;
}

ReplayBuffer::View ReplayBuffer::at(std::size_t i) const {
  const std::size_t s = slot(i);
  const auto od = static_cast<std::size_t>(obs_dim_);
  const auto ad = static_cast<std::size_t>(act_dim_);
  return {std::span<const double>(obs_).subspan(s * od, od), std::span<const double>(act_).subspan(s * ad, ad),
          rew_[s], std::span<const double>(next_obs_).subspan(s * od, od), done_[s] != 0.0};
}

}  // namespace archie::rl
