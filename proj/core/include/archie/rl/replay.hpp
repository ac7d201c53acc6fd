#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "archie/common/rng.hpp"
#include "archie/rl/mlp.hpp"

namespace archie::rl {

struct Batch {
  Matrix obs;
  Matrix act;
  Vector rew;
  Matrix next_obs;
  Vector done;  // 1.0 when the episode terminated on success or failure
};

// Fixed-capacity ring of (s, a, r, s', done). Storage grows on demand up to
// the capacity, then the oldest transition is overwritten.
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, int obs_dim, int act_dim);

  void add(std::span<const double> obs, std::span<const double> act, double rew,
           std::span<const double> next_obs, bool done);

  // Uniform with replacement over the stored transitions. Throws
  // Error(kInvalidConfig) when empty.
  void sample(std::size_t batch_size, Rng& rng, Batch& out) const;

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  int obs_dim() const { return obs_dim_; }
  int act_dim() const { return act_dim_; }

  // Read access to stored transition i in insertion order among those still
  // held (0 = oldest).
  struct View {
    std::span<const double> obs;
    std::span<const double> act;
    double rew;
    std::span<const double> next_obs;
    bool done;
  };
  View at(std::size_t i) const;

 private:
  std::size_t slot(std::size_t i) const;

  std::size_t capacity_;
  int obs_dim_;
  int act_dim_;
  std::size_t size_ = 0;
  std::size_t next_ = 0;
  std::vector<double> obs_;
  std::vector<double> act_;
  std::vector<double> rew_;
  std::vector<double> next_obs_;
  std::vector<double> done_;
};

}  // namespace archie::rl
