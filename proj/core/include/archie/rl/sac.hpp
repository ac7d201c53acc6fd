#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "archie/common/rng.hpp"
#include "archie/rl/adam.hpp"
#include "archie/rl/mlp.hpp"
#include "archie/rl/policy.hpp"
#include "archie/rl/replay.hpp"

namespace archie::rl {

struct SacConfig {
  double gamma = 0.99;
  double tau = 5e-3;
  int actor_delay = 2;
  int batch_size = 256;
  double lr_actor = 3e-4;
  double lr_critic = 3e-4;
  double lr_alpha = 3e-4;
  // Defaults to -act_dim when unset.
  std::optional<double> target_entropy;
  double init_log_alpha = 0.0;
  std::vector<int> hidden = {256, 256};

  // Throws Error(kInvalidConfig).
  void validate() const;
  double resolved_target_entropy(int act_dim) const {
    return target_entropy.value_or(-static_cast<double>(act_dim));
  }
};

// Actor, twin critics, their targets, the temperature and all optimiser
// state. Critics take [obs | action] as input.
struct PolicyBundle {
  GaussianPolicy policy;
  Mlp q1;
  Mlp q2;
  Mlp q1_target;
  Mlp q2_target;
  double log_alpha = 0.0;
  Adam policy_opt;
  Adam q1_opt;
  Adam q2_opt;
  Adam alpha_opt;
  std::int64_t critic_updates = 0;
  std::int64_t actor_updates = 0;
  std::int64_t env_steps = 0;

  PolicyBundle() = default;
  // Randomly initialised from `seed`; targets start as copies of the critics.
  PolicyBundle(int obs_dim, int act_dim, const SacConfig& config, std::uint64_t seed);

  double alpha() const;
  int obs_dim() const { return policy.obs_dim(); }
  int act_dim() const { return policy.act_dim(); }

  friend bool operator==(const PolicyBundle&, const PolicyBundle&) = default;
};

struct CriticGrad {
  std::vector<double> q1;
  std::vector<double> q2;
};

// mean((q1 - y)^2) + mean((q2 - y)^2) with
// y = r + gamma (1 - done) (min(q1', q2')(s', a') - alpha log pi(a'|s')),
// a' = tanh(mu + sigma * next_noise). Fills `grad` when non-null.
double critic_loss(const PolicyBundle& b, const Batch& batch, const Matrix& next_noise, double gamma,
                   CriticGrad* grad);

// mean(alpha log pi(a|s) - min(q1, q2)(s, a)) with a = tanh(mu + sigma * noise).
// Fills the policy gradient and the batch mean of log pi when non-null.
double actor_loss(const PolicyBundle& b, const Matrix& obs, const Matrix& noise, std::vector<double>* grad,
                  double* mean_log_prob);

// mean(-log_alpha (log pi + target_entropy)) given the batch mean of log pi.
double alpha_loss(double log_alpha, double mean_log_prob, double target_entropy, double* grad);

struct UpdateStats {
  double critic_loss = 0.0;
  std::optional<double> actor_loss;
  std::optional<double> alpha_loss;
};

// One critic step, a soft target update, and on every actor_delay-th call an
// actor step followed by a temperature step. Throws Error(kNonFinite) if a
// loss is not finite.
UpdateStats sac_update(PolicyBundle& b, const SacConfig& config, const Batch& batch, Rng& rng);

}  // namespace archie::rl
