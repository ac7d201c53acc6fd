#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "archie/common/rng.hpp"
#include "archie/rl/sac.hpp"

namespace archie::test {

struct GradCheck {
  double max_rel = 0.0;
  std::size_t worst = 0;
  std::size_t checked = 0;
};

// Central differences on every parameter. Relative error per entry is
// |a - n| / max(|a|, |n|, floor); the floor keeps entries that are zero up to
// roundoff (dead ReLUs) from dividing noise by noise.
template <typename Loss>
GradCheck check_gradient(std::span<double> params, std::span<const double> analytic, Loss&& loss,
                         double h = 1e-5, double floor = 1e-6) {
  GradCheck out;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double saved = params[i];
    params[i] = saved + h;
    const double up = loss();
    params[i] = saved - h;
    const double down = loss();
    params[i] = saved;
    const double numeric = (up - down) / (2.0 * h);
    const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), floor});
    const double rel = std::abs(analytic[i] - numeric) / denom;
    if (rel > out.max_rel) {
      out.max_rel = rel;
      out.worst = i;
    }
    ++out.checked;
  }
  return out;
}

// Small SAC problem: random nets, a batch with mixed done flags and fixed
// reparameterisation noise.
struct SmallProblem {
  rl::PolicyBundle bundle;
  rl::Batch batch;
  rl::Matrix noise;
  rl::Matrix next_noise;
  double gamma = 0.99;
};

inline SmallProblem make_small_problem(std::uint64_t seed, int obs_dim = 5, int act_dim = 2, int batch = 8,
                                       std::vector<int> hidden = {16, 16}) {
  rl::SacConfig cfg;
  cfg.hidden = std::move(hidden);
  cfg.init_log_alpha = -0.7;
  SmallProblem p{rl::PolicyBundle(obs_dim, act_dim, cfg, seed), {}, {}, {}};
  Rng rng(seed + 1);
  // Targets differ from the online critics, as they do after training.
  for (auto& v : p.bundle.q1_target.params()) v += 0.05 * rng.normal();
  for (auto& v : p.bundle.q2_target.params()) v += 0.05 * rng.normal();
  const auto fill = [&](rl::Matrix& m, Eigen::Index r, Eigen::Index c, double scale) {
    m.resize(r, c);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = scale * rng.normal();
  };
  fill(p.batch.obs, batch, obs_dim, 1.0);
  fill(p.batch.next_obs, batch, obs_dim, 1.0);
  fill(p.batch.act, batch, act_dim, 0.5);
  p.batch.act = p.batch.act.array().tanh();
  p.batch.rew.resize(batch);
  p.batch.done.resize(batch);
  for (int i = 0; i < batch; ++i) {
    p.batch.rew[i] = rng.normal();
    p.batch.done[i] = i % 3 == 0 ? 1.0 : 0.0;
  }
  fill(p.noise, batch, act_dim, 1.0);
  fill(p.next_noise, batch, act_dim, 1.0);
  return p;
}

}  // namespace archie::test
