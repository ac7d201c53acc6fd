#include "archie/rl/sac.hpp"

#include <cmath>

#include "archie/common/error.hpp"

namespace archie::rl {
namespace {

Matrix concat(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows(), a.cols() + b.cols());
  out << a, b;
  return out;
}

std::vector<int> critic_dims(int obs_dim, int act_dim, const std::vector<int>& hidden) {
  std::vector<int> dims{obs_dim + act_dim};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(1);
  return dims;
}

Matrix normal_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  return m;
}

void check_finite(double v, const char* what, std::int64_t step) {
  if (!std::isfinite(v)) {
    throw Error(ErrorCode::kNonFinite,
                std::string(what) + " loss is not finite at critic update " + std::to_string(step));
  }
}

}  // namespace

void SacConfig::validate() const {
  const auto bad = [](const std::string& m) { throw Error(ErrorCode::kInvalidConfig, m); };
  if (!(gamma > 0.0 && gamma <= 1.0)) bad("gamma must be in (0, 1]");
  if (!(tau > 0.0 && tau <= 1.0)) bad("tau must be in (0, 1]");
  if (actor_delay < 1) bad("actor_delay must be >= 1");
  if (batch_size < 1) bad("batch_size must be >= 1");
  if (!(lr_actor > 0.0 && lr_critic > 0.0 && lr_alpha > 0.0)) bad("learning rates must be > 0");
  if (target_entropy && !std::isfinite(*target_entropy)) bad("target_entropy must be finite");
  if (!std::isfinite(init_log_alpha)) bad("init_log_alpha must be finite");
  for (int h : hidden) {
    if (h < 1) bad("hidden layer sizes must be >= 1");
  }
}

PolicyBundle::PolicyBundle(int obs_dim, int act_dim, const SacConfig& config, std::uint64_t seed)
    : policy(obs_dim, act_dim, config.hidden),
      q1(critic_dims(obs_dim, act_dim, config.hidden)),
      q2(critic_dims(obs_dim, act_dim, config.hidden)),
      log_alpha(config.init_log_alpha) {
  Rng rng(seed);
  policy.net().init(rng);
  q1.init(rng);
  q2.init(rng);
  q1_target = q1;
  q2_target = q2;
  policy_opt = Adam(policy.net().num_params(), {.lr = config.lr_actor});
  q1_opt = Adam(q1.num_params(), {.lr = config.lr_critic});
  q2_opt = Adam(q2.num_params(), {.lr = config.lr_critic});
  alpha_opt = Adam(1, {.lr = config.lr_alpha});
}

double PolicyBundle::alpha() const { return std::exp(log_alpha); }

double critic_loss(const PolicyBundle& b, const Batch& batch, const Matrix& next_noise, double gamma,
                   CriticGrad* grad) {
  const Eigen::Index n = batch.obs.rows();
  const double alpha = b.alpha();

  GaussianPolicy::Sample next;
  b.policy.sample(batch.next_obs, next_noise, next);
  const Matrix next_in = concat(batch.next_obs, next.action);
  const Matrix q1_next = b.q1_target.forward(next_in);
  const Matrix q2_next = b.q2_target.forward(next_in);
  Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double soft_v = std::min(q1_next(i, 0), q2_next(i, 0)) - alpha * next.log_prob[i];
    y[i] = batch.rew[i] + gamma * (1.0 - batch.done[i]) * soft_v;
  }

  const Matrix in = concat(batch.obs, batch.act);
  Mlp::Cache c1;
  Mlp::Cache c2;
  b.q1.forward(in, c1);
  b.q2.forward(in, c2);
  const Matrix e1 = c1.output().col(0) - y;
  const Matrix e2 = c2.output().col(0) - y;
  const double inv_n = 1.0 / static_cast<double>(n);
  const double loss = (e1.squaredNorm() + e2.squaredNorm()) * inv_n;

  if (grad) {
    grad->q1.assign(b.q1.num_params(), 0.0);
    grad->q2.assign(b.q2.num_params(), 0.0);
    b.q1.backward(c1, 2.0 * inv_n * e1, grad->q1);
    b.q2.backward(c2, 2.0 * inv_n * e2, grad->q2);
  }
  return loss;
}

double actor_loss(const PolicyBundle& b, const Matrix& obs, const Matrix& noise, std::vector<double>* grad,
                  double* mean_log_prob) {
  const Eigen::Index n = obs.rows();
  const double alpha = b.alpha();
  const double inv_n = 1.0 / static_cast<double>(n);

  GaussianPolicy::Sample s;
  b.policy.sample(obs, noise, s);
  const Matrix in = concat(obs, s.action);
  Mlp::Cache c1;
  Mlp::Cache c2;
  b.q1.forward(in, c1);
  b.q2.forward(in, c2);

  double loss = 0.0;
  Matrix d1 = Matrix::Zero(n, 1);
  Matrix d2 = Matrix::Zero(n, 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double q1 = c1.output()(i, 0);
    const double q2 = c2.output()(i, 0);
    // Ties go to q1; only the selected critic carries gradient.
    if (q1 <= q2) {
      d1(i, 0) = -inv_n;
    } else {
      d2(i, 0) = -inv_n;
    }
    loss += alpha * s.log_prob[i] - std::min(q1, q2);
  }
  loss *= inv_n;
  if (mean_log_prob) *mean_log_prob = s.log_prob.mean();

  if (grad) {
    const Matrix dx = b.q1.backward(c1, d1, {}) + b.q2.backward(c2, d2, {});
    const Matrix d_action = dx.rightCols(b.act_dim());
    const Vector d_log_prob = Vector::Constant(n, alpha * inv_n);
    grad->assign(b.policy.net().num_params(), 0.0);
    b.policy.backward(s, d_action, d_log_prob, *grad);
  }
  return loss;
}

double alpha_loss(double log_alpha, double mean_log_prob, double target_entropy, double* grad) {
  if (grad) *grad = -(mean_log_prob + target_entropy);
  return -log_alpha * (mean_log_prob + target_entropy);
}

UpdateStats sac_update(PolicyBundle& b, const SacConfig& config, const Batch& batch, Rng& rng) {
  UpdateStats stats;
  const Eigen::Index n = batch.obs.rows();
  const int act_dim = b.act_dim();

  CriticGrad cg;
  stats.critic_loss = critic_loss(b, batch, normal_matrix(n, act_dim, rng), config.gamma, &cg);
  check_finite(stats.critic_loss, "critic", b.critic_updates + 1);
  b.q1_opt.step(b.q1.params(), cg.q1);
  b.q2_opt.step(b.q2.params(), cg.q2);
  ++b.critic_updates;
  soft_update(b.q1_target, b.q1, config.tau);
  soft_update(b.q2_target, b.q2, config.tau);

  if (b.critic_updates % config.actor_delay == 0) {
    std::vector<double> pg;
    double mean_lp = 0.0;
    const double a_loss = actor_loss(b, batch.obs, normal_matrix(n, act_dim, rng), &pg, &mean_lp);
    check_finite(a_loss, "actor", b.critic_updates);
    b.policy_opt.step(b.policy.net().params(), pg);

    double ag = 0.0;
    const double al_loss = alpha_loss(b.log_alpha, mean_lp, config.resolved_target_entropy(act_dim), &ag);
    check_finite(al_loss, "alpha", b.critic_updates);
    b.alpha_opt.step(std::span<double>(&b.log_alpha, 1), std::span<const double>(&ag, 1));
    ++b.actor_updates;
    stats.actor_loss = a_loss;
    stats.alpha_loss = al_loss;
  }
  return stats;
}

}  // namespace archie::rl
