#include <benchmark/benchmark.h>

#include <filesystem>

#include "archie/common/rng.hpp"
#include "archie/common/text.hpp"
#include "archie/env/env.hpp"
#include "archie/reward/assembly.hpp"
#include "archie/reward/evaluator.hpp"
#include "archie/reward/parser.hpp"
#include "archie/rl/mlp.hpp"
#include "archie/rl/replay.hpp"
#include "archie/rl/sac.hpp"

using namespace archie;

namespace {

rl::Matrix random_matrix(Rng& rng, int rows, int cols) {
  rl::Matrix m(rows, cols);
  for (int i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  return m;
}

// Args: batch, hidden width. Input 16, output 1, two hidden layers.
void BM_MlpForward(benchmark::State& state) {
  const int batch = static_cast<int>(state.range(0));
  const int width = static_cast<int>(state.range(1));
  Rng rng(1);
  rl::Mlp net({16, width, width, 1});
  net.init(rng);
  const auto x = random_matrix(rng, batch, 16);
  rl::Mlp::Cache cache;
  for (auto _ : state) {
    net.forward(x, cache);
    benchmark::DoNotOptimize(cache);
  }
  state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(BM_MlpForward)->Args({64, 64})->Args({256, 256});

void BM_MlpBackward(benchmark::State& state) {
  const int batch = static_cast<int>(state.range(0));
  const int width = static_cast<int>(state.range(1));
  Rng rng(2);
  rl::Mlp net({16, width, width, 1});
  net.init(rng);
  const auto x = random_matrix(rng, batch, 16);
  const auto dy = random_matrix(rng, batch, 1);
  rl::Mlp::Cache cache;
  net.forward(x, cache);
  std::vector<double> grad(net.num_params());
  for (auto _ : state) {
    std::fill(grad.begin(), grad.end(), 0.0);
    benchmark::DoNotOptimize(net.backward(cache, dy, grad));
  }
  state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(BM_MlpBackward)->Args({64, 64})->Args({256, 256});

// Args: batch, hidden width. Obs 16, action 3, like the grasp envs.
void BM_SacUpdate(benchmark::State& state) {
  const int batch = static_cast<int>(state.range(0));
  const int width = static_cast<int>(state.range(1));
  rl::SacConfig config;
  config.hidden = {width, width};
  config.batch_size = batch;
  rl::PolicyBundle bundle(16, 3, config, 3);
  Rng rng(4);
  rl::ReplayBuffer replay(10000, 16, 3);
  std::vector<double> obs(16), act(3), next(16);
  for (int i = 0; i < 10000; ++i) {
    for (double& v : obs) v = rng.normal();
    for (double& v : act) v = rng.uniform(-1.0, 1.0);
    for (double& v : next) v = rng.normal();
    replay.add(obs, act, rng.normal(), next, i % 50 == 0);
  }
  rl::Batch b;
  for (auto _ : state) {
    replay.sample(static_cast<std::size_t>(batch), rng, b);
    benchmark::DoNotOptimize(rl::sac_update(bundle, config, b, rng));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SacUpdate)->Args({64, 64})->Args({256, 256})->Unit(benchmark::kMicrosecond);

void BM_EnvStep(benchmark::State& state) {
  const auto id = static_cast<env::EnvId>(state.range(0));
  auto e = env::make_env(env::EnvConfig::defaults(id));
  Rng rng(5);
  std::uint64_t seed = 0;
  e->reset(seed);
  std::vector<double> action(static_cast<std::size_t>(e->action_dim()));
  for (auto _ : state) {
    for (double& v : action) v = rng.uniform(-1.0, 1.0);
    const auto [obs, info] = e->step(action);
    benchmark::DoNotOptimize(obs);
    if (info.horizon_reached || info.fallen) e->reset(++seed);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_EnvStep)
    ->Arg(static_cast<int>(env::EnvId::kGraspLift2D))
    ->Arg(static_cast<int>(env::EnvId::kNarrowTablePush));

void BM_RewardEval(benchmark::State& state) {
  const std::filesystem::path data = ARCHIE_BENCH_DATA_DIR;
  auto e = env::make_env(env::EnvConfig::defaults(env::EnvId::kGraspLift2D));
  const auto bound = reward::BoundSpec::bind(
      reward::parse_reward_spec(read_file(data / "specs" / "grasp_lift.rsp")), e->observation_schema(), 300);
  const auto obs = e->reset(6);
  std::vector<double> comps(bound.component_names().size());
  for (auto _ : state) {
    bound.eval_components(obs.values, comps);
    const auto r = reward::assemble_reward(comps, bound.success(obs.values), 300);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_RewardEval);

}  // namespace

BENCHMARK_MAIN();
