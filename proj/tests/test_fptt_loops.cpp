// Copyright 2026 The snnkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <cmath>
#include <cstring>

#include "snnkit/train.hpp"
#include "test_helpers.hpp"

using namespace snnkit;

TEST_SUITE_BEGIN("fptt_loops");

namespace {

Params scalar_params(double value) {
  Params p;
  p.blocks.push_back({0, ParamKind::Bias, Tensor::from_values({1}, {value})});
  return p;
}

}  // namespace

TEST_CASE("FPTT scalar recursion, hand-computed") {
  FpttConfig cfg;
  cfg.alpha = 2.0;
  Params params = scalar_params(1.0);
  FpttState state;
  state.running_mean = {0.0};
  OptimizerSpec sgd = OptimizerSpec::sgd(0.1);
  OptState opt_state = init_opt_state(sgd, 1);

  const std::vector<double> zero_grad = {0.0};
  fptt_update(cfg, zero_grad, params, sgd, opt_state, state);
  // g_eff = 0 + 2*(1-0) = 2; theta' = 1 - 0.1*2 = 0.8;
  // theta_bar' = (0 + 0.8)/2 - 0/(2*2) = 0.4.
  CHECK(params.blocks[0].value[0] == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(state.running_mean[0] == doctest::Approx(0.4).epsilon(1e-15));
}

TEST_CASE("FPTT fixed point: theta == theta_bar with zero gradient") {
  FpttConfig cfg;
  Params params = scalar_params(0.75);
  FpttState state = init_fptt_state(params);
  OptimizerSpec sgd = OptimizerSpec::sgd(0.1);
  OptState opt_state = init_opt_state(sgd, 1);
  fptt_update(cfg, std::vector<double>{0.0}, params, sgd, opt_state, state);
  CHECK(params.blocks[0].value[0] == 0.75);
  CHECK(state.running_mean[0] == 0.75);
}

TEST_CASE("FPTT with zero inner gradients contracts theta toward theta_bar") {
  FpttConfig cfg;
  cfg.alpha = 3.0;
  Params params = scalar_params(1.0);
  FpttState state;
  state.running_mean = {0.0};
  OptimizerSpec sgd = OptimizerSpec::sgd(0.1);
  OptState opt_state = init_opt_state(sgd, 1);
  double prev = 1.0;
  for (int i = 0; i < 10; ++i) {
    fptt_update(cfg, std::vector<double>{0.0}, params, sgd, opt_state, state);
    const double now = std::fabs(params.blocks[0].value[0]);
    CHECK(now < prev);
    prev = now;
  }
}

TEST_CASE("FPTT rejects non-positive alpha and drives the regrad callback") {
  FpttConfig bad;
  bad.alpha = 0.0;
  Params params = scalar_params(1.0);
  FpttState state = init_fptt_state(params);
  OptimizerSpec sgd = OptimizerSpec::sgd(0.1);
  OptState opt_state = init_opt_state(sgd, 1);
  CHECK_THROWS_AS(fptt_update(bad, std::vector<double>{0.0}, params, sgd, opt_state, state),
                  ConfigError);

  FpttConfig recompute;
  recompute.alpha = 2.0;
  recompute.reuse_gradient = false;
  bool called = false;
  const RegradFn regrad = [&](const Params& updated) {
    called = true;
    return std::vector<double>{updated.blocks[0].value[0]};
  };
  fptt_update(recompute, std::vector<double>{0.5}, params, sgd, opt_state, state, regrad);
  CHECK(called);
  CHECK_THROWS_AS(
      fptt_update(recompute, std::vector<double>{0.5}, params, sgd, opt_state, state, nullptr),
      ConfigError);
}

TEST_CASE("train_online rejects BPTT and the offline loss") {
  Rng rng(71);
  testing::RandomProblem p = testing::make_random_problem(rng, 3);
  OptimizerSpec opt = OptimizerSpec::sgd(0.1);
  OptState opt_state = init_opt_state(opt, p.params.total_size());
  CHECK_THROWS_WITH(train_online(p.spec, p.params, opt, opt_state, p.x, p.labels,
                                 LossSpec{LossMode::Online}, GradEstimator::bptt()),
                    doctest::Contains("BPTT is not an online estimator"));
  CHECK_THROWS_AS(train_online(p.spec, p.params, opt, opt_state, p.x, p.labels,
                               LossSpec{LossMode::Offline}, GradEstimator::rtrl()),
                  ConfigError);
}

TEST_CASE("zero learning rate leaves parameters and losses untouched") {
  Rng rng(73);
  testing::RandomProblem p = testing::make_random_problem(rng, 5);
  OptimizerSpec opt = OptimizerSpec::sgd(0.0);
  OptState opt_state = init_opt_state(opt, p.params.total_size());
  const std::vector<double> before = p.params.flatten();

  Params online_params = p.params;
  TrainStepResult online = train_online(p.spec, online_params, opt, opt_state, p.x, p.labels,
                                        LossSpec{LossMode::Online}, GradEstimator::rtrl());
  CHECK(online_params.flatten() == before);

  // Per-step losses equal the no-update rollout's.
  const GradientResult fixed = compute_gradients(p.spec, p.params, p.x, p.labels,
                                                 LossSpec{LossMode::Online}, GradEstimator::rtrl());
  CHECK(online.loss == doctest::Approx(fixed.loss).epsilon(1e-12));

  Params deferred_params = p.params;
  train_online_deferred(p.spec, deferred_params, opt, opt_state, p.x, p.labels,
                        LossSpec{LossMode::Online}, GradEstimator::rtrl());
  CHECK(deferred_params.flatten() == before);
}

TEST_CASE("T=1 train_online with RTRL coincides with train_offline on the online loss") {
  Rng rng(79);
  testing::RandomProblem p = testing::make_random_problem(rng, 1);
  OptimizerSpec opt = OptimizerSpec::adamax(0.01);

  Params a = p.params;
  OptState sa = init_opt_state(opt, a.total_size());
  train_online(p.spec, a, opt, sa, p.x, p.labels, LossSpec{LossMode::Online},
               GradEstimator::rtrl());

  Params b = p.params;
  OptState sb = init_opt_state(opt, b.total_size());
  train_offline(p.spec, b, opt, sb, p.x, p.labels, LossSpec{LossMode::Online});

  CHECK(testing::max_abs_diff(a.flatten(), b.flatten()) < 1e-12);
}

TEST_CASE("RTRL deferred reproduces offline training with the online loss") {
  Rng rng(83);
  testing::RandomNetOptions opt_net;
  opt_net.allow_cat = true;
  testing::RandomProblem p = testing::make_random_problem(rng, 6, opt_net);
  OptimizerSpec opt = OptimizerSpec::adamax(0.005);

  Params a = p.params, b = p.params;
  OptState sa = init_opt_state(opt, a.total_size());
  OptState sb = init_opt_state(opt, b.total_size());
  for (int step = 0; step < 3; ++step) {
    train_online_deferred(p.spec, a, opt, sa, p.x, p.labels, LossSpec{LossMode::Online},
                          GradEstimator::rtrl());
    train_offline(p.spec, b, opt, sb, p.x, p.labels, LossSpec{LossMode::Online});
  }
  CHECK(testing::max_abs_diff(a.flatten(), b.flatten()) < 1e-10);
}

TEST_CASE("single-block OSTL deferred equals RTRL deferred") {
  Rng rng(89);
  testing::RandomNetOptions opt_net;
  opt_net.min_blocks = 1;
  opt_net.max_blocks = 1;
  testing::RandomProblem p = testing::make_random_problem(rng, 6, opt_net);
  OptimizerSpec opt = OptimizerSpec::adamax(0.005);

  Params a = p.params, b = p.params;
  OptState sa = init_opt_state(opt, a.total_size());
  OptState sb = init_opt_state(opt, b.total_size());
  train_online_deferred(p.spec, a, opt, sa, p.x, p.labels, LossSpec{LossMode::Online},
                        GradEstimator::ostl());
  train_online_deferred(p.spec, b, opt, sb, p.x, p.labels, LossSpec{LossMode::Online},
                        GradEstimator::rtrl());
  CHECK(testing::max_abs_diff(a.flatten(), b.flatten()) < 1e-11);
}

TEST_CASE("train_online with the FPTT wrapper returns the running mean") {
  Rng rng(97);
  testing::RandomProblem p = testing::make_random_problem(rng, 4);
  OptimizerSpec opt = OptimizerSpec::sgd(0.05);
  OptState opt_state = init_opt_state(opt, p.params.total_size());
  FpttConfig fptt;
  FpttState fptt_state;
  Params params = p.params;
  TrainStepResult r = train_online(p.spec, params, opt, opt_state, p.x, p.labels,
                                   LossSpec{LossMode::Online}, GradEstimator::rtrl(), &fptt,
                                   &fptt_state);
  CHECK(std::isfinite(r.loss));
  CHECK(fptt_state.running_mean.size() == p.params.total_size());
  CHECK(params.flatten() != p.params.flatten());

  // The recomputed-gradient variant takes the same call shape.
  FpttConfig recompute;
  recompute.reuse_gradient = false;
  Params params2 = p.params;
  OptState opt_state2 = init_opt_state(opt, p.params.total_size());
  FpttState fptt_state2;
  TrainStepResult r2 = train_online(p.spec, params2, opt, opt_state2, p.x, p.labels,
                                    LossSpec{LossMode::Online}, GradEstimator::rtrl(), &recompute,
                                    &fptt_state2);
  CHECK(std::isfinite(r2.loss));
  CHECK(fptt_state2.running_mean != fptt_state.running_mean);
}

TEST_CASE("repeated offline steps descend on a fixed batch") {
  Rng rng(103);
  testing::RandomNetOptions opt_net;
  opt_net.min_blocks = 2;
  opt_net.max_blocks = 2;
  opt_net.min_width = 4;
  opt_net.max_width = 6;
  testing::RandomProblem p = testing::make_random_problem(rng, 6, opt_net);
  OptimizerSpec opt = OptimizerSpec::adamax(0.01);
  OptState opt_state = init_opt_state(opt, p.params.total_size());

  Params params = p.params;
  std::vector<double> losses;
  for (int step = 0; step < 11; ++step)
    losses.push_back(train_offline(p.spec, params, opt, opt_state, p.x, p.labels,
                                   LossSpec{LossMode::Offline})
                         .loss);
  int non_monotone = 0;
  for (std::size_t i = 1; i < losses.size(); ++i)
    if (losses[i] > losses[i - 1]) ++non_monotone;
  CHECK(losses.back() <= losses.front());
  CHECK(non_monotone <= 2);
}

TEST_CASE("online training runs with each layer-local rule") {
  Rng rng(107);
  testing::RandomNetOptions opt_net;
  opt_net.min_blocks = 2;
  opt_net.max_blocks = 2;
  opt_net.tau_lo = opt_net.tau_hi = 2.0;
  testing::RandomProblem p = testing::make_random_problem(rng, 4, opt_net);
  OptimizerSpec opt = OptimizerSpec::sgd(0.01);
  for (const GradEstimator est : {GradEstimator::ostl(), GradEstimator::ottt()}) {
    Params params = p.params;
    OptState opt_state = init_opt_state(opt, params.total_size());
    TrainStepResult r = train_online(p.spec, params, opt, opt_state, p.x, p.labels,
                                     LossSpec{LossMode::Online}, est);
    CHECK(std::isfinite(r.loss));
    CHECK(params.flatten() != p.params.flatten());
  }
}

TEST_CASE("fit runs epochs with deterministic shuffling and reports stats") {
  Rng rng(101);
  testing::RandomProblem p = testing::make_random_problem(rng, 4);
  // A small dataset out of repeated batches.
  const std::size_t n = 8, T = 4, F = p.x.dim(2);
  Tensor x_all({n, T, F});
  std::vector<int> labels_all(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t src = i % p.x.dim(0);
    std::memcpy(x_all.row(i, 0), p.x.row(src, 0), T * F * sizeof(double));
    labels_all[i] = p.labels[src];
  }

  FitConfig cfg;
  cfg.mode = TrainMode::Offline;
  cfg.loss = LossSpec{LossMode::Offline};
  cfg.opt = OptimizerSpec::adamax(0.002);
  cfg.epochs = 2;
  cfg.batch_size = 3;  // exercises a short final batch
  cfg.seed = 5;

  std::vector<double> losses;
  Params params1 = p.params;
  fit(p.spec, params1, x_all, labels_all, cfg, [&](std::size_t, const EpochStats& s, const Params&) {
    losses.push_back(s.loss);
    CHECK(s.accuracy >= 0.0);
    CHECK(s.accuracy <= 1.0);
  });
  CHECK(losses.size() == 2);

  Params params2 = p.params;
  fit(p.spec, params2, x_all, labels_all, cfg, nullptr);
  CHECK(params1.flatten() == params2.flatten());

  FitConfig bad = cfg;
  bad.mode = TrainMode::Online;
  bad.estimator = GradEstimator::bptt();
  Params params3 = p.params;
  CHECK_THROWS_AS(fit(p.spec, params3, x_all, labels_all, bad, nullptr), ConfigError);
}

TEST_SUITE_END();
