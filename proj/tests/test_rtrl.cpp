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

#include <cstring>

#include "snnkit/online.hpp"
#include "test_helpers.hpp"

using namespace snnkit;

TEST_SUITE_BEGIN("rtrl");

TEST_CASE("a single step from fresh traces equals BPTT on a T=1 problem") {
  Rng rng(41);
  for (int trial = 0; trial < 5; ++trial) {
    testing::RandomNetOptions opt;
    opt.allow_trainable_tau = true;
    testing::RandomProblem p = testing::make_random_problem(rng, 1, opt);

    const GradientResult ours =
        compute_gradients(p.spec, p.params, p.x, p.labels, LossSpec{LossMode::Online},
                          GradEstimator::rtrl());
    BpttResult ref = bptt_grad(p.spec, p.params, p.x, p.labels, LossSpec{LossMode::Online});
    CHECK(testing::max_rel_diff(ours.flat, ref.grads.flatten()) < 1e-12);
    CHECK(ours.loss == doctest::Approx(ref.loss).epsilon(1e-12));
  }
}

TEST_CASE("accumulated RTRL gradients equal BPTT with the online loss") {
  Rng rng(43);
  int cat_nets = 0;
  for (int trial = 0; trial < 12; ++trial) {
    testing::RandomNetOptions opt;
    opt.allow_cat = true;
    opt.allow_trainable_tau = true;
    opt.detach_reset = trial % 3 == 0;
    testing::RandomProblem p = testing::make_random_problem(rng, 8, opt);
    if (!p.spec.cat.empty()) ++cat_nets;

    const GradientResult ours =
        compute_gradients(p.spec, p.params, p.x, p.labels, LossSpec{LossMode::Online},
                          GradEstimator::rtrl());
    BpttResult ref = bptt_grad(p.spec, p.params, p.x, p.labels, LossSpec{LossMode::Online});
    CHECK(testing::max_rel_diff(ours.flat, ref.grads.flatten()) < 1e-10);
    CHECK(ours.loss == doctest::Approx(ref.loss).epsilon(1e-12));
  }
  CHECK(cat_nets >= 1);
}

TEST_CASE("zero input leaves only bias sensitivities") {
  NetworkSpec spec;
  spec.layers.push_back(LayerSpec::affine(3));
  spec.layers.push_back(LayerSpec::lif_layer());
  spec.layers.push_back(LayerSpec::affine(2));
  spec.layers.push_back(LayerSpec::lif_layer());
  Tensor x({2, 4, 3});  // zeros
  std::vector<int> labels = {0, 0};  // equal labels so batch terms cannot cancel
  Params params = init_params(spec, x, 5);

  auto est = make_online_estimator(spec, GradEstimator::rtrl());
  est->reset(params, 2, 3);
  Tensor x_t({2, 3});
  const std::vector<BlockRange> ranges = block_ranges(params);
  for (int t = 0; t < 4; ++t) {
    OnlineStepOut out = est->step(params, x_t, labels);
    for (std::size_t i = 0; i < params.blocks.size(); ++i) {
      const ParamBlock& blk = params.blocks[i];
      double mag = 0.0;
      for (std::size_t k = 0; k < ranges[i].size; ++k)
        mag = std::max(mag, std::fabs(out.grads[ranges[i].offset + k]));
      if (blk.kind == ParamKind::Weight && blk.layer == 0) CHECK(mag == 0.0);
      if (blk.kind == ParamKind::Bias) CHECK(mag > 0.0);
    }
  }
}

TEST_CASE("estimator outputs match the plain rollout bitwise") {
  Rng rng(47);
  testing::RandomNetOptions opt;
  opt.allow_cat = true;
  testing::RandomProblem p = testing::make_random_problem(rng, 6, opt);
  Rollout r = rollout(p.spec, p.params, p.x);

  auto est = make_online_estimator(p.spec, GradEstimator::rtrl());
  est->reset(p.params, p.x.dim(0), p.x.dim(2));
  Tensor x_t({p.x.dim(0), p.x.dim(2)});
  for (std::size_t t = 0; t < 6; ++t) {
    for (std::size_t b = 0; b < p.x.dim(0); ++b)
      std::memcpy(x_t.row(b), p.x.row(b, t), p.x.dim(2) * sizeof(double));
    OnlineStepOut out = est->step(p.params, x_t, p.labels);
    for (std::size_t b = 0; b < p.x.dim(0); ++b)
      for (std::size_t c = 0; c < out.output.dim(1); ++c)
        CHECK(out.output(b, c) == r.outputs(b, t, c));
  }
}

TEST_CASE("trace state guards shape mismatches") {
  NetworkSpec spec;
  spec.layers.push_back(LayerSpec::affine(2));
  spec.layers.push_back(LayerSpec::lif_layer());
  Params params = init_params(spec, Tensor({2, 3}), 0);
  auto est = make_online_estimator(spec, GradEstimator::rtrl());
  est->reset(params, 2, 3);
  CHECK_THROWS_AS(est->step(params, Tensor({2, 4}), std::vector<int>{0, 1}), ConfigError);
  CHECK_THROWS_AS(est->step(params, Tensor({3, 3}), std::vector<int>{0, 1, 0}), ConfigError);
}

TEST_SUITE_END();
