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

#include "snnkit/analysis.hpp"
#include "snnkit/kernels.hpp"
#include "test_helpers.hpp"

using namespace snnkit;

TEST_SUITE_BEGIN("analysis");

TEST_CASE("cosine similarity basics") {
  const std::vector<double> g = {1.0, -2.0, 3.0};
  std::vector<double> neg = g;
  for (double& v : neg) v = -v;
  CHECK(cosine_similarity(g, g).value == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(cosine_similarity(g, neg).value == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(cosine_similarity(std::vector<double>{1, 0}, std::vector<double>{0, 1}).value == 0.0);
  const CosineResult zero = cosine_similarity(std::vector<double>{0, 0}, g.begin() == g.end()
                                                                             ? std::vector<double>{}
                                                                             : std::vector<double>{1, 2});
  CHECK(zero.value == 0.0);
  CHECK(zero.degenerate);
}

TEST_CASE("compare_grads: self comparison and known identities") {
  Rng rng(7);
  testing::RandomNetOptions opt;
  opt.min_blocks = 2;
  opt.max_blocks = 2;
  testing::RandomProblem p = testing::make_random_problem(rng, 5, opt);
  const LossSpec online{LossMode::Online};

  const GradReport self = compare_grads(p.spec, p.params, p.x, p.labels, online,
                                        GradEstimator::bptt(), GradEstimator::bptt());
  CHECK(self.estimator_a == "bptt");
  CHECK(std::fabs(self.global_cosine - 1.0) < 1e-12);

  const GradReport rtrl = compare_grads(p.spec, p.params, p.x, p.labels, online,
                                        GradEstimator::bptt(), GradEstimator::rtrl());
  CHECK(std::fabs(rtrl.global_cosine - 1.0) < 1e-6);

  const GradReport ostl = compare_grads(p.spec, p.params, p.x, p.labels, online,
                                        GradEstimator::bptt(), GradEstimator::ostl());
  // Final block is exact; the hidden block is an approximation but correlates.
  for (const GradReport::BlockEntry& b : ostl.blocks) {
    if (b.label == "layer2.W" || b.label == "layer2.b")
      CHECK(std::fabs(b.cosine - 1.0) < 1e-9);
    if (b.label == "layer0.W") {
      CHECK(b.cosine > 0.0);
      CHECK(b.cosine <= 1.0 + 1e-12);
    }
  }

  // Swapping the estimators transposes the report.
  const GradReport swapped = compare_grads(p.spec, p.params, p.x, p.labels, online,
                                           GradEstimator::ostl(), GradEstimator::bptt());
  CHECK(swapped.global_cosine == doctest::Approx(ostl.global_cosine).epsilon(1e-15));
  CHECK(swapped.estimator_a == ostl.estimator_b);
  CHECK(swapped.global_norm_a == ostl.global_norm_b);
}

TEST_CASE("compare_grads propagates estimator topology errors") {
  // Three layers is not an (affine, LIF) chain, so OSTL refuses it.
  NetworkSpec spec;
  spec.layers.push_back(LayerSpec::affine(3));
  spec.layers.push_back(LayerSpec::lif_layer());
  spec.layers.push_back(LayerSpec::affine(2));
  Tensor x({1, 2, 2});
  x(0, 0, 0) = 1.0;
  Params params = init_params(spec, x, 0);
  const std::vector<int> labels = {0};
  CHECK_THROWS_WITH(compare_grads(spec, params, x, labels, LossSpec{LossMode::Online},
                                  GradEstimator::bptt(), GradEstimator::ostl()),
                    doctest::Contains("OSTL requires a layer chain"));
}

TEST_CASE("filter_normalize rescales rows to the parameter norms") {
  NetworkSpec spec;
  spec.layers.push_back(LayerSpec::affine(2));
  spec.layers.push_back(LayerSpec::lif_layer());
  Params params = init_params(spec, Tensor({1, 2}), 3);
  params.at(0, ParamKind::Weight) = Tensor::from_values({2, 2}, {0.3, 0.4, 0.0, 2.0});
  params.at(0, ParamKind::Bias) = Tensor::from_values({2}, {1.0, 0.0});

  SUBCASE("identity when direction == params") {
    Params dir = params;
    filter_normalize(dir, params);
    CHECK(dir.flatten() == params.flatten());
  }

  SUBCASE("ratio rule and the zero guard") {
    Params dir = zeros_like(params);
    dir.at(0, ParamKind::Weight) = Tensor::from_values({2, 2}, {2.0, 0.0, 0.0, 0.0});
    filter_normalize(dir, params);
    // Row norm 2 rescaled to the parameter row norm 0.5: factor 0.25.
    CHECK(dir.at(0, ParamKind::Weight)(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
    // Zero rows and zero blocks stay zero.
    CHECK(dir.at(0, ParamKind::Weight)(1, 0) == 0.0);
    CHECK(dir.at(0, ParamKind::Bias)[0] == 0.0);
  }
}

TEST_CASE("loss landscape grid") {
  Rng rng(15);
  testing::RandomProblem p = testing::make_random_problem(rng, 4);
  const LossSpec loss{LossMode::Offline};

  LandscapeGrid grid = loss_landscape(p.spec, p.params, p.x, p.labels, loss, 5, 1.0, 9);
  CHECK(grid.loss.size() == 25);
  const double direct = evaluate_loss(p.spec, p.params, p.x, p.labels, loss);
  CHECK(grid.at(2, 2) == direct);  // bitwise
  CHECK(grid.center_loss == direct);

  LandscapeGrid again = loss_landscape(p.spec, p.params, p.x, p.labels, loss, 5, 1.0, 9);
  CHECK(grid.loss == again.loss);

  LandscapeGrid other_seed = loss_landscape(p.spec, p.params, p.x, p.labels, loss, 5, 1.0, 10);
  CHECK(grid.loss != other_seed.loss);

  CHECK_THROWS_AS(loss_landscape(p.spec, p.params, p.x, p.labels, loss, 4, 1.0, 9), ConfigError);
  CHECK_THROWS_AS(loss_landscape(p.spec, p.params, p.x, p.labels, loss, 5, 0.0, 9), ConfigError);

  // Parallel evaluation returns the same grid.
  kernels::set_num_threads(2);
  LandscapeGrid parallel = loss_landscape(p.spec, p.params, p.x, p.labels, loss, 5, 1.0, 9);
  kernels::set_num_threads(1);
  CHECK(parallel.loss == grid.loss);
}

TEST_CASE("non-finite landscape cells become +inf flags") {
  NetworkSpec spec;
  spec.layers.push_back(LayerSpec::affine(2));
  spec.layers.push_back(LayerSpec::lif_layer());
  Tensor x({1, 2, 2});
  x(0, 0, 0) = 1.0;
  Params params = init_params(spec, x, 0);
  for (double& v : params.at(0, ParamKind::Weight).flat()) v = 1e200;
  const std::vector<int> labels = {0};
  LandscapeGrid grid =
      loss_landscape(spec, params, x, labels, LossSpec{LossMode::Offline}, 3, 1.0, 1);
  bool has_inf = false;
  for (double v : grid.loss) has_inf = has_inf || std::isinf(v);
  CHECK(has_inf);
}

TEST_CASE("trajectory projection into the grid frame") {
  Rng rng(19);
  testing::RandomProblem p = testing::make_random_problem(rng, 3);
  LandscapeGrid grid =
      loss_landscape(p.spec, p.params, p.x, p.labels, LossSpec{LossMode::Offline}, 3, 0.5, 4);

  const std::vector<double> theta = p.params.flatten();
  const std::vector<double> d = grid.delta.flatten();
  const std::vector<double> e = grid.eta.flatten();

  Params center = p.params;
  Params shifted = p.params;
  std::vector<double> t1(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) t1[i] = theta[i] + 0.3 * d[i];
  shifted.load_flat(t1);

  const auto points = project_trajectory({center, shifted}, grid);
  CHECK(points[0][0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(points[0][1] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(points[1][0] == doctest::Approx(0.3).epsilon(1e-10));
  double de = 0.0, ee = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    de += d[i] * e[i];
    ee += e[i] * e[i];
  }
  CHECK(points[1][1] == doctest::Approx(0.3 * de / ee).epsilon(1e-10));

  // Linearity: the first coordinate is exactly linear in the eta step, with
  // the cross-term slope <eta, delta>/|delta|^2; after orthogonalizing eta
  // against delta, moving only along eta leaves the first coordinate alone.
  double dd = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) dd += d[i] * d[i];
  LandscapeGrid ortho = grid;
  std::vector<double> e_orth = e;
  for (std::size_t i = 0; i < e.size(); ++i) e_orth[i] -= de / dd * d[i];
  ortho.eta.load_flat(e_orth);

  Params shifted2 = p.params;
  std::vector<double> t2(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) t2[i] = theta[i] + 0.7 * e_orth[i];
  shifted2.load_flat(t2);
  Params shifted3 = p.params;
  for (std::size_t i = 0; i < theta.size(); ++i) t2[i] = theta[i] + 1.4 * e_orth[i];
  shifted3.load_flat(t2);
  const auto only_eta = project_trajectory({shifted2, shifted3}, ortho);
  CHECK(only_eta[0][0] == doctest::Approx(only_eta[1][0]).epsilon(1e-9));
  CHECK(only_eta[1][1] == doctest::Approx(2.0 * only_eta[0][1]).epsilon(1e-9));
}

TEST_CASE("PCA directions recover a linear trajectory") {
  Rng rng(23);
  testing::RandomProblem p = testing::make_random_problem(rng, 3);
  const std::vector<double> theta = p.params.flatten();
  std::vector<double> line(theta.size());
  Rng dir_rng(5);
  for (double& v : line) v = dir_rng.next_gaussian();

  std::vector<Params> ckpts;
  for (double step : {0.1, 0.2, 0.3, 0.4}) {
    std::vector<double> t(theta.size());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = theta[i] + step * line[i];
    Params c = p.params;
    c.load_flat(t);
    ckpts.push_back(std::move(c));
  }
  auto [pc1, pc2] = trajectory_pca_directions(ckpts, p.params);
  const CosineResult c = cosine_similarity(pc1.flatten(), line);
  CHECK(std::fabs(std::fabs(c.value) - 1.0) < 1e-6);
  (void)pc2;
}

TEST_CASE("metrics: sparsity, accuracy, counts") {
  NetworkSpec spec;
  spec.layers.push_back(LayerSpec::affine(10));
  spec.layers.push_back(LayerSpec::lif_layer());
  spec.layers.push_back(LayerSpec::affine(10));
  spec.layers.push_back(LayerSpec::lif_layer());
  Tensor x({4, 50, 6});
  for (double& v : x.flat()) v = 0.0;
  Params params = init_params(spec, x, 0);
  for (ParamBlock& b : params.blocks)
    for (double& v : b.value.flat()) v = 0.0;
  const std::vector<int> labels = {0, 1, 2, 3};

  Rollout r = rollout(spec, params, x);
  MetricSummary m = metrics(spec, r.records, r.outputs, labels);
  CHECK(m.activation_sparsity == 1.0);
  CHECK(m.neuron_updates == (10 + 10) * 50 * 4);
  CHECK(m.synaptic_ops == 0);  // nothing nonzero enters any affine layer
  CHECK(m.accuracy == doctest::Approx(0.25));  // all-zero logits tie-break to class 0

  // Perfect predictions via crafted outputs.
  Tensor outputs({4, 1, 10});
  for (std::size_t b = 0; b < 4; ++b) outputs(b, 0, static_cast<std::size_t>(labels[b])) = 1.0;
  MetricSummary crafted = metrics(spec, r.records, outputs, labels);
  CHECK(crafted.accuracy == 1.0);
}

TEST_CASE("metrics are invariant under batch replication") {
  Rng rng(29);
  testing::RandomProblem p = testing::make_random_problem(rng, 5);
  Rollout r1 = rollout(p.spec, p.params, p.x);
  MetricSummary m1 = metrics(p.spec, r1.records, r1.outputs, p.labels);

  const std::size_t batch = p.x.dim(0), T = p.x.dim(1), F = p.x.dim(2);
  Tensor x2({2 * batch, T, F});
  std::vector<int> labels2(2 * batch);
  for (std::size_t b = 0; b < 2 * batch; ++b) {
    std::memcpy(x2.row(b, 0), p.x.row(b % batch, 0), T * F * sizeof(double));
    labels2[b] = p.labels[b % batch];
  }
  Rollout r2 = rollout(p.spec, p.params, x2);
  MetricSummary m2 = metrics(p.spec, r2.records, r2.outputs, labels2);
  CHECK(m1.accuracy == doctest::Approx(m2.accuracy).epsilon(1e-12));
  CHECK(m1.activation_sparsity == doctest::Approx(m2.activation_sparsity).epsilon(1e-12));
  CHECK(m2.neuron_updates == 2 * m1.neuron_updates);
  CHECK(m2.synaptic_ops == 2 * m1.synaptic_ops);
}

TEST_CASE("finite difference machinery") {
  const auto f = [](std::span<const double> t) { return t[0] * t[0]; };
  const std::vector<double> theta = {3.0};
  CHECK(central_diff(f, theta, 0, 1e-5) == doctest::Approx(6.0).epsilon(1e-8));
  CHECK_THROWS_AS(central_diff(f, theta, 0, 0.0), ConfigError);

  Rng rng(31);
  testing::RandomNetOptions opt;
  opt.smooth = true;
  testing::RandomProblem p = testing::make_random_problem(rng, 3, opt);
  CHECK_THROWS_AS(
      finite_diff_grad(p.spec, p.params, p.x, p.labels, LossSpec{LossMode::Offline}, 0.0),
      ConfigError);
  // finite_diff_grad forces smooth mode itself, so a spiking spec gives the
  // same oracle values as its smooth variant.
  NetworkSpec hard = p.spec;
  for (LayerSpec& l : hard.layers)
    if (l.kind == LayerSpec::Kind::Lif) l.lif.smooth_forward = false;
  const std::vector<double> a =
      finite_diff_grad(hard, p.params, p.x, p.labels, LossSpec{LossMode::Offline}, 1e-5);
  const std::vector<double> b =
      finite_diff_grad(p.spec, p.params, p.x, p.labels, LossSpec{LossMode::Offline}, 1e-5);
  CHECK(a == b);
}

TEST_SUITE_END();
