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

#include <filesystem>
#include <fstream>

#include "snnkit/benchnet.hpp"
#include "snnkit/io.hpp"
#include "test_helpers.hpp"

using namespace snnkit;
namespace fs = std::filesystem;

TEST_SUITE_BEGIN("io");

namespace {

fs::path scratch_dir(const char* name) {
  const fs::path dir = fs::temp_directory_path() / "snnkit_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("parameter files round-trip bitwise") {
  Rng rng(3);
  testing::RandomNetOptions opt;
  opt.allow_trainable_tau = true;
  testing::RandomProblem p = testing::make_random_problem(rng, 2, opt);
  const fs::path dir = scratch_dir("params");
  const std::string path = (dir / "p.bin").string();
  save_params(path, p.params, provenance("cfg"));
  const Params loaded = load_params(path);
  CHECK(loaded.flatten() == p.params.flatten());
  REQUIRE(loaded.blocks.size() == p.params.blocks.size());
  for (std::size_t i = 0; i < loaded.blocks.size(); ++i) {
    CHECK(loaded.blocks[i].layer == p.params.blocks[i].layer);
    CHECK(loaded.blocks[i].kind == p.params.blocks[i].kind);
    CHECK(loaded.blocks[i].value.shape() == p.params.blocks[i].value.shape());
  }
  CHECK_THROWS_AS(load_params((dir / "missing.bin").string()), IoError);
}

TEST_CASE("raster export round-trips in both body formats") {
  RandmanConfig cfg;
  cfg.classes = 2;
  cfg.units = 4;
  cfg.timesteps = 6;
  cfg.samples_per_class = 5;
  cfg.manifold_seed = 1;
  cfg.sample_seed = 2;
  const RandmanDataset ds = generate(cfg);

  for (const bool binary : {false, true}) {
    const fs::path dir = scratch_dir(binary ? "raster_bin" : "raster_csv");
    const Json header = save_raster(dir.string(), ds, binary, provenance("cfg"));
    CHECK(header.at("count") == 10);
    CHECK(header.at("T") == 6);
    CHECK(header.at("C") == 2);
    const SpikeRaster back = load_raster(dir.string());
    CHECK(back.data == ds.raster.data);
    CHECK(back.labels == ds.raster.labels);
  }
}

TEST_CASE("malformed raster bodies surface as IO errors") {
  const fs::path dir = scratch_dir("raster_bad");
  std::ofstream(dir / "raster.json")
      << R"({"C":1,"M":2,"D":1,"alpha":2.0,"K":5,"T":2,"encoding":"time",
             "seeds":{"manifold":0,"sample":0},"count":1,"body":"csv"})";
  std::ofstream(dir / "raster.csv") << "1,zebra\n0,1\n";
  std::ofstream(dir / "labels.csv") << "0\n";
  CHECK_THROWS_AS(load_raster(dir.string()), IoError);

  std::ofstream(dir / "raster.csv", std::ios::trunc) << "1,0\n0,1\n";
  std::ofstream(dir / "labels.csv", std::ios::trunc) << "not-a-label\n";
  CHECK_THROWS_AS(load_raster(dir.string()), IoError);

  std::ofstream(dir / "labels.csv", std::ios::trunc) << "0\n1\n";
  CHECK_THROWS_WITH(load_raster(dir.string()), doctest::Contains("label count"));
}

TEST_CASE("network specs round-trip through JSON") {
  NetworkSpec spec;
  spec.layers.push_back(LayerSpec::affine(5));
  LifConfig cfg;
  cfg.tau_init = 1.5;
  cfg.trainable_tau = true;
  cfg.surrogate = SurrogateSpec::atan(3.0);
  spec.layers.push_back(LayerSpec::lif_layer(cfg));
  spec.cat[0] = {1};

  const NetworkSpec back = network_from_json(network_to_json(spec));
  REQUIRE(back.layers.size() == 2);
  CHECK(back.layers[0].out_features == 5);
  CHECK(back.layers[1].lif.tau_init == 1.5);
  CHECK(back.layers[1].lif.trainable_tau);
  CHECK(back.layers[1].lif.surrogate.kind == SurrogateKind::Atan);
  CHECK(back.layers[1].lif.surrogate.width == 3.0);
  CHECK(back.cat.at(0) == std::vector<std::size_t>{1});
}

TEST_CASE("run config parsing is strict about keys and combinations") {
  Json good = Json::parse(R"({
    "network": {"layers": [{"type":"affine","out":4},{"type":"lif"}]},
    "learning": {"estimator":"rtrl","mode":"deferred","loss":"online"},
    "optimizer": {"kind":"sgd","lr":0.1},
    "dataset": {"randman": {"classes":2,"units":3,"timesteps":5,"samples_per_class":4}},
    "run": {"epochs":1,"batch_size":2,"seed":7,"output_dir":"x"}
  })");
  const RunConfig cfg = parse_run_config(good);
  CHECK(cfg.estimator.kind == GradEstimator::Kind::Rtrl);
  CHECK(cfg.mode == TrainMode::OnlineDeferred);
  CHECK(cfg.epochs == 1);

  Json unknown = good;
  unknown["run"]["bogus"] = 1;
  CHECK_THROWS_WITH(parse_run_config(unknown), doctest::Contains("unknown key 'bogus'"));

  Json bad_mode = good;
  bad_mode["learning"]["estimator"] = "bptt";
  bad_mode["learning"]["mode"] = "online";
  CHECK_THROWS_WITH(parse_run_config(bad_mode), doctest::Contains("not an online estimator"));

  Json offline_online = good;
  offline_online["learning"] = Json{{"estimator", "rtrl"}, {"mode", "offline"}, {"loss", "offline"}};
  CHECK_THROWS_AS(parse_run_config(offline_online), ConfigError);

  Json offline_loss = good;
  offline_loss["learning"]["loss"] = "offline";
  CHECK_THROWS_AS(parse_run_config(offline_loss), ConfigError);

  Json both_datasets = good;
  both_datasets["dataset"]["raster"] = "somewhere";
  CHECK_THROWS_AS(parse_run_config(both_datasets), ConfigError);

  // Defaults: only a network is required.
  Json minimal = Json::parse(R"({"network": {"layers": [{"type":"affine","out":2}]}})");
  const RunConfig def = parse_run_config(minimal);
  CHECK(def.mode == TrainMode::Offline);
  CHECK(def.optimizer.kind == OptimizerSpec::Kind::Adamax);
  CHECK(def.randman.has_value());
  CHECK(def.batch_size == 64);
}

TEST_CASE("provenance hashing is stable") {
  CHECK(hex64(fnv1a64("")) == "cbf29ce484222325");
  const Json a = provenance("config text");
  const Json b = provenance("config text");
  CHECK(a == b);
  CHECK(a.at("tool") == "snnkit");
  CHECK(provenance("other").at("config_hash") != a.at("config_hash"));
}

TEST_CASE("the benchmark net reproduces library BPTT gradients") {
  const std::size_t layers = 2, width = 5, batch = 3, T = 4;
  BenchNet<double> bench(layers, width, batch, T, 77);
  bench.run();

  NetworkSpec spec;
  for (std::size_t l = 0; l < layers; ++l) {
    spec.layers.push_back(LayerSpec::affine(width));
    spec.layers.push_back(LayerSpec::lif_layer());
  }
  Tensor x({batch, T, width});
  // BenchNet stores input as (T, batch, width).
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t b = 0; b < batch; ++b)
      for (std::size_t f = 0; f < width; ++f)
        x(b, t, f) = bench.input()[(t * batch + b) * width + f];
  std::vector<int> labels(batch);
  for (std::size_t b = 0; b < batch; ++b) labels[b] = static_cast<int>(bench.labels()[b]);

  Params params = init_params(spec, x, 0);
  for (std::size_t l = 0; l < layers; ++l) {
    Tensor& W = params.at(2 * l, ParamKind::Weight);
    std::memcpy(W.data(), bench.weights(l).data(), width * width * sizeof(double));
    for (double& v : params.at(2 * l, ParamKind::Bias).flat()) v = 0.0;
  }

  BpttResult ref = bptt_grad(spec, params, x, labels, LossSpec{LossMode::Offline});
  for (std::size_t l = 0; l < layers; ++l) {
    CHECK(testing::max_rel_diff(bench.weight_grad(l),
                                ref.grads.at(2 * l, ParamKind::Weight).flat()) < 1e-11);
    CHECK(testing::max_rel_diff(bench.bias_grad(l), ref.grads.at(2 * l, ParamKind::Bias).flat()) <
          1e-11);
  }
}

TEST_SUITE_END();
