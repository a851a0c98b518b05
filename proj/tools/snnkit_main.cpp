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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "snnkit/benchnet.hpp"
#include "snnkit/io.hpp"
#include "snnkit/version.hpp"

namespace fs = std::filesystem;
using namespace snnkit;

namespace {

int env_threads() {
  const char* v = std::getenv("SNNKIT_THREADS");
  if (!v) return 1;
  const int n = std::atoi(v);
  return n >= 1 ? n : 1;
}

// Precedence: --out flag, then SNNKIT_OUTPUT_DIR, then the config value.
std::string resolve_out_dir(const std::string& flag, const std::string& config_value) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("SNNKIT_OUTPUT_DIR")) return env;
  return config_value;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir);
}

struct Dataset {
  SpikeRaster raster;
  std::optional<RandmanDataset> randman;  // kept for export headers
};

Dataset load_dataset(const RunConfig& cfg) {
  Dataset ds;
  if (cfg.randman) {
    ds.randman = generate(*cfg.randman);
    ds.raster = ds.randman->raster;
  } else {
    ds.raster = load_raster(cfg.raster_dir);
  }
  return ds;
}

// Leading batch_size samples, used by compare-grads and landscape so their
// inputs are deterministic.
void head_batch(const SpikeRaster& raster, std::size_t batch_size, Tensor* x,
                std::vector<int>* labels) {
  const std::size_t n = std::min<std::size_t>(batch_size, raster.data.dim(0));
  SNNKIT_CHECK(n >= 1, "dataset is empty");
  const std::size_t T = raster.data.dim(1), M = raster.data.dim(2);
  *x = Tensor({n, T, M});
  labels->assign(raster.labels.begin(), raster.labels.begin() + static_cast<long>(n));
  std::memcpy(x->data(), raster.data.data(), n * T * M * sizeof(double));
}

std::string params_path(const std::string& dir, const std::string& stem) {
  return dir + "/" + stem + ".bin";
}

// ---- train ----

int cmd_train(const std::string& config_path, const std::string& out_flag) {
  std::string config_text;
  const RunConfig cfg = load_run_config(config_path, &config_text);
  const Json prov = provenance(config_text);
  const std::string out_dir = resolve_out_dir(out_flag, cfg.output_dir);
  ensure_dir(out_dir);

  const Dataset ds = load_dataset(cfg);
  const Tensor& x_all = ds.raster.data;
  SNNKIT_CHECK(ds.raster.labels.size() == x_all.dim(0), "dataset labels do not match raster");

  Params params = init_params(cfg.network, x_all, cfg.seed);

  std::ofstream metrics(out_dir + "/metrics.jsonl");
  if (!metrics) throw IoError("cannot write " + out_dir + "/metrics.jsonl");
  metrics << Json{{"provenance", prov}}.dump() << "\n";
  metrics.flush();

  FitConfig fit_cfg;
  fit_cfg.mode = cfg.mode;
  fit_cfg.estimator = cfg.estimator;
  fit_cfg.loss = cfg.loss;
  fit_cfg.opt = cfg.optimizer;
  fit_cfg.fptt = cfg.fptt;
  fit_cfg.epochs = cfg.epochs;
  fit_cfg.batch_size = cfg.batch_size;
  fit_cfg.seed = cfg.seed;

  const auto hook = [&](std::size_t epoch, const EpochStats& stats, const Params& p) {
    Json line;
    line["epoch"] = epoch;
    line["loss"] = stats.loss;
    line["accuracy"] = stats.accuracy;
    line["wall_ms"] = stats.wall_ms;
    metrics << line.dump() << "\n";
    metrics.flush();
    std::printf("epoch %zu  loss %.6f  accuracy %.4f  (%.0f ms)\n", epoch, stats.loss,
                stats.accuracy, stats.wall_ms);
    save_params(params_path(out_dir, "params_last_good"), p, prov);
    if (cfg.checkpoint_every > 0 && epoch % cfg.checkpoint_every == 0) {
      char name[64];
      std::snprintf(name, sizeof(name), "params_epoch_%05zu", epoch);
      save_params(params_path(out_dir, name), p, prov);
    }
  };

  fit(cfg.network, params, x_all, ds.raster.labels, fit_cfg, hook);
  save_params(params_path(out_dir, "params_final"), params, prov);
  std::printf("wrote %s\n", params_path(out_dir, "params_final").c_str());
  return 0;
}

// ---- eval ----

int cmd_eval(const std::string& config_path, const std::string& params_file,
             const std::string& out_flag) {
  std::string config_text;
  const RunConfig cfg = load_run_config(config_path, &config_text);
  const Json prov = provenance(config_text);
  const std::string out_dir = resolve_out_dir(out_flag, cfg.output_dir);

  const Dataset ds = load_dataset(cfg);
  const Params params = params_file.empty() ? init_params(cfg.network, ds.raster.data, cfg.seed)
                                            : load_params(params_file);

  const Tensor& x = ds.raster.data;
  const std::vector<int>& labels = ds.raster.labels;
  const Rollout r = rollout(cfg.network, params, x);
  const MetricSummary summary = metrics(cfg.network, r.records, r.outputs, labels);
  double loss = 0.0;
  if (cfg.loss.mode == LossMode::Offline) {
    loss = loss_offline(r.outputs, labels);
  } else {
    const std::size_t batch = x.dim(0), T = x.dim(1), classes = r.outputs.dim(2);
    Tensor out_t({batch, classes});
    for (std::size_t t = 0; t < T; ++t) {
      for (std::size_t b = 0; b < batch; ++b)
        std::memcpy(out_t.row(b), r.outputs.row(b, t), classes * sizeof(double));
      loss += loss_online_step(out_t, labels);
    }
  }

  Json j = metrics_to_json(summary);
  j["loss"] = loss;
  j["samples"] = x.dim(0);
  j["provenance"] = prov;
  std::cout << j.dump(2) << "\n";
  ensure_dir(out_dir);
  std::ofstream out(out_dir + "/eval.json");
  if (!out) throw IoError("cannot write " + out_dir + "/eval.json");
  out << j.dump(2) << "\n";
  return 0;
}

// ---- compare-grads ----

GradEstimator estimator_by_name(const std::string& name, const RunConfig& cfg) {
  if (name == "bptt") return GradEstimator::bptt();
  if (name == "rtrl") return GradEstimator::rtrl();
  if (name == "ostl") return GradEstimator::ostl();
  if (name == "ottt") {
    GradEstimator est = GradEstimator::ottt();
    est.neuron_leak = cfg.estimator.neuron_leak;
    est.fixed_leak = cfg.estimator.fixed_leak;
    return est;
  }
  throw ConfigError("estimator must be one of bptt, rtrl, ostl, ottt");
}

int cmd_compare_grads(const std::string& config_path, const std::string& est_a,
                      const std::string& est_b, const std::string& out_flag) {
  std::string config_text;
  const RunConfig cfg = load_run_config(config_path, &config_text);
  const Json prov = provenance(config_text);
  const std::string out_dir = resolve_out_dir(out_flag, cfg.output_dir);

  const Dataset ds = load_dataset(cfg);
  Tensor x;
  std::vector<int> labels;
  head_batch(ds.raster, cfg.batch_size, &x, &labels);

  Params params = init_params(cfg.network, x, cfg.seed);
  const GradReport report = compare_grads(cfg.network, params, x, labels, cfg.loss,
                                          estimator_by_name(est_a, cfg),
                                          estimator_by_name(est_b, cfg));

  Json j = grad_report_to_json(report);
  j["provenance"] = prov;
  ensure_dir(out_dir);
  std::ofstream out(out_dir + "/grad_report.json");
  if (!out) throw IoError("cannot write " + out_dir + "/grad_report.json");
  out << j.dump(2) << "\n";

  for (const GradReport::BlockEntry& b : report.blocks)
    std::printf("%-12s cosine %.12f\n", b.label.c_str(), b.cosine);
  std::printf("global_cosine = %.12f\n", report.global_cosine);
  return 0;
}

// ---- landscape ----

std::vector<std::string> checkpoint_files(const std::string& dir) {
  std::vector<std::string> files;
  if (dir.empty() || !fs::exists(dir)) return files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("params_epoch_", 0) == 0 && name.size() > 4 &&
        name.substr(name.size() - 4) == ".bin")
      files.push_back(entry.path().string());
  }
  std::sort(files.begin(), files.end());
  return files;
}

int cmd_landscape(const std::string& config_path, const std::string& params_file,
                  const std::string& checkpoints_dir, int resolution, double range,
                  std::uint64_t dir_seed, bool pca, const std::string& out_flag) {
  std::string config_text;
  const RunConfig cfg = load_run_config(config_path, &config_text);
  const Json prov = provenance(config_text);
  const std::string out_dir = resolve_out_dir(out_flag, cfg.output_dir);

  const Dataset ds = load_dataset(cfg);
  Tensor x;
  std::vector<int> labels;
  head_batch(ds.raster, cfg.batch_size, &x, &labels);

  const std::vector<std::string> ckpt_files = checkpoint_files(checkpoints_dir);
  std::vector<Params> checkpoints;
  for (const std::string& f : ckpt_files) checkpoints.push_back(load_params(f));

  Params center;
  if (!params_file.empty()) {
    center = load_params(params_file);
  } else if (!checkpoints.empty()) {
    center = checkpoints.back();
  } else {
    std::cerr << "warning: no parameters given; centering the landscape on freshly initialized "
                 "parameters\n";
    center = init_params(cfg.network, x, cfg.seed);
  }

  LandscapeGrid grid;
  if (pca) {
    SNNKIT_CHECK(checkpoints.size() >= 2, "--pca needs at least two checkpoints");
    auto [delta, eta] = trajectory_pca_directions(checkpoints, center);
    grid = loss_landscape_with_directions(cfg.network, center, x, labels, cfg.loss, resolution,
                                          range, std::move(delta), std::move(eta), dir_seed);
  } else {
    grid = loss_landscape(cfg.network, center, x, labels, cfg.loss, resolution, range, dir_seed);
  }

  ensure_dir(out_dir);
  {
    std::ofstream out(out_dir + "/landscape.csv");
    if (!out) throw IoError("cannot write " + out_dir + "/landscape.csv");
    out << "x,y,loss\n";
    char line[96];
    for (int i = 0; i < resolution; ++i)
      for (int j = 0; j < resolution; ++j) {
        const double cx = -range + 2.0 * range * (static_cast<double>(i) / (resolution - 1));
        const double cy = -range + 2.0 * range * (static_cast<double>(j) / (resolution - 1));
        std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g\n", cx, cy, grid.at(i, j));
        out << line;
      }
  }
  {
    Json sidecar;
    sidecar["resolution"] = grid.resolution;
    sidecar["range"] = grid.range;
    sidecar["dir_seed"] = grid.dir_seed;
    sidecar["directions"] = pca ? "pca" : "random";
    sidecar["center_loss"] = grid.center_loss;
    sidecar["provenance"] = prov;
    std::ofstream out(out_dir + "/landscape.json");
    if (!out) throw IoError("cannot write " + out_dir + "/landscape.json");
    out << sidecar.dump(2) << "\n";
  }
  if (checkpoints.empty()) {
    std::cerr << "warning: no checkpoints found; writing the grid only\n";
  } else {
    const std::vector<std::array<double, 2>> points = project_trajectory(checkpoints, grid);
    std::ofstream out(out_dir + "/trajectory.csv");
    if (!out) throw IoError("cannot write " + out_dir + "/trajectory.csv");
    out << "step,x,y\n";
    char line[96];
    for (std::size_t i = 0; i < points.size(); ++i) {
      std::snprintf(line, sizeof(line), "%zu,%.17g,%.17g\n", i, points[i][0], points[i][1]);
      out << line;
    }
  }
  std::printf("landscape %dx%d range %.3g center_loss %.17g\n", resolution, resolution, range,
              grid.center_loss);
  return 0;
}

// ---- bench ----

int cmd_bench(int layers, int width, int timesteps, int batch, int repeats,
              const std::string& precision) {
  SNNKIT_CHECK(layers >= 1 && width >= 1 && timesteps >= 1 && batch >= 1 && repeats >= 1,
               "bench sizes must be >= 1");
  SNNKIT_CHECK(precision == "f64" || precision == "f32", "precision must be f64 or f32");

  std::vector<double> times;
  times.reserve(static_cast<std::size_t>(repeats));
  double sink = 0.0;

  if (precision == "f64") {
    NetworkSpec spec;
    for (int l = 0; l < layers; ++l) {
      spec.layers.push_back(LayerSpec::affine(static_cast<std::size_t>(width)));
      spec.layers.push_back(LayerSpec::lif_layer());
    }
    Rng data(7);
    Tensor x({static_cast<std::size_t>(batch), static_cast<std::size_t>(timesteps),
              static_cast<std::size_t>(width)});
    for (double& v : x.flat()) v = data.next_double() < 0.2 ? 1.0 : 0.0;
    std::vector<int> labels(static_cast<std::size_t>(batch));
    for (int& y : labels) y = static_cast<int>(data.next_below(static_cast<std::uint64_t>(width)));
    const Params params = init_params(spec, x, 7);
    const LossSpec loss;  // offline

    for (int rep = -1; rep < repeats; ++rep) {  // one warm-up
      const auto start = std::chrono::steady_clock::now();
      BpttResult r = bptt_grad(spec, params, x, labels, loss);
      const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      sink += r.loss;
      if (rep >= 0) times.push_back(dt);
    }
  } else {
    BenchNet<float> net(static_cast<std::size_t>(layers), static_cast<std::size_t>(width),
                        static_cast<std::size_t>(batch), static_cast<std::size_t>(timesteps), 7);
    for (int rep = -1; rep < repeats; ++rep) {
      const auto start = std::chrono::steady_clock::now();
      sink += net.run();
      const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      sink += net.grad_checksum();
      if (rep >= 0) times.push_back(dt);
    }
  }

  double mean = 0.0;
  for (double t : times) mean += t;
  mean /= static_cast<double>(times.size());
  double var = 0.0;
  for (double t : times) var += (t - mean) * (t - mean);
  var /= static_cast<double>(times.size());

  std::printf("bench layers=%d width=%d time=%d batch=%d repeats=%d precision=%s threads=%d\n",
              layers, width, timesteps, batch, repeats, precision.c_str(),
              kernels::num_threads());
  std::printf("mean_s=%.6f std_s=%.6f (checksum %.3g)\n", mean, std::sqrt(var), sink);
  return 0;
}

// ---- randman-gen ----

int cmd_randman_gen(const std::string& config_path, const std::string& out_flag,
                    const std::string& format) {
  SNNKIT_CHECK(format == "csv" || format == "bin", "--format must be csv or bin");
  std::ifstream in(config_path);
  if (!in) throw IoError("cannot read " + config_path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }

  RandmanConfig rm;
  std::string out_default = "out";
  if (j.contains("dataset") || j.contains("network")) {
    const RunConfig cfg = parse_run_config(j);
    SNNKIT_CHECK(cfg.randman.has_value(), "randman-gen needs a randman dataset in the config");
    rm = *cfg.randman;
    out_default = cfg.output_dir;
  } else {
    SNNKIT_CHECK(j.is_object() && j.contains("randman"),
                 "randman-gen config must contain a 'randman' object");
    for (const auto& [key, value] : j.items())
      SNNKIT_CHECK(key == "randman", "unknown key '" + key + "' in randman-gen config");
    rm = randman_from_json(j.at("randman"));
  }

  const std::string out_dir = resolve_out_dir(out_flag, out_default);
  const RandmanDataset ds = generate(rm);
  const Json header = save_raster(out_dir, ds, format == "bin", provenance(text));
  std::cout << header.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spiking neural network training toolkit"};
  app.require_subcommand(1);

  int threads = env_threads();
  app.add_option("--threads", threads, "worker threads (default 1, or SNNKIT_THREADS)");

  std::string config, out_dir, params_file, checkpoints_dir;
  std::string format = "csv", est_a = "bptt", est_b = "rtrl", precision = "f64";
  int resolution = 25, layers = 3, width = 64, timesteps = 500, batch = 64, repeats = 20;
  double range = 1.0;
  std::uint64_t dir_seed = 0;
  bool pca = false;
  int rc = 0;

  CLI::App* gen = app.add_subcommand("randman-gen", "generate a synthetic spike dataset");
  gen->add_option("--config", config, "config JSON")->required();
  gen->add_option("--out", out_dir, "output directory");
  gen->add_option("--format", format, "raster body: csv or bin");
  gen->callback([&] {
    kernels::set_num_threads(threads);
    rc = cmd_randman_gen(config, out_dir, format);
  });

  CLI::App* train = app.add_subcommand("train", "train a network per the config");
  train->add_option("--config", config, "config JSON")->required();
  train->add_option("--out", out_dir, "output directory (overrides run.output_dir)");
  train->callback([&] {
    kernels::set_num_threads(threads);
    rc = cmd_train(config, out_dir);
  });

  CLI::App* eval = app.add_subcommand("eval", "loss, accuracy and efficiency metrics");
  eval->add_option("--config", config, "config JSON")->required();
  eval->add_option("--params", params_file, "parameter file (default: fresh init)");
  eval->add_option("--out", out_dir, "output directory");
  eval->callback([&] {
    kernels::set_num_threads(threads);
    rc = cmd_eval(config, params_file, out_dir);
  });

  CLI::App* cmp = app.add_subcommand("compare-grads", "cosine similarity between two estimators");
  cmp->add_option("--config", config, "config JSON")->required();
  cmp->add_option("--a", est_a, "first estimator (bptt|rtrl|ostl|ottt)");
  cmp->add_option("--b", est_b, "second estimator");
  cmp->add_option("--out", out_dir, "output directory");
  cmp->callback([&] {
    kernels::set_num_threads(threads);
    rc = cmd_compare_grads(config, est_a, est_b, out_dir);
  });

  CLI::App* land = app.add_subcommand("landscape", "filter-normalized loss landscape grid");
  land->add_option("--config", config, "config JSON")->required();
  land->add_option("--params", params_file, "center parameter file");
  land->add_option("--checkpoints", checkpoints_dir, "directory of epoch checkpoints");
  land->add_option("--resolution", resolution, "grid resolution (odd)");
  land->add_option("--range", range, "coordinate range");
  land->add_option("--dir-seed", dir_seed, "direction seed");
  land->add_flag("--pca", pca, "use top-2 PCA directions of the trajectory");
  land->add_option("--out", out_dir, "output directory");
  land->callback([&] {
    kernels::set_num_threads(threads);
    rc = cmd_landscape(config, params_file, checkpoints_dir, resolution, range, dir_seed, pca,
                       out_dir);
  });

  CLI::App* bench = app.add_subcommand("bench", "time the forward+backward pass");
  bench->add_option("--layers", layers, "dense layer count");
  bench->add_option("--width", width, "layer width");
  bench->add_option("--time", timesteps, "sequence length");
  bench->add_option("--batch", batch, "batch size");
  bench->add_option("--repeats", repeats, "timed repetitions after one warm-up");
  bench->add_option("--precision", precision, "f64 (library path) or f32 (benchmark kernel)");
  bench->callback([&] {
    kernels::set_num_threads(threads);
    rc = cmd_bench(layers, width, timesteps, batch, repeats, precision);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return rc;
}
