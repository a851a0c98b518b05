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

#include "snnkit/io.hpp"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "snnkit/version.hpp"

namespace snnkit {

namespace fs = std::filesystem;

namespace {

void check_keys(const Json& obj, std::initializer_list<const char*> allowed, const char* context) {
  SNNKIT_CHECK(obj.is_object(), std::string(context) + " must be a JSON object");
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) ok = true;
    SNNKIT_CHECK(ok, "unknown key '" + key + "' in " + context);
  }
}

template <typename T>
T get_or(const Json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const Json::exception&) {
    throw ConfigError(std::string("bad value for '") + key + "'");
  }
}

SurrogateSpec surrogate_from_json(const Json& j) {
  check_keys(j, {"kind", "slope", "width"}, "surrogate");
  const std::string kind = get_or<std::string>(j, "kind", "fast_sigmoid");
  if (kind == "fast_sigmoid") return SurrogateSpec::fast_sigmoid(get_or<double>(j, "slope", 25.0));
  if (kind == "atan") return SurrogateSpec::atan(get_or<double>(j, "width", 2.0));
  throw ConfigError("unknown surrogate kind '" + kind + "'");
}

Json surrogate_to_json(const SurrogateSpec& s) {
  Json j;
  if (s.kind == SurrogateKind::FastSigmoid) {
    j["kind"] = "fast_sigmoid";
    j["slope"] = s.slope;
  } else {
    j["kind"] = "atan";
    j["width"] = s.width;
  }
  return j;
}

std::ofstream open_out(const std::string& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw IoError("cannot write " + path);
  return out;
}

std::ifstream open_in(const std::string& path, bool binary = false) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw IoError("cannot read " + path);
  return in;
}

void write_f64le(std::ostream& out, std::span<const double> values) {
  static_assert(sizeof(double) == 8);
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(values.data()),
              static_cast<std::streamsize>(values.size() * 8));
  } else {
    for (double v : values) {
      unsigned char bytes[8];
      std::memcpy(bytes, &v, 8);
      for (int i = 7; i >= 0; --i) out.put(static_cast<char>(bytes[i]));
    }
  }
}

void read_f64le(std::istream& in, std::span<double> values) {
  if constexpr (std::endian::native == std::endian::little) {
    in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(values.size() * 8));
  } else {
    for (double& v : values) {
      unsigned char bytes[8];
      for (int i = 7; i >= 0; --i) bytes[i] = static_cast<unsigned char>(in.get());
      std::memcpy(&v, bytes, 8);
    }
  }
  if (!in) throw IoError("parameter file body truncated");
}

}  // namespace

NetworkSpec network_from_json(const Json& j) {
  check_keys(j, {"layers", "cat"}, "network");
  SNNKIT_CHECK(j.contains("layers") && j.at("layers").is_array(), "network.layers must be an array");
  NetworkSpec spec;
  for (const Json& lj : j.at("layers")) {
    const std::string type = get_or<std::string>(lj, "type", "");
    if (type == "affine") {
      check_keys(lj, {"type", "out"}, "affine layer");
      SNNKIT_CHECK(lj.contains("out"), "affine layer needs 'out'");
      spec.layers.push_back(LayerSpec::affine(lj.at("out").get<std::size_t>()));
    } else if (type == "lif") {
      check_keys(lj,
                 {"type", "tau_init", "v_threshold", "v_reset", "surrogate", "trainable_tau",
                  "detach_reset"},
                 "lif layer");
      LifConfig cfg;
      cfg.tau_init = get_or<double>(lj, "tau_init", 2.0);
      cfg.v_threshold = get_or<double>(lj, "v_threshold", 1.0);
      cfg.v_reset = get_or<double>(lj, "v_reset", 0.0);
      cfg.trainable_tau = get_or<bool>(lj, "trainable_tau", false);
      cfg.detach_reset = get_or<bool>(lj, "detach_reset", false);
      if (lj.contains("surrogate")) cfg.surrogate = surrogate_from_json(lj.at("surrogate"));
      spec.layers.push_back(LayerSpec::lif_layer(cfg));
    } else {
      throw ConfigError("layer type must be 'affine' or 'lif'");
    }
  }
  if (j.contains("cat")) {
    SNNKIT_CHECK(j.at("cat").is_object(), "network.cat must map layer index to source list");
    for (const auto& [key, sources] : j.at("cat").items()) {
      std::size_t dst = 0;
      try {
        dst = static_cast<std::size_t>(std::stoull(key));
      } catch (...) {
        throw ConfigError("cat keys must be layer indices, got '" + key + "'");
      }
      SNNKIT_CHECK(sources.is_array(), "cat sources must be an array");
      std::vector<std::size_t> src;
      for (const Json& s : sources) src.push_back(s.get<std::size_t>());
      spec.cat[dst] = std::move(src);
    }
  }
  validate_network(spec);
  return spec;
}

Json network_to_json(const NetworkSpec& spec) {
  Json layers = Json::array();
  for (const LayerSpec& l : spec.layers) {
    Json lj;
    if (l.kind == LayerSpec::Kind::Affine) {
      lj["type"] = "affine";
      lj["out"] = l.out_features;
    } else {
      lj["type"] = "lif";
      lj["tau_init"] = l.lif.tau_init;
      lj["v_threshold"] = l.lif.v_threshold;
      lj["v_reset"] = l.lif.v_reset;
      lj["trainable_tau"] = l.lif.trainable_tau;
      lj["detach_reset"] = l.lif.detach_reset;
      lj["surrogate"] = surrogate_to_json(l.lif.surrogate);
    }
    layers.push_back(lj);
  }
  Json j;
  j["layers"] = layers;
  if (!spec.cat.empty()) {
    Json cat = Json::object();
    for (const auto& [dst, sources] : spec.cat) cat[std::to_string(dst)] = sources;
    j["cat"] = cat;
  }
  return j;
}

RandmanConfig randman_from_json(const Json& j) {
  check_keys(j,
             {"classes", "units", "intrinsic_dim", "alpha", "cutoff", "timesteps",
              "samples_per_class", "encoding", "p_max", "manifold_seed", "sample_seed"},
             "randman");
  RandmanConfig cfg;
  cfg.classes = get_or<int>(j, "classes", cfg.classes);
  cfg.units = get_or<int>(j, "units", cfg.units);
  cfg.intrinsic_dim = get_or<int>(j, "intrinsic_dim", cfg.intrinsic_dim);
  cfg.alpha = get_or<double>(j, "alpha", cfg.alpha);
  cfg.cutoff = get_or<int>(j, "cutoff", cfg.cutoff);
  cfg.timesteps = get_or<int>(j, "timesteps", cfg.timesteps);
  cfg.samples_per_class = get_or<int>(j, "samples_per_class", cfg.samples_per_class);
  const std::string enc = get_or<std::string>(j, "encoding", "time");
  if (enc == "time")
    cfg.encoding = RandmanEncoding::Time;
  else if (enc == "rate")
    cfg.encoding = RandmanEncoding::Rate;
  else
    throw ConfigError("randman encoding must be 'time' or 'rate'");
  cfg.p_max = get_or<double>(j, "p_max", cfg.p_max);
  cfg.manifold_seed = get_or<std::uint64_t>(j, "manifold_seed", cfg.manifold_seed);
  cfg.sample_seed = get_or<std::uint64_t>(j, "sample_seed", cfg.sample_seed);
  validate(cfg);
  return cfg;
}

Json randman_to_json(const RandmanConfig& cfg) {
  Json j;
  j["classes"] = cfg.classes;
  j["units"] = cfg.units;
  j["intrinsic_dim"] = cfg.intrinsic_dim;
  j["alpha"] = cfg.alpha;
  j["cutoff"] = cfg.cutoff;
  j["timesteps"] = cfg.timesteps;
  j["samples_per_class"] = cfg.samples_per_class;
  j["encoding"] = cfg.encoding == RandmanEncoding::Time ? "time" : "rate";
  j["p_max"] = cfg.p_max;
  j["manifold_seed"] = cfg.manifold_seed;
  j["sample_seed"] = cfg.sample_seed;
  return j;
}

RunConfig parse_run_config(const Json& j) {
  check_keys(j, {"network", "learning", "optimizer", "dataset", "run"}, "config");
  SNNKIT_CHECK(j.contains("network"), "config needs a 'network' section");
  RunConfig cfg;
  cfg.network = network_from_json(j.at("network"));

  if (j.contains("learning")) {
    const Json& lj = j.at("learning");
    check_keys(lj, {"estimator", "mode", "loss", "fptt", "ottt_trace_leak"}, "learning");
    const std::string est = get_or<std::string>(lj, "estimator", "bptt");
    if (est == "bptt")
      cfg.estimator = GradEstimator::bptt();
    else if (est == "rtrl")
      cfg.estimator = GradEstimator::rtrl();
    else if (est == "ostl")
      cfg.estimator = GradEstimator::ostl();
    else if (est == "ottt")
      cfg.estimator = GradEstimator::ottt();
    else
      throw ConfigError("estimator must be one of bptt, rtrl, ostl, ottt");
    if (lj.contains("ottt_trace_leak")) {
      const Json& tl = lj.at("ottt_trace_leak");
      if (tl.is_string()) {
        SNNKIT_CHECK(tl.get<std::string>() == "neuron", "ottt_trace_leak must be 'neuron' or a number");
        cfg.estimator.neuron_leak = true;
      } else {
        cfg.estimator.neuron_leak = false;
        cfg.estimator.fixed_leak = tl.get<double>();
        SNNKIT_CHECK(cfg.estimator.fixed_leak > 0.0 && cfg.estimator.fixed_leak < 1.0,
                     "ottt_trace_leak must lie in (0, 1)");
      }
    }
    const std::string mode = get_or<std::string>(lj, "mode", "offline");
    if (mode == "offline")
      cfg.mode = TrainMode::Offline;
    else if (mode == "online")
      cfg.mode = TrainMode::Online;
    else if (mode == "deferred")
      cfg.mode = TrainMode::OnlineDeferred;
    else
      throw ConfigError("mode must be one of offline, online, deferred");
    const std::string loss = get_or<std::string>(lj, "loss", "offline");
    if (loss == "offline")
      cfg.loss.mode = LossMode::Offline;
    else if (loss == "online")
      cfg.loss.mode = LossMode::Online;
    else
      throw ConfigError("loss must be 'offline' or 'online'");
    if (lj.contains("fptt")) {
      check_keys(lj.at("fptt"), {"alpha", "reuse_gradient"}, "fptt");
      FpttConfig f;
      f.alpha = get_or<double>(lj.at("fptt"), "alpha", 0.5);
      f.reuse_gradient = get_or<bool>(lj.at("fptt"), "reuse_gradient", true);
      SNNKIT_CHECK(f.alpha > 0.0, "fptt alpha must be positive");
      cfg.fptt = f;
    }
  }

  if (j.contains("optimizer")) {
    const Json& oj = j.at("optimizer");
    check_keys(oj, {"kind", "lr", "beta1", "beta2", "eps"}, "optimizer");
    const std::string kind = get_or<std::string>(oj, "kind", "adamax");
    if (kind == "sgd") {
      cfg.optimizer = OptimizerSpec::sgd(get_or<double>(oj, "lr", 0.01));
    } else if (kind == "adamax") {
      cfg.optimizer =
          OptimizerSpec::adamax(get_or<double>(oj, "lr", 0.001), get_or<double>(oj, "beta1", 0.9),
                                get_or<double>(oj, "beta2", 0.999), get_or<double>(oj, "eps", 1e-8));
    } else {
      throw ConfigError("optimizer kind must be 'sgd' or 'adamax'");
    }
    validate(cfg.optimizer);
  }

  if (j.contains("dataset")) {
    const Json& dj = j.at("dataset");
    check_keys(dj, {"randman", "raster"}, "dataset");
    SNNKIT_CHECK(dj.contains("randman") != dj.contains("raster"),
                 "dataset needs exactly one of 'randman' or 'raster'");
    if (dj.contains("randman"))
      cfg.randman = randman_from_json(dj.at("randman"));
    else
      cfg.raster_dir = dj.at("raster").get<std::string>();
  } else {
    cfg.randman = RandmanConfig{};
  }

  if (j.contains("run")) {
    const Json& rj = j.at("run");
    check_keys(rj, {"epochs", "batch_size", "seed", "checkpoint_every", "output_dir"}, "run");
    cfg.epochs = get_or<std::size_t>(rj, "epochs", cfg.epochs);
    cfg.batch_size = get_or<std::size_t>(rj, "batch_size", cfg.batch_size);
    cfg.seed = get_or<std::uint64_t>(rj, "seed", cfg.seed);
    cfg.checkpoint_every = get_or<std::size_t>(rj, "checkpoint_every", cfg.checkpoint_every);
    cfg.output_dir = get_or<std::string>(rj, "output_dir", cfg.output_dir);
    SNNKIT_CHECK(cfg.batch_size >= 1, "run.batch_size must be >= 1");
  }

  // Cross-field validation the training commands rely on.
  if (cfg.mode == TrainMode::Offline)
    SNNKIT_CHECK(cfg.estimator.kind == GradEstimator::Kind::Bptt,
                 "offline mode trains with BPTT; use online or deferred mode for " +
                     estimator_name(cfg.estimator));
  if (cfg.mode != TrainMode::Offline) {
    SNNKIT_CHECK(cfg.estimator.kind != GradEstimator::Kind::Bptt, "BPTT is not an online estimator");
    SNNKIT_CHECK(cfg.loss.mode == LossMode::Online,
                 "online and deferred modes apply the loss per step; set learning.loss = 'online'");
  }
  if (cfg.fptt) SNNKIT_CHECK(cfg.mode == TrainMode::Online, "fptt applies to online mode only");
  return cfg;
}

RunConfig load_run_config(const std::string& path, std::string* raw_text) {
  std::ifstream in = open_in(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  if (raw_text) *raw_text = text;
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_run_config(j);
}

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[value & 0xF];
    value >>= 4;
  }
  return out;
}

Json provenance(std::string_view config_text) {
  Json j;
  j["tool"] = "snnkit";
  j["version"] = kVersion;
  j["config_hash"] = hex64(fnv1a64(config_text));
  return j;
}

void save_params(const std::string& path, const Params& params, const Json& prov) {
  Json header;
  header["format"] = "snnkit-params-v1";
  header["order"] = "layer ascending; W row-major, then b, then tau";
  Json blocks = Json::array();
  for (const ParamBlock& b : params.blocks) {
    Json bj;
    bj["layer"] = b.layer;
    bj["kind"] = b.kind == ParamKind::Weight ? "W" : b.kind == ParamKind::Bias ? "b" : "tau";
    bj["shape"] = b.value.shape();
    blocks.push_back(bj);
  }
  header["blocks"] = blocks;
  if (!prov.is_null()) header["provenance"] = prov;

  std::ofstream out = open_out(path, /*binary=*/true);
  const std::string line = header.dump();
  out.write(line.data(), static_cast<std::streamsize>(line.size()));
  out.put('\n');
  const std::vector<double> flat = params.flatten();
  write_f64le(out, flat);
  if (!out) throw IoError("failed writing " + path);
}

Params load_params(const std::string& path) {
  std::ifstream in = open_in(path, /*binary=*/true);
  std::string line;
  if (!std::getline(in, line)) throw IoError("parameter file has no header: " + path);
  Json header;
  try {
    header = Json::parse(line);
  } catch (const Json::exception& e) {
    throw IoError("bad parameter file header: " + std::string(e.what()));
  }
  if (header.value("format", "") != "snnkit-params-v1")
    throw IoError("not a snnkit parameter file: " + path);

  Params params;
  for (const Json& bj : header.at("blocks")) {
    ParamBlock block;
    block.layer = bj.at("layer").get<std::size_t>();
    const std::string kind = bj.at("kind").get<std::string>();
    block.kind = kind == "W" ? ParamKind::Weight : kind == "b" ? ParamKind::Bias : ParamKind::Tau;
    block.value = Tensor(bj.at("shape").get<std::vector<std::size_t>>());
    params.blocks.push_back(std::move(block));
  }
  std::vector<double> flat(params.total_size());
  read_f64le(in, flat);
  params.load_flat(flat);
  return params;
}

Json save_raster(const std::string& dir, const RandmanDataset& dataset, bool binary,
                 const Json& prov) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir);

  const RandmanConfig& cfg = dataset.config;
  const Tensor& data = dataset.raster.data;
  const std::size_t count = data.dim(0), T = data.dim(1), M = data.dim(2);

  Json header;
  header["C"] = cfg.classes;
  header["M"] = cfg.units;
  header["D"] = cfg.intrinsic_dim;
  header["alpha"] = cfg.alpha;
  header["K"] = cfg.cutoff;
  header["T"] = cfg.timesteps;
  header["encoding"] = cfg.encoding == RandmanEncoding::Time ? "time" : "rate";
  if (cfg.encoding == RandmanEncoding::Rate) header["p_max"] = cfg.p_max;
  header["seeds"] = Json{{"manifold", cfg.manifold_seed}, {"sample", cfg.sample_seed}};
  header["count"] = count;
  header["body"] = binary ? "bin" : "csv";
  if (!prov.is_null()) header["provenance"] = prov;

  {
    std::ofstream out = open_out(dir + "/raster.json");
    out << header.dump(2) << "\n";
  }
  if (binary) {
    std::ofstream out = open_out(dir + "/raster.bin", /*binary=*/true);
    for (double v : data.flat()) out.put(v != 0.0 ? '\1' : '\0');
  } else {
    std::ofstream out = open_out(dir + "/raster.csv");
    for (std::size_t i = 0; i < count; ++i)
      for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t m = 0; m < M; ++m) {
          if (m) out.put(',');
          out.put(data(i, t, m) != 0.0 ? '1' : '0');
        }
        out.put('\n');
      }
  }
  {
    std::ofstream out = open_out(dir + "/labels.csv");
    for (int label : dataset.raster.labels) out << label << "\n";
  }
  return header;
}

SpikeRaster load_raster(const std::string& dir) {
  Json header;
  {
    std::ifstream in = open_in(dir + "/raster.json");
    try {
      in >> header;
    } catch (const Json::exception& e) {
      throw IoError("bad raster header: " + std::string(e.what()));
    }
  }
  const std::size_t count = header.at("count").get<std::size_t>();
  const std::size_t T = header.at("T").get<std::size_t>();
  const std::size_t M = header.at("M").get<std::size_t>();
  const std::string body = header.value("body", "csv");

  SpikeRaster raster;
  raster.data = Tensor({count, T, M});
  if (body == "bin") {
    std::ifstream in = open_in(dir + "/raster.bin", /*binary=*/true);
    for (double& v : raster.data.flat()) {
      const int c = in.get();
      if (c == std::char_traits<char>::eof()) throw IoError("raster body truncated");
      v = c ? 1.0 : 0.0;
    }
  } else {
    std::ifstream in = open_in(dir + "/raster.csv");
    std::string line;
    for (std::size_t row = 0; row < count * T; ++row) {
      if (!std::getline(in, line)) throw IoError("raster body truncated");
      std::size_t m = 0, pos = 0;
      while (m < M) {
        const std::size_t comma = line.find(',', pos);
        try {
          raster.data[row * M + m] = std::stod(line.substr(pos, comma - pos));
        } catch (const std::exception&) {
          throw IoError("bad raster value in row " + std::to_string(row));
        }
        pos = comma == std::string::npos ? line.size() : comma + 1;
        ++m;
      }
    }
  }
  {
    std::ifstream in = open_in(dir + "/labels.csv");
    std::string line;
    while (std::getline(in, line))
      if (!line.empty()) {
        try {
          raster.labels.push_back(std::stoi(line));
        } catch (const std::exception&) {
          throw IoError("bad label '" + line + "'");
        }
      }
  }
  if (raster.labels.size() != count) throw IoError("label count does not match the raster header");
  return raster;
}

Json grad_report_to_json(const GradReport& report) {
  Json j;
  j["estimator_a"] = report.estimator_a;
  j["estimator_b"] = report.estimator_b;
  j["loss_a"] = report.loss_a;
  j["loss_b"] = report.loss_b;
  j["global"] = Json{{"cosine", report.global_cosine},
                     {"degenerate", report.global_degenerate},
                     {"norm_a", report.global_norm_a},
                     {"norm_b", report.global_norm_b}};
  Json blocks = Json::array();
  for (const GradReport::BlockEntry& b : report.blocks)
    blocks.push_back(Json{{"block", b.label},
                          {"cosine", b.cosine},
                          {"degenerate", b.degenerate},
                          {"norm_a", b.norm_a},
                          {"norm_b", b.norm_b}});
  j["blocks"] = blocks;
  return j;
}

Json metrics_to_json(const MetricSummary& summary) {
  Json j;
  j["accuracy"] = summary.accuracy;
  j["activation_sparsity"] = summary.activation_sparsity;
  j["neuron_updates"] = summary.neuron_updates;
  j["synaptic_ops"] = summary.synaptic_ops;
  return j;
}

}  // namespace snnkit
