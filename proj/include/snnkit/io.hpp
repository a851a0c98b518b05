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

#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "snnkit/analysis.hpp"
#include "snnkit/randman.hpp"
#include "snnkit/train.hpp"

namespace snnkit {

using Json = nlohmann::json;

// ---- run configuration (single JSON file; unknown keys rejected) ----

struct RunConfig {
  NetworkSpec network;
  GradEstimator estimator = GradEstimator::bptt();
  TrainMode mode = TrainMode::Offline;
  LossSpec loss;
  std::optional<FpttConfig> fptt;
  OptimizerSpec optimizer = OptimizerSpec::adamax();
  std::optional<RandmanConfig> randman;
  std::string raster_dir;  // set when the dataset is a saved raster
  std::size_t epochs = 10;
  std::size_t batch_size = 64;
  std::uint64_t seed = 42;
  std::size_t checkpoint_every = 0;  // 0: only the final parameters
  std::string output_dir = "out";
};

RunConfig parse_run_config(const Json& j);
RunConfig load_run_config(const std::string& path, std::string* raw_text = nullptr);

NetworkSpec network_from_json(const Json& j);
Json network_to_json(const NetworkSpec& spec);

// Randman config parsing shared by run configs and randman-gen configs.
RandmanConfig randman_from_json(const Json& j);
Json randman_to_json(const RandmanConfig& config);

// ---- provenance ----

std::uint64_t fnv1a64(std::string_view text);
std::string hex64(std::uint64_t value);
// {"tool", "version", "config_hash"} — no timestamps, so identical configs
// produce identical bytes.
Json provenance(std::string_view config_text);

// ---- parameter files: one-line JSON header + little-endian f64 body ----

void save_params(const std::string& path, const Params& params, const Json& prov);
Params load_params(const std::string& path);

// ---- raster export: raster.json + raster.csv|raster.bin + labels.csv ----

Json save_raster(const std::string& dir, const RandmanDataset& dataset, bool binary,
                 const Json& prov);
SpikeRaster load_raster(const std::string& dir);

// ---- report serialization ----

Json grad_report_to_json(const GradReport& report);
Json metrics_to_json(const MetricSummary& summary);

}  // namespace snnkit
