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

#include <functional>
#include <optional>

#include "snnkit/fptt.hpp"
#include "snnkit/online.hpp"
#include "snnkit/optimizer.hpp"

namespace snnkit {

struct TrainStepResult {
  double loss = 0.0;
  Tensor outputs;  // batch x T x classes
};

// One BPTT gradient plus one optimizer step.
TrainStepResult train_offline(const NetworkSpec& spec, Params& params, const OptimizerSpec& opt,
                              OptState& opt_state, const Tensor& x, std::span<const int> labels,
                              const LossSpec& loss);

// Parameters update at every timestep. When `fptt` is given the optimizer
// step runs through the FPTT recursion; theta_bar (re-initialized to the
// parameters at the start of the sequence) is returned via `fptt_state`.
TrainStepResult train_online(const NetworkSpec& spec, Params& params, const OptimizerSpec& opt,
                             OptState& opt_state, const Tensor& x, std::span<const int> labels,
                             const LossSpec& loss, const GradEstimator& estimator,
                             const FpttConfig* fptt = nullptr, FpttState* fptt_state = nullptr);

// Per-step gradients accumulate over the sequence; exactly one optimizer
// step at the end.
TrainStepResult train_online_deferred(const NetworkSpec& spec, Params& params,
                                      const OptimizerSpec& opt, OptState& opt_state,
                                      const Tensor& x, std::span<const int> labels,
                                      const LossSpec& loss, const GradEstimator& estimator);

enum class TrainMode { Offline, Online, OnlineDeferred };

struct FitConfig {
  TrainMode mode = TrainMode::Offline;
  GradEstimator estimator = GradEstimator::bptt();
  LossSpec loss;
  OptimizerSpec opt;
  std::optional<FpttConfig> fptt;
  std::size_t epochs = 1;
  std::size_t batch_size = 64;
  std::uint64_t seed = 0;  // epoch shuffling
};

struct EpochStats {
  double loss = 0.0;      // mean per-batch loss
  double accuracy = 0.0;  // running train accuracy over the epoch
  double wall_ms = 0.0;
};

using EpochHook = std::function<void(std::size_t epoch, const EpochStats&, const Params&)>;

// Epoch loop over a whole dataset: deterministic shuffling per epoch,
// contiguous batches (last one may be short), one hook call per epoch.
void fit(const NetworkSpec& spec, Params& params, const Tensor& x_all,
         std::span<const int> labels_all, const FitConfig& config, const EpochHook& hook);

}  // namespace snnkit
