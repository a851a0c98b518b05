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

#include "snnkit/network.hpp"
#include "snnkit/optimizer.hpp"

namespace snnkit {

// Regularizer wrapped around any online rule: the effective gradient pulls
// parameters toward a running mean theta_bar, which itself tracks the
// iterates,
//   g_eff   = g + alpha * (theta - theta_bar)
//   theta'  = optimizer_step(theta, g_eff)
//   theta_bar' = (theta_bar + theta') / 2 - g_hat / (2 * alpha)
// with g_hat = g by default (reuse_gradient) or a gradient recomputed at
// theta'.
struct FpttConfig {
  double alpha = 0.5;
  bool reuse_gradient = true;
};

struct FpttState {
  std::vector<double> running_mean;  // theta_bar, canonical flattening
};

// theta_bar starts at theta (call at the start of each sequence).
FpttState init_fptt_state(const Params& params);

using RegradFn = std::function<std::vector<double>(const Params& updated)>;

// One FPTT update in place. `regrad` is only consulted when
// reuse_gradient is false.
void fptt_update(const FpttConfig& config, std::span<const double> inner_grads, Params& params,
                 const OptimizerSpec& opt, OptState& opt_state, FpttState& fptt_state,
                 const RegradFn& regrad = nullptr);

}  // namespace snnkit
