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

#include "snnkit/fptt.hpp"

namespace snnkit {

FpttState init_fptt_state(const Params& params) { return FpttState{params.flatten()}; }

void fptt_update(const FpttConfig& config, std::span<const double> inner_grads, Params& params,
                 const OptimizerSpec& opt, OptState& opt_state, FpttState& fptt_state,
                 const RegradFn& regrad) {
  SNNKIT_CHECK(config.alpha > 0.0, "FPTT alpha must be positive");
  std::vector<double> theta = params.flatten();
  std::vector<double>& bar = fptt_state.running_mean;
  SNNKIT_CHECK(theta.size() == inner_grads.size() && theta.size() == bar.size(),
               "FPTT state size mismatch");

  std::vector<double> g_eff(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i)
    g_eff[i] = inner_grads[i] + config.alpha * (theta[i] - bar[i]);

  optimizer_step(opt, opt_state, theta, g_eff);
  params.load_flat(theta);

  std::vector<double> g_hat;
  if (config.reuse_gradient) {
    g_hat.assign(inner_grads.begin(), inner_grads.end());
  } else {
    SNNKIT_CHECK(regrad != nullptr, "reuse_gradient=false needs a gradient recompute callback");
    g_hat = regrad(params);
    SNNKIT_CHECK(g_hat.size() == theta.size(), "recomputed gradient has the wrong length");
  }

  const double inv = 1.0 / (2.0 * config.alpha);
  for (std::size_t i = 0; i < bar.size(); ++i)
    bar[i] = 0.5 * (bar[i] + theta[i]) - inv * g_hat[i];
}

}  // namespace snnkit
