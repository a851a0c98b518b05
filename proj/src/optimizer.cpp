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

#include "snnkit/optimizer.hpp"

#include <cmath>

namespace snnkit {

void validate(const OptimizerSpec& spec) {
  SNNKIT_CHECK(spec.lr > 0.0, "learning rate must be positive");
  if (spec.kind == OptimizerSpec::Kind::Adamax) {
    SNNKIT_CHECK(spec.beta1 >= 0.0 && spec.beta1 < 1.0, "beta1 must be in [0, 1)");
    SNNKIT_CHECK(spec.beta2 >= 0.0 && spec.beta2 < 1.0, "beta2 must be in [0, 1)");
    SNNKIT_CHECK(spec.eps > 0.0, "eps must be positive");
  }
}

OptState init_opt_state(const OptimizerSpec& spec, std::size_t n_params) {
  OptState state;
  if (spec.kind == OptimizerSpec::Kind::Adamax) {
    state.m.assign(n_params, 0.0);
    state.u.assign(n_params, 0.0);
  }
  return state;
}

void optimizer_step(const OptimizerSpec& spec, OptState& state, std::span<double> theta,
                    std::span<const double> grads) {
  SNNKIT_CHECK(theta.size() == grads.size(), "parameter/gradient size mismatch");
  switch (spec.kind) {
    case OptimizerSpec::Kind::Sgd:
      for (std::size_t i = 0; i < theta.size(); ++i) theta[i] -= spec.lr * grads[i];
      ++state.step;
      return;
    case OptimizerSpec::Kind::Adamax: {
      SNNKIT_CHECK(state.m.size() == theta.size() && state.u.size() == theta.size(),
                   "optimizer state size mismatch");
      ++state.step;
      const double corr = 1.0 - std::pow(spec.beta1, static_cast<double>(state.step));
      const double scale = spec.lr / corr;
      for (std::size_t i = 0; i < theta.size(); ++i) {
        state.m[i] = spec.beta1 * state.m[i] + (1.0 - spec.beta1) * grads[i];
        state.u[i] = std::max(spec.beta2 * state.u[i], std::fabs(grads[i]));
        theta[i] -= scale * state.m[i] / (state.u[i] + spec.eps);
      }
      return;
    }
  }
}

}  // namespace snnkit
