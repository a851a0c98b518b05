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

#include <cstdint>
#include <span>
#include <vector>

#include "snnkit/check.hpp"

namespace snnkit {

struct OptimizerSpec {
  enum class Kind { Sgd, Adamax };
  Kind kind = Kind::Adamax;
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  static OptimizerSpec sgd(double lr) {
    OptimizerSpec o;
    o.kind = Kind::Sgd;
    o.lr = lr;
    return o;
  }
  static OptimizerSpec adamax(double lr = 0.001, double beta1 = 0.9, double beta2 = 0.999,
                              double eps = 1e-8) {
    OptimizerSpec o;
    o.kind = Kind::Adamax;
    o.lr = lr;
    o.beta1 = beta1;
    o.beta2 = beta2;
    o.eps = eps;
    return o;
  }
};

void validate(const OptimizerSpec& spec);

// Moment buffers plus the step counter. SGD leaves the buffers empty.
struct OptState {
  std::vector<double> m;  // first moment (Adamax)
  std::vector<double> u;  // infinity-norm second moment (Adamax)
  std::uint64_t step = 0;
};

OptState init_opt_state(const OptimizerSpec& spec, std::size_t n_params);

// In-place update of theta. Adamax:
//   m <- b1*m + (1-b1)*g;  u <- max(b2*u, |g|);
//   theta <- theta - lr/(1 - b1^t) * m / (u + eps)
// (bias correction on the first moment only).
void optimizer_step(const OptimizerSpec& spec, OptState& state, std::span<double> theta,
                    std::span<const double> grads);

}  // namespace snnkit
