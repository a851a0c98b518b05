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

#include "snnkit/loss.hpp"
#include "snnkit/network.hpp"

namespace snnkit {

struct BpttResult {
  Params grads;
  double loss = 0.0;
  Tensor outputs;  // batch x T x out
  std::vector<StepRecord> records;
};

// Full rollout followed by a reverse sweep through the records. Works for
// both loss modes; delayed cat edges route adjoints across one timestep.
BpttResult bptt_grad(const NetworkSpec& spec, const Params& params, const Tensor& x,
                     std::span<const int> labels, const LossSpec& loss);

// Reverse sweep only, seeded with dL/d(output) per step. Exposed so tests
// can drive custom losses through the same adjoint recursion.
Params bptt_backward(const NetworkSpec& spec, const Params& params,
                     const std::vector<StepRecord>& records, const std::vector<Tensor>& g_y);

}  // namespace snnkit
