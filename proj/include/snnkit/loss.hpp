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

#include <span>

#include "snnkit/tensor.hpp"

namespace snnkit {

// Two accumulation semantics for the softmax cross-entropy readout:
//   Offline: accumulate outputs over time, apply the loss once.
//   Online:  apply the loss at every step, accumulate loss values.
enum class LossMode { Offline, Online };

struct LossSpec {
  LossMode mode = LossMode::Offline;
};

// Mean over the batch of softmax cross-entropy; logits (batch x classes).
double softmax_ce_batchmean(const Tensor& logits, std::span<const int> labels);

// d(mean CE)/d(logits) = (softmax - onehot) / batch.
Tensor softmax_ce_grad_batchmean(const Tensor& logits, std::span<const int> labels);

// Sum outputs (batch x T x C) over the time axis -> (batch x C).
Tensor accumulate_time(const Tensor& outputs);

double loss_offline(const Tensor& outputs, std::span<const int> labels);
double loss_online_step(const Tensor& output_t, std::span<const int> labels);

}  // namespace snnkit
