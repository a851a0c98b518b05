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

#include "snnkit/loss.hpp"

#include <cmath>

namespace snnkit {

namespace {

void check_labels(std::size_t batch, std::size_t classes, std::span<const int> labels) {
  SNNKIT_CHECK(labels.size() == batch, "label count does not match batch size");
  for (int y : labels)
    SNNKIT_CHECK(y >= 0 && static_cast<std::size_t>(y) < classes, "label out of range");
}

}  // namespace

double softmax_ce_batchmean(const Tensor& logits, std::span<const int> labels) {
  SNNKIT_CHECK(logits.ndim() == 2, "logits must be (batch, classes)");
  const std::size_t batch = logits.dim(0), classes = logits.dim(1);
  check_labels(batch, classes, labels);
  double total = 0.0;
  for (std::size_t b = 0; b < batch; ++b) {
    const double* z = logits.row(b);
    double m = z[0];
    for (std::size_t c = 1; c < classes; ++c) m = std::max(m, z[c]);
    double sum = 0.0;
    for (std::size_t c = 0; c < classes; ++c) sum += std::exp(z[c] - m);
    total += m + std::log(sum) - z[static_cast<std::size_t>(labels[b])];
  }
  return total / static_cast<double>(batch);
}

Tensor softmax_ce_grad_batchmean(const Tensor& logits, std::span<const int> labels) {
  SNNKIT_CHECK(logits.ndim() == 2, "logits must be (batch, classes)");
  const std::size_t batch = logits.dim(0), classes = logits.dim(1);
  check_labels(batch, classes, labels);
  Tensor g({batch, classes});
  const double inv_batch = 1.0 / static_cast<double>(batch);
  for (std::size_t b = 0; b < batch; ++b) {
    const double* z = logits.row(b);
    double m = z[0];
    for (std::size_t c = 1; c < classes; ++c) m = std::max(m, z[c]);
    double sum = 0.0;
    for (std::size_t c = 0; c < classes; ++c) sum += std::exp(z[c] - m);
    double* gr = g.row(b);
    for (std::size_t c = 0; c < classes; ++c) gr[c] = std::exp(z[c] - m) / sum * inv_batch;
    gr[static_cast<std::size_t>(labels[b])] -= inv_batch;
  }
  return g;
}

Tensor accumulate_time(const Tensor& outputs) {
  SNNKIT_CHECK(outputs.ndim() == 3, "outputs must be (batch, T, classes)");
  const std::size_t batch = outputs.dim(0), T = outputs.dim(1), classes = outputs.dim(2);
  Tensor acc({batch, classes});
  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t t = 0; t < T; ++t)
      for (std::size_t c = 0; c < classes; ++c) acc(b, c) += outputs(b, t, c);
  return acc;
}

double loss_offline(const Tensor& outputs, std::span<const int> labels) {
  return softmax_ce_batchmean(accumulate_time(outputs), labels);
}

double loss_online_step(const Tensor& output_t, std::span<const int> labels) {
  return softmax_ce_batchmean(output_t, labels);
}

}  // namespace snnkit
