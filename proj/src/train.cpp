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

#include "snnkit/train.hpp"

#include <chrono>
#include <cmath>
#include <cstring>
#include <numeric>

#include "snnkit/rng.hpp"

namespace snnkit {

TrainStepResult train_offline(const NetworkSpec& spec, Params& params, const OptimizerSpec& opt,
                              OptState& opt_state, const Tensor& x, std::span<const int> labels,
                              const LossSpec& loss) {
  BpttResult r = bptt_grad(spec, params, x, labels, loss);
  SNNKIT_CHECK_NUMERIC(std::isfinite(r.loss), "non-finite loss");
  std::vector<double> theta = params.flatten();
  const std::vector<double> g = r.grads.flatten();
  optimizer_step(opt, opt_state, theta, g);
  params.load_flat(theta);
  return {r.loss, std::move(r.outputs)};
}

namespace {

Tensor slice_step(const Tensor& x, std::size_t t) {
  const std::size_t batch = x.dim(0), features = x.dim(2);
  Tensor x_t({batch, features});
  for (std::size_t b = 0; b < batch; ++b)
    std::memcpy(x_t.row(b), x.row(b, t), features * sizeof(double));
  return x_t;
}

void write_step_output(Tensor& outputs, const Tensor& y, std::size_t t) {
  const std::size_t batch = y.dim(0), classes = y.dim(1);
  for (std::size_t b = 0; b < batch; ++b)
    std::memcpy(outputs.row(b, t), y.row(b), classes * sizeof(double));
}

void check_online_loss(const LossSpec& loss) {
  SNNKIT_CHECK(loss.mode == LossMode::Online,
               "online training applies the loss per step; set the online loss mode");
}

}  // namespace

TrainStepResult train_online(const NetworkSpec& spec, Params& params, const OptimizerSpec& opt,
                             OptState& opt_state, const Tensor& x, std::span<const int> labels,
                             const LossSpec& loss, const GradEstimator& estimator,
                             const FpttConfig* fptt, FpttState* fptt_state) {
  check_online_loss(loss);
  const std::size_t batch = x.dim(0), T = x.dim(1), features = x.dim(2);
  auto online = make_online_estimator(spec, estimator);
  online->reset(params, batch, features);

  FpttState local_fptt;
  if (fptt) {
    local_fptt = init_fptt_state(params);
    if (fptt_state) *fptt_state = local_fptt;
  }

  TrainStepResult result;
  result.outputs = Tensor({batch, T, layer_widths(spec, features).back()});
  for (std::size_t t = 0; t < T; ++t) {
    const Tensor x_t = slice_step(x, t);
    std::unique_ptr<OnlineGradEstimator> snapshot;
    if (fptt && !fptt->reuse_gradient) snapshot = online->clone();
    OnlineStepOut step = online->step(params, x_t, labels);
    SNNKIT_CHECK_NUMERIC(std::isfinite(step.loss), "non-finite loss");
    result.loss += step.loss;
    write_step_output(result.outputs, step.output, t);

    if (fptt) {
      RegradFn regrad;
      if (!fptt->reuse_gradient)
        regrad = [&](const Params& updated) {
          return snapshot->step(updated, x_t, labels).grads;
        };
      fptt_update(*fptt, step.grads, params, opt, opt_state, local_fptt, regrad);
    } else {
      std::vector<double> theta = params.flatten();
      optimizer_step(opt, opt_state, theta, step.grads);
      params.load_flat(theta);
    }
  }
  if (fptt && fptt_state) *fptt_state = local_fptt;
  return result;
}

TrainStepResult train_online_deferred(const NetworkSpec& spec, Params& params,
                                      const OptimizerSpec& opt, OptState& opt_state,
                                      const Tensor& x, std::span<const int> labels,
                                      const LossSpec& loss, const GradEstimator& estimator) {
  check_online_loss(loss);
  const std::size_t batch = x.dim(0), T = x.dim(1), features = x.dim(2);
  auto online = make_online_estimator(spec, estimator);
  online->reset(params, batch, features);

  TrainStepResult result;
  result.outputs = Tensor({batch, T, layer_widths(spec, features).back()});
  std::vector<double> grads(params.total_size(), 0.0);
  for (std::size_t t = 0; t < T; ++t) {
    const Tensor x_t = slice_step(x, t);
    OnlineStepOut step = online->step(params, x_t, labels);
    SNNKIT_CHECK_NUMERIC(std::isfinite(step.loss), "non-finite loss");
    result.loss += step.loss;
    write_step_output(result.outputs, step.output, t);
    for (std::size_t p = 0; p < grads.size(); ++p) grads[p] += step.grads[p];
  }
  std::vector<double> theta = params.flatten();
  optimizer_step(opt, opt_state, theta, grads);
  params.load_flat(theta);
  return result;
}

namespace {

std::size_t count_correct(const Tensor& outputs, std::span<const int> labels) {
  const Tensor acc = accumulate_time(outputs);
  std::size_t correct = 0;
  for (std::size_t b = 0; b < acc.dim(0); ++b) {
    const double* row = acc.row(b);
    std::size_t best = 0;
    for (std::size_t c = 1; c < acc.dim(1); ++c)
      if (row[c] > row[best]) best = c;
    if (static_cast<int>(best) == labels[b]) ++correct;
  }
  return correct;
}

}  // namespace

void fit(const NetworkSpec& spec, Params& params, const Tensor& x_all,
         std::span<const int> labels_all, const FitConfig& config, const EpochHook& hook) {
  validate(config.opt);
  const std::size_t n = x_all.dim(0), T = x_all.dim(1), features = x_all.dim(2);
  SNNKIT_CHECK(labels_all.size() == n, "label count does not match sample count");
  SNNKIT_CHECK(config.batch_size >= 1, "batch_size must be >= 1");
  if (config.mode == TrainMode::Offline)
    SNNKIT_CHECK(config.estimator.kind == GradEstimator::Kind::Bptt,
                 "offline training uses BPTT; pick online or deferred mode for online rules");

  OptState opt_state = init_opt_state(config.opt, params.total_size());
  const Rng shuffle_root(config.seed, 77);

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng r = shuffle_root.child(epoch);
    for (std::size_t i = n; i > 1; --i) {
      const std::size_t j = r.next_below(i);
      std::swap(order[i - 1], order[j]);
    }

    double loss_sum = 0.0;
    std::size_t batches = 0, correct = 0;
    for (std::size_t begin = 0; begin < n; begin += config.batch_size) {
      const std::size_t bs = std::min(config.batch_size, n - begin);
      Tensor x({bs, T, features});
      std::vector<int> labels(bs);
      for (std::size_t b = 0; b < bs; ++b) {
        const std::size_t src = order[begin + b];
        std::memcpy(x.row(b, 0), x_all.row(src, 0), T * features * sizeof(double));
        labels[b] = labels_all[src];
      }

      TrainStepResult step;
      switch (config.mode) {
        case TrainMode::Offline:
          step = train_offline(spec, params, config.opt, opt_state, x, labels, config.loss);
          break;
        case TrainMode::Online:
          step = train_online(spec, params, config.opt, opt_state, x, labels, config.loss,
                              config.estimator, config.fptt ? &*config.fptt : nullptr, nullptr);
          break;
        case TrainMode::OnlineDeferred:
          step = train_online_deferred(spec, params, config.opt, opt_state, x, labels, config.loss,
                                       config.estimator);
          break;
      }
      SNNKIT_CHECK_NUMERIC(std::isfinite(step.loss), "non-finite loss");
      loss_sum += step.loss;
      ++batches;
      correct += count_correct(step.outputs, labels);
    }

    EpochStats stats;
    stats.loss = loss_sum / static_cast<double>(batches);
    stats.accuracy = static_cast<double>(correct) / static_cast<double>(n);
    stats.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    if (hook) hook(epoch, stats, params);
  }
}

}  // namespace snnkit
