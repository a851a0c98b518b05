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

#include <cstring>

#include "snnkit/online.hpp"

namespace snnkit {

std::unique_ptr<OnlineGradEstimator> make_rtrl_estimator(NetworkSpec spec);
std::unique_ptr<OnlineGradEstimator> make_ostl_estimator(NetworkSpec spec);
std::unique_ptr<OnlineGradEstimator> make_ottt_estimator(NetworkSpec spec, bool neuron_leak,
                                                         double fixed_leak);

std::string estimator_name(const GradEstimator& est) {
  switch (est.kind) {
    case GradEstimator::Kind::Bptt:
      return "bptt";
    case GradEstimator::Kind::Rtrl:
      return "rtrl";
    case GradEstimator::Kind::Ostl:
      return "ostl";
    case GradEstimator::Kind::Ottt:
      return "ottt";
  }
  return "?";
}

void validate_block_chain(const NetworkSpec& spec) {
  const std::size_t n = spec.layers.size();
  bool chain = n >= 2 && n % 2 == 0;
  for (std::size_t i = 0; chain && i < n; ++i) {
    const bool want_affine = i % 2 == 0;
    chain = (spec.layers[i].kind == LayerSpec::Kind::Affine) == want_affine;
  }
  SNNKIT_CHECK(chain, "OSTL requires a layer chain of (affine, LIF) blocks");
  for (const auto& [dst, sources] : spec.cat) {
    for (std::size_t s : sources)
      SNNKIT_CHECK(s == dst || s == dst + 1,
                   "OSTL requires a layer chain; cat edges may not cross blocks");
  }
}

Tensor gather_step_input(const NetworkSpec& spec, const std::vector<std::size_t>& widths,
                         std::size_t input_features, const StepRecord& rec,
                         const std::vector<Tensor>& prev_out, std::size_t layer) {
  const std::size_t batch = rec.input.dim(0);
  const std::vector<InputSegment> segs = input_segments(spec, widths, input_features, layer);
  std::vector<Tensor> zeros_store;
  zeros_store.reserve(segs.size());
  std::vector<const Tensor*> parts;
  for (const InputSegment& seg : segs) {
    switch (seg.origin) {
      case InputSegment::Origin::NetworkInput:
        parts.push_back(&rec.input);
        break;
      case InputSegment::Origin::SameStep:
        parts.push_back(&rec.output[seg.source]);
        break;
      case InputSegment::Origin::Delayed:
        if (prev_out[seg.source].empty()) {
          zeros_store.emplace_back(Tensor({batch, seg.width}));
          parts.push_back(&zeros_store.back());
        } else {
          parts.push_back(&prev_out[seg.source]);
        }
        break;
    }
  }
  return parts.size() == 1 ? *parts[0] : hconcat(parts);
}

std::unique_ptr<OnlineGradEstimator> make_online_estimator(const NetworkSpec& spec,
                                                           const GradEstimator& est) {
  switch (est.kind) {
    case GradEstimator::Kind::Bptt:
      throw ConfigError("BPTT is not an online estimator");
    case GradEstimator::Kind::Rtrl:
      return make_rtrl_estimator(spec);
    case GradEstimator::Kind::Ostl:
      return make_ostl_estimator(spec);
    case GradEstimator::Kind::Ottt:
      SNNKIT_CHECK(est.neuron_leak || (est.fixed_leak > 0.0 && est.fixed_leak < 1.0),
                   "OTTT fixed trace leak must be in (0, 1)");
      return make_ottt_estimator(spec, est.neuron_leak, est.fixed_leak);
  }
  throw ConfigError("unknown estimator");
}

GradientResult compute_gradients(const NetworkSpec& spec, const Params& params, const Tensor& x,
                                 std::span<const int> labels, const LossSpec& loss,
                                 const GradEstimator& est) {
  GradientResult result;
  if (est.kind == GradEstimator::Kind::Bptt) {
    BpttResult r = bptt_grad(spec, params, x, labels, loss);
    result.flat = r.grads.flatten();
    result.loss = r.loss;
    return result;
  }

  const std::size_t batch = x.dim(0), T = x.dim(1), features = x.dim(2);
  auto online = make_online_estimator(spec, est);
  online->reset(params, batch, features);
  result.flat.assign(params.total_size(), 0.0);
  Tensor x_t({batch, features});
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t b = 0; b < batch; ++b)
      std::memcpy(x_t.row(b), x.row(b, t), features * sizeof(double));
    OnlineStepOut step = online->step(params, x_t, labels);
    for (std::size_t p = 0; p < result.flat.size(); ++p) result.flat[p] += step.grads[p];
    result.loss += step.loss;
  }
  return result;
}

}  // namespace snnkit
