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

#include "snnkit/neuron.hpp"

#include <cmath>

namespace snnkit {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kHalfPi = kPi / 2.0;
}  // namespace

void validate(const SurrogateSpec& spec) {
  SNNKIT_CHECK(spec.slope > 0.0, "surrogate slope must be positive");
  SNNKIT_CHECK(spec.width > 0.0, "surrogate width must be positive");
}

void validate(const LifConfig& config) {
  SNNKIT_CHECK(config.v_threshold > 0.0, "v_threshold must be positive");
  SNNKIT_CHECK(std::isfinite(config.tau_init), "tau_init must be finite");
  validate(config.surrogate);
}

double heaviside(double u) {
  SNNKIT_CHECK_NUMERIC(std::isfinite(u), "non-finite membrane");
  return u >= 0.0 ? 1.0 : 0.0;
}

Tensor heaviside(const Tensor& u) {
  Tensor out(u.shape());
  const double* src = u.data();
  double* dst = out.data();
  for (std::size_t i = 0; i < u.size(); ++i) dst[i] = heaviside(src[i]);
  return out;
}

double surrogate_grad(const SurrogateSpec& spec, double u) {
  SNNKIT_CHECK_NUMERIC(std::isfinite(u), "non-finite membrane");
  switch (spec.kind) {
    case SurrogateKind::FastSigmoid: {
      const double d = spec.slope * std::fabs(u) + 1.0;
      return 1.0 / (d * d);
    }
    case SurrogateKind::Atan: {
      const double c = kHalfPi * spec.width * u;
      return (spec.width / 2.0) / (1.0 + c * c);
    }
  }
  return 0.0;
}

Tensor surrogate_grad(const SurrogateSpec& spec, const Tensor& u) {
  Tensor out(u.shape());
  const double* src = u.data();
  double* dst = out.data();
  for (std::size_t i = 0; i < u.size(); ++i) dst[i] = surrogate_grad(spec, src[i]);
  return out;
}

double smooth_spike(const SurrogateSpec& spec, double u) {
  switch (spec.kind) {
    case SurrogateKind::FastSigmoid:
      return 0.5 * (1.0 + u / (1.0 + spec.slope * std::fabs(u)));
    case SurrogateKind::Atan:
      return 0.5 + std::atan(kHalfPi * spec.width * u) / kPi;
  }
  return 0.0;
}

double smooth_spike_grad(const SurrogateSpec& spec, double u) {
  switch (spec.kind) {
    case SurrogateKind::FastSigmoid:
      return 0.5 * surrogate_grad(spec, u);
    case SurrogateKind::Atan:
      return surrogate_grad(spec, u);
  }
  return 0.0;
}

double lif_leak(double tau) { return 1.0 / (1.0 + std::exp(-tau)); }

LifState lif_init_state(std::size_t batch, std::size_t features) {
  SNNKIT_CHECK(batch >= 1 && features >= 1, "lif_init_state requires batch, features >= 1");
  return LifState{Tensor({batch, features})};
}

LifStepOut lif_step(const LifConfig& config, std::span<const double> tau, LifState& state,
                    const Tensor& current) {
  SNNKIT_CHECK(state.v.same_shape(current), "lif_step: state and current shapes differ");
  const std::size_t batch = current.dim(0), features = current.dim(1);
  SNNKIT_CHECK(tau.size() == features || tau.size() == 1, "lif_step: tau size must be 1 or features");

  LifStepOut out;
  out.spikes = Tensor({batch, features});
  out.v_pre = Tensor({batch, features});
  out.spike_grad = Tensor({batch, features});

  const double th = config.v_threshold;
  for (std::size_t f = 0; f < features; ++f) {
    const double lam = lif_leak(tau.size() == 1 ? tau[0] : tau[f]);
    for (std::size_t b = 0; b < batch; ++b) {
      const double v_pre = lam * state.v(b, f) + current(b, f);
      SNNKIT_CHECK_NUMERIC(std::isfinite(v_pre), "non-finite membrane");
      const double u = v_pre - th;
      const double s = config.smooth_forward ? smooth_spike(config.surrogate, u) : (u >= 0.0 ? 1.0 : 0.0);
      out.v_pre(b, f) = v_pre;
      out.spikes(b, f) = s;
      out.spike_grad(b, f) = config.smooth_forward ? smooth_spike_grad(config.surrogate, u)
                                                   : surrogate_grad(config.surrogate, u);
      state.v(b, f) = v_pre - s * th;
    }
  }
  return out;
}

}  // namespace snnkit
