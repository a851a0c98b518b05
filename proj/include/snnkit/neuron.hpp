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

enum class SurrogateKind { FastSigmoid, Atan };

// Surrogate derivative of the spike nonlinearity. The forward spike value is
// always exactly 0 or 1; only the backward rule differs:
//   FastSigmoid: d(u) = 1 / (slope*|u| + 1)^2
//   Atan:        d(u) = (width/2) / (1 + ((pi/2)*width*u)^2)
// Both are even, peak at u = 0, and stay finite everywhere.
struct SurrogateSpec {
  SurrogateKind kind = SurrogateKind::FastSigmoid;
  double slope = 25.0;  // FastSigmoid steepness
  double width = 2.0;   // Atan width

  static SurrogateSpec fast_sigmoid(double slope = 25.0) {
    SurrogateSpec s;
    s.kind = SurrogateKind::FastSigmoid;
    s.slope = slope;
    return s;
  }
  static SurrogateSpec atan(double width = 2.0) {
    SurrogateSpec s;
    s.kind = SurrogateKind::Atan;
    s.width = width;
    return s;
  }
};

struct LifConfig {
  double tau_init = 2.0;
  double v_threshold = 1.0;
  // Stored for completeness; the subtract-reset update never reads it.
  double v_reset = 0.0;
  SurrogateSpec surrogate;
  bool trainable_tau = false;
  // Treat the reset term -s*v_threshold as a constant in backward passes.
  bool detach_reset = false;
  // Diagnostic mode: replace the hard spike by a smooth primitive whose
  // derivative is known exactly, so gradients can be checked against finite
  // differences. Not meant for training.
  bool smooth_forward = false;
};

// Membrane potentials, (batch x features), zero on initialization.
struct LifState {
  Tensor v;
};

void validate(const SurrogateSpec& spec);
void validate(const LifConfig& config);

// Step spike: 1 where u >= 0, else 0.
double heaviside(double u);
Tensor heaviside(const Tensor& u);

double surrogate_grad(const SurrogateSpec& spec, double u);
Tensor surrogate_grad(const SurrogateSpec& spec, const Tensor& u);

// Smooth stand-ins used by the gradient oracle. smooth_spike_grad is the
// exact derivative of smooth_spike (one half of the surrogate for the fast
// sigmoid, the full surrogate for atan).
double smooth_spike(const SurrogateSpec& spec, double u);
double smooth_spike_grad(const SurrogateSpec& spec, double u);

// Leak factor: logistic(tau), always in (0, 1) for finite tau.
double lif_leak(double tau);

LifState lif_init_state(std::size_t batch, std::size_t features);

struct LifStepOut {
  Tensor spikes;      // batch x features, {0,1} (continuous in smooth mode)
  Tensor v_pre;       // membrane after leak + integrate, before reset
  Tensor spike_grad;  // derivative factor of the spike fn at v_pre - v_threshold
};

// One LIF update: v_pre = leak(tau)*v + current, spike where v_pre crosses
// threshold, then subtract-reset. `tau` is per-feature (size 1 broadcasts).
// Mutates `state` to the post-reset membrane.
LifStepOut lif_step(const LifConfig& config, std::span<const double> tau, LifState& state,
                    const Tensor& current);

}  // namespace snnkit
