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

#include <memory>

#include "snnkit/bptt.hpp"
#include "snnkit/loss.hpp"
#include "snnkit/network.hpp"

namespace snnkit {

// Which rule computes gradients. BPTT is the offline reference; RTRL, OSTL
// and OTTT run forward in time with per-algorithm trace state.
struct GradEstimator {
  enum class Kind { Bptt, Rtrl, Ostl, Ottt };
  Kind kind = Kind::Bptt;
  // OTTT presynaptic trace decay: the neuron's own leak, or a fixed constant
  // in (0, 1).
  bool neuron_leak = true;
  double fixed_leak = 0.9;

  static GradEstimator bptt() { return {Kind::Bptt, true, 0.9}; }
  static GradEstimator rtrl() { return {Kind::Rtrl, true, 0.9}; }
  static GradEstimator ostl() { return {Kind::Ostl, true, 0.9}; }
  static GradEstimator ottt() { return {Kind::Ottt, true, 0.9}; }
  static GradEstimator ottt_fixed(double leak) { return {Kind::Ottt, false, leak}; }
};

std::string estimator_name(const GradEstimator& est);

struct OnlineStepOut {
  std::vector<double> grads;  // canonical flattening, batch-mean
  double loss = 0.0;          // this step's loss
  Tensor output;              // batch x classes
};

// Forward-in-time gradient rule with internal state (network state plus
// traces). One instance drives one sequence; call reset() between sequences.
class OnlineGradEstimator {
 public:
  virtual ~OnlineGradEstimator() = default;
  virtual void reset(const Params& params, std::size_t batch, std::size_t input_features) = 0;
  virtual OnlineStepOut step(const Params& params, const Tensor& x_t,
                             std::span<const int> labels) = 0;
  // Deep copy including trace state (FPTT's recomputed-gradient path
  // re-steps from a snapshot).
  virtual std::unique_ptr<OnlineGradEstimator> clone() const = 0;
};

// Throws ConfigError("BPTT is not an online estimator") for Kind::Bptt and
// validates topology constraints (OSTL/OTTT need an affine/LIF chain).
std::unique_ptr<OnlineGradEstimator> make_online_estimator(const NetworkSpec& spec,
                                                           const GradEstimator& est);

// OSTL and OTTT operate on chains of (affine, LIF) blocks; cat edges may only
// stay within a block. Throws ConfigError otherwise.
void validate_block_chain(const NetworkSpec& spec);

// The input values layer `layer` saw during the step recorded in `rec`,
// with delayed segments read from `prev_out` (zeros before the first step).
Tensor gather_step_input(const NetworkSpec& spec, const std::vector<std::size_t>& widths,
                         std::size_t input_features, const StepRecord& rec,
                         const std::vector<Tensor>& prev_out, std::size_t layer);

struct GradientResult {
  std::vector<double> flat;
  double loss = 0.0;
};

// One gradient evaluation at fixed parameters: BPTT uses the given loss
// mode; online rules accumulate deferred per-step gradients (online loss).
GradientResult compute_gradients(const NetworkSpec& spec, const Params& params, const Tensor& x,
                                 std::span<const int> labels, const LossSpec& loss,
                                 const GradEstimator& est);

}  // namespace snnkit
