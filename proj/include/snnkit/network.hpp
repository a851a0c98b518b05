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
#include <map>
#include <string>
#include <vector>

#include "snnkit/neuron.hpp"
#include "snnkit/tensor.hpp"

namespace snnkit {

struct LayerSpec {
  enum class Kind { Affine, Lif };
  Kind kind = Kind::Affine;
  std::size_t out_features = 0;  // Affine only
  LifConfig lif;                 // Lif only

  static LayerSpec affine(std::size_t out_features) {
    LayerSpec l;
    l.kind = Kind::Affine;
    l.out_features = out_features;
    return l;
  }
  static LayerSpec lif_layer(LifConfig config = {}) {
    LayerSpec l;
    l.kind = Kind::Lif;
    l.lif = config;
    return l;
  }
};

// Ordered layer list plus `cat` concatenation edges. cat[d] = {s...} feeds
// the output of each source layer s into the input of destination layer d:
// sources with s < d contribute their output from the current step (skip
// connection), sources with s >= d contribute the previous step's output
// (recurrent edge, zeros at t = 0). Destinations must be affine layers; the
// destination's weight matrix widens to cover the extra inputs.
struct NetworkSpec {
  std::vector<LayerSpec> layers;
  std::map<std::size_t, std::vector<std::size_t>> cat;
};

void validate_network(const NetworkSpec& spec);

// Output width of every layer given the network input width. Affine layers
// fix their own width; LIF layers keep their input's width.
std::vector<std::size_t> layer_widths(const NetworkSpec& spec, std::size_t input_features);

struct InputSegment {
  enum class Origin { NetworkInput, SameStep, Delayed };
  Origin origin;
  std::size_t source = 0;  // layer index (unused for NetworkInput)
  std::size_t width = 0;
};

// The concatenation layout of one layer's input: the sequential predecessor
// first, then the cat sources in declaration order.
std::vector<InputSegment> input_segments(const NetworkSpec& spec,
                                         const std::vector<std::size_t>& widths,
                                         std::size_t input_features, std::size_t layer);

std::size_t resolved_input_width(const NetworkSpec& spec, const std::vector<std::size_t>& widths,
                                 std::size_t input_features, std::size_t layer);

enum class ParamKind { Weight, Bias, Tau };

struct ParamBlock {
  std::size_t layer = 0;
  ParamKind kind = ParamKind::Weight;
  Tensor value;
};

std::string block_label(const ParamBlock& block);

// Trainable parameters in canonical order: layer index ascending, and within
// a layer W (row-major), then b, then tau. Gradient vectors use the same
// flattening, so positions line up across estimators.
struct Params {
  std::vector<ParamBlock> blocks;

  std::size_t total_size() const;
  std::vector<double> flatten() const;
  void load_flat(std::span<const double> flat);

  int find(std::size_t layer, ParamKind kind) const;
  const Tensor& at(std::size_t layer, ParamKind kind) const;
  Tensor& at(std::size_t layer, ParamKind kind);
};

Params zeros_like(const Params& params);

struct BlockRange {
  std::size_t offset = 0;
  std::size_t size = 0;
};
std::vector<BlockRange> block_ranges(const Params& params);

// Deterministic init from a sample batch: weights uniform on
// [-sqrt(1/fan_in), sqrt(1/fan_in)] with per-layer child seeds (so adding a
// layer does not disturb earlier draws), biases zero, tau = tau_init.
Params init_params(const NetworkSpec& spec, const Tensor& sample_input, std::uint64_t seed);

// Per-feature leak vector for a LIF layer (from trained tau when present,
// else the config value).
std::vector<double> lif_tau(const NetworkSpec& spec, const Params& params, std::size_t layer,
                            std::size_t features);

struct NetState {
  std::vector<LifState> lif;     // per layer; empty tensor for affine layers
  std::vector<Tensor> prev_out;  // per layer; allocated only for delayed cat sources
};

NetState init_net_state(const NetworkSpec& spec, std::size_t input_features, std::size_t batch);

// Everything one step leaves behind for gradient engines and metrics.
struct StepRecord {
  Tensor input;                          // network input x_t
  std::vector<Tensor> output;            // per layer
  std::vector<Tensor> v_pre;             // LIF layers only
  std::vector<Tensor> spike_grad;        // LIF layers only
  std::vector<std::size_t> spike_count;  // LIF layers only (nonzero spikes)
};

// One step through all layers in index order. Returns the last layer's
// output; state advances in place. `record` may be null when nothing beyond
// the output is needed.
Tensor forward_step(const NetworkSpec& spec, const Params& params, NetState& state,
                    const Tensor& x_t, StepRecord* record);

struct Rollout {
  Tensor outputs;  // batch x T x out
  std::vector<StepRecord> records;
};

Rollout rollout(const NetworkSpec& spec, const Params& params, const Tensor& x);

// Outputs only; skips record retention (loss-surface scans, eval).
Tensor rollout_outputs(const NetworkSpec& spec, const Params& params, const Tensor& x);

// Reassemble the input that layer `layer` saw at step t of a recorded
// rollout (delayed segments read step t-1; zeros at t = 0).
Tensor layer_input_from_records(const NetworkSpec& spec, const std::vector<std::size_t>& widths,
                                const std::vector<StepRecord>& records, std::size_t t,
                                std::size_t layer);

}  // namespace snnkit
