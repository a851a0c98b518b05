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

#include "snnkit/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "snnkit/rng.hpp"

namespace snnkit {

namespace {

std::string layer_msg(std::size_t layer, const std::string& what) {
  return "layer " + std::to_string(layer) + ": " + what;
}

}  // namespace

void validate_network(const NetworkSpec& spec) {
  SNNKIT_CHECK(!spec.layers.empty(), "network needs at least one layer");
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const LayerSpec& l = spec.layers[i];
    if (l.kind == LayerSpec::Kind::Affine) {
      SNNKIT_CHECK(l.out_features >= 1, layer_msg(i, "affine out_features must be >= 1"));
    } else {
      validate(l.lif);
    }
  }
  for (const auto& [dst, sources] : spec.cat) {
    SNNKIT_CHECK(dst < spec.layers.size(), "cat destination out of range");
    SNNKIT_CHECK(spec.layers[dst].kind == LayerSpec::Kind::Affine,
                 layer_msg(dst, "cat destinations must be affine layers"));
    for (std::size_t s : sources)
      SNNKIT_CHECK(s < spec.layers.size(), layer_msg(dst, "cat source out of range"));
  }

  // Same-step dependency cycle check. With the delay rule (sources >= dst are
  // delayed one step) the same-step graph only has edges from lower to higher
  // indices, so this cannot fire today; it guards any future delay variant.
  const std::size_t n = spec.layers.size();
  std::vector<std::vector<std::size_t>> edges(n);
  std::vector<std::size_t> indeg(n, 0);
  for (std::size_t i = 1; i < n; ++i) {
    edges[i - 1].push_back(i);
    ++indeg[i];
  }
  for (const auto& [dst, sources] : spec.cat)
    for (std::size_t s : sources)
      if (s < dst) {
        edges[s].push_back(dst);
        ++indeg[dst];
      }
  std::vector<std::size_t> queue;
  for (std::size_t i = 0; i < n; ++i)
    if (indeg[i] == 0) queue.push_back(i);
  std::size_t seen = 0;
  while (!queue.empty()) {
    const std::size_t u = queue.back();
    queue.pop_back();
    ++seen;
    for (std::size_t v : edges[u])
      if (--indeg[v] == 0) queue.push_back(v);
  }
  SNNKIT_CHECK(seen == n, "unresolvable same-step cycle");
}

std::vector<std::size_t> layer_widths(const NetworkSpec& spec, std::size_t input_features) {
  SNNKIT_CHECK(input_features >= 1, "input width must be >= 1");
  std::vector<std::size_t> widths(spec.layers.size());
  std::size_t prev = input_features;
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    widths[i] = spec.layers[i].kind == LayerSpec::Kind::Affine ? spec.layers[i].out_features : prev;
    prev = widths[i];
  }
  return widths;
}

std::vector<InputSegment> input_segments(const NetworkSpec& spec,
                                         const std::vector<std::size_t>& widths,
                                         std::size_t input_features, std::size_t layer) {
  std::vector<InputSegment> segs;
  if (layer == 0) {
    segs.push_back({InputSegment::Origin::NetworkInput, 0, input_features});
  } else {
    segs.push_back({InputSegment::Origin::SameStep, layer - 1, widths[layer - 1]});
  }
  auto it = spec.cat.find(layer);
  if (it != spec.cat.end()) {
    for (std::size_t s : it->second) {
      const auto origin =
          s < layer ? InputSegment::Origin::SameStep : InputSegment::Origin::Delayed;
      segs.push_back({origin, s, widths[s]});
    }
  }
  return segs;
}

std::size_t resolved_input_width(const NetworkSpec& spec, const std::vector<std::size_t>& widths,
                                 std::size_t input_features, std::size_t layer) {
  std::size_t w = 0;
  for (const InputSegment& seg : input_segments(spec, widths, input_features, layer)) w += seg.width;
  return w;
}

std::string block_label(const ParamBlock& block) {
  const char* kind = block.kind == ParamKind::Weight ? "W" : block.kind == ParamKind::Bias ? "b" : "tau";
  return "layer" + std::to_string(block.layer) + "." + kind;
}

std::size_t Params::total_size() const {
  std::size_t n = 0;
  for (const ParamBlock& b : blocks) n += b.value.size();
  return n;
}

std::vector<double> Params::flatten() const {
  std::vector<double> flat;
  flat.reserve(total_size());
  for (const ParamBlock& b : blocks) flat.insert(flat.end(), b.value.flat().begin(), b.value.flat().end());
  return flat;
}

void Params::load_flat(std::span<const double> flat) {
  SNNKIT_CHECK(flat.size() == total_size(), "flat parameter vector has the wrong length");
  std::size_t off = 0;
  for (ParamBlock& b : blocks) {
    std::memcpy(b.value.data(), flat.data() + off, b.value.size() * sizeof(double));
    off += b.value.size();
  }
}

int Params::find(std::size_t layer, ParamKind kind) const {
  for (std::size_t i = 0; i < blocks.size(); ++i)
    if (blocks[i].layer == layer && blocks[i].kind == kind) return static_cast<int>(i);
  return -1;
}

const Tensor& Params::at(std::size_t layer, ParamKind kind) const {
  const int i = find(layer, kind);
  SNNKIT_CHECK(i >= 0, "missing parameter block");
  return blocks[static_cast<std::size_t>(i)].value;
}

Tensor& Params::at(std::size_t layer, ParamKind kind) {
  const int i = find(layer, kind);
  SNNKIT_CHECK(i >= 0, "missing parameter block");
  return blocks[static_cast<std::size_t>(i)].value;
}

Params zeros_like(const Params& params) {
  Params z = params;
  for (ParamBlock& b : z.blocks)
    for (double& v : b.value.flat()) v = 0.0;
  return z;
}

std::vector<BlockRange> block_ranges(const Params& params) {
  std::vector<BlockRange> ranges;
  ranges.reserve(params.blocks.size());
  std::size_t off = 0;
  for (const ParamBlock& b : params.blocks) {
    ranges.push_back({off, b.value.size()});
    off += b.value.size();
  }
  return ranges;
}

Params init_params(const NetworkSpec& spec, const Tensor& sample_input, std::uint64_t seed) {
  validate_network(spec);
  SNNKIT_CHECK(sample_input.ndim() >= 2, "sample input must be (batch, features) or (batch, T, features)");
  const std::size_t input_features = sample_input.dim(sample_input.ndim() - 1);
  const std::vector<std::size_t> widths = layer_widths(spec, input_features);

  Params params;
  const Rng root(seed);
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const LayerSpec& l = spec.layers[i];
    if (l.kind == LayerSpec::Kind::Affine) {
      const std::size_t fan_in = resolved_input_width(spec, widths, input_features, i);
      const std::size_t out = l.out_features;
      Rng r = root.child(i);
      const double bound = std::sqrt(1.0 / static_cast<double>(fan_in));
      Tensor W({out, fan_in});
      for (double& w : W.flat()) w = r.next_uniform(-bound, bound);
      params.blocks.push_back({i, ParamKind::Weight, std::move(W)});
      params.blocks.push_back({i, ParamKind::Bias, Tensor({out})});
    } else if (l.lif.trainable_tau) {
      params.blocks.push_back({i, ParamKind::Tau, Tensor::full({widths[i]}, l.lif.tau_init)});
    }
  }
  return params;
}

std::vector<double> lif_tau(const NetworkSpec& spec, const Params& params, std::size_t layer,
                            std::size_t features) {
  const LayerSpec& l = spec.layers[layer];
  if (l.lif.trainable_tau) {
    const Tensor& tau = params.at(layer, ParamKind::Tau);
    SNNKIT_CHECK(tau.size() == features, layer_msg(layer, "tau vector size mismatch"));
    return std::vector<double>(tau.flat().begin(), tau.flat().end());
  }
  return std::vector<double>(features, l.lif.tau_init);
}

NetState init_net_state(const NetworkSpec& spec, std::size_t input_features, std::size_t batch) {
  validate_network(spec);
  SNNKIT_CHECK(batch >= 1, "batch must be >= 1");
  const std::vector<std::size_t> widths = layer_widths(spec, input_features);
  NetState state;
  state.lif.resize(spec.layers.size());
  state.prev_out.resize(spec.layers.size());
  for (std::size_t i = 0; i < spec.layers.size(); ++i)
    if (spec.layers[i].kind == LayerSpec::Kind::Lif)
      state.lif[i] = lif_init_state(batch, widths[i]);
  for (const auto& [dst, sources] : spec.cat)
    for (std::size_t s : sources)
      if (s >= dst && state.prev_out[s].empty()) state.prev_out[s] = Tensor({batch, widths[s]});
  return state;
}

Tensor forward_step(const NetworkSpec& spec, const Params& params, NetState& state,
                    const Tensor& x_t, StepRecord* record) {
  SNNKIT_CHECK(x_t.ndim() == 2, "forward_step expects x_t as (batch, features)");
  const std::size_t input_features = x_t.dim(1);
  const std::vector<std::size_t> widths = layer_widths(spec, input_features);
  const std::size_t n_layers = spec.layers.size();

  std::vector<Tensor> outs(n_layers);
  if (record) {
    record->input = x_t;
    record->v_pre.assign(n_layers, Tensor());
    record->spike_grad.assign(n_layers, Tensor());
    record->spike_count.assign(n_layers, 0);
  }

  for (std::size_t i = 0; i < n_layers; ++i) {
    // Assemble this layer's input per the delay rule.
    std::vector<const Tensor*> parts;
    for (const InputSegment& seg : input_segments(spec, widths, input_features, i)) {
      switch (seg.origin) {
        case InputSegment::Origin::NetworkInput:
          parts.push_back(&x_t);
          break;
        case InputSegment::Origin::SameStep:
          parts.push_back(&outs[seg.source]);
          break;
        case InputSegment::Origin::Delayed:
          parts.push_back(&state.prev_out[seg.source]);
          break;
      }
    }
    Tensor in = parts.size() == 1 ? *parts[0] : hconcat(parts);

    const LayerSpec& l = spec.layers[i];
    if (l.kind == LayerSpec::Kind::Affine) {
      const Tensor& W = params.at(i, ParamKind::Weight);
      const Tensor& b = params.at(i, ParamKind::Bias);
      SNNKIT_CHECK(W.dim(1) == in.dim(1),
                   layer_msg(i, "weight width " + std::to_string(W.dim(1)) +
                                    " does not match input width " + std::to_string(in.dim(1))));
      outs[i] = affine_forward(in, W, b);
    } else {
      const std::vector<double> tau = lif_tau(spec, params, i, widths[i]);
      try {
        LifStepOut step = lif_step(l.lif, tau, state.lif[i], in);
        if (record) {
          record->v_pre[i] = std::move(step.v_pre);
          record->spike_grad[i] = std::move(step.spike_grad);
          record->spike_count[i] = count_nonzero(step.spikes);
        }
        outs[i] = std::move(step.spikes);
      } catch (const NumericError& e) {
        throw NumericError(layer_msg(i, e.what()));
      }
    }
  }

  // Delayed sources see this step's outputs next step.
  for (std::size_t i = 0; i < n_layers; ++i)
    if (!state.prev_out[i].empty()) state.prev_out[i] = outs[i];

  Tensor y = outs[n_layers - 1];
  if (record) record->output = std::move(outs);
  return y;
}

Rollout rollout(const NetworkSpec& spec, const Params& params, const Tensor& x) {
  SNNKIT_CHECK(x.ndim() == 3 && x.dim(1) >= 1, "rollout expects x as (batch, T, features) with T >= 1");
  const std::size_t batch = x.dim(0), T = x.dim(1), features = x.dim(2);
  NetState state = init_net_state(spec, features, batch);
  const std::size_t out_w = layer_widths(spec, features).back();

  Rollout r;
  r.outputs = Tensor({batch, T, out_w});
  r.records.resize(T);
  Tensor x_t({batch, features});
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t b = 0; b < batch; ++b)
      std::memcpy(x_t.row(b), x.row(b, t), features * sizeof(double));
    Tensor y = forward_step(spec, params, state, x_t, &r.records[t]);
    for (std::size_t b = 0; b < batch; ++b)
      std::memcpy(r.outputs.row(b, t), y.row(b), out_w * sizeof(double));
  }
  return r;
}

Tensor rollout_outputs(const NetworkSpec& spec, const Params& params, const Tensor& x) {
  SNNKIT_CHECK(x.ndim() == 3 && x.dim(1) >= 1, "rollout expects x as (batch, T, features) with T >= 1");
  const std::size_t batch = x.dim(0), T = x.dim(1), features = x.dim(2);
  NetState state = init_net_state(spec, features, batch);
  const std::size_t out_w = layer_widths(spec, features).back();

  Tensor outputs({batch, T, out_w});
  Tensor x_t({batch, features});
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t b = 0; b < batch; ++b)
      std::memcpy(x_t.row(b), x.row(b, t), features * sizeof(double));
    Tensor y = forward_step(spec, params, state, x_t, nullptr);
    for (std::size_t b = 0; b < batch; ++b)
      std::memcpy(outputs.row(b, t), y.row(b), out_w * sizeof(double));
  }
  return outputs;
}

Tensor layer_input_from_records(const NetworkSpec& spec, const std::vector<std::size_t>& widths,
                                const std::vector<StepRecord>& records, std::size_t t,
                                std::size_t layer) {
  const StepRecord& rec = records[t];
  const std::size_t input_features = rec.input.dim(1);
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
        if (t == 0) {
          zeros_store.emplace_back(Tensor({batch, seg.width}));
          parts.push_back(&zeros_store.back());
        } else {
          parts.push_back(&records[t - 1].output[seg.source]);
        }
        break;
    }
  }
  return parts.size() == 1 ? *parts[0] : hconcat(parts);
}

}  // namespace snnkit
