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

#include "snnkit/bptt.hpp"

#include <cmath>
#include <cstring>

#include "snnkit/kernels.hpp"

namespace snnkit {

namespace {

void check_finite_adjoint(const Tensor& t, std::size_t layer, std::size_t step) {
  if (!all_finite(t))
    throw NumericError("non-finite adjoint at layer " + std::to_string(layer) + ", timestep " +
                       std::to_string(step));
}

}  // namespace

Params bptt_backward(const NetworkSpec& spec, const Params& params,
                     const std::vector<StepRecord>& records, const std::vector<Tensor>& g_y) {
  SNNKIT_CHECK(!records.empty() && records.size() == g_y.size(), "records and loss adjoints must align");
  const std::size_t T = records.size();
  const std::size_t n_layers = spec.layers.size();
  const std::size_t batch = records[0].input.dim(0);
  const std::size_t input_features = records[0].input.dim(1);
  const std::vector<std::size_t> widths = layer_widths(spec, input_features);

  Params grads = zeros_like(params);

  // Adjoint wrt a LIF layer's post-reset membrane, carried backward in time.
  std::vector<Tensor> g_post(n_layers);
  for (std::size_t i = 0; i < n_layers; ++i)
    if (spec.layers[i].kind == LayerSpec::Kind::Lif) g_post[i] = Tensor({batch, widths[i]});

  // Adjoint contributions produced at step t+1 for outputs at step t
  // (delayed cat edges).
  std::vector<Tensor> delayed(n_layers);

  for (std::size_t tp = T; tp-- > 0;) {
    const std::size_t t = tp;
    const StepRecord& rec = records[t];

    std::vector<Tensor> g_out(n_layers);
    for (std::size_t i = 0; i < n_layers; ++i) g_out[i] = Tensor({batch, widths[i]});
    // Loss path into the final layer plus anything delayed from step t+1.
    for (std::size_t k = 0; k < g_out[n_layers - 1].size(); ++k)
      g_out[n_layers - 1][k] += g_y[t][k];
    for (std::size_t i = 0; i < n_layers; ++i)
      if (!delayed[i].empty())
        for (std::size_t k = 0; k < g_out[i].size(); ++k) g_out[i][k] += delayed[i][k];

    std::vector<Tensor> delayed_next(n_layers);
    auto add_delayed = [&](std::size_t source, const Tensor& contrib) {
      if (delayed_next[source].empty()) delayed_next[source] = Tensor({batch, widths[source]});
      for (std::size_t k = 0; k < contrib.size(); ++k) delayed_next[source][k] += contrib[k];
    };

    for (std::size_t ip = n_layers; ip-- > 0;) {
      const std::size_t i = ip;
      const LayerSpec& l = spec.layers[i];
      if (l.kind == LayerSpec::Kind::Affine) {
        const Tensor& W = params.at(i, ParamKind::Weight);
        const Tensor& g_a = g_out[i];
        check_finite_adjoint(g_a, i, t);
        const Tensor in = layer_input_from_records(spec, widths, records, t, i);
        const std::size_t out_w = W.dim(0), in_w = W.dim(1);

        // dW += g_a^T * in ; db += column sums of g_a.
        Tensor dW({out_w, in_w});
        kernels::matmul_tn(g_a.data(), in.data(), dW.data(), out_w, batch, in_w);
        Tensor& gW = grads.at(i, ParamKind::Weight);
        for (std::size_t k = 0; k < gW.size(); ++k) gW[k] += dW[k];
        Tensor& gb = grads.at(i, ParamKind::Bias);
        for (std::size_t b = 0; b < batch; ++b) {
          const double* gr = g_a.row(b);
          for (std::size_t j = 0; j < out_w; ++j) gb[j] += gr[j];
        }

        // Route dL/d(input) back to the producing segments.
        Tensor g_in({batch, in_w});
        kernels::matmul(g_a.data(), W.data(), g_in.data(), batch, out_w, in_w);
        std::size_t col = 0;
        for (const InputSegment& seg : input_segments(spec, widths, input_features, i)) {
          if (seg.origin != InputSegment::Origin::NetworkInput) {
            Tensor part({batch, seg.width});
            for (std::size_t b = 0; b < batch; ++b)
              std::memcpy(part.row(b), g_in.row(b) + col, seg.width * sizeof(double));
            if (seg.origin == InputSegment::Origin::SameStep) {
              Tensor& dst = g_out[seg.source];
              for (std::size_t k = 0; k < part.size(); ++k) dst[k] += part[k];
            } else if (t > 0) {
              add_delayed(seg.source, part);
            }
          }
          col += seg.width;
        }
      } else {
        const Tensor& sg = rec.spike_grad[i];
        const double th = l.lif.v_threshold;
        const std::vector<double> tau = lif_tau(spec, params, i, widths[i]);

        // g_vpre = g_s * sigma' + g_post * d(v_post)/d(v_pre).
        Tensor g_vpre({batch, widths[i]});
        for (std::size_t b = 0; b < batch; ++b)
          for (std::size_t f = 0; f < widths[i]; ++f) {
            const double reset_factor = l.lif.detach_reset ? 1.0 : 1.0 - th * sg(b, f);
            g_vpre(b, f) = g_out[i](b, f) * sg(b, f) + g_post[i](b, f) * reset_factor;
          }
        check_finite_adjoint(g_vpre, i, t);

        if (l.lif.trainable_tau) {
          Tensor& gt = grads.at(i, ParamKind::Tau);
          for (std::size_t f = 0; f < widths[i]; ++f) {
            const double lam = lif_leak(tau[f]);
            const double dlam = lam * (1.0 - lam);
            double acc = 0.0;
            for (std::size_t b = 0; b < batch; ++b) {
              const double v_prev =
                  t > 0 ? records[t - 1].v_pre[i](b, f) - records[t - 1].output[i](b, f) * th : 0.0;
              acc += g_vpre(b, f) * v_prev * dlam;
            }
            gt[f] += acc;
          }
        }

        // Carry lambda * g_vpre to v_post at step t-1; pass g_vpre to the input.
        for (std::size_t f = 0; f < widths[i]; ++f) {
          const double lam = lif_leak(tau[f]);
          for (std::size_t b = 0; b < batch; ++b) g_post[i](b, f) = lam * g_vpre(b, f);
        }
        if (i > 0)
          for (std::size_t k = 0; k < g_vpre.size(); ++k) g_out[i - 1][k] += g_vpre[k];
      }
    }
    delayed = std::move(delayed_next);
  }
  return grads;
}

BpttResult bptt_grad(const NetworkSpec& spec, const Params& params, const Tensor& x,
                     std::span<const int> labels, const LossSpec& loss) {
  BpttResult result;
  Rollout r = rollout(spec, params, x);
  const std::size_t T = x.dim(1);

  std::vector<Tensor> g_y(T);
  if (loss.mode == LossMode::Offline) {
    const Tensor acc = accumulate_time(r.outputs);
    result.loss = softmax_ce_batchmean(acc, labels);
    const Tensor g = softmax_ce_grad_batchmean(acc, labels);
    for (std::size_t t = 0; t < T; ++t) g_y[t] = g;
  } else {
    const std::size_t batch = x.dim(0);
    const std::size_t classes = r.outputs.dim(2);
    Tensor out_t({batch, classes});
    for (std::size_t t = 0; t < T; ++t) {
      for (std::size_t b = 0; b < batch; ++b)
        std::memcpy(out_t.row(b), r.outputs.row(b, t), classes * sizeof(double));
      result.loss += softmax_ce_batchmean(out_t, labels);
      g_y[t] = softmax_ce_grad_batchmean(out_t, labels);
    }
  }

  result.grads = bptt_backward(spec, params, r.records, g_y);
  result.outputs = std::move(r.outputs);
  result.records = std::move(r.records);
  return result;
}

}  // namespace snnkit
