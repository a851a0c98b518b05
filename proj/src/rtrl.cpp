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

#include "snnkit/kernels.hpp"
#include "snnkit/online.hpp"

namespace snnkit {

namespace {

// Forward-mode sensitivity propagation. For every LIF layer we carry
// S = d(v_post)/d(theta) as a dense (batch x features x P) block, and for
// every layer feeding a delayed cat edge we retain last step's output
// Jacobian. Propagation follows the same chain rule the reverse sweep uses,
// so accumulated gradients are exact.
class RtrlEstimator final : public OnlineGradEstimator {
 public:
  explicit RtrlEstimator(NetworkSpec spec) : spec_(std::move(spec)) { validate_network(spec_); }

  void reset(const Params& params, std::size_t batch, std::size_t input_features) override {
    batch_ = batch;
    input_features_ = input_features;
    widths_ = layer_widths(spec_, input_features);
    total_params_ = params.total_size();
    const std::size_t n = spec_.layers.size();

    // Block offsets in the canonical flattening.
    const std::vector<BlockRange> ranges = block_ranges(params);
    w_off_.assign(n, SIZE_MAX);
    b_off_.assign(n, SIZE_MAX);
    tau_off_.assign(n, SIZE_MAX);
    for (std::size_t i = 0; i < params.blocks.size(); ++i) {
      const ParamBlock& blk = params.blocks[i];
      if (blk.kind == ParamKind::Weight) w_off_[blk.layer] = ranges[i].offset;
      if (blk.kind == ParamKind::Bias) b_off_[blk.layer] = ranges[i].offset;
      if (blk.kind == ParamKind::Tau) tau_off_[blk.layer] = ranges[i].offset;
    }

    state_ = init_net_state(spec_, input_features, batch);
    sensitivity_.assign(n, Tensor());
    for (std::size_t i = 0; i < n; ++i)
      if (spec_.layers[i].kind == LayerSpec::Kind::Lif)
        sensitivity_[i] = Tensor({batch, widths_[i], total_params_});
    delayed_jacobian_.assign(n, Tensor());
    for (const auto& [dst, sources] : spec_.cat)
      for (std::size_t s : sources)
        if (s >= dst && delayed_jacobian_[s].empty())
          delayed_jacobian_[s] = Tensor({batch, widths_[s], total_params_});
    prev_out_.assign(n, Tensor());
  }

  OnlineStepOut step(const Params& params, const Tensor& x_t,
                     std::span<const int> labels) override {
    SNNKIT_CHECK(x_t.dim(0) == batch_ && x_t.dim(1) == input_features_,
                 "RTRL trace state does not match this batch");
    SNNKIT_CHECK(params.total_size() == total_params_, "RTRL trace state does not match params");
    const std::size_t n = spec_.layers.size();
    const std::size_t P = total_params_;

    // Post-reset membranes from the previous step (tau direct terms).
    std::vector<Tensor> v_prev(n);
    for (std::size_t i = 0; i < n; ++i)
      if (spec_.layers[i].kind == LayerSpec::Kind::Lif) v_prev[i] = state_.lif[i].v;

    StepRecord rec;
    Tensor y = forward_step(spec_, params, state_, x_t, &rec);

    std::vector<Tensor> jac(n);  // this step's d(output)/d(theta) per layer
    for (std::size_t i = 0; i < n; ++i) {
      const LayerSpec& l = spec_.layers[i];
      const std::vector<InputSegment> segs = input_segments(spec_, widths_, input_features_, i);

      // d(input)/d(theta), stacked per segment. Single pass-through segments
      // reuse the producer's Jacobian; a raw network input contributes
      // nothing, so an input-only layer leaves j_in null.
      const bool zero_j_in =
          segs.size() == 1 && segs[0].origin == InputSegment::Origin::NetworkInput;
      const Tensor* j_in = nullptr;
      Tensor j_in_store;
      if (zero_j_in) {
        // nothing to propagate
      } else if (segs.size() == 1 && segs[0].origin == InputSegment::Origin::SameStep) {
        j_in = &jac[segs[0].source];
      } else {
        std::size_t in_w = 0;
        for (const InputSegment& seg : segs) in_w += seg.width;
        j_in_store = Tensor({batch_, in_w, P});
        std::size_t row0 = 0;
        for (const InputSegment& seg : segs) {
          const Tensor* src = nullptr;
          if (seg.origin == InputSegment::Origin::SameStep) src = &jac[seg.source];
          if (seg.origin == InputSegment::Origin::Delayed) src = &delayed_jacobian_[seg.source];
          if (src && !src->empty()) {
            for (std::size_t b = 0; b < batch_; ++b)
              std::memcpy(&j_in_store(b, row0, 0), src->row(b, 0), seg.width * P * sizeof(double));
          }
          row0 += seg.width;
        }
        j_in = &j_in_store;
      }

      if (l.kind == LayerSpec::Kind::Affine) {
        const Tensor& W = params.at(i, ParamKind::Weight);
        const std::size_t out_w = W.dim(0), in_w = W.dim(1);
        const Tensor in_val = gather_step_input(spec_, widths_, input_features_, rec, prev_out_, i);
        Tensor j({batch_, out_w, P});
        if (!zero_j_in)
          for (std::size_t b = 0; b < batch_; ++b)
            kernels::matmul(W.data(), j_in->row(b, 0), &j(b, 0, 0), out_w, in_w, P);
        const std::size_t w_off = w_off_[i], b_off = b_off_[i];
        for (std::size_t b = 0; b < batch_; ++b)
          for (std::size_t r = 0; r < out_w; ++r) {
            double* row = &j(b, r, 0);
            const double* iv = in_val.row(b);
            double* wrow = row + w_off + r * in_w;
            for (std::size_t c = 0; c < in_w; ++c) wrow[c] += iv[c];
            row[b_off + r] += 1.0;
          }
        jac[i] = std::move(j);
      } else {
        const std::size_t f_w = widths_[i];
        const std::vector<double> tau = lif_tau(spec_, params, i, f_w);
        const double th = l.lif.v_threshold;
        Tensor& S = sensitivity_[i];
        Tensor j({batch_, f_w, P});
        for (std::size_t b = 0; b < batch_; ++b)
          for (std::size_t f = 0; f < f_w; ++f) {
            const double lam = lif_leak(tau[f]);
            const double sg = rec.spike_grad[i](b, f);
            const double reset_factor = l.lif.detach_reset ? 1.0 : 1.0 - th * sg;
            double* s_row = &S(b, f, 0);
            const double* in_row = zero_j_in ? nullptr : j_in->row(b, f);
            double* j_row = &j(b, f, 0);
            // p = lam * S[t-1] + d(input)/d(theta) (+ tau direct term below)
            if (in_row)
              for (std::size_t p = 0; p < P; ++p) s_row[p] = lam * s_row[p] + in_row[p];
            else
              for (std::size_t p = 0; p < P; ++p) s_row[p] = lam * s_row[p];
            if (tau_off_[i] != SIZE_MAX) s_row[tau_off_[i] + f] += lam * (1.0 - lam) * v_prev[i](b, f);
            for (std::size_t p = 0; p < P; ++p) {
              j_row[p] = sg * s_row[p];
              s_row[p] *= reset_factor;
            }
          }
        jac[i] = std::move(j);
      }
    }

    for (std::size_t i = 0; i < n; ++i)
      if (!delayed_jacobian_[i].empty()) delayed_jacobian_[i] = jac[i];
    prev_out_ = rec.output;

    OnlineStepOut out;
    out.loss = softmax_ce_batchmean(y, labels);
    const Tensor g = softmax_ce_grad_batchmean(y, labels);
    out.grads.assign(P, 0.0);
    const Tensor& j_last = jac[n - 1];
    const std::size_t classes = y.dim(1);
    for (std::size_t b = 0; b < batch_; ++b)
      for (std::size_t c = 0; c < classes; ++c) {
        const double gv = g(b, c);
        if (gv == 0.0) continue;
        const double* j_row = j_last.row(b, c);
        for (std::size_t p = 0; p < P; ++p) out.grads[p] += gv * j_row[p];
      }
    out.output = std::move(y);
    return out;
  }

  std::unique_ptr<OnlineGradEstimator> clone() const override {
    return std::make_unique<RtrlEstimator>(*this);
  }

 private:
  NetworkSpec spec_;
  std::size_t batch_ = 0;
  std::size_t input_features_ = 0;
  std::size_t total_params_ = 0;
  std::vector<std::size_t> widths_;
  std::vector<std::size_t> w_off_, b_off_, tau_off_;
  NetState state_;
  std::vector<Tensor> sensitivity_;       // per LIF layer: batch x features x P
  std::vector<Tensor> delayed_jacobian_;  // per delayed cat source
  std::vector<Tensor> prev_out_;          // previous step's outputs (values)
};

}  // namespace

std::unique_ptr<OnlineGradEstimator> make_rtrl_estimator(NetworkSpec spec) {
  return std::make_unique<RtrlEstimator>(std::move(spec));
}

}  // namespace snnkit
