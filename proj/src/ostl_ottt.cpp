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

#include <cmath>

#include "snnkit/online.hpp"

namespace snnkit {

namespace {

// Shared scaffolding for the two layer-local rules: the network is a chain
// of (affine, LIF) blocks, the learning signal for a block is the step
// loss backpropagated spatially through the downstream blocks with their
// membrane states held constant.
class BlockChainEstimator : public OnlineGradEstimator {
 public:
  explicit BlockChainEstimator(NetworkSpec spec) : spec_(std::move(spec)) {
    validate_network(spec_);
    validate_block_chain(spec_);
    n_blocks_ = spec_.layers.size() / 2;
  }

  void reset(const Params& params, std::size_t batch, std::size_t input_features) override {
    batch_ = batch;
    input_features_ = input_features;
    widths_ = layer_widths(spec_, input_features);
    ranges_ = block_ranges(params);
    total_params_ = params.total_size();
    state_ = init_net_state(spec_, input_features, batch);
    prev_out_.assign(spec_.layers.size(), Tensor());
    reset_traces(params);
  }

  OnlineStepOut step(const Params& params, const Tensor& x_t,
                     std::span<const int> labels) override {
    SNNKIT_CHECK(x_t.dim(0) == batch_ && x_t.dim(1) == input_features_,
                 "trace state does not match this batch");
    SNNKIT_CHECK(params.total_size() == total_params_, "trace state does not match params");

    std::vector<Tensor> v_prev(spec_.layers.size());
    for (std::size_t i = 1; i < spec_.layers.size(); i += 2) v_prev[i] = state_.lif[i].v;

    StepRecord rec;
    Tensor y = forward_step(spec_, params, state_, x_t, &rec);

    OnlineStepOut out;
    out.loss = softmax_ce_batchmean(y, labels);
    out.grads.assign(total_params_, 0.0);

    // Learning signals: dL_t/d(spikes of block k), instantaneous spatial
    // backprop with downstream membranes treated as constants.
    std::vector<Tensor> signal(n_blocks_);
    signal[n_blocks_ - 1] = softmax_ce_grad_batchmean(y, labels);
    for (std::size_t k = n_blocks_ - 1; k > 0; --k) {
      const std::size_t lif = 2 * k + 1;
      const Tensor& W = params.at(2 * k, ParamKind::Weight);
      const std::size_t out_w = widths_[lif];
      const std::size_t seq_w = widths_[2 * k - 1];
      Tensor prev({batch_, seq_w});
      for (std::size_t b = 0; b < batch_; ++b)
        for (std::size_t i = 0; i < out_w; ++i) {
          const double v = signal[k](b, i) * rec.spike_grad[lif](b, i);
          if (v == 0.0) continue;
          for (std::size_t j = 0; j < seq_w; ++j) prev(b, j) += v * W(i, j);
        }
      signal[k - 1] = std::move(prev);
    }

    for (std::size_t k = 0; k < n_blocks_; ++k)
      accumulate_block(params, rec, v_prev, k, signal[k], out.grads);

    prev_out_ = rec.output;
    out.output = std::move(y);
    return out;
  }

 protected:
  virtual void reset_traces(const Params& params) = 0;
  // Advance block k's traces through this step and add its gradient
  // contribution (learning signal already includes the 1/batch factor).
  virtual void accumulate_block(const Params& params, const StepRecord& rec,
                                const std::vector<Tensor>& v_prev, std::size_t k,
                                const Tensor& signal, std::vector<double>& grads) = 0;

  BlockRange range_of(const Params& params, std::size_t layer, ParamKind kind) const {
    const int idx = params.find(layer, kind);
    SNNKIT_CHECK(idx >= 0, "missing parameter block");
    return ranges_[static_cast<std::size_t>(idx)];
  }

  NetworkSpec spec_;
  std::size_t n_blocks_ = 0;
  std::size_t batch_ = 0;
  std::size_t input_features_ = 0;
  std::size_t total_params_ = 0;
  std::vector<std::size_t> widths_;
  std::vector<BlockRange> ranges_;
  NetState state_;
  std::vector<Tensor> prev_out_;
};

// Membrane eligibility per block, compressed: the (out x out*in) weight
// Jacobian block is stored as (out x in) because d(v_i)/d(W_jk) vanishes for
// j != i. The recursion is
//   A[t] = lam * E[t-1] + D[t],  eps[t] = sg[t] * A[t],
//   E[t] = (1 - v_th * sg[t]) * A[t]   (factor 1 under detach_reset)
// with D[t] the direct input Jacobian (activations for W, ones for b,
// lam*(1-lam)*v[t-1] for tau).
class OstlEstimator final : public BlockChainEstimator {
 public:
  using BlockChainEstimator::BlockChainEstimator;

  std::unique_ptr<OnlineGradEstimator> clone() const override {
    return std::make_unique<OstlEstimator>(*this);
  }

 protected:
  void reset_traces(const Params& params) override {
    e_weight_.assign(n_blocks_, Tensor());
    e_bias_.assign(n_blocks_, Tensor());
    e_tau_.assign(n_blocks_, Tensor());
    for (std::size_t k = 0; k < n_blocks_; ++k) {
      const Tensor& W = params.at(2 * k, ParamKind::Weight);
      e_weight_[k] = Tensor({batch_, W.dim(0), W.dim(1)});
      e_bias_[k] = Tensor({batch_, W.dim(0)});
      if (spec_.layers[2 * k + 1].lif.trainable_tau) e_tau_[k] = Tensor({batch_, W.dim(0)});
    }
  }

  void accumulate_block(const Params& params, const StepRecord& rec,
                        const std::vector<Tensor>& v_prev, std::size_t k, const Tensor& signal,
                        std::vector<double>& grads) override {
    const std::size_t affine = 2 * k, lif = 2 * k + 1;
    const LifConfig& cfg = spec_.layers[lif].lif;
    const double th = cfg.v_threshold;
    const std::size_t out_w = widths_[lif];
    const Tensor in_val = gather_step_input(spec_, widths_, input_features_, rec, prev_out_, affine);
    const std::size_t in_w = in_val.dim(1);
    const std::vector<double> tau = lif_tau(spec_, params, lif, out_w);

    const BlockRange wr = range_of(params, affine, ParamKind::Weight);
    const BlockRange br = range_of(params, affine, ParamKind::Bias);

    for (std::size_t b = 0; b < batch_; ++b) {
      const double* iv = in_val.row(b);
      for (std::size_t i = 0; i < out_w; ++i) {
        const double lam = lif_leak(tau[i]);
        const double sg = rec.spike_grad[lif](b, i);
        const double factor = cfg.detach_reset ? 1.0 : 1.0 - th * sg;
        const double sig = signal(b, i);
        const double c = sig * sg;

        double* ew = &e_weight_[k](b, i, 0);
        double* gw = grads.data() + wr.offset + i * in_w;
        for (std::size_t j = 0; j < in_w; ++j) {
          const double a = lam * ew[j] + iv[j];
          gw[j] += c * a;
          ew[j] = factor * a;
        }

        const double ab = lam * e_bias_[k](b, i) + 1.0;
        grads[br.offset + i] += c * ab;
        e_bias_[k](b, i) = factor * ab;

        if (!e_tau_[k].empty()) {
          const BlockRange tr = range_of(params, lif, ParamKind::Tau);
          const double at = lam * e_tau_[k](b, i) + lam * (1.0 - lam) * v_prev[lif](b, i);
          grads[tr.offset + i] += c * at;
          e_tau_[k](b, i) = factor * at;
        }
      }
    }
  }

 private:
  std::vector<Tensor> e_weight_;
  std::vector<Tensor> e_bias_;
  std::vector<Tensor> e_tau_;
};

// Presynaptic input traces: a_hat[t] = leak * a_hat[t-1] + a_in[t], with the
// weight update (signal * sg) outer a_hat. tau is not trained by this rule.
class OtttEstimator final : public BlockChainEstimator {
 public:
  OtttEstimator(NetworkSpec spec, bool neuron_leak, double fixed_leak)
      : BlockChainEstimator(std::move(spec)), neuron_leak_(neuron_leak), fixed_leak_(fixed_leak) {}

  std::unique_ptr<OnlineGradEstimator> clone() const override {
    return std::make_unique<OtttEstimator>(*this);
  }

 protected:
  void reset_traces(const Params& params) override {
    trace_.assign(n_blocks_, Tensor());
    ones_trace_.assign(n_blocks_, 0.0);
    for (std::size_t k = 0; k < n_blocks_; ++k) {
      const Tensor& W = params.at(2 * k, ParamKind::Weight);
      trace_[k] = Tensor({batch_, W.dim(1)});
    }
  }

  void accumulate_block(const Params& params, const StepRecord& rec,
                        const std::vector<Tensor>& /*v_prev*/, std::size_t k,
                        const Tensor& signal, std::vector<double>& grads) override {
    const std::size_t affine = 2 * k, lif = 2 * k + 1;
    const std::size_t out_w = widths_[lif];
    const Tensor in_val = gather_step_input(spec_, widths_, input_features_, rec, prev_out_, affine);
    const std::size_t in_w = in_val.dim(1);

    double leak = fixed_leak_;
    if (neuron_leak_) {
      const std::vector<double> tau = lif_tau(spec_, params, lif, out_w);
      for (std::size_t i = 1; i < tau.size(); ++i)
        SNNKIT_CHECK(tau[i] == tau[0],
                     "OTTT with the neuron trace leak needs one tau per block; use a fixed leak "
                     "for heterogeneous tau");
      leak = lif_leak(tau[0]);
    }

    for (std::size_t b = 0; b < batch_; ++b) {
      double* tr = trace_[k].row(b);
      const double* iv = in_val.row(b);
      for (std::size_t j = 0; j < in_w; ++j) tr[j] = leak * tr[j] + iv[j];
    }
    ones_trace_[k] = leak * ones_trace_[k] + 1.0;

    const BlockRange wr = range_of(params, affine, ParamKind::Weight);
    const BlockRange br = range_of(params, affine, ParamKind::Bias);
    for (std::size_t b = 0; b < batch_; ++b) {
      const double* tr = trace_[k].row(b);
      for (std::size_t i = 0; i < out_w; ++i) {
        const double c = signal(b, i) * rec.spike_grad[lif](b, i);
        if (c == 0.0) continue;
        double* gw = grads.data() + wr.offset + i * in_w;
        for (std::size_t j = 0; j < in_w; ++j) gw[j] += c * tr[j];
        grads[br.offset + i] += c * ones_trace_[k];
      }
    }
  }

 private:
  bool neuron_leak_ = true;
  double fixed_leak_ = 0.9;
  std::vector<Tensor> trace_;
  std::vector<double> ones_trace_;
};

}  // namespace

std::unique_ptr<OnlineGradEstimator> make_ostl_estimator(NetworkSpec spec) {
  return std::make_unique<OstlEstimator>(std::move(spec));
}

std::unique_ptr<OnlineGradEstimator> make_ottt_estimator(NetworkSpec spec, bool neuron_leak,
                                                         double fixed_leak) {
  return std::make_unique<OtttEstimator>(std::move(spec), neuron_leak, fixed_leak);
}

}  // namespace snnkit
