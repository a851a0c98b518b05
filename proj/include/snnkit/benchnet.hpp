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

#include <cmath>
#include <cstdint>
#include <vector>

#include "snnkit/kernels.hpp"
#include "snnkit/rng.hpp"

namespace snnkit {

// Self-contained feed-forward (affine, LIF) stack with offline BPTT, written
// once over the scalar type so the speed benchmark can run in 32-bit as well
// as 64-bit. Deliberately mirrors the library's update equations; a test pins
// the double instantiation against bptt_grad.
template <typename Real>
class BenchNet {
 public:
  BenchNet(std::size_t layers, std::size_t width, std::size_t batch, std::size_t timesteps,
           std::uint64_t seed)
      : n_layers_(layers), width_(width), batch_(batch), T_(timesteps) {
    Rng root(seed);
    weights_.resize(layers);
    biases_.assign(layers, std::vector<Real>(width, Real{0}));
    const double bound = std::sqrt(1.0 / static_cast<double>(width));
    for (std::size_t l = 0; l < layers; ++l) {
      Rng r = root.child(l);
      weights_[l].resize(width * width);
      for (Real& w : weights_[l]) w = static_cast<Real>(r.next_uniform(-bound, bound));
    }
    Rng data = root.child(1000);
    input_.resize(batch * T_ * width);
    for (Real& v : input_) v = data.next_double() < 0.2 ? Real{1} : Real{0};
    labels_.resize(batch);
    for (std::size_t b = 0; b < batch; ++b) labels_[b] = data.next_below(width);

    spikes_.assign(layers, std::vector<Real>(T_ * batch * width));
    spike_grad_.assign(layers, std::vector<Real>(T_ * batch * width));
    grads_w_.resize(layers);
    grads_b_.resize(layers);
  }

  // One combined forward + backward pass; returns the loss.
  double run() {
    const Real lam = static_cast<Real>(1.0 / (1.0 + std::exp(-2.0)));  // logistic(tau_init = 2)
    const Real th = Real{1};
    const Real slope = Real{25};

    std::vector<std::vector<Real>> membrane(n_layers_,
                                            std::vector<Real>(batch_ * width_, Real{0}));
    std::vector<Real> current(batch_ * width_);
    std::vector<Real> acc(batch_ * width_, Real{0});

    for (std::size_t t = 0; t < T_; ++t) {
      const Real* a = input_.data() + t * batch_ * width_;  // (batch, width) slice, batch-major
      for (std::size_t l = 0; l < n_layers_; ++l) {
        kernels::matmul_nt(a, weights_[l].data(), current.data(), batch_, width_, width_);
        Real* v = membrane[l].data();
        Real* s = spikes_[l].data() + t * batch_ * width_;
        Real* sg = spike_grad_[l].data() + t * batch_ * width_;
        const Real* bias = biases_[l].data();
        for (std::size_t i = 0; i < batch_ * width_; ++i) {
          const Real v_pre = lam * v[i] + current[i] + bias[i % width_];
          const Real u = v_pre - th;
          const Real fire = u >= Real{0} ? Real{1} : Real{0};
          const Real d = slope * std::fabs(u) + Real{1};
          s[i] = fire;
          sg[i] = Real{1} / (d * d);
          v[i] = v_pre - fire * th;
        }
        a = s;
      }
      const Real* y = spikes_[n_layers_ - 1].data() + t * batch_ * width_;
      for (std::size_t i = 0; i < batch_ * width_; ++i) acc[i] += y[i];
    }

    // Softmax cross entropy on accumulated spikes.
    std::vector<Real> g_acc(batch_ * width_);
    double loss = 0.0;
    for (std::size_t b = 0; b < batch_; ++b) {
      const Real* z = acc.data() + b * width_;
      Real m = z[0];
      for (std::size_t c = 1; c < width_; ++c) m = std::max(m, z[c]);
      Real sum{0};
      for (std::size_t c = 0; c < width_; ++c) sum += std::exp(z[c] - m);
      loss += static_cast<double>(m + std::log(sum) - z[labels_[b]]);
      Real* g = g_acc.data() + b * width_;
      const Real inv_batch = Real{1} / static_cast<Real>(batch_);
      for (std::size_t c = 0; c < width_; ++c) g[c] = std::exp(z[c] - m) / sum * inv_batch;
      g[labels_[b]] -= inv_batch;
    }
    loss /= static_cast<double>(batch_);

    // Reverse sweep.
    for (std::size_t l = 0; l < n_layers_; ++l) {
      grads_w_[l].assign(width_ * width_, Real{0});
      grads_b_[l].assign(width_, Real{0});
    }
    std::vector<std::vector<Real>> g_post(n_layers_, std::vector<Real>(batch_ * width_, Real{0}));
    std::vector<Real> g_s(batch_ * width_), g_cur(batch_ * width_), dW(width_ * width_);
    for (std::size_t tp = T_; tp-- > 0;) {
      std::vector<Real>* g_next = nullptr;  // adjoint of the next layer's input current
      for (std::size_t lp = n_layers_; lp-- > 0;) {
        if (lp == n_layers_ - 1) {
          std::copy(g_acc.begin(), g_acc.end(), g_s.begin());
        } else {
          kernels::matmul(g_next->data(), weights_[lp + 1].data(), g_s.data(), batch_, width_,
                          width_);
        }
        const Real* sg = spike_grad_[lp].data() + tp * batch_ * width_;
        Real* gp = g_post[lp].data();
        for (std::size_t i = 0; i < batch_ * width_; ++i) {
          const Real g_vpre = g_s[i] * sg[i] + gp[i] * (Real{1} - th * sg[i]);
          g_cur[i] = g_vpre;
          gp[i] = lam * g_vpre;
        }
        const Real* a_in = lp == 0 ? input_.data() + tp * batch_ * width_
                                   : spikes_[lp - 1].data() + tp * batch_ * width_;
        kernels::matmul_tn(g_cur.data(), a_in, dW.data(), width_, batch_, width_);
        for (std::size_t i = 0; i < width_ * width_; ++i) grads_w_[lp][i] += dW[i];
        for (std::size_t b = 0; b < batch_; ++b)
          for (std::size_t c = 0; c < width_; ++c) grads_b_[lp][c] += g_cur[b * width_ + c];
        backward_scratch_ = g_cur;
        g_next = &backward_scratch_;
      }
    }
    return loss;
  }

  double grad_checksum() const {
    double sum = 0.0;
    for (const auto& g : grads_w_)
      for (Real v : g) sum += static_cast<double>(v);
    return sum;
  }

  const std::vector<Real>& weight_grad(std::size_t layer) const { return grads_w_[layer]; }
  const std::vector<Real>& bias_grad(std::size_t layer) const { return grads_b_[layer]; }
  const std::vector<Real>& input() const { return input_; }
  const std::vector<Real>& weights(std::size_t layer) const { return weights_[layer]; }
  const std::vector<std::uint64_t>& labels() const { return labels_; }

 private:
  std::size_t n_layers_, width_, batch_, T_;
  std::vector<std::vector<Real>> weights_, biases_;
  std::vector<Real> input_;  // (T, batch, width)
  std::vector<std::uint64_t> labels_;
  std::vector<std::vector<Real>> spikes_, spike_grad_;  // per layer: (T, batch, width)
  std::vector<std::vector<Real>> grads_w_, grads_b_;
  std::vector<Real> backward_scratch_;
};

}  // namespace snnkit
