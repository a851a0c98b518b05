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

#include "snnkit/tensor.hpp"

#include <cmath>
#include <cstring>

#include "snnkit/kernels.hpp"

namespace snnkit {

bool all_finite(const Tensor& t) {
  for (double v : t.flat())
    if (!std::isfinite(v)) return false;
  return true;
}

std::size_t count_nonzero(const Tensor& t) {
  std::size_t n = 0;
  for (double v : t.flat())
    if (v != 0.0) ++n;
  return n;
}

Tensor affine_forward(const Tensor& x, const Tensor& W, const Tensor& b) {
  SNNKIT_CHECK(x.ndim() == 2 && W.ndim() == 2 && b.ndim() == 1, "affine_forward expects x(B,in), W(out,in), b(out)");
  const std::size_t batch = x.dim(0), in = x.dim(1), out = W.dim(0);
  SNNKIT_CHECK(W.dim(1) == in && b.dim(0) == out, "affine_forward shape mismatch");
  Tensor y({batch, out});
  kernels::matmul_nt(x.data(), W.data(), y.data(), batch, in, out);
  for (std::size_t i = 0; i < batch; ++i) {
    double* yr = y.row(i);
    for (std::size_t j = 0; j < out; ++j) yr[j] += b[j];
  }
  return y;
}

Tensor hconcat(const std::vector<const Tensor*>& parts) {
  SNNKIT_CHECK(!parts.empty(), "hconcat of nothing");
  const std::size_t batch = parts[0]->dim(0);
  std::size_t width = 0;
  for (const Tensor* p : parts) {
    SNNKIT_CHECK(p->ndim() == 2 && p->dim(0) == batch, "hconcat parts must share dim 0");
    width += p->dim(1);
  }
  Tensor out({batch, width});
  for (std::size_t i = 0; i < batch; ++i) {
    double* dst = out.row(i);
    for (const Tensor* p : parts) {
      std::memcpy(dst, p->row(i), p->dim(1) * sizeof(double));
      dst += p->dim(1);
    }
  }
  return out;
}

}  // namespace snnkit
