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

#include <cstddef>
#include <span>
#include <vector>

#include "snnkit/check.hpp"

namespace snnkit {

// Dense row-major double tensor. Deliberately small: shape bookkeeping plus
// the handful of accessors the rest of the toolkit needs; heavy lifting goes
// through the kernels header.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> shape) : shape_(std::move(shape)) {
    std::size_t n = 1;
    for (std::size_t d : shape_) n *= d;
    data_.assign(n, 0.0);
  }

  static Tensor zeros(std::vector<std::size_t> shape) { return Tensor(std::move(shape)); }

  static Tensor full(std::vector<std::size_t> shape, double value) {
    Tensor t(std::move(shape));
    for (double& v : t.data_) v = value;
    return t;
  }

  static Tensor from_values(std::vector<std::size_t> shape, std::vector<double> values) {
    Tensor t;
    t.shape_ = std::move(shape);
    std::size_t n = 1;
    for (std::size_t d : t.shape_) n *= d;
    SNNKIT_CHECK(n == values.size(), "tensor literal size does not match its shape");
    t.data_ = std::move(values);
    return t;
  }

  std::size_t ndim() const { return shape_.size(); }
  std::size_t dim(std::size_t axis) const { return shape_[axis]; }
  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }
  bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::span<double> flat() { return data_; }
  std::span<const double> flat() const { return data_; }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * shape_[1] + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * shape_[1] + j]; }

  double& operator()(std::size_t i, std::size_t j, std::size_t k) {
    return data_[(i * shape_[1] + j) * shape_[2] + k];
  }
  double operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return data_[(i * shape_[1] + j) * shape_[2] + k];
  }

  // Pointer to row i of a 2-d tensor.
  double* row(std::size_t i) { return data_.data() + i * shape_[1]; }
  const double* row(std::size_t i) const { return data_.data() + i * shape_[1]; }

  // Pointer to the (i, j, :) slice of a 3-d tensor.
  double* row(std::size_t i, std::size_t j) { return data_.data() + (i * shape_[1] + j) * shape_[2]; }
  const double* row(std::size_t i, std::size_t j) const {
    return data_.data() + (i * shape_[1] + j) * shape_[2];
  }

  bool operator==(const Tensor& o) const { return shape_ == o.shape_ && data_ == o.data_; }

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

bool all_finite(const Tensor& t);
std::size_t count_nonzero(const Tensor& t);

// y = x * W^T + b  with x (batch x in), W (out x in), b (out).
Tensor affine_forward(const Tensor& x, const Tensor& W, const Tensor& b);

// Horizontal concatenation of 2-d tensors sharing dim 0.
Tensor hconcat(const std::vector<const Tensor*>& parts);

}  // namespace snnkit
