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

#ifdef _OPENMP
#include <omp.h>
#endif

namespace snnkit::kernels {

// Process-wide worker count for the parallel kernels. Defaults to 1 so
// results are reproducible without any configuration; raising it keeps
// results bitwise identical because every output element's accumulation
// chain is owned by exactly one thread.
int num_threads();
void set_num_threads(int n);

namespace serial {

// Reference kernels. The parallel versions below delegate to the same
// per-row bodies, so serial vs parallel results are bitwise equal; tests
// rely on that.

// c[m x n] = a[m x k] * b[k x n]
template <typename T>
inline void matmul_row(const T* a_row, const T* b, T* c_row, std::size_t k, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) c_row[j] = T{0};
  for (std::size_t l = 0; l < k; ++l) {
    const T s = a_row[l];
    const T* b_row = b + l * n;
    for (std::size_t j = 0; j < n; ++j) c_row[j] += s * b_row[j];
  }
}

template <typename T>
inline void matmul(const T* a, const T* b, T* c, std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) matmul_row(a + i * k, b, c + i * n, k, n);
}

// c[m x n] = a[m x k] * b[n x k]^T  (rows of b are dotted against rows of a)
template <typename T>
inline void matmul_nt_row(const T* a_row, const T* b, T* c_row, std::size_t k, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    const T* b_row = b + j * k;
    T acc{0};
    for (std::size_t l = 0; l < k; ++l) acc += a_row[l] * b_row[l];
    c_row[j] = acc;
  }
}

template <typename T>
inline void matmul_nt(const T* a, const T* b, T* c, std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) matmul_nt_row(a + i * k, b, c + i * n, k, n);
}

// c[m x n] = a[k x m]^T * b[k x n]
template <typename T>
inline void matmul_tn_row(const T* a, const T* b, T* c_row, std::size_t i, std::size_t m,
                          std::size_t k, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) c_row[j] = T{0};
  for (std::size_t l = 0; l < k; ++l) {
    const T s = a[l * m + i];
    const T* b_row = b + l * n;
    for (std::size_t j = 0; j < n; ++j) c_row[j] += s * b_row[j];
  }
}

template <typename T>
inline void matmul_tn(const T* a, const T* b, T* c, std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) matmul_tn_row(a, b, c + i * n, i, m, k, n);
}

}  // namespace serial

namespace detail {
inline bool use_parallel(std::size_t m, std::size_t k, std::size_t n) {
  return num_threads() > 1 && m > 1 && m * k * n >= 16384;
}
}  // namespace detail

template <typename T>
inline void matmul(const T* a, const T* b, T* c, std::size_t m, std::size_t k, std::size_t n) {
#ifdef _OPENMP
  if (detail::use_parallel(m, k, n)) {
#pragma omp parallel for schedule(static) num_threads(num_threads())
    for (long long i = 0; i < static_cast<long long>(m); ++i)
      serial::matmul_row(a + i * k, b, c + i * n, k, n);
    return;
  }
#endif
  serial::matmul(a, b, c, m, k, n);
}

template <typename T>
inline void matmul_nt(const T* a, const T* b, T* c, std::size_t m, std::size_t k, std::size_t n) {
#ifdef _OPENMP
  if (detail::use_parallel(m, k, n)) {
#pragma omp parallel for schedule(static) num_threads(num_threads())
    for (long long i = 0; i < static_cast<long long>(m); ++i)
      serial::matmul_nt_row(a + i * k, b, c + i * n, k, n);
    return;
  }
#endif
  serial::matmul_nt(a, b, c, m, k, n);
}

template <typename T>
inline void matmul_tn(const T* a, const T* b, T* c, std::size_t m, std::size_t k, std::size_t n) {
#ifdef _OPENMP
  if (detail::use_parallel(m, k, n)) {
#pragma omp parallel for schedule(static) num_threads(num_threads())
    for (long long i = 0; i < static_cast<long long>(m); ++i)
      serial::matmul_tn_row(a, b, c + i * n, i, m, k, n);
    return;
  }
#endif
  serial::matmul_tn(a, b, c, m, k, n);
}

}  // namespace snnkit::kernels
