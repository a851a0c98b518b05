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

// Serial reference kernels vs the OpenMP versions, f32 and f64. The parallel
// kernels are bitwise equal to the serial ones by construction; this target
// measures what the extra threads buy.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <vector>

#include "snnkit/kernels.hpp"
#include "snnkit/rng.hpp"

namespace {

using snnkit::Rng;

template <typename T>
double time_matmul(bool parallel, std::size_t n, int repeats) {
  Rng rng(42);
  std::vector<T> a(n * n), b(n * n), c(n * n);
  for (T& v : a) v = static_cast<T>(rng.next_uniform(-1.0, 1.0));
  for (T& v : b) v = static_cast<T>(rng.next_uniform(-1.0, 1.0));

  // warm-up
  if (parallel)
    snnkit::kernels::matmul(a.data(), b.data(), c.data(), n, n, n);
  else
    snnkit::kernels::serial::matmul(a.data(), b.data(), c.data(), n, n, n);

  const auto start = std::chrono::steady_clock::now();
  for (int r = 0; r < repeats; ++r) {
    if (parallel)
      snnkit::kernels::matmul(a.data(), b.data(), c.data(), n, n, n);
    else
      snnkit::kernels::serial::matmul(a.data(), b.data(), c.data(), n, n, n);
  }
  const double dt =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() / repeats;
  return dt;
}

template <typename T>
bool check_bitwise(std::size_t n) {
  Rng rng(7);
  std::vector<T> a(n * n), b(n * n), c_serial(n * n), c_parallel(n * n);
  for (T& v : a) v = static_cast<T>(rng.next_uniform(-1.0, 1.0));
  for (T& v : b) v = static_cast<T>(rng.next_uniform(-1.0, 1.0));
  snnkit::kernels::serial::matmul(a.data(), b.data(), c_serial.data(), n, n, n);
  snnkit::kernels::matmul(a.data(), b.data(), c_parallel.data(), n, n, n);
  return std::memcmp(c_serial.data(), c_parallel.data(), n * n * sizeof(T)) == 0;
}

template <typename T>
void run(const char* label, int threads) {
  std::printf("%s, %d thread(s):\n", label, threads);
  for (std::size_t n : {128, 256, 512}) {
    const int repeats = n <= 128 ? 50 : n <= 256 ? 12 : 3;
    const double serial = time_matmul<T>(false, n, repeats);
    const double parallel = time_matmul<T>(true, n, repeats);
    const double flops = 2.0 * static_cast<double>(n) * n * n;
    std::printf("  n=%4zu  serial %8.3f ms (%6.2f GF/s)  parallel %8.3f ms (%6.2f GF/s)  "
                "speedup %.2fx  bitwise %s\n",
                n, serial * 1e3, flops / serial * 1e-9, parallel * 1e3, flops / parallel * 1e-9,
                serial / parallel, check_bitwise<T>(n) ? "ok" : "MISMATCH");
  }
}

}  // namespace

int main(int argc, char** argv) {
  int threads = 0;
  if (argc > 1) threads = std::atoi(argv[1]);
  if (threads < 1) {
    const char* env = std::getenv("SNNKIT_THREADS");
    threads = env ? std::atoi(env) : 2;
    if (threads < 1) threads = 2;
  }
  snnkit::kernels::set_num_threads(threads);
  run<double>("f64 matmul", threads);
  run<float>("f32 matmul", threads);
  return 0;
}
