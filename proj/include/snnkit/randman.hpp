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
#include <vector>

#include "snnkit/rng.hpp"
#include "snnkit/tensor.hpp"

namespace snnkit {

enum class RandmanEncoding { Time, Rate };

// Synthetic spike classification task: per class, points on a random smooth
// manifold are projected into [0,1]^units and turned into spike trains.
// Time encoding places one spike per neuron at the value's timestep;
// rate encoding converts the value to a spike count at shuffled times.
struct RandmanConfig {
  int classes = 10;
  int units = 20;           // embedding dimension = neuron count
  int intrinsic_dim = 1;    // manifold dimension
  double alpha = 2.0;       // smoothness (amplitude decay k^-alpha)
  int cutoff = 5;           // number of frequencies
  int timesteps = 50;
  int samples_per_class = 100;
  RandmanEncoding encoding = RandmanEncoding::Time;
  double p_max = 0.5;       // rate encoding: max spike probability per step
  std::uint64_t manifold_seed = 0;
  std::uint64_t sample_seed = 0;
};

void validate(const RandmanConfig& config);

// Fourier coefficients per (class, unit, intrinsic dim, frequency); fully
// determined by manifold_seed.
struct ManifoldParams {
  int classes = 0, units = 0, intrinsic_dim = 0, cutoff = 0;
  double alpha = 0.0;
  std::vector<double> amplitude;  // [c][m][j][k]
  std::vector<double> phase;      // [c][m][j][k]

  double amp(int c, int m, int j, int k) const {
    return amplitude[((static_cast<std::size_t>(c) * units + m) * intrinsic_dim + j) * cutoff + k];
  }
  double phi(int c, int m, int j, int k) const {
    return phase[((static_cast<std::size_t>(c) * units + m) * intrinsic_dim + j) * cutoff + k];
  }
};

ManifoldParams make_manifold(const RandmanConfig& config);

// f_m(z) = prod_j sum_k a_mjk * k^-alpha * sin(2 pi (k z_j + phi_mjk)),
// k = 1..cutoff, for every unit m.
std::vector<double> manifold_eval(const ManifoldParams& params, int c, std::span<const double> z);

struct SpikeRaster {
  Tensor data;             // batch x T x units, entries in {0,1}
  std::vector<int> labels; // class index per sample
};

struct RandmanDataset {
  RandmanConfig config;
  SpikeRaster raster;
  // Min-max normalization of the generated set, kept so later splits can be
  // normalized consistently.
  std::vector<double> norm_min, norm_max;
};

RandmanDataset generate(const RandmanConfig& config);

// Additional split (e.g. a test set from a different sample_seed) normalized
// with a previously generated set's stored min/max, so both splits share one
// value scale. Out-of-range values clamp to [0, 1].
RandmanDataset generate_normalized(const RandmanConfig& config, std::span<const double> norm_min,
                                   std::span<const double> norm_max);

// One spike per neuron at round(value * (T-1)); rounding half away from zero.
Tensor time_encode(std::span<const double> values, int timesteps);

// round(value * p_max * T) spikes at distinct uniform steps.
Tensor rate_encode(std::span<const double> values, int timesteps, double p_max, Rng& rng);

}  // namespace snnkit
