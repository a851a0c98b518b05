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

#include <array>
#include <functional>
#include <string>

#include "snnkit/online.hpp"

namespace snnkit {

struct CosineResult {
  double value = 0.0;
  bool degenerate = false;  // one of the vectors had zero norm
};

CosineResult cosine_similarity(std::span<const double> a, std::span<const double> b);

struct GradReport {
  std::string estimator_a, estimator_b;
  struct BlockEntry {
    std::string label;
    double cosine = 0.0;
    bool degenerate = false;
    double norm_a = 0.0, norm_b = 0.0;
  };
  std::vector<BlockEntry> blocks;
  double global_cosine = 0.0;
  bool global_degenerate = false;
  double global_norm_a = 0.0, global_norm_b = 0.0;
  double loss_a = 0.0, loss_b = 0.0;
};

// Both estimators run from the same parameters on the same batch (online
// rules accumulate deferred); cosines per parameter block and globally.
GradReport compare_grads(const NetworkSpec& spec, const Params& params, const Tensor& x,
                         std::span<const int> labels, const LossSpec& loss,
                         const GradEstimator& est_a, const GradEstimator& est_b);

// Rescale a random direction so each weight row matches the norm of the
// corresponding parameter row (bias/tau blocks are rescaled whole). Zero
// direction rows stay zero.
void filter_normalize(Params& direction, const Params& params);

double evaluate_loss(const NetworkSpec& spec, const Params& params, const Tensor& x,
                     std::span<const int> labels, const LossSpec& loss);

struct LandscapeGrid {
  int resolution = 0;            // R (odd)
  double range = 0.0;            // coordinates span [-range, range]
  std::vector<double> loss;      // R x R, row-major over (i=x index, j=y index)
  Params center;                 // theta*
  Params delta, eta;             // filter-normalized directions
  double center_loss = 0.0;
  std::uint64_t dir_seed = 0;

  double at(int i, int j) const { return loss[static_cast<std::size_t>(i) * resolution + j]; }
};

// Loss over the lattice theta* + x_i*delta + y_j*eta. Directions are drawn
// from a spherical gaussian (dir_seed) and filter-normalized. Non-finite
// losses are recorded as +inf instead of aborting. Grid cells evaluate in
// parallel when the kernel thread count allows.
LandscapeGrid loss_landscape(const NetworkSpec& spec, const Params& params, const Tensor& x,
                             std::span<const int> labels, const LossSpec& loss, int resolution,
                             double range, std::uint64_t dir_seed);

// Same grid over caller-provided directions (PCA mode); the directions are
// used as given.
LandscapeGrid loss_landscape_with_directions(const NetworkSpec& spec, const Params& params,
                                             const Tensor& x, std::span<const int> labels,
                                             const LossSpec& loss, int resolution, double range,
                                             Params delta, Params eta, std::uint64_t dir_seed);

// Checkpoints projected into the grid's (delta, eta) frame:
// ((theta-theta*).delta/|delta|^2, (theta-theta*).eta/|eta|^2).
std::vector<std::array<double, 2>> project_trajectory(const std::vector<Params>& checkpoints,
                                                      const LandscapeGrid& grid);

// Alternative direction pair: top-2 principal components of the centered
// checkpoint differences.
std::pair<Params, Params> trajectory_pca_directions(const std::vector<Params>& checkpoints,
                                                    const Params& center);

struct MetricSummary {
  double accuracy = 0.0;
  double activation_sparsity = 0.0;  // zero fraction of all recorded spikes
  std::uint64_t neuron_updates = 0;  // LIF neurons x T x batch
  std::uint64_t synaptic_ops = 0;    // nonzero affine inputs x fan-out
};

MetricSummary metrics(const NetworkSpec& spec, const std::vector<StepRecord>& records,
                      const Tensor& outputs, std::span<const int> labels);

// Central difference of a scalar function at one coordinate.
double central_diff(const std::function<double(std::span<const double>)>& f,
                    std::span<const double> theta, std::size_t index, double h);

// Oracle gradient: central differences on the smooth-forward network (the
// spike nonlinearity swapped for its smooth primitive in every LIF layer).
std::vector<double> finite_diff_grad(const NetworkSpec& spec, const Params& params, const Tensor& x,
                                     std::span<const int> labels, const LossSpec& loss, double h);

// The same network with smooth_forward enabled everywhere.
NetworkSpec smooth_variant(const NetworkSpec& spec);

}  // namespace snnkit
