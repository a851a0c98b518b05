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

#include "snnkit/analysis.hpp"

#include <cmath>
#include <cstring>
#include <limits>

#include "snnkit/kernels.hpp"
#include "snnkit/rng.hpp"

namespace snnkit {

namespace {

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

CosineResult cosine_similarity(std::span<const double> a, std::span<const double> b) {
  SNNKIT_CHECK(a.size() == b.size(), "cosine_similarity: length mismatch");
  const double na = norm(a), nb = norm(b);
  if (na == 0.0 || nb == 0.0) return {0.0, true};
  return {dot(a, b) / (na * nb), false};
}

GradReport compare_grads(const NetworkSpec& spec, const Params& params, const Tensor& x,
                         std::span<const int> labels, const LossSpec& loss,
                         const GradEstimator& est_a, const GradEstimator& est_b) {
  const GradientResult ga = compute_gradients(spec, params, x, labels, loss, est_a);
  const GradientResult gb = compute_gradients(spec, params, x, labels, loss, est_b);

  GradReport report;
  report.estimator_a = estimator_name(est_a);
  report.estimator_b = estimator_name(est_b);
  report.loss_a = ga.loss;
  report.loss_b = gb.loss;

  const std::vector<BlockRange> ranges = block_ranges(params);
  for (std::size_t i = 0; i < params.blocks.size(); ++i) {
    const std::span<const double> sa(ga.flat.data() + ranges[i].offset, ranges[i].size);
    const std::span<const double> sb(gb.flat.data() + ranges[i].offset, ranges[i].size);
    const CosineResult c = cosine_similarity(sa, sb);
    report.blocks.push_back(
        {block_label(params.blocks[i]), c.value, c.degenerate, norm(sa), norm(sb)});
  }
  const CosineResult g = cosine_similarity(ga.flat, gb.flat);
  report.global_cosine = g.value;
  report.global_degenerate = g.degenerate;
  report.global_norm_a = norm(ga.flat);
  report.global_norm_b = norm(gb.flat);
  return report;
}

void filter_normalize(Params& direction, const Params& params) {
  SNNKIT_CHECK(direction.blocks.size() == params.blocks.size(),
               "filter_normalize: direction does not match the parameters");
  for (std::size_t i = 0; i < direction.blocks.size(); ++i) {
    Tensor& d = direction.blocks[i].value;
    const Tensor& p = params.blocks[i].value;
    SNNKIT_CHECK(d.same_shape(p), "filter_normalize: block shape mismatch");
    if (direction.blocks[i].kind == ParamKind::Weight) {
      const std::size_t rows = d.dim(0), cols = d.dim(1);
      for (std::size_t r = 0; r < rows; ++r) {
        const double dn = norm(std::span<const double>(d.row(r), cols));
        if (dn == 0.0) continue;
        const double pn = norm(std::span<const double>(p.row(r), cols));
        const double scale = pn / dn;
        double* dr = d.row(r);
        for (std::size_t c = 0; c < cols; ++c) dr[c] *= scale;
      }
    } else {
      const double dn = norm(d.flat());
      if (dn == 0.0) continue;
      const double scale = norm(p.flat()) / dn;
      for (double& v : d.flat()) v *= scale;
    }
  }
}

double evaluate_loss(const NetworkSpec& spec, const Params& params, const Tensor& x,
                     std::span<const int> labels, const LossSpec& loss) {
  const Tensor outputs = rollout_outputs(spec, params, x);
  if (loss.mode == LossMode::Offline) return loss_offline(outputs, labels);
  const std::size_t batch = outputs.dim(0), T = outputs.dim(1), classes = outputs.dim(2);
  double total = 0.0;
  Tensor out_t({batch, classes});
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t b = 0; b < batch; ++b)
      std::memcpy(out_t.row(b), outputs.row(b, t), classes * sizeof(double));
    total += loss_online_step(out_t, labels);
  }
  return total;
}

namespace {

LandscapeGrid fill_landscape(const NetworkSpec& spec, const Params& params, const Tensor& x,
                             std::span<const int> labels, const LossSpec& loss, int resolution,
                             double range, Params delta, Params eta, std::uint64_t dir_seed);

}  // namespace

LandscapeGrid loss_landscape(const NetworkSpec& spec, const Params& params, const Tensor& x,
                             std::span<const int> labels, const LossSpec& loss, int resolution,
                             double range, std::uint64_t dir_seed) {
  const Rng root(dir_seed);
  Params delta = zeros_like(params);
  Params eta = zeros_like(params);
  Rng r0 = root.child(0), r1 = root.child(1);
  for (ParamBlock& b : delta.blocks)
    for (double& v : b.value.flat()) v = r0.next_gaussian();
  for (ParamBlock& b : eta.blocks)
    for (double& v : b.value.flat()) v = r1.next_gaussian();
  filter_normalize(delta, params);
  filter_normalize(eta, params);
  return fill_landscape(spec, params, x, labels, loss, resolution, range, std::move(delta),
                        std::move(eta), dir_seed);
}

LandscapeGrid loss_landscape_with_directions(const NetworkSpec& spec, const Params& params,
                                             const Tensor& x, std::span<const int> labels,
                                             const LossSpec& loss, int resolution, double range,
                                             Params delta, Params eta, std::uint64_t dir_seed) {
  return fill_landscape(spec, params, x, labels, loss, resolution, range, std::move(delta),
                        std::move(eta), dir_seed);
}

namespace {

LandscapeGrid fill_landscape(const NetworkSpec& spec, const Params& params, const Tensor& x,
                             std::span<const int> labels, const LossSpec& loss, int resolution,
                             double range, Params delta, Params eta, std::uint64_t dir_seed) {
  SNNKIT_CHECK(resolution >= 1 && resolution % 2 == 1, "landscape resolution must be odd");
  SNNKIT_CHECK(range > 0.0, "landscape range must be positive");

  LandscapeGrid grid;
  grid.resolution = resolution;
  grid.range = range;
  grid.center = params;
  grid.dir_seed = dir_seed;
  grid.delta = std::move(delta);
  grid.eta = std::move(eta);

  const std::vector<double> theta = params.flatten();
  const std::vector<double> d = grid.delta.flatten();
  const std::vector<double> e = grid.eta.flatten();
  const int R = resolution;
  grid.loss.assign(static_cast<std::size_t>(R) * R, 0.0);

  const auto cell_loss = [&](int i, int j) {
    const double cx = -range + 2.0 * range * (static_cast<double>(i) / (R - 1));
    const double cy = -range + 2.0 * range * (static_cast<double>(j) / (R - 1));
    Params p = params;
    if (cx != 0.0 || cy != 0.0) {
      std::vector<double> t(theta.size());
      for (std::size_t n = 0; n < t.size(); ++n) t[n] = theta[n] + cx * d[n] + cy * e[n];
      p.load_flat(t);
    }
    try {
      const double v = evaluate_loss(spec, p, x, labels, loss);
      return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    } catch (const NumericError&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  if (R == 1) {
    grid.loss[0] = cell_loss(0, 0);
  } else {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(kernels::num_threads()) collapse(2)
#endif
    for (int i = 0; i < R; ++i)
      for (int j = 0; j < R; ++j)
        grid.loss[static_cast<std::size_t>(i) * R + j] = cell_loss(i, j);
  }
  grid.center_loss = grid.at((R - 1) / 2, (R - 1) / 2);
  return grid;
}

}  // namespace

std::vector<std::array<double, 2>> project_trajectory(const std::vector<Params>& checkpoints,
                                                      const LandscapeGrid& grid) {
  const std::vector<double> theta = grid.center.flatten();
  const std::vector<double> d = grid.delta.flatten();
  const std::vector<double> e = grid.eta.flatten();
  const double dn2 = dot(d, d), en2 = dot(e, e);
  SNNKIT_CHECK(dn2 > 0.0 && en2 > 0.0, "projection needs nonzero directions");

  std::vector<std::array<double, 2>> points;
  points.reserve(checkpoints.size());
  std::vector<double> diff(theta.size());
  for (const Params& ckpt : checkpoints) {
    const std::vector<double> t = ckpt.flatten();
    SNNKIT_CHECK(t.size() == theta.size(), "checkpoint does not match the landscape parameters");
    for (std::size_t i = 0; i < t.size(); ++i) diff[i] = t[i] - theta[i];
    points.push_back({dot(diff, d) / dn2, dot(diff, e) / en2});
  }
  return points;
}

std::pair<Params, Params> trajectory_pca_directions(const std::vector<Params>& checkpoints,
                                                    const Params& center) {
  SNNKIT_CHECK(checkpoints.size() >= 2, "PCA directions need at least two checkpoints");
  const std::vector<double> theta = center.flatten();
  const std::size_t n = checkpoints.size(), P = theta.size();

  // Centered differences, then the top-2 eigenvectors of the n x n Gram
  // matrix lifted back to parameter space.
  std::vector<std::vector<double>> diffs(n, std::vector<double>(P));
  std::vector<double> mean(P, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::vector<double> t = checkpoints[i].flatten();
    SNNKIT_CHECK(t.size() == P, "checkpoint does not match the center parameters");
    for (std::size_t p = 0; p < P; ++p) {
      diffs[i][p] = t[p] - theta[p];
      mean[p] += diffs[i][p] / static_cast<double>(n);
    }
  }
  for (auto& row : diffs)
    for (std::size_t p = 0; p < P; ++p) row[p] -= mean[p];

  std::vector<double> gram(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) gram[i * n + j] = dot(diffs[i], diffs[j]);

  const auto power_iter = [&](const std::vector<double>& deflate) {
    Rng r(1234);
    std::vector<double> v(n);
    for (double& x : v) x = r.next_gaussian();
    for (int it = 0; it < 200; ++it) {
      if (!deflate.empty()) {
        const double proj = dot(v, deflate);
        for (std::size_t i = 0; i < n; ++i) v[i] -= proj * deflate[i];
      }
      std::vector<double> w(n, 0.0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) w[i] += gram[i * n + j] * v[j];
      const double wn = norm(w);
      if (wn == 0.0) break;
      for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / wn;
    }
    return v;
  };

  const std::vector<double> v1 = power_iter({});
  const std::vector<double> v2 = power_iter(v1);

  const auto lift = [&](const std::vector<double>& v) {
    std::vector<double> dir(P, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t p = 0; p < P; ++p) dir[p] += v[i] * diffs[i][p];
    const double dn = norm(dir);
    if (dn > 0.0)
      for (double& x : dir) x /= dn;
    Params out = zeros_like(center);
    out.load_flat(dir);
    return out;
  };
  return {lift(v1), lift(v2)};
}

MetricSummary metrics(const NetworkSpec& spec, const std::vector<StepRecord>& records,
                      const Tensor& outputs, std::span<const int> labels) {
  MetricSummary summary;

  const Tensor acc = accumulate_time(outputs);
  std::size_t correct = 0;
  for (std::size_t b = 0; b < acc.dim(0); ++b) {
    const double* row = acc.row(b);
    std::size_t best = 0;
    for (std::size_t c = 1; c < acc.dim(1); ++c)
      if (row[c] > row[best]) best = c;  // ties keep the lowest class index
    if (static_cast<int>(best) == labels[b]) ++correct;
  }
  summary.accuracy = acc.dim(0) ? static_cast<double>(correct) / acc.dim(0) : 0.0;

  SNNKIT_CHECK(!records.empty(), "metrics need a recorded rollout");
  const std::size_t input_features = records[0].input.dim(1);
  const std::vector<std::size_t> widths = layer_widths(spec, input_features);

  std::uint64_t spike_total = 0, spike_nonzero = 0, lif_neurons = 0;
  for (std::size_t i = 0; i < spec.layers.size(); ++i)
    if (spec.layers[i].kind == LayerSpec::Kind::Lif) lif_neurons += widths[i];
  for (const StepRecord& rec : records)
    for (std::size_t i = 0; i < spec.layers.size(); ++i)
      if (spec.layers[i].kind == LayerSpec::Kind::Lif) {
        spike_total += rec.output[i].size();
        spike_nonzero += count_nonzero(rec.output[i]);
      }
  summary.activation_sparsity =
      spike_total ? 1.0 - static_cast<double>(spike_nonzero) / static_cast<double>(spike_total) : 1.0;
  summary.neuron_updates = lif_neurons * records.size() * records[0].input.dim(0);

  for (std::size_t t = 0; t < records.size(); ++t)
    for (std::size_t i = 0; i < spec.layers.size(); ++i)
      if (spec.layers[i].kind == LayerSpec::Kind::Affine) {
        const Tensor in = layer_input_from_records(spec, widths, records, t, i);
        summary.synaptic_ops += static_cast<std::uint64_t>(count_nonzero(in)) * widths[i];
      }
  return summary;
}

double central_diff(const std::function<double(std::span<const double>)>& f,
                    std::span<const double> theta, std::size_t index, double h) {
  SNNKIT_CHECK(h > 0.0, "finite differences need h > 0");
  std::vector<double> t(theta.begin(), theta.end());
  t[index] = theta[index] + h;
  const double up = f(t);
  t[index] = theta[index] - h;
  const double down = f(t);
  return (up - down) / (2.0 * h);
}

NetworkSpec smooth_variant(const NetworkSpec& spec) {
  NetworkSpec smooth = spec;
  for (LayerSpec& l : smooth.layers)
    if (l.kind == LayerSpec::Kind::Lif) l.lif.smooth_forward = true;
  return smooth;
}

std::vector<double> finite_diff_grad(const NetworkSpec& spec, const Params& params, const Tensor& x,
                                     std::span<const int> labels, const LossSpec& loss, double h) {
  SNNKIT_CHECK(h > 0.0, "finite differences need h > 0");
  const NetworkSpec smooth = smooth_variant(spec);
  const std::vector<double> theta = params.flatten();
  Params work = params;
  const auto f = [&](std::span<const double> t) {
    work.load_flat(t);
    return evaluate_loss(smooth, work, x, labels, loss);
  };
  std::vector<double> grad(theta.size());
  for (std::size_t p = 0; p < theta.size(); ++p) grad[p] = central_diff(f, theta, p, h);
  return grad;
}

}  // namespace snnkit
