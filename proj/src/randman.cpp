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

#include "snnkit/randman.hpp"

#include <cmath>
#include <iostream>
#include <numeric>

namespace snnkit {

namespace {

constexpr double kTwoPi = 2.0 * 3.14159265358979323846;

// Stream ids under sample_seed; manifold_seed has its own generator.
constexpr std::uint64_t kStreamPoints = 1;
constexpr std::uint64_t kStreamEncode = 2;
constexpr std::uint64_t kStreamShuffle = 3;

long long round_half_away(double x) { return std::llround(x); }

}  // namespace

void validate(const RandmanConfig& config) {
  SNNKIT_CHECK(config.classes >= 1, "randman: classes must be >= 1");
  SNNKIT_CHECK(config.units >= 1, "randman: units must be >= 1");
  SNNKIT_CHECK(config.intrinsic_dim >= 1, "randman: intrinsic_dim must be >= 1");
  SNNKIT_CHECK(config.cutoff >= 1, "randman: cutoff must be >= 1");
  SNNKIT_CHECK(config.timesteps >= 1, "randman: timesteps must be >= 1");
  SNNKIT_CHECK(config.samples_per_class >= 1, "randman: samples_per_class must be >= 1");
  SNNKIT_CHECK(config.alpha >= 0.0, "randman: alpha must be >= 0");
  if (config.encoding == RandmanEncoding::Rate)
    SNNKIT_CHECK(config.p_max > 0.0 && config.p_max <= 1.0, "randman: p_max must be in (0, 1]");
}

ManifoldParams make_manifold(const RandmanConfig& config) {
  validate(config);
  ManifoldParams p;
  p.classes = config.classes;
  p.units = config.units;
  p.intrinsic_dim = config.intrinsic_dim;
  p.cutoff = config.cutoff;
  p.alpha = config.alpha;
  const std::size_t per_class = static_cast<std::size_t>(config.units) * config.intrinsic_dim *
                                config.cutoff;
  p.amplitude.resize(static_cast<std::size_t>(config.classes) * per_class);
  p.phase.resize(p.amplitude.size());
  const Rng root(config.manifold_seed);
  std::size_t idx = 0;
  for (int c = 0; c < config.classes; ++c) {
    Rng r = root.child(static_cast<std::uint64_t>(c));
    for (std::size_t i = 0; i < per_class; ++i, ++idx) {
      p.amplitude[idx] = r.next_double();
      p.phase[idx] = r.next_double();
    }
  }
  return p;
}

std::vector<double> manifold_eval(const ManifoldParams& params, int c, std::span<const double> z) {
  SNNKIT_CHECK(c >= 0 && c < params.classes, "manifold_eval: class out of range");
  SNNKIT_CHECK(z.size() == static_cast<std::size_t>(params.intrinsic_dim),
               "manifold_eval: point dimension mismatch");
  std::vector<double> f(params.units);
  for (int m = 0; m < params.units; ++m) {
    double prod = 1.0;
    for (int j = 0; j < params.intrinsic_dim; ++j) {
      double sum = 0.0;
      for (int k = 0; k < params.cutoff; ++k) {
        const double freq = static_cast<double>(k + 1);
        sum += params.amp(c, m, j, k) * std::pow(freq, -params.alpha) *
               std::sin(kTwoPi * (freq * z[j] + params.phi(c, m, j, k)));
      }
      prod *= sum;
    }
    f[m] = prod;
  }
  return f;
}

Tensor time_encode(std::span<const double> values, int timesteps) {
  SNNKIT_CHECK(timesteps >= 1, "time_encode: timesteps must be >= 1");
  Tensor out({static_cast<std::size_t>(timesteps), values.size()});
  for (std::size_t m = 0; m < values.size(); ++m) {
    long long t = round_half_away(values[m] * static_cast<double>(timesteps - 1));
    if (t < 0) t = 0;
    if (t > timesteps - 1) t = timesteps - 1;
    out(static_cast<std::size_t>(t), m) = 1.0;
  }
  return out;
}

Tensor rate_encode(std::span<const double> values, int timesteps, double p_max, Rng& rng) {
  SNNKIT_CHECK(timesteps >= 1, "rate_encode: timesteps must be >= 1");
  SNNKIT_CHECK(p_max > 0.0 && p_max <= 1.0, "rate_encode: p_max must be in (0, 1]");
  Tensor out({static_cast<std::size_t>(timesteps), values.size()});
  std::vector<std::size_t> steps(static_cast<std::size_t>(timesteps));
  for (std::size_t m = 0; m < values.size(); ++m) {
    long long n = round_half_away(values[m] * p_max * static_cast<double>(timesteps));
    if (n < 0) n = 0;
    if (n > timesteps) n = timesteps;
    // Partial Fisher-Yates: the first n entries are a uniform sample of
    // distinct steps.
    std::iota(steps.begin(), steps.end(), std::size_t{0});
    for (long long i = 0; i < n; ++i) {
      const std::size_t j = i + rng.next_below(static_cast<std::uint64_t>(timesteps - i));
      std::swap(steps[static_cast<std::size_t>(i)], steps[j]);
      out(steps[static_cast<std::size_t>(i)], m) = 1.0;
    }
  }
  return out;
}

namespace {

RandmanDataset generate_impl(const RandmanConfig& config, std::span<const double> given_min,
                             std::span<const double> given_max) {
  validate(config);
  const ManifoldParams manifold = make_manifold(config);
  const int n = config.classes * config.samples_per_class;
  const int M = config.units, D = config.intrinsic_dim, T = config.timesteps;

  if (config.encoding == RandmanEncoding::Rate && config.p_max * T < 1.0)
    std::cerr << "warning: randman: p_max * timesteps < 1; small manifold values produce zero "
                 "spikes\n";

  // Manifold values for every sample, before normalization.
  std::vector<std::vector<double>> values(static_cast<std::size_t>(n));
  std::vector<int> labels(static_cast<std::size_t>(n));
  const Rng points_root(config.sample_seed, kStreamPoints);
  std::vector<double> z(static_cast<std::size_t>(D));
  std::size_t idx = 0;
  for (int c = 0; c < config.classes; ++c) {
    Rng zr = points_root.child(static_cast<std::uint64_t>(c));
    for (int s = 0; s < config.samples_per_class; ++s, ++idx) {
      for (int j = 0; j < D; ++j) z[static_cast<std::size_t>(j)] = zr.next_double();
      values[idx] = manifold_eval(manifold, c, z);
      labels[idx] = c;
    }
  }

  // Min-max normalization per unit: over this set, or with a previous set's
  // stored range.
  RandmanDataset ds;
  ds.config = config;
  if (given_min.empty()) {
    ds.norm_min.assign(static_cast<std::size_t>(M), 0.0);
    ds.norm_max.assign(static_cast<std::size_t>(M), 0.0);
    for (int m = 0; m < M; ++m) {
      double lo = values[0][static_cast<std::size_t>(m)], hi = lo;
      for (const auto& v : values) {
        lo = std::min(lo, v[static_cast<std::size_t>(m)]);
        hi = std::max(hi, v[static_cast<std::size_t>(m)]);
      }
      ds.norm_min[static_cast<std::size_t>(m)] = lo;
      ds.norm_max[static_cast<std::size_t>(m)] = hi;
      if (lo == hi)
        std::cerr << "warning: randman: unit " << m
                  << " has constant manifold values; normalized value fixed at 0.5\n";
    }
  } else {
    SNNKIT_CHECK(given_min.size() == static_cast<std::size_t>(M) && given_max.size() == given_min.size(),
                 "randman: stored normalization does not match the unit count");
    ds.norm_min.assign(given_min.begin(), given_min.end());
    ds.norm_max.assign(given_max.begin(), given_max.end());
  }
  for (auto& v : values)
    for (int m = 0; m < M; ++m) {
      const double lo = ds.norm_min[static_cast<std::size_t>(m)];
      const double hi = ds.norm_max[static_cast<std::size_t>(m)];
      double& x = v[static_cast<std::size_t>(m)];
      x = lo == hi ? 0.5 : (x - lo) / (hi - lo);
      x = std::min(1.0, std::max(0.0, x));
    }

  // Encode, then shuffle the sample order.
  const Rng encode_root(config.sample_seed, kStreamEncode);
  std::vector<Tensor> encoded(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    if (config.encoding == RandmanEncoding::Time) {
      encoded[static_cast<std::size_t>(i)] = time_encode(values[static_cast<std::size_t>(i)], T);
    } else {
      Rng er = encode_root.child(static_cast<std::uint64_t>(i));
      encoded[static_cast<std::size_t>(i)] =
          rate_encode(values[static_cast<std::size_t>(i)], T, config.p_max, er);
    }
  }

  std::vector<std::size_t> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng shuffle_rng(config.sample_seed, kStreamShuffle);
  for (std::size_t i = order.size(); i > 1; --i) {
    const std::size_t j = shuffle_rng.next_below(i);
    std::swap(order[i - 1], order[j]);
  }

  ds.raster.data = Tensor({static_cast<std::size_t>(n), static_cast<std::size_t>(T),
                           static_cast<std::size_t>(M)});
  ds.raster.labels.resize(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < order.size(); ++i) {
    const std::size_t src = order[i];
    ds.raster.labels[i] = labels[src];
    for (int t = 0; t < T; ++t)
      for (int m = 0; m < M; ++m)
        ds.raster.data(i, static_cast<std::size_t>(t), static_cast<std::size_t>(m)) =
            encoded[src](static_cast<std::size_t>(t), static_cast<std::size_t>(m));
  }
  return ds;
}

}  // namespace

RandmanDataset generate(const RandmanConfig& config) { return generate_impl(config, {}, {}); }

RandmanDataset generate_normalized(const RandmanConfig& config, std::span<const double> norm_min,
                                   std::span<const double> norm_max) {
  SNNKIT_CHECK(!norm_min.empty(), "generate_normalized needs a stored normalization");
  return generate_impl(config, norm_min, norm_max);
}

}  // namespace snnkit
