// Copyright 2026 The bcclust Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Domain types and interaction primitives shared by every integrator:
// particles with a moving position x_i and an immutable static feature c_i,
// the indicator kernel, neighborhoods and adjacency weights.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "bcclust/error.hpp"

namespace bcc {

enum class Metric { euclidean, max, manhattan };

/// How the adjacency row is normalized: by n (symmetric interactions) or by
/// the neighborhood size (row-stochastic interactions).
enum class SigmaMode { symmetric, stochastic };

Metric parse_metric(std::string_view name);
std::string_view to_string(Metric metric);
SigmaMode parse_sigma_mode(std::string_view name);
std::string_view to_string(SigmaMode mode);

struct InteractionSpec {
  double eps1 = 0.0;  // position confidence level
  double eps2 = 0.0;  // feature confidence level
  Metric norm1 = Metric::euclidean;
  Metric norm2 = Metric::euclidean;
  SigmaMode sigma_mode = SigmaMode::stochastic;

  /// Throws ConfigError unless both confidence levels are finite and >= 0.
  void validate() const;
};

/// n particles with positions in R^d1 and static features in R^d2.
///
/// Features are held behind a shared immutable buffer: integrators produce
/// new particle sets through `advanced()`, which replaces the positions and
/// shares the very same feature storage. d2 == 0 encodes a constant feature.
class ParticleSet {
 public:
  ParticleSet(std::size_t d1, std::size_t d2, std::vector<double> positions,
              std::vector<double> features, double t = 0.0);

  std::size_t size() const noexcept { return n_; }
  std::size_t d1() const noexcept { return d1_; }
  std::size_t d2() const noexcept { return d2_; }
  double time() const noexcept { return t_; }

  std::span<const double> position(std::size_t i) const {
    return {positions_.data() + i * d1_, d1_};
  }
  std::span<const double> feature(std::size_t i) const {
    return {features_->data() + i * d2_, d2_};
  }
  std::span<const double> positions() const noexcept { return positions_; }
  std::span<const double> features() const noexcept { return *features_; }
  const std::shared_ptr<const std::vector<double>>& shared_features() const noexcept {
    return features_;
  }

  /// Same features, new positions and time.
  ParticleSet advanced(std::vector<double> positions, double t) const;

 private:
  ParticleSet(std::size_t d1, std::size_t d2, std::vector<double> positions,
              std::shared_ptr<const std::vector<double>> features, double t);

  std::size_t n_ = 0;
  std::size_t d1_ = 0;
  std::size_t d2_ = 0;
  std::vector<double> positions_;
  std::shared_ptr<const std::vector<double>> features_;
  double t_ = 0.0;
};

/// Indicator kernel: 1 iff dist <= eps (boundary inclusive).
constexpr int chi(double eps, double dist) noexcept { return dist <= eps ? 1 : 0; }

/// Unchecked distance; both spans must have the same length.
inline double distance_unchecked(std::span<const double> a, std::span<const double> b,
                                 Metric metric) noexcept {
  double acc = 0.0;
  switch (metric) {
    case Metric::euclidean:
      for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] - b[k];
        acc += d * d;
      }
      return std::sqrt(acc);
    case Metric::max:
      for (std::size_t k = 0; k < a.size(); ++k) acc = std::max(acc, std::abs(a[k] - b[k]));
      return acc;
    case Metric::manhattan:
      for (std::size_t k = 0; k < a.size(); ++k) acc += std::abs(a[k] - b[k]);
      return acc;
  }
  return acc;
}

/// Distance between two points; throws DimensionError on size mismatch.
double distance(std::span<const double> a, std::span<const double> b,
                Metric metric = Metric::euclidean);

/// True iff j is in the neighborhood of i (both confidence gates pass).
inline bool interacts(const ParticleSet& ps, std::size_t i, std::size_t j,
                      const InteractionSpec& spec) noexcept {
  return chi(spec.eps1, distance_unchecked(ps.position(i), ps.position(j), spec.norm1)) &&
         (ps.d2() == 0 ||
          chi(spec.eps2, distance_unchecked(ps.feature(i), ps.feature(j), spec.norm2)));
}

struct NeighborhoodResult {
  std::vector<std::size_t> indices;  // sorted, always contains i
  std::size_t count() const noexcept { return indices.size(); }
};

NeighborhoodResult neighborhood(const ParticleSet& ps, std::size_t i,
                                const InteractionSpec& spec);

/// A_ij = 1/sigma_i if j is a neighbor of i, else 0.
double adjacency_weight(const ParticleSet& ps, std::size_t i, std::size_t j,
                        const InteractionSpec& spec);

/// Diameter of the axis-aligned bounding box of the positions under `metric`.
/// Upper bound for every pairwise position distance.
double bounding_diameter(std::span<const double> coords, std::size_t dim, Metric metric);

}  // namespace bcc
