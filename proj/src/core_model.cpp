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

#include "bcclust/core_model.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace bcc {

Metric parse_metric(std::string_view name) {
  if (name == "euclidean") return Metric::euclidean;
  if (name == "max") return Metric::max;
  if (name == "manhattan") return Metric::manhattan;
  throw ConfigError("unknown metric '" + std::string(name) +
                    "' (expected euclidean, max or manhattan)");
}

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::euclidean: return "euclidean";
    case Metric::max: return "max";
    case Metric::manhattan: return "manhattan";
  }
  return "euclidean";
}

SigmaMode parse_sigma_mode(std::string_view name) {
  if (name == "symmetric") return SigmaMode::symmetric;
  if (name == "stochastic") return SigmaMode::stochastic;
  throw ConfigError("unknown interaction mode '" + std::string(name) +
                    "' (expected symmetric or stochastic)");
}

std::string_view to_string(SigmaMode mode) {
  return mode == SigmaMode::symmetric ? "symmetric" : "stochastic";
}

void InteractionSpec::validate() const {
  if (!(eps1 >= 0.0) || std::isnan(eps1)) throw ConfigError("eps1 must be >= 0");
  if (!(eps2 >= 0.0) || std::isnan(eps2)) throw ConfigError("eps2 must be >= 0");
}

ParticleSet::ParticleSet(std::size_t d1, std::size_t d2, std::vector<double> positions,
                         std::vector<double> features, double t)
    : ParticleSet(d1, d2, std::move(positions),
                  std::make_shared<const std::vector<double>>(std::move(features)), t) {}

ParticleSet::ParticleSet(std::size_t d1, std::size_t d2, std::vector<double> positions,
                         std::shared_ptr<const std::vector<double>> features, double t)
    : d1_(d1), d2_(d2), positions_(std::move(positions)), features_(std::move(features)), t_(t) {
  if (d1_ == 0) throw DimensionError("position dimension d1 must be >= 1");
  if (positions_.empty() || positions_.size() % d1_ != 0)
    throw DimensionError("position array length " + std::to_string(positions_.size()) +
                         " is not a positive multiple of d1=" + std::to_string(d1_));
  n_ = positions_.size() / d1_;
  if (features_->size() != n_ * d2_)
    throw DimensionError("feature array length " + std::to_string(features_->size()) +
                         " does not match n*d2=" + std::to_string(n_ * d2_));
}

ParticleSet ParticleSet::advanced(std::vector<double> positions, double t) const {
  if (positions.size() != positions_.size())
    throw DimensionError("advanced(): position array changed size");
  return ParticleSet(d1_, d2_, std::move(positions), features_, t);
}

double distance(std::span<const double> a, std::span<const double> b, Metric metric) {
  if (a.size() != b.size())
    throw DimensionError("distance between points of dimension " + std::to_string(a.size()) +
                         " and " + std::to_string(b.size()));
  return distance_unchecked(a, b, metric);
}

NeighborhoodResult neighborhood(const ParticleSet& ps, std::size_t i,
                                const InteractionSpec& spec) {
  if (i >= ps.size())
    throw IndexError("particle index " + std::to_string(i) + " out of range [0, " +
                     std::to_string(ps.size()) + ")");
  NeighborhoodResult out;
  for (std::size_t j = 0; j < ps.size(); ++j)
    if (interacts(ps, i, j, spec)) out.indices.push_back(j);
  return out;
}

double adjacency_weight(const ParticleSet& ps, std::size_t i, std::size_t j,
                        const InteractionSpec& spec) {
  if (i >= ps.size() || j >= ps.size())
    throw IndexError("adjacency index out of range");
  if (!interacts(ps, i, j, spec)) return 0.0;
  if (spec.sigma_mode == SigmaMode::symmetric) return 1.0 / static_cast<double>(ps.size());
  return 1.0 / static_cast<double>(neighborhood(ps, i, spec).count());
}

double bounding_diameter(std::span<const double> coords, std::size_t dim, Metric metric) {
  if (dim == 0 || coords.empty()) return 0.0;
  std::vector<double> lo(coords.begin(), coords.begin() + static_cast<std::ptrdiff_t>(dim));
  std::vector<double> hi = lo;
  for (std::size_t p = dim; p < coords.size(); p += dim) {
    for (std::size_t k = 0; k < dim; ++k) {
      lo[k] = std::min(lo[k], coords[p + k]);
      hi[k] = std::max(hi[k], coords[p + k]);
    }
  }
  return distance_unchecked(lo, hi, metric);
}

}  // namespace bcc
