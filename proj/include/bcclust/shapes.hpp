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

// Shape detection: a polyline pattern sampled into points, perturbed by
// additive noise, clustered, and scored by the mean distance from each
// cluster center to the nearest pattern point.

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "bcclust/dynamics.hpp"
#include "bcclust/mfi.hpp"

namespace bcc {

struct Segment {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  double length() const;
};

struct Pattern {
  std::vector<Segment> segments;
  std::vector<double> points;  // n x 2, row-major

  std::size_t size() const noexcept { return points.size() / 2; }
};

/// Feet at (0.1, 0.1) and (0.9, 0.1), apex at (0.5, 0.9), crossbar between
/// the stroke midpoints at height 0.5.
std::vector<Segment> letter_a_segments();

/// Samples n points over the segments, proportionally to length (largest
/// remainder, at least one point per segment). Points are equally spaced and
/// include both endpoints; a segment holding a single point gets its start.
/// Throws ConfigError if n < number of segments.
Pattern sample_pattern(std::vector<Segment> segments, std::size_t n);

inline Pattern generate_letter_a(std::size_t n) { return sample_pattern(letter_a_segments(), n); }

/// One segment per non-empty line, "x0 y0 x1 y1"; '#' starts a comment.
std::vector<Segment> parse_segments(std::string_view text);
std::vector<Segment> load_segments(const std::string& path);

enum class NoiseKind { uniform, gaussian };
NoiseKind parse_noise_kind(std::string_view name);
std::string_view to_string(NoiseKind kind);

struct NoiseSpec {
  double alpha = 0.1;
  NoiseKind kind = NoiseKind::uniform;
  std::uint64_t seed = 0;
};

/// x~ = x + alpha * theta with theta drawn per coordinate from U(-1, 1) or
/// N(0, 1). A point leaving [0,1]^2 is redrawn. Returns n x 2 coordinates.
std::vector<double> perturb(const Pattern& pattern, const NoiseSpec& noise);

/// Mean over clusters of the Euclidean distance from the center to the
/// nearest pattern point. Throws ConfigError on an empty cluster set.
double error_measure(const std::vector<std::vector<double>>& centers, const Pattern& pattern);
double error_measure(const ClusterSet& cs, const Pattern& pattern);

struct SweepConfig {
  std::vector<double> alphas;
  std::vector<double> eps1_values;
  std::size_t runs = 1;
  NoiseKind noise = NoiseKind::uniform;
  std::uint64_t seed = 0;
  MfiConfig mfi;  // seed field is replaced per run
  SigmaMode mode = SigmaMode::stochastic;
  /// Clusters lighter than this fraction of the particles are not counted.
  double min_weight = 0.01;
  /// 0 selects default_merge_tol of the noisy data.
  double merge_tol = 0.0;
};

struct SweepRun {
  std::size_t alpha_index = 0;
  std::size_t eps_index = 0;
  std::size_t run = 0;
  double alpha = 0;
  double eps1 = 0;
  std::uint64_t noise_seed = 0;
  std::uint64_t mfi_seed = 0;
  double error = 0;
  std::size_t n_clusters = 0;
  std::vector<std::vector<double>> centers;
  std::vector<double> weights;
};

struct SweepCell {
  double alpha = 0;
  double eps1 = 0;
  double mean_error = 0;
  double mean_clusters = 0;
  std::size_t runs = 0;
  bool best = false;  // smallest mean error for this alpha
};

struct SweepResult {
  std::vector<SweepRun> runs;
  std::vector<SweepCell> cells;  // alpha-major, eps1-minor
};

std::uint64_t sweep_noise_seed(std::uint64_t master, std::size_t alpha_index, std::size_t run);
std::uint64_t sweep_mfi_seed(std::uint64_t master, std::size_t alpha_index, std::size_t eps_index,
                             std::size_t run);

/// Every (alpha, eps1, run) cell: perturb, cluster with MFI, score. Noise is
/// shared across eps1 values for a given (alpha, run).
SweepResult sweep(const Pattern& pattern, const SweepConfig& cfg);

}  // namespace bcc
