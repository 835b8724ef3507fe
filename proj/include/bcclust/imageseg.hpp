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

// Grayscale segmentation: pixels become particles positioned at their
// centers with the intensity as a static scalar feature. After clustering,
// every pixel takes the mean original intensity of its cluster.

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "bcclust/dynamics.hpp"
#include "bcclust/mfi.hpp"

namespace bcc {

struct GrayImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::uint32_t maxval = 255;
  std::vector<double> intensities;  // row-major, in [0, 1]

  double at(std::size_t row, std::size_t col) const { return intensities[row * width + col]; }
  /// Throws ConfigError on bad dimensions, maxval or intensities.
  void validate() const;
};

enum class PgmFormat { plain /* P2 */, raw /* P5 */ };

/// Parses P2 or P5 data. Samples wider than one byte are big-endian.
/// Throws ParseError carrying the byte offset of the problem.
GrayImage parse_pgm(std::string_view bytes);
GrayImage load_grayscale(const std::string& path);

/// round-half-up of intensity * maxval.
std::uint32_t quantize(double intensity, std::uint32_t maxval);
std::string encode_pgm(const GrayImage& img, PgmFormat format);
/// Written atomically. Throws IoError.
void write_image(const GrayImage& img, const std::string& path, PgmFormat format);

/// Pixel (row, col) sits at ((col + 0.5) / width, 1 - (row + 0.5) / height),
/// so row 0 is the top of the unit square.
ParticleSet image_to_particles(const GrayImage& img);

/// Four quadrants: top-left 1, bottom-left 0.75, top-right 0, bottom-right 0.25.
GrayImage make_quadrant_image(std::size_t width = 64, std::size_t height = 64);

enum class SegmentMethod { automatic, euler, mfi };
SegmentMethod parse_segment_method(std::string_view name);
std::string_view to_string(SegmentMethod method);

struct SegmentConfig {
  InteractionSpec spec{0.5, 0.3, Metric::euclidean, Metric::euclidean, SigmaMode::stochastic};
  SegmentMethod method = SegmentMethod::automatic;
  /// automatic uses euler up to this many pixels and mfi above.
  std::size_t euler_max_pixels = std::size_t{1} << 14;
  MfiConfig mfi{10, 0.5, 50.0, 0, 1e-8, 1, 0, 1.0};
  /// 0 selects default_merge_tol of the pixel grid.
  double merge_tol = 0.0;
};

struct SegmentationResult {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::size_t> labels;           // per pixel, row-major
  std::vector<double> cluster_intensity;     // mean original intensity
  std::vector<std::size_t> cluster_size;
  std::vector<std::vector<double>> cluster_center;
  GrayImage output;
  SegmentMethod method_used = SegmentMethod::euler;
  std::size_t steps = 0;
  std::string termination_reason;
};

SegmentationResult segment(const GrayImage& img, const SegmentConfig& cfg);

/// Cluster mean strictly below theta becomes 0 (black), otherwise 1.
GrayImage threshold(const SegmentationResult& sr, double theta);

}  // namespace bcc
