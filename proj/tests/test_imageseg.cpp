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

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <set>
#include <string>

#include "bcclust/imageseg.hpp"
#include "bcclust/io.hpp"

using namespace bcc;

namespace {

std::string tmp_path(const std::string& name) {
  std::filesystem::create_directories(BCC_TEST_TMP);
  return std::string(BCC_TEST_TMP) + "/" + name;
}

GrayImage ramp(std::size_t w, std::size_t h, std::uint32_t maxval) {
  GrayImage img;
  img.width = w;
  img.height = h;
  img.maxval = maxval;
  for (std::size_t k = 0; k < w * h; ++k)
    img.intensities.push_back(static_cast<double>((k * 37) % (maxval + 1)) / maxval);
  return img;
}

SegmentConfig quadrant_config(double eps2) {
  SegmentConfig cfg;
  cfg.spec = InteractionSpec{0.5, eps2, Metric::euclidean, Metric::euclidean, SigmaMode::stochastic};
  return cfg;
}

}  // namespace

TEST_CASE("plain PGM parsing") {
  const GrayImage img = parse_pgm("P2\n2 2\n255\n0 255 128 64\n");
  CHECK(img.width == 2);
  CHECK(img.height == 2);
  CHECK(img.maxval == 255);
  CHECK(img.intensities == std::vector<double>{0.0, 1.0, 128.0 / 255.0, 64.0 / 255.0});
  const GrayImage commented = parse_pgm("P2 # magic\n# a comment line\n2\t2 # size\n  255\n0 255\n128 64");
  CHECK(commented.intensities == img.intensities);
}

TEST_CASE("PGM parse errors carry offsets") {
  CHECK_THROWS_AS(parse_pgm("P3\n1 1\n255\n0\n"), ParseError);
  try {
    parse_pgm("P2\n2 2\n255\n0 255 128\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("1 missing") != std::string::npos);
    CHECK(e.offset() == 21);
  }
  try {
    parse_pgm("P5\n3 1\n255\nab");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("1 missing") != std::string::npos);
  }
  try {
    parse_pgm("P2\n2 x\n255\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 5);
  }
  CHECK_THROWS_AS(parse_pgm("P2\n0 2\n255\n"), ParseError);
  CHECK_THROWS_AS(parse_pgm("P2\n1 1\n70000\n0\n"), ParseError);
  CHECK_THROWS_AS(parse_pgm("P2\n1 1\n10\n11\n"), ParseError);
}

TEST_CASE("quantization") {
  CHECK(quantize(1.0, 255) == 255);
  CHECK(quantize(0.5, 255) == 128);
  CHECK(quantize(0.0, 255) == 0);
  CHECK(quantize(0.125, 255) == 32);
  CHECK(quantize(0.875, 255) == 223);
}

TEST_CASE("PGM round trips are bit exact") {
  for (std::uint32_t maxval : {255u, 1000u, 65535u}) {
    const GrayImage img = ramp(13, 7, maxval);
    for (PgmFormat f : {PgmFormat::plain, PgmFormat::raw}) {
      const std::string path = tmp_path("rt_" + std::to_string(maxval) + (f == PgmFormat::raw ? ".p5" : ".p2"));
      write_image(img, path, f);
      const GrayImage back = load_grayscale(path);
      CHECK(back.maxval == maxval);
      CHECK(back.intensities == img.intensities);
      CHECK(encode_pgm(back, f) == encode_pgm(img, f));
    }
  }
  const std::string plain = encode_pgm(ramp(100, 2, 255), PgmFormat::plain);
  std::size_t start = 0;
  while (start < plain.size()) {
    const std::size_t end = plain.find('\n', start);
    CHECK(end - start <= 70);
    start = end + 1;
  }
  CHECK_THROWS_AS(load_grayscale("/nonexistent/image.pgm"), IoError);
}

TEST_CASE("pixels become particles") {
  GrayImage img;
  img.width = 2;
  img.height = 2;
  img.intensities = {0.1, 0.2, 0.3, 0.4};
  const ParticleSet ps = image_to_particles(img);
  CHECK(ps.d1() == 2);
  CHECK(ps.d2() == 1);
  const std::vector<double> expected{0.25, 0.75, 0.75, 0.75, 0.25, 0.25, 0.75, 0.25};
  CHECK(std::vector<double>(ps.positions().begin(), ps.positions().end()) == expected);
  CHECK(ps.feature(3)[0] == 0.4);
  CHECK(image_to_particles(make_quadrant_image()).size() == 4096);
}

TEST_CASE("constant and non-interacting images are reproduced") {
  GrayImage flat;
  flat.width = 12;
  flat.height = 9;
  flat.intensities.assign(108, 0.4);
  const SegmentationResult one = segment(flat, quadrant_config(0.1));
  CHECK(one.cluster_intensity.size() == 1);
  CHECK(one.output.intensities == flat.intensities);

  const GrayImage img = ramp(8, 8, 255);
  SegmentConfig cfg;
  cfg.spec = InteractionSpec{0.05, 0.5 / 255.0};
  const SegmentationResult each = segment(img, cfg);
  CHECK(each.cluster_intensity.size() == 64);
  CHECK(each.output.intensities == img.intensities);
}

TEST_CASE("quadrant benchmark") {
  const GrayImage img = make_quadrant_image();
  CHECK(img.at(0, 0) == 1.0);
  CHECK(img.at(63, 0) == 0.75);
  CHECK(img.at(0, 63) == 0.0);
  CHECK(img.at(63, 63) == 0.25);
  const SegmentationResult sr = segment(img, quadrant_config(0.3));
  CHECK(sr.method_used == SegmentMethod::euler);
  REQUIRE(sr.cluster_intensity.size() == 2);
  std::vector<double> means = sr.cluster_intensity;
  std::sort(means.begin(), means.end());
  CHECK(std::abs(means[0] - 0.125) <= 1e-9);
  CHECK(std::abs(means[1] - 0.875) <= 1e-9);

  const GrayImage bin = threshold(sr, 0.5);
  for (std::size_t r = 0; r < 64; ++r)
    for (std::size_t c = 0; c < 64; ++c) CHECK(bin.at(r, c) == (c < 32 ? 1.0 : 0.0));
}

TEST_CASE("threshold is strict below") {
  SegmentationResult sr;
  sr.width = 2;
  sr.height = 1;
  sr.labels = {0, 1};
  sr.cluster_intensity = {0.6, 0.5};
  sr.output.width = 2;
  sr.output.height = 1;
  sr.output.intensities = {0.6, 0.5};
  const GrayImage bin = threshold(sr, 0.5);
  CHECK(bin.intensities == std::vector<double>{1.0, 1.0});
  CHECK(threshold(sr, 0.55).intensities == std::vector<double>{1.0, 0.0});
}

TEST_CASE("property: segmentation partitions pixels and stays within input bounds") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    GrayImage img;
    img.width = 20;
    img.height = 15;
    RngStream rng(seed, 0, 0, StreamDomain::noise);
    for (std::size_t k = 0; k < 300; ++k) img.intensities.push_back(std::floor(rng.uniform01() * 8) / 8);
    SegmentConfig cfg;
    cfg.spec = InteractionSpec{0.2, 0.2};
    cfg.method = seed % 2 ? SegmentMethod::mfi : SegmentMethod::euler;
    cfg.mfi.seed = seed;
    const SegmentationResult sr = segment(img, cfg);
    CHECK(sr.labels.size() == 300);
    CHECK(sr.output.width == img.width);
    CHECK(sr.output.height == img.height);
    std::vector<std::size_t> sizes(sr.cluster_intensity.size(), 0);
    for (std::size_t l : sr.labels) ++sizes.at(l);
    CHECK(sizes == sr.cluster_size);
    const auto [lo, hi] = std::minmax_element(img.intensities.begin(), img.intensities.end());
    for (double v : sr.output.intensities) CHECK_UNARY(v >= *lo && v <= *hi);
  }
}

TEST_CASE("property: quadrant cluster count is monotone in eps2") {
  const GrayImage img = make_quadrant_image();
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    SegmentConfig coarse = quadrant_config(0.3 + 0.05 * static_cast<double>(seed));
    coarse.method = SegmentMethod::mfi;
    coarse.mfi.seed = seed;
    CHECK(segment(img, coarse).cluster_intensity.size() <= 2);
    SegmentConfig fine = quadrant_config(0.24 - 0.04 * static_cast<double>(seed));
    fine.method = SegmentMethod::mfi;
    fine.mfi.seed = seed;
    CHECK(segment(img, fine).cluster_intensity.size() >= 4);
  }
}

TEST_CASE("segment method names") {
  CHECK(parse_segment_method("auto") == SegmentMethod::automatic);
  CHECK(parse_segment_method(to_string(SegmentMethod::mfi)) == SegmentMethod::mfi);
  CHECK_THROWS_AS(parse_segment_method("kmeans"), ConfigError);
  GrayImage bad;
  bad.width = 2;
  bad.height = 2;
  bad.intensities = {0.0, 1.5, 0.0, 0.0};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}
