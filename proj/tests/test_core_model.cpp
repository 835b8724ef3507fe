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
#include <cmath>
#include <vector>

#include "bcclust/core_model.hpp"
#include "bcclust/rng.hpp"

using namespace bcc;

namespace {

ParticleSet random_set(std::uint64_t seed, std::size_t n, std::size_t d1, std::size_t d2) {
  RngStream rng(seed, 0, 0, StreamDomain::noise);
  std::vector<double> x(n * d1), c(n * d2);
  for (double& v : x) v = rng.uniform01();
  for (double& v : c) v = rng.uniform01();
  return ParticleSet(d1, d2, x, c);
}

/// Brute-force neighborhood written directly from the set definition.
std::vector<std::size_t> naive_neighbors(const ParticleSet& ps, std::size_t i, double e1, double e2) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < ps.size(); ++j) {
    double dx = 0.0, dc = 0.0;
    for (std::size_t k = 0; k < ps.d1(); ++k)
      dx += (ps.position(i)[k] - ps.position(j)[k]) * (ps.position(i)[k] - ps.position(j)[k]);
    for (std::size_t k = 0; k < ps.d2(); ++k)
      dc += (ps.feature(i)[k] - ps.feature(j)[k]) * (ps.feature(i)[k] - ps.feature(j)[k]);
    if (std::sqrt(dx) <= e1 && std::sqrt(dc) <= e2) out.push_back(j);
  }
  return out;
}

}  // namespace

TEST_CASE("chi is boundary inclusive") {
  CHECK(chi(0.5, 0.3) == 1);
  CHECK(chi(0.1, 0.3) == 0);
  CHECK(chi(0.3, 0.3) == 1);
}

TEST_CASE("distance under each metric") {
  const std::vector<double> a{0, 0}, b{3, 4};
  CHECK(distance(a, b, Metric::euclidean) == 5.0);
  CHECK(distance(a, b, Metric::max) == 4.0);
  CHECK(distance(a, b, Metric::manhattan) == 7.0);
  const std::vector<double> p{1}, q{1};
  for (Metric m : {Metric::euclidean, Metric::max, Metric::manhattan}) CHECK(distance(p, q, m) == 0.0);
  const std::vector<double> r{1, 2, 3};
  CHECK_THROWS_AS(distance(a, r), DimensionError);
}

TEST_CASE("metric and mode names round trip") {
  for (Metric m : {Metric::euclidean, Metric::max, Metric::manhattan}) CHECK(parse_metric(to_string(m)) == m);
  for (SigmaMode m : {SigmaMode::symmetric, SigmaMode::stochastic})
    CHECK(parse_sigma_mode(to_string(m)) == m);
  CHECK_THROWS_AS(parse_metric("cosine"), ConfigError);
  CHECK_THROWS_AS(parse_sigma_mode("both"), ConfigError);
}

TEST_CASE("particle set validation") {
  CHECK_THROWS_AS(ParticleSet(0, 0, {0.5}, {}), DimensionError);
  CHECK_THROWS_AS(ParticleSet(1, 0, {}, {}), DimensionError);
  CHECK_THROWS_AS(ParticleSet(2, 0, {0.1, 0.2, 0.3}, {}), DimensionError);
  CHECK_THROWS_AS(ParticleSet(1, 1, {0.1, 0.2}, {0.5}), DimensionError);
  const ParticleSet ps(1, 0, {0.1, 0.2}, {});
  CHECK(ps.size() == 2);
  CHECK(ps.d2() == 0);
  CHECK_THROWS_AS((InteractionSpec{-1.0, 0.0}.validate()), ConfigError);
}

TEST_CASE("neighborhood examples") {
  const ParticleSet ps(1, 0, {0.0, 0.1, 0.5}, {});
  InteractionSpec spec{0.15, 0.0};
  CHECK(neighborhood(ps, 0, spec).indices == std::vector<std::size_t>{0, 1});
  spec.eps1 = 1.0;
  for (std::size_t i = 0; i < 3; ++i) CHECK(neighborhood(ps, i, spec).count() == 3);
  spec.eps1 = 0.0;
  for (std::size_t i = 0; i < 3; ++i) CHECK(neighborhood(ps, i, spec).indices == std::vector<std::size_t>{i});
  CHECK_THROWS_AS(neighborhood(ps, 3, spec), IndexError);
}

TEST_CASE("adjacency weight examples") {
  const ParticleSet ps(1, 0, {0.0, 0.1, 0.2}, {});
  InteractionSpec spec{1.0, 0.0, Metric::euclidean, Metric::euclidean, SigmaMode::symmetric};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK(adjacency_weight(ps, i, j, spec) == doctest::Approx(1.0 / 3));
  spec.sigma_mode = SigmaMode::stochastic;
  double row = 0.0;
  for (std::size_t j = 0; j < 3; ++j) row += adjacency_weight(ps, 0, j, spec);
  CHECK(row == doctest::Approx(1.0));
  spec.eps1 = 0.15;
  CHECK(adjacency_weight(ps, 0, 2, spec) == 0.0);
}

TEST_CASE("property: neighborhoods match the set definition") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const ParticleSet ps = random_set(seed, 40, 2, 1);
    const InteractionSpec spec{0.1 + 0.01 * static_cast<double>(seed), 0.3};
    for (std::size_t i = 0; i < ps.size(); ++i) {
      const auto nb = neighborhood(ps, i, spec).indices;
      CHECK(nb == naive_neighbors(ps, i, spec.eps1, spec.eps2));
      CHECK(std::binary_search(nb.begin(), nb.end(), i));
    }
  }
}

TEST_CASE("property: stochastic rows sum to one, symmetric weights are symmetric") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ParticleSet ps = random_set(100 + seed, 30, 1, 2);
    InteractionSpec spec{0.3, 0.4, Metric::euclidean, Metric::max, SigmaMode::stochastic};
    for (std::size_t i = 0; i < ps.size(); ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < ps.size(); ++j) row += adjacency_weight(ps, i, j, spec);
      CHECK(std::abs(row - 1.0) <= 1e-12);
    }
    spec.sigma_mode = SigmaMode::symmetric;
    for (std::size_t i = 0; i < ps.size(); ++i)
      for (std::size_t j = 0; j < ps.size(); ++j)
        CHECK(adjacency_weight(ps, i, j, spec) == adjacency_weight(ps, j, i, spec));
  }
}

TEST_CASE("property: a vacuous feature gate equals the featureless model") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ParticleSet ps = random_set(200 + seed, 30, 2, 1);
    const ParticleSet bare(2, 0, std::vector<double>(ps.positions().begin(), ps.positions().end()), {});
    const InteractionSpec gated{0.25, 1.0};
    const InteractionSpec plain{0.25, 0.0};
    for (std::size_t i = 0; i < ps.size(); ++i) {
      CHECK(neighborhood(ps, i, gated).indices == neighborhood(bare, i, plain).indices);
      for (std::size_t j = 0; j < ps.size(); ++j)
        CHECK(adjacency_weight(ps, i, j, gated) == adjacency_weight(bare, i, j, plain));
    }
  }
}

TEST_CASE("property: neighborhoods grow with the confidence levels") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ParticleSet ps = random_set(300 + seed, 30, 2, 1);
    const InteractionSpec small{0.15, 0.2};
    const InteractionSpec large{0.25, 0.35};
    for (std::size_t i = 0; i < ps.size(); ++i) {
      const auto a = neighborhood(ps, i, small).indices;
      const auto b = neighborhood(ps, i, large).indices;
      CHECK(std::includes(b.begin(), b.end(), a.begin(), a.end()));
    }
  }
}
