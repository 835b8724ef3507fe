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

#include "bcclust/initial.hpp"

#include <cmath>
#include <vector>

#include "bcclust/rng.hpp"

namespace bcc {

ParticleSet uniform_positions(std::size_t n, std::size_t d1, std::uint64_t seed) {
  std::vector<double> x(n * d1);
  for (std::size_t i = 0; i < n; ++i) {
    RngStream rng(seed, 0, i, StreamDomain::initial_data);
    for (std::size_t k = 0; k < d1; ++k) x[i * d1 + k] = rng.uniform01();
  }
  return ParticleSet(d1, 0, std::move(x), {});
}

ParticleSet uniform_with_gaussian_feature(std::size_t n, std::size_t d1, std::uint64_t seed,
                                          double mean, double variance) {
  if (!(variance >= 0.0)) throw ConfigError("feature variance must be >= 0");
  const double sd = std::sqrt(variance);
  std::vector<double> x(n * d1), c(n);
  for (std::size_t i = 0; i < n; ++i) {
    RngStream rng(seed, 0, i, StreamDomain::initial_data);
    for (std::size_t k = 0; k < d1; ++k) x[i * d1 + k] = rng.uniform01();
    c[i] = mean + sd * rng.normal();
  }
  return ParticleSet(d1, 1, std::move(x), std::move(c));
}

}  // namespace bcc
