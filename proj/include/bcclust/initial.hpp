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

// Initial particle configurations.

#pragma once

#include <cstddef>
#include <cstdint>

#include "bcclust/core_model.hpp"

namespace bcc {

/// n positions uniform on [0,1]^d1, no feature.
ParticleSet uniform_positions(std::size_t n, std::size_t d1, std::uint64_t seed);

/// Positions uniform on [0,1]^d1 and a scalar feature drawn from
/// Normal(mean, variance). Note the second parameter is a variance.
ParticleSet uniform_with_gaussian_feature(std::size_t n, std::size_t d1, std::uint64_t seed,
                                          double mean = 0.5, double variance = 0.3);

}  // namespace bcc
