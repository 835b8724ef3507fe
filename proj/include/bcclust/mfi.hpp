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

// Mean Field Interaction algorithm: each particle interacts with M partners
// drawn uniformly without repetition from the other n - 1 particles, giving
// O(M n) work per step.
//
//   w_l    = chi(eps1, |x_jl - x_i|) chi(eps2, |c_jl - c_i|)
//   xbar   = sum_l w_l x_jl / sum_l w_l
//   Abar   = (1/M) sum_l w_l           (symmetric)
//          = [sum_l w_l > 0]           (stochastic)
//   x_i   <- x_i (1 - dt s Abar) + dt s Abar xbar,   s = rate_scale
//
// A particle with no qualifying partner does not move.

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "bcclust/core_model.hpp"
#include "bcclust/dynamics.hpp"
#include "bcclust/rng.hpp"

namespace bcc {

struct MfiConfig {
  std::size_t M = 10;
  double dt = 0.5;
  double t_final = 20.0;
  std::uint64_t seed = 0;
  double stop_tol = 1e-8;
  std::size_t record_every = 1;
  std::size_t check_every = 0;
  /// Multiplies Abar. With M = n - 1 in symmetric mode, rate_scale = M / n
  /// reproduces euler_step exactly. Must lie in (0, 1].
  double rate_scale = 1.0;

  /// Throws ConfigError unless 1 <= M <= n - 1 and the integrator fields are
  /// valid.
  void validate(std::size_t n) const;
  IntegratorConfig integrator() const;
};

/// Draws M distinct indices uniformly from {0..n-1} \ {i} (Floyd's method).
/// The result is a pure function of the stream state. Throws ConfigError if
/// M > n - 1.
std::vector<std::size_t> sample_subset(RngStream& rng, std::size_t n, std::size_t i,
                                       std::size_t M);

/// Stream used by particle i at step k.
inline RngStream mfi_stream(std::uint64_t seed, std::uint64_t k, std::size_t i) {
  return RngStream(seed, k, i, StreamDomain::mfi_sampling);
}

ParticleSet mfi_step(const ParticleSet& ps, const InteractionSpec& spec, const MfiConfig& cfg,
                     std::uint64_t k);

/// Metadata records seed, M, dt and mode. See integrate() for `stationary`.
Trajectory mfi_simulate(const ParticleSet& ps0, const InteractionSpec& spec,
                        const MfiConfig& cfg, const StationarityTest& stationary = {});

}  // namespace bcc
