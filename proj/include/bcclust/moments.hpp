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

// Position moments, stored normalized by 1/n:
//   u_k    = (1/n) sum_i x_{i,k}
//   E_kj   = (1/n) sum_i x_{i,k} x_{i,j}
// The raw sums m1 = sum_i x_i and m2 = sum_i x_i (x) x_i are n*u and n*E.

#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "bcclust/core_model.hpp"

namespace bcc {

struct Moments {
  std::size_t dim = 0;
  std::vector<double> u;  // dim
  std::vector<double> E;  // dim x dim, row-major, symmetric

  double second(std::size_t k, std::size_t j) const { return E[k * dim + j]; }
};

struct MomentRecord {
  std::size_t dim = 0;
  std::vector<double> times;
  std::vector<Moments> samples;

  void append(double t, Moments m);
  std::size_t size() const noexcept { return times.size(); }
};

std::vector<double> first_moment(const ParticleSet& ps);

/// Exactly symmetric: the upper triangle is computed and mirrored.
std::vector<double> second_moment(const ParticleSet& ps);

Moments moments_of(const ParticleSet& ps);

/// Closed-form moments under global interactions:
///   u(t) = u(0),  E_kj(t) = E_kj(0) e^{-2t} + u_k(0) u_j(0) (1 - e^{-2t}).
Moments analytic_global_moments(const Moments& initial, double t);

struct MomentDriftReport {
  double max_first_moment_drift = 0.0;  // max_t max_k |u_k(t) - u_k(0)|
  /// Consecutive sample pairs (a, a+1) where some E_kk grew by more than the
  /// tolerance.
  std::vector<std::pair<std::size_t, std::size_t>> decay_violations;
  double max_abs_mixed = 0.0;   // max_t max_{k != j} |E_kj(t)|
  double max_mixed_excess = 0.0;  // max_t max_{k,j} |E_kj(t)| - (E_kk(0)+E_jj(0))/2
  bool mixed_bound_holds = true;
};

/// Throws ConfigError when fewer than two samples are recorded.
MomentDriftReport moment_drift_report(const MomentRecord& record, double decay_tol = 1e-10);

}  // namespace bcc
