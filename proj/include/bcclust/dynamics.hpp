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

// Full-interaction integrator for
//
//   dx_i/dt = sum_j A_ij (x_j - x_i),   c_i(t) = c_i(0),
//
// discretized by explicit Euler, plus cluster extraction on a (near) steady
// state and the pairwise separation test for stationary Dirac configurations.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "bcclust/core_model.hpp"
#include "bcclust/moments.hpp"

namespace bcc {

struct IntegratorConfig {
  double dt = 0.5;
  double t_final = 20.0;
  /// Stop once the largest per-step displacement (norm1) drops below this.
  double stop_tol = 1e-8;
  std::size_t record_every = 1;
  /// Stride, in steps, between calls to the stationarity predicate given to
  /// integrate(); 0 disables the check.
  std::size_t check_every = 0;

  /// Throws ConfigError unless 0 < dt <= 1, t_final >= dt, stop_tol >= 0 and
  /// record_every >= 1.
  void validate() const;
  /// Number of steps needed to reach t_final.
  std::size_t step_count() const;
};

struct Snapshot {
  double t = 0.0;
  std::vector<double> positions;
};

struct Trajectory {
  explicit Trajectory(ParticleSet initial) : final_state(std::move(initial)) {}

  std::vector<Snapshot> snapshots;  // first entry is the initial condition
  MomentRecord moments;             // one sample per snapshot
  bool terminated_early = false;
  std::string termination_reason;   // "converged", "stationary" or "horizon"
  std::size_t steps = 0;
  ParticleSet final_state;
  /// Free-form run metadata (seed, M, dt, mode, ...), in insertion order.
  std::vector<std::pair<std::string, std::string>> metadata;
};

/// One synchronous explicit Euler step of the full interaction system.
/// Throws ConfigError when dt is not in (0, 1].
ParticleSet euler_step(const ParticleSet& ps, const InteractionSpec& spec, double dt);

using StepFunction = std::function<ParticleSet(const ParticleSet&, std::uint64_t)>;
using StationarityTest = std::function<bool(const ParticleSet&)>;

/// Drives `step(state, k)` from ps0 under cfg, recording snapshots and
/// moments. Shared by the deterministic and the random-subset integrators.
/// When `stationary` is set it is evaluated every cfg.check_every steps and
/// stops the run once it returns true.
Trajectory integrate(const ParticleSet& ps0, const IntegratorConfig& cfg, const StepFunction& step,
                     Metric displacement_metric, const StationarityTest& stationary = {});

Trajectory simulate(const ParticleSet& ps0, const InteractionSpec& spec,
                    const IntegratorConfig& cfg, const StationarityTest& stationary = {});

inline MomentDriftReport moment_drift_report(const Trajectory& tr, double decay_tol = 1e-10) {
  return moment_drift_report(tr.moments, decay_tol);
}

struct Cluster {
  std::vector<double> center;  // mean member position
  std::vector<std::size_t> members;
  double weight = 0.0;  // members / n
  std::vector<double> feature_min;
  std::vector<double> feature_max;
  std::vector<double> feature_mean;
};

struct ClusterSet {
  std::size_t n = 0;
  std::size_t d1 = 0;
  std::size_t d2 = 0;
  std::vector<Cluster> clusters;  // ordered by smallest member index
  std::shared_ptr<const std::vector<double>> features;

  std::size_t size() const noexcept { return clusters.size(); }
  /// Clusters holding at least `min_weight` of the particles.
  std::size_t count_with_min_weight(double min_weight) const;
  /// Per-particle cluster index.
  std::vector<std::size_t> labels() const;
};

/// 1e-3 times the bounding-box diameter of the positions.
double default_merge_tol(const ParticleSet& ps, Metric metric = Metric::euclidean);

/// Connected components of the graph with an edge (i, j) iff
/// |x_i - x_j| <= merge_tol and |c_i - c_j| <= eps2.
ClusterSet extract_clusters(const ParticleSet& ps, double merge_tol,
                            const InteractionSpec& spec);

struct ClusterPairViolation {
  std::size_t a = 0;
  std::size_t b = 0;
  double center_distance = 0.0;
  double feature_gap = 0.0;  // min over member pairs
};

struct SteadyStateReport {
  std::vector<ClusterPairViolation> violations;
  bool stationary() const noexcept { return violations.empty(); }
};

/// The clusters holding at least `min_weight` of the particles. Lighter
/// clusters (isolated stragglers, sparse feature tails) are dropped, so the
/// members of the result no longer cover every particle.
ClusterSet significant_clusters(const ClusterSet& cs, double min_weight);

/// A Dirac configuration is stationary iff every pair of clusters is either
/// farther apart than eps1 or has all feature pairs farther apart than eps2.
SteadyStateReport verify_steady_state(const ClusterSet& cs, const InteractionSpec& spec);

/// Minimum feature distance between members of two clusters.
double cluster_feature_gap(const ClusterSet& cs, std::size_t a, std::size_t b, Metric metric);

/// Equilibrium test on the resolved part of a state: the significant
/// clusters must pass verify_steady_state and together hold at least
/// `min_mass` of the particles.
struct EquilibriumRule {
  double merge_tol = 1e-3;
  double min_weight = 0.01;
  double min_mass = 0.9;

  bool operator()(const ParticleSet& ps, const InteractionSpec& spec) const;
};

}  // namespace bcc
