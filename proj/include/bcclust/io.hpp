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

// File helpers and the CSV layouts written by the command-line tool. Every
// table has a header row, comma separators and '.' decimals. Reals are
// printed in shortest round-trip form, so reading a table back recovers the
// written doubles exactly.

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "bcclust/dynamics.hpp"
#include "bcclust/imageseg.hpp"
#include "bcclust/shapes.hpp"

namespace bcc {

std::string read_file(const std::string& path);
/// Writes to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::string& path, std::string_view content);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Throws ConfigError when the column is missing.
  std::size_t column(std::string_view name) const;
  double number(std::size_t row, std::size_t col) const;
  std::size_t size() const noexcept { return rows.size(); }
};

/// Plain CSV without quoting. Every row must have as many fields as the
/// header. Throws ParseError with the byte offset of the offending line.
CsvTable parse_csv(std::string_view text);
CsvTable read_csv(const std::string& path);
/// Throws ParseError unless the header equals `expected`.
void expect_header(const CsvTable& table, const std::vector<std::string>& expected);

// Headers, in column order.
std::vector<std::string> trajectory_header(std::size_t d1, std::size_t d2);
std::vector<std::string> moments_header(std::size_t d1);
std::vector<std::string> clusters_header(std::size_t d1, std::size_t d2);
std::vector<std::string> steady_state_header();
std::vector<std::string> density_header(std::size_t d1);
std::vector<std::string> labels_header();
std::vector<std::string> segment_clusters_header();
std::vector<std::string> sweep_header();
std::vector<std::string> summary_header();
std::vector<std::string> centers_header();
std::vector<std::string> bench_header();

/// t,i,x1..xd1,c1..cd2 for every snapshot and particle.
std::string trajectory_csv(const Trajectory& tr);
/// t,u1..,E11,E12,..,Edd (upper triangle, row by row).
std::string moments_csv(const MomentRecord& record);
/// cluster_id,weight,size,center..,feature_mean..,feature_min..,feature_max..
std::string clusters_csv(const ClusterSet& cs);
/// One row per violating pair: cluster_a,cluster_b,center_distance,min_feature_gap.
std::string steady_state_csv(const SteadyStateReport& report);

struct DensityGrid {
  std::size_t bins = 50;
  double lo = 0.0;
  double hi = 1.0;
};

/// Position histogram per snapshot, normalized to unit mass. d1 must be 1
/// or 2; points outside [lo, hi] fall into the edge bins.
std::string density_csv(const Trajectory& tr, const DensityGrid& grid);
/// Same data as blank-line separated blocks for gnuplot.
std::string density_gnuplot(const Trajectory& tr, const DensityGrid& grid);

/// row,col,cluster_id
std::string labels_csv(const SegmentationResult& sr);
/// cluster_id,size,mean_intensity,center_x,center_y
std::string segment_clusters_csv(const SegmentationResult& sr);

/// alpha,eps1,seed,E,n_clusters (seed is the clustering seed of the run)
std::string sweep_csv(const SweepResult& result);
/// alpha,eps1,mean_E,mean_n_clusters,runs,best
std::string summary_csv(const SweepResult& result);
/// cluster_id,x,y,weight for one run
std::string centers_csv(const SweepRun& run);

struct BenchRow {
  std::string method;
  std::size_t n = 0;
  std::size_t M = 0;
  std::size_t steps = 0;
  double seconds_per_step = 0.0;
};
/// method,n,M,steps,seconds_per_step
std::string bench_csv(const std::vector<BenchRow>& rows);

/// Rebuilds snapshots from a trajectory table: one ParticleSet per distinct t.
std::vector<ParticleSet> read_trajectory(const CsvTable& table, std::size_t d1, std::size_t d2);
MomentRecord read_moments(const CsvTable& table, std::size_t d1);

/// Positions (x*) and features (c*) from a table with columns x1.., c1..;
/// other columns are ignored.
ParticleSet particles_from_csv(const CsvTable& table);

}  // namespace bcc
