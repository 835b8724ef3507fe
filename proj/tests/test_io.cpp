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

#include <filesystem>
#include <string>

#include "bcclust/initial.hpp"
#include "bcclust/io.hpp"
#include "bcclust/mfi.hpp"

using namespace bcc;

namespace {

std::string tmp_path(const std::string& name) {
  std::filesystem::create_directories(BCC_TEST_TMP);
  return std::string(BCC_TEST_TMP) + "/" + name;
}

Trajectory small_run(std::size_t d1, std::size_t d2) {
  const ParticleSet ps = d2 ? uniform_with_gaussian_feature(40, d1, 3) : uniform_positions(40, d1, 3);
  MfiConfig cfg;
  cfg.t_final = 2.0;
  cfg.seed = 1;
  return mfi_simulate(ps, InteractionSpec{0.3, 0.2}, cfg);
}

}  // namespace

TEST_CASE("atomic writes replace files and leave no temporaries") {
  const std::string path = tmp_path("atomic.txt");
  write_file_atomic(path, "first");
  write_file_atomic(path, "second");
  CHECK(read_file(path) == "second");
  for (const auto& entry : std::filesystem::directory_iterator(BCC_TEST_TMP))
    CHECK(entry.path().filename().string().find(".tmp.") == std::string::npos);
  CHECK_THROWS_AS(write_file_atomic("/nonexistent/dir/file.txt", "x"), IoError);
  CHECK_THROWS_AS(read_file("/nonexistent/file.txt"), IoError);
}

TEST_CASE("csv parsing") {
  const CsvTable t = parse_csv("a,b\n1,2\r\n\n3,4.5\n");
  CHECK(t.header == std::vector<std::string>{"a", "b"});
  CHECK(t.size() == 2);
  CHECK(t.number(1, t.column("b")) == 4.5);
  CHECK_THROWS_AS(t.column("c"), ConfigError);
  CHECK_THROWS_AS(parse_csv("a,b\n1\n"), ParseError);
  CHECK_THROWS_AS(parse_csv(""), ParseError);
  CHECK_THROWS_AS(parse_csv("a\nx\n").number(0, 0), ConfigError);
}

TEST_CASE("trajectory and moments round trip exactly") {
  for (std::size_t d1 : {1, 2, 3}) {
    for (std::size_t d2 : {0, 1}) {
      const Trajectory tr = small_run(d1, d2);
      const auto snaps = read_trajectory(parse_csv(trajectory_csv(tr)), d1, d2);
      REQUIRE(snaps.size() == tr.snapshots.size());
      for (std::size_t s = 0; s < snaps.size(); ++s) {
        CHECK(snaps[s].time() == tr.snapshots[s].t);
        CHECK(std::vector<double>(snaps[s].positions().begin(), snaps[s].positions().end()) ==
              tr.snapshots[s].positions);
        CHECK(std::vector<double>(snaps[s].features().begin(), snaps[s].features().end()) ==
              std::vector<double>(tr.final_state.features().begin(), tr.final_state.features().end()));
      }
      const MomentRecord m = read_moments(parse_csv(moments_csv(tr.moments)), d1);
      CHECK(m.times == tr.moments.times);
      for (std::size_t s = 0; s < m.size(); ++s) {
        CHECK(m.samples[s].u == tr.moments.samples[s].u);
        CHECK(m.samples[s].E == tr.moments.samples[s].E);
      }
      CHECK_THROWS_AS(read_moments(parse_csv(moments_csv(tr.moments)), d1 + 1), ParseError);
    }
  }
}

TEST_CASE("every table parses back with its header") {
  const Trajectory tr = small_run(2, 1);
  const InteractionSpec spec{0.3, 0.2};
  const ClusterSet cs = extract_clusters(tr.final_state, 1e-3, spec);
  const CsvTable clusters = parse_csv(clusters_csv(cs));
  expect_header(clusters, clusters_header(2, 1));
  CHECK(clusters.size() == cs.size());
  for (std::size_t c = 0; c < cs.size(); ++c) {
    CHECK(clusters.number(c, clusters.column("weight")) == cs.clusters[c].weight);
    CHECK(clusters.number(c, clusters.column("center2")) == cs.clusters[c].center[1]);
  }
  expect_header(parse_csv(steady_state_csv(verify_steady_state(cs, spec))), steady_state_header());

  const DensityGrid grid{10, 0.0, 1.0};
  const CsvTable density = parse_csv(density_csv(tr, grid));
  expect_header(density, density_header(2));
  CHECK(density.size() == tr.snapshots.size() * 100);
  double mass = 0.0;
  for (std::size_t r = 0; r < 100; ++r) mass += density.number(r, 5) * 0.01;
  CHECK(mass == doctest::Approx(1.0));
  CHECK_FALSE(density_gnuplot(tr, grid).empty());
  CHECK_THROWS_AS(density_csv(small_run(3, 0), grid), DimensionError);

  std::vector<BenchRow> rows{{"mfi", 100, 10, 5, 1.5e-4}};
  const CsvTable bench = parse_csv(bench_csv(rows));
  expect_header(bench, bench_header());
  CHECK(bench.number(0, 4) == 1.5e-4);
  CHECK_THROWS_AS(expect_header(bench, sweep_header()), ParseError);
}

TEST_CASE("1D density integrates to one") {
  const Trajectory tr = small_run(1, 0);
  const CsvTable t = parse_csv(density_csv(tr, DensityGrid{20, 0.0, 1.0}));
  expect_header(t, density_header(1));
  double mass = 0.0;
  for (std::size_t r = 0; r < 20; ++r) mass += t.number(r, 3) * (t.number(r, 2) - t.number(r, 1));
  CHECK(mass == doctest::Approx(1.0));
}

TEST_CASE("particles from csv") {
  const ParticleSet ps = particles_from_csv(parse_csv("id,x1,x2,c1\n0,0.1,0.2,0.5\n1,0.3,0.4,0.6\n"));
  CHECK(ps.size() == 2);
  CHECK(ps.d1() == 2);
  CHECK(ps.d2() == 1);
  CHECK(ps.position(1)[1] == 0.4);
  CHECK_THROWS_AS(particles_from_csv(parse_csv("c1\n0.5\n")), ConfigError);
}
