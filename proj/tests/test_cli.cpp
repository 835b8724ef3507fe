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
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bcclust/cli.hpp"
#include "bcclust/imageseg.hpp"
#include "bcclust/io.hpp"

using namespace bcc;

namespace {

namespace fs = std::filesystem;

std::string tmp_dir(const std::string& name) {
  const fs::path p = fs::path(BCC_TEST_TMP) / "cli" / name;
  fs::remove_all(p);
  fs::create_directories(p.parent_path());
  return p.string();
}

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> simulate_args(const std::string& dir) {
  return {"simulate", "--n", "300", "--eps1", "0.2", "--mode", "stochastic", "--method", "mfi",
          "--M", "5", "--t-final", "5", "--seed", "3", "--bins", "10", "--out-dir", dir};
}

bool same_tree(const fs::path& a, const fs::path& b, bool skip_manifest) {
  std::set<std::string> names;
  for (const auto& e : fs::recursive_directory_iterator(a))
    if (e.is_regular_file()) names.insert(fs::relative(e.path(), a).string());
  for (const auto& e : fs::recursive_directory_iterator(b))
    if (e.is_regular_file()) names.insert(fs::relative(e.path(), b).string());
  for (const auto& n : names) {
    if (skip_manifest && n == "manifest.txt") continue;
    if (!fs::exists(a / n) || !fs::exists(b / n)) return false;
    if (read_file((a / n).string()) != read_file((b / n).string())) return false;
  }
  return !names.empty();
}

}  // namespace

TEST_CASE("config parsing") {
  const auto entries = parse_config("# comment\n\neps1 = 0.15\nmode=stochastic # trailing\nout = \"a b#c\"\n");
  REQUIRE(entries.size() == 3);
  CHECK(entries[0] == std::pair<std::string, std::string>{"eps1", "0.15"});
  CHECK(entries[1].second == "stochastic");
  CHECK(entries[2].second == "a b#c");
  CHECK_THROWS_AS(parse_config("novalue\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("k = \"open\n"), ConfigError);
  CHECK(parse_real_list("0.06,0.08, 0.1") == std::vector<double>{0.06, 0.08, 0.1});
  CHECK_THROWS_AS(parse_real_list(""), ConfigError);
  CHECK_THROWS_AS(parse_count_list("10,x"), ConfigError);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(cli({}).code == kExitUsage);
  CHECK(cli({"frobnicate"}).code == kExitUsage);
  CHECK(cli({"simulate", "--eps1", "0.1", "--out-dir", tmp_dir("u1")}).code == kExitUsage);  // no --mode
  auto args = simulate_args(tmp_dir("u2"));
  args.insert(args.end(), {"--dt", "2"});
  CHECK(cli(args).code == kExitUsage);
  args = simulate_args(tmp_dir("u3"));
  args.insert(args.end(), {"--M", "300"});
  CHECK(cli(args).code == kExitUsage);
  CHECK(cli({"shape", "--alpha-list", "0.1", "--eps1-list", "", "--mode", "stochastic", "--out-dir",
             tmp_dir("u4")}).code == kExitUsage);
  CHECK(cli({"simulate", "--help"}).code == kExitOk);
}

TEST_CASE("simulate writes parseable outputs and reruns from its manifest") {
  const std::string dir = tmp_dir("sim");
  const Run r = cli(simulate_args(dir));
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.find("clusters:") != std::string::npos);
  for (const char* f : {"trajectory.csv", "moments.csv", "clusters.csv", "steady_state.csv",
                        "density.csv", "density.dat", "manifest.txt"})
    CHECK(fs::exists(fs::path(dir) / f));
  const auto snaps = read_trajectory(read_csv(dir + "/trajectory.csv"), 1, 0);
  CHECK(snaps.size() == 11);
  read_moments(read_csv(dir + "/moments.csv"), 1);
  expect_header(read_csv(dir + "/clusters.csv"), clusters_header(1, 0));
  expect_header(read_csv(dir + "/steady_state.csv"), steady_state_header());
  expect_header(read_csv(dir + "/density.csv"), density_header(1));

  const std::string again = tmp_dir("sim_again");
  REQUIRE(cli({"simulate", "--config", dir + "/manifest.txt", "--out-dir", again}).code == kExitOk);
  CHECK(same_tree(dir, again, false));
}

TEST_CASE("flags override the config file") {
  const std::string cfg = tmp_dir("cfg") + ".txt";
  write_file_atomic(cfg, "n = 200\neps1 = 0.5\nmode = symmetric\nmethod = euler\nt-final = 2\n");
  const std::string dir = tmp_dir("cfg_run");
  REQUIRE(cli({"simulate", "--config", cfg, "--eps1", "0.05", "--out-dir", dir}).code == kExitOk);
  const std::string manifest = read_file(dir + "/manifest.txt");
  CHECK(manifest.find("eps1 = 0.05\n") != std::string::npos);
  CHECK(manifest.find("n = 200\n") != std::string::npos);
  CHECK(manifest.find("mode = symmetric\n") != std::string::npos);

  write_file_atomic(cfg, "bogus = 1\n");
  CHECK(cli({"simulate", "--config", cfg, "--eps1", "0.1", "--mode", "stochastic", "--out-dir", dir}).code ==
        kExitUsage);
}

TEST_CASE("simulate from a particle file with features") {
  const std::string input = tmp_dir("init") + ".csv";
  write_file_atomic(input, "x1,x2,c1\n0.1,0.1,0\n0.12,0.1,0\n0.9,0.9,1\n0.91,0.9,1\n0.5,0.5,0.5\n");
  const std::string dir = tmp_dir("init_run");
  const Run r = cli({"simulate", "--init", "file", "--init-file", input, "--eps1", "0.1", "--eps2", "0.1",
                     "--mode", "stochastic", "--method", "euler", "--min-weight", "0", "--out-dir", dir});
  REQUIRE(r.code == kExitOk);
  CHECK(read_csv(dir + "/clusters.csv").size() == 3);
  CHECK(cli({"simulate", "--init", "file", "--init-file", "/nonexistent.csv", "--eps1", "0.1", "--mode",
             "stochastic", "--out-dir", dir}).code == kExitFailure);
}

TEST_CASE("segment command on the quadrant image") {
  const std::string input = tmp_dir("quadrant") + ".pgm";
  write_image(make_quadrant_image(), input, PgmFormat::raw);
  const std::string dir = tmp_dir("seg");
  const Run r = cli({"segment", "--input", input, "--eps1", "0.5", "--eps2", "0.3", "--mode", "stochastic",
                     "--threshold", "0.5", "--out-dir", dir});
  REQUIRE(r.code == kExitOk);
  const GrayImage seg = load_grayscale(dir + "/segmented.pgm");
  std::set<std::uint32_t> levels;
  for (double v : seg.intensities) levels.insert(quantize(v, 255));
  CHECK(levels == std::set<std::uint32_t>{32, 223});
  const GrayImage bin = load_grayscale(dir + "/binary.pgm");
  CHECK(bin.at(0, 0) == 1.0);
  CHECK(bin.at(0, 63) == 0.0);
  expect_header(read_csv(dir + "/labels.csv"), labels_header());
  CHECK(read_csv(dir + "/labels.csv").size() == 4096);
  expect_header(read_csv(dir + "/clusters.csv"), segment_clusters_header());

  const Run missing = cli({"segment", "--input", "/no/such/image.pgm", "--eps1", "0.5", "--eps2", "0.3",
                           "--mode", "stochastic", "--out-dir", dir});
  CHECK(missing.code == kExitFailure);
  CHECK(missing.err.find("/no/such/image.pgm") != std::string::npos);

  const std::string broken = tmp_dir("broken") + ".pgm";
  write_file_atomic(broken, "P2\n2 2\n255\n1 2 3\n");
  const Run bad = cli({"segment", "--input", broken, "--eps1", "0.5", "--eps2", "0.3", "--mode",
                       "stochastic", "--out-dir", dir});
  CHECK(bad.code == kExitFailure);
  CHECK(bad.err.find(broken) != std::string::npos);
  CHECK(bad.err.find("byte offset") != std::string::npos);
}

TEST_CASE("shape command is deterministic") {
  const std::vector<std::string> base{"shape", "--n", "300", "--alpha-list", "0.1", "--eps1-list",
                                      "0.08,0.1", "--runs", "2", "--t-final", "10", "--seed", "4",
                                      "--mode", "stochastic", "--out-dir"};
  auto a = base;
  a.push_back(tmp_dir("shape_a"));
  auto b = base;
  b.push_back(tmp_dir("shape_b"));
  REQUIRE(cli(a).code == kExitOk);
  REQUIRE(cli(b).code == kExitOk);
  CHECK(same_tree(a.back(), b.back(), false));
  expect_header(read_csv(a.back() + "/sweep.csv"), sweep_header());
  const CsvTable summary = read_csv(a.back() + "/summary.csv");
  expect_header(summary, summary_header());
  CHECK(summary.size() == 2);
  expect_header(read_csv(a.back() + "/centers/a0_e1_r1.csv"), centers_header());
}

TEST_CASE("bench command") {
  const std::string dir = tmp_dir("bench");
  const Run r = cli({"bench", "--n-list", "500,1000", "--M-list", "5", "--steps", "2", "--repeats", "1",
                     "--full", "1", "--out-dir", dir});
  REQUIRE(r.code == kExitOk);
  const CsvTable t = read_csv(dir + "/bench.csv");
  expect_header(t, bench_header());
  CHECK(t.size() == 4);
  CHECK(t.rows[1][0] == "mfi-full");
  CHECK(t.number(1, 2) == 499.0);
  CHECK(cli({"bench", "--n-list", "5", "--M-list", "5"}).code == kExitUsage);
}
