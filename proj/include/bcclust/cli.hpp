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

// Command-line front end: subcommands simulate, shape, segment and bench.
// Every option may also come from a `key = value` config file given with
// --config; flags on the command line override it. Each run writes
// manifest.txt into its output directory in the same format, so
// `bcclust <command> --config <out>/manifest.txt --out-dir <other>`
// reproduces the run.

#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bcclust/core_model.hpp"
#include "bcclust/io.hpp"

namespace bcc {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

using ConfigEntries = std::vector<std::pair<std::string, std::string>>;

/// `key = value` lines; blank lines and '#' comments are skipped, values may
/// be double-quoted. Throws ConfigError naming the line on malformed input.
ConfigEntries parse_config(std::string_view text);

/// Parses "a,b,c". Throws ConfigError on an empty list or a bad entry.
std::vector<double> parse_real_list(std::string_view text);
std::vector<std::size_t> parse_count_list(std::string_view text);

struct BenchConfig {
  std::vector<std::size_t> n_list;
  std::vector<std::size_t> M_list;
  std::size_t steps = 5;
  std::size_t repeats = 5;
  /// Adds one row per n with the full subset M = n - 1.
  bool full = false;
  double eps1 = 0.15;
  SigmaMode mode = SigmaMode::stochastic;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

/// Median wall-clock seconds per MFI step on 1D uniform data, for every
/// (n, M) in the grid.
std::vector<BenchRow> run_bench(const BenchConfig& cfg);

}  // namespace bcc
