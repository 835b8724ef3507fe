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

#include "bcclust/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <filesystem>
#include <functional>
#include <string>

#include "bcclust/dynamics.hpp"
#include "bcclust/format.hpp"
#include "bcclust/imageseg.hpp"
#include "bcclust/initial.hpp"
#include "bcclust/mfi.hpp"
#include "bcclust/parallel.hpp"
#include "bcclust/shapes.hpp"

namespace bcc {

namespace {

namespace fs = std::filesystem;

/// Invalid command-line or config input; maps to exit code 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view text, const char* what) {
  T v{};
  const std::string_view s = trim(text);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ConfigError(std::string("invalid ") + what + " '" + std::string(text) + "'");
  return v;
}

template <typename T>
std::vector<T> parse_list(std::string_view text, const char* what) {
  std::vector<T> out;
  if (trim(text).empty()) throw ConfigError(std::string("empty ") + what + " list");
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = text.find(',', pos);
    out.push_back(parse_number<T>(text.substr(pos, comma == std::string_view::npos ? text.npos : comma - pos), what));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

bool needs_quotes(const std::string& v) {
  return v.empty() || v.find_first_of(" \t#\"") != std::string::npos;
}

/// Every option of `cmd` except help, config and out-dir, with the value it
/// resolved to.
ConfigEntries resolved_options(const CLI::App& cmd) {
  ConfigEntries out;
  for (const CLI::Option* opt : cmd.get_options()) {
    const std::string name = opt->get_single_name();
    if (name == "help" || name == "config" || name == "out-dir") continue;
    std::string value;
    if (opt->count() > 0) value = opt->results().back();
    else value = opt->get_default_str();
    if (value.empty()) continue;
    out.emplace_back(name, value);
  }
  return out;
}

void write_manifest(const CLI::App& cmd, const fs::path& dir,
                    const std::vector<std::pair<std::string, std::string>>& info) {
  std::string text = "# bcclust " + cmd.get_name() + "\n";
  text += "# rerun: bcclust " + cmd.get_name() + " --config manifest.txt --out-dir <dir>\n";
  for (const auto& [k, v] : info) text += "# " + k + ": " + v + "\n";
  for (const auto& [k, v] : resolved_options(cmd))
    text += k + " = " + (needs_quotes(v) ? "\"" + v + "\"" : v) + "\n";
  write_file_atomic((dir / "manifest.txt").string(), text);
}

fs::path prepare_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
  return fs::path(dir);
}

void write_to(const fs::path& dir, const std::string& name, const std::string& content) {
  write_file_atomic((dir / name).string(), content);
}

/// Runs `prepare` (parameter checks, exit 2 on failure) then `run` (exit 1
/// on failure).
int guarded(std::ostream& err, const std::function<void()>& prepare,
            const std::function<void()>& run) {
  try {
    prepare();
  } catch (const std::exception& e) {
    err << "bcclust: " << e.what() << "\n";
    return kExitUsage;
  }
  try {
    run();
  } catch (const std::exception& e) {
    err << "bcclust: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

/// Inserts the entries of a --config file right after the subcommand name,
/// so later command-line flags take precedence.
void expand_config(const CLI::App& app, std::vector<std::string>& args) {
  if (args.empty() || args[0].empty() || args[0][0] == '-') return;
  const CLI::App* cmd = nullptr;
  for (const CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; }))
    if (sub->get_name() == args[0]) cmd = sub;
  if (cmd == nullptr) return;

  std::string path;
  for (std::size_t k = 1; k < args.size(); ++k) {
    if (args[k] == "--config") {
      if (k + 1 >= args.size()) throw UsageError("--config needs a file argument");
      path = args[k + 1];
    } else if (args[k].rfind("--config=", 0) == 0) {
      path = args[k].substr(9);
    }
  }
  if (path.empty()) return;

  std::string text;
  try {
    text = read_file(path);
  } catch (const IoError& e) {
    throw UsageError(e.what());
  }
  ConfigEntries entries;
  try {
    entries = parse_config(text);
  } catch (const ConfigError& e) {
    throw UsageError(path + ": " + e.what());
  }
  std::vector<std::string> injected;
  for (const auto& [key, value] : entries) {
    if (key == "config" || key == "help" || cmd->get_option_no_throw("--" + key) == nullptr)
      throw UsageError(path + ": unknown key '" + key + "' for " + cmd->get_name());
    injected.push_back("--" + key + "=" + value);
  }
  args.insert(args.begin() + 1, injected.begin(), injected.end());
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateOptions {
  std::size_t n = 1000;
  std::size_t d1 = 1;
  std::string init = "uniform";
  std::string init_file;
  double feature_mean = 0.5;
  double feature_var = 0.3;
  double eps1 = 0.0;
  double eps2 = 0.0;
  std::string norm1 = "euclidean";
  std::string norm2 = "euclidean";
  std::string mode;
  std::string method = "mfi";
  std::size_t M = 10;
  double dt = 0.5;
  double t_final = 20.0;
  std::uint64_t seed = 0;
  double stop_tol = 1e-8;
  std::size_t record_every = 1;
  std::size_t check_every = 0;
  double rate_scale = 1.0;
  double merge_tol = 0.0;
  double min_weight = 0.01;
  std::size_t bins = 50;
  double density_lo = 0.0;
  double density_hi = 1.0;
  std::string out_dir;
  std::string config;
};

void add_simulate(CLI::App* cmd, SimulateOptions& o) {
  cmd->add_option("--n", o.n, "number of particles");
  cmd->add_option("--d1", o.d1, "position dimension");
  cmd->add_option("--init", o.init, "initial data")
      ->check(CLI::IsMember({"uniform", "gaussian-feature", "file"}));
  cmd->add_option("--init-file", o.init_file, "CSV with columns x1.. and optional c1.. (--init file)");
  cmd->add_option("--feature-mean", o.feature_mean, "mean of the gaussian feature");
  cmd->add_option("--feature-var", o.feature_var, "variance of the gaussian feature");
  cmd->add_option("--eps1", o.eps1, "position confidence level")->required();
  cmd->add_option("--eps2", o.eps2, "feature confidence level");
  cmd->add_option("--norm1", o.norm1, "position metric")
      ->check(CLI::IsMember({"euclidean", "max", "manhattan"}));
  cmd->add_option("--norm2", o.norm2, "feature metric")
      ->check(CLI::IsMember({"euclidean", "max", "manhattan"}));
  cmd->add_option("--mode", o.mode, "weight normalization")
      ->required()
      ->check(CLI::IsMember({"symmetric", "stochastic"}));
  cmd->add_option("--method", o.method, "integrator")->check(CLI::IsMember({"euler", "mfi"}));
  cmd->add_option("--M", o.M, "MFI subset size");
  cmd->add_option("--dt", o.dt, "time step");
  cmd->add_option("--t-final", o.t_final, "final time");
  cmd->add_option("--seed", o.seed, "seed for initial data and sampling");
  cmd->add_option("--stop-tol", o.stop_tol, "stop when the largest displacement drops below this");
  cmd->add_option("--record-every", o.record_every, "snapshot stride in steps");
  cmd->add_option("--check-every", o.check_every,
                  "steps between equilibrium checks of the significant clusters (0 = off)");
  cmd->add_option("--rate-scale", o.rate_scale, "MFI rate multiplier in (0, 1]");
  cmd->add_option("--merge-tol", o.merge_tol, "cluster merge distance (0 = 1e-3 x domain diameter)");
  cmd->add_option("--min-weight", o.min_weight, "smallest reported cluster weight");
  cmd->add_option("--bins", o.bins, "density histogram bins per axis");
  cmd->add_option("--density-lo", o.density_lo, "density histogram lower edge");
  cmd->add_option("--density-hi", o.density_hi, "density histogram upper edge");
  cmd->add_option("--out-dir", o.out_dir, "output directory")->required();
  cmd->add_option("--config", o.config, "key = value config file");
}

int cmd_simulate(const CLI::App& cmd, const SimulateOptions& o, std::ostream& out,
                 std::ostream& err) {
  InteractionSpec spec;
  IntegratorConfig ic;
  MfiConfig mc;
  const bool use_mfi = o.method == "mfi";
  auto prepare = [&] {
    spec.eps1 = o.eps1;
    spec.eps2 = o.eps2;
    spec.norm1 = parse_metric(o.norm1);
    spec.norm2 = parse_metric(o.norm2);
    spec.sigma_mode = parse_sigma_mode(o.mode);
    spec.validate();
    ic = IntegratorConfig{o.dt, o.t_final, o.stop_tol, o.record_every, o.check_every};
    ic.validate();
    mc = MfiConfig{o.M, o.dt, o.t_final, o.seed, o.stop_tol, o.record_every, o.check_every, o.rate_scale};
    if (o.init == "file") {
      if (o.init_file.empty()) throw ConfigError("--init file needs --init-file");
    } else {
      if (o.n == 0) throw ConfigError("--n must be positive");
      if (o.d1 == 0) throw ConfigError("--d1 must be positive");
      if (use_mfi) mc.validate(o.n);
    }
    if (!(o.min_weight >= 0.0 && o.min_weight <= 1.0)) throw ConfigError("--min-weight must lie in [0, 1]");
    if (o.merge_tol < 0.0) throw ConfigError("--merge-tol must be >= 0");
    if (o.bins == 0) throw ConfigError("--bins must be positive");
  };
  auto run = [&] {
    const ParticleSet ps0 = o.init == "uniform" ? uniform_positions(o.n, o.d1, o.seed)
                            : o.init == "gaussian-feature"
                                ? uniform_with_gaussian_feature(o.n, o.d1, o.seed, o.feature_mean, o.feature_var)
                                : particles_from_csv(read_csv(o.init_file));
    if (use_mfi) mc.validate(ps0.size());
    const double tol = o.merge_tol > 0.0 ? o.merge_tol : default_merge_tol(ps0, spec.norm1);
    StationarityTest stationary;
    if (o.check_every > 0) {
      const EquilibriumRule rule{tol, o.min_weight, 0.9};
      stationary = [rule, spec](const ParticleSet& ps) { return rule(ps, spec); };
    }
    const fs::path dir = prepare_out_dir(o.out_dir);
    const Trajectory tr = use_mfi ? mfi_simulate(ps0, spec, mc, stationary)
                                  : simulate(ps0, spec, ic, stationary);
    const ClusterSet all = extract_clusters(tr.final_state, tol, spec);
    const ClusterSet shown = o.min_weight > 0.0 ? significant_clusters(all, o.min_weight) : all;
    const SteadyStateReport report = verify_steady_state(shown, spec);

    write_to(dir, "trajectory.csv", trajectory_csv(tr));
    write_to(dir, "moments.csv", moments_csv(tr.moments));
    write_to(dir, "clusters.csv", clusters_csv(shown));
    write_to(dir, "steady_state.csv", steady_state_csv(report));
    if (ps0.d1() <= 2) {
      const DensityGrid grid{o.bins, o.density_lo, o.density_hi};
      write_to(dir, "density.csv", density_csv(tr, grid));
      write_to(dir, "density.dat", density_gnuplot(tr, grid));
    }
    write_manifest(cmd, dir,
                   {{"particles", std::to_string(ps0.size())},
                    {"steps", std::to_string(tr.steps)},
                    {"termination", tr.termination_reason},
                    {"merge_tol", format_double(tol)}});
    out << "clusters: " << shown.size() << " with weight >= " << format_double(o.min_weight) << " ("
        << all.size() << " in total)\n";
    for (std::size_t c = 0; c < shown.size(); ++c) {
      out << "  " << c << ": weight " << format_double(shown.clusters[c].weight) << ", center";
      for (double v : shown.clusters[c].center) out << " " << format_double(v);
      out << "\n";
    }
    out << "steady state: "
        << (report.stationary() ? "verified"
                                : std::to_string(report.violations.size()) + " interacting cluster pairs")
        << "\n";
    out << "steps: " << tr.steps << " (" << tr.termination_reason << ")\n";
  };
  return guarded(err, prepare, run);
}

// ---------------------------------------------------------------------------
// shape

struct ShapeOptions {
  std::string pattern = "letterA";
  std::size_t n = 5000;
  std::string alpha_list;
  std::string eps1_list;
  std::string noise = "uniform";
  std::size_t runs = 10;
  std::uint64_t seed = 0;
  std::string mode;
  std::size_t M = 10;
  double dt = 0.5;
  double t_final = 50.0;
  double stop_tol = 1e-8;
  double min_weight = 0.01;
  double merge_tol = 0.0;
  std::string out_dir;
  std::string config;
};

void add_shape(CLI::App* cmd, ShapeOptions& o) {
  cmd->add_option("--pattern", o.pattern, "letterA or a segment file");
  cmd->add_option("--n", o.n, "number of pattern points");
  cmd->add_option("--alpha-list", o.alpha_list, "comma-separated noise amplitudes")->required();
  cmd->add_option("--eps1-list", o.eps1_list, "comma-separated confidence levels")->required();
  cmd->add_option("--noise", o.noise, "noise distribution")->check(CLI::IsMember({"uniform", "gaussian"}));
  cmd->add_option("--runs", o.runs, "runs per cell");
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--mode", o.mode, "weight normalization")
      ->required()
      ->check(CLI::IsMember({"symmetric", "stochastic"}));
  cmd->add_option("--M", o.M, "MFI subset size");
  cmd->add_option("--dt", o.dt, "time step");
  cmd->add_option("--t-final", o.t_final, "final time");
  cmd->add_option("--stop-tol", o.stop_tol, "stop when the largest displacement drops below this");
  cmd->add_option("--min-weight", o.min_weight, "smallest counted cluster weight");
  cmd->add_option("--merge-tol", o.merge_tol, "cluster merge distance (0 = 1e-3 x domain diameter)");
  cmd->add_option("--out-dir", o.out_dir, "output directory")->required();
  cmd->add_option("--config", o.config, "key = value config file");
}

int cmd_shape(const CLI::App& cmd, const ShapeOptions& o, std::ostream& out, std::ostream& err) {
  SweepConfig cfg;
  auto prepare = [&] {
    cfg.alphas = parse_real_list(o.alpha_list);
    cfg.eps1_values = parse_real_list(o.eps1_list);
    for (double a : cfg.alphas)
      if (!(a >= 0.0)) throw ConfigError("noise amplitudes must be >= 0");
    for (double e : cfg.eps1_values)
      if (!(e >= 0.0)) throw ConfigError("confidence levels must be >= 0");
    if (o.runs == 0) throw ConfigError("--runs must be positive");
    if (o.n == 0) throw ConfigError("--n must be positive");
    if (!(o.min_weight >= 0.0 && o.min_weight <= 1.0)) throw ConfigError("--min-weight must lie in [0, 1]");
    if (o.merge_tol < 0.0) throw ConfigError("--merge-tol must be >= 0");
    cfg.runs = o.runs;
    cfg.noise = parse_noise_kind(o.noise);
    cfg.seed = o.seed;
    cfg.mode = parse_sigma_mode(o.mode);
    cfg.min_weight = o.min_weight;
    cfg.merge_tol = o.merge_tol;
    cfg.mfi = MfiConfig{o.M, o.dt, o.t_final, 0, o.stop_tol, 1, 0, 1.0};
    cfg.mfi.record_every = cfg.mfi.integrator().step_count() + 1;
    cfg.mfi.validate(o.n);
  };
  auto run = [&] {
    const Pattern pattern = o.pattern == "letterA" ? generate_letter_a(o.n)
                                                   : sample_pattern(load_segments(o.pattern), o.n);
    const fs::path dir = prepare_out_dir(o.out_dir);
    const SweepResult result = sweep(pattern, cfg);
    write_to(dir, "sweep.csv", sweep_csv(result));
    write_to(dir, "summary.csv", summary_csv(result));
    const fs::path centers = prepare_out_dir((dir / "centers").string());
    for (const SweepRun& r : result.runs)
      write_to(centers,
               "a" + std::to_string(r.alpha_index) + "_e" + std::to_string(r.eps_index) + "_r" +
                   std::to_string(r.run) + ".csv",
               centers_csv(r));
    write_manifest(cmd, dir, {{"runs_total", std::to_string(result.runs.size())}});
    out << "alpha eps1 mean_E mean_clusters\n";
    for (const SweepCell& c : result.cells)
      out << format_double(c.alpha) << " " << format_double(c.eps1) << " "
          << format_double(c.mean_error) << " " << format_double(c.mean_clusters)
          << (c.best ? " best" : "") << "\n";
  };
  return guarded(err, prepare, run);
}

// ---------------------------------------------------------------------------
// segment

struct SegmentOptions {
  std::string input;
  double eps1 = 0.0;
  double eps2 = 0.0;
  std::string threshold;
  std::string method = "auto";
  std::string mode;
  std::size_t M = 10;
  double dt = 0.5;
  double t_final = 50.0;
  std::uint64_t seed = 0;
  double stop_tol = 1e-8;
  double merge_tol = 0.0;
  std::string format = "raw";
  std::string out_dir;
  std::string config;
};

void add_segment(CLI::App* cmd, SegmentOptions& o) {
  cmd->add_option("--input", o.input, "PGM image")->required();
  cmd->add_option("--eps1", o.eps1, "position confidence level")->required();
  cmd->add_option("--eps2", o.eps2, "intensity confidence level")->required();
  cmd->add_option("--threshold", o.threshold, "also write a binary image at this cutoff");
  cmd->add_option("--method", o.method, "integrator")->check(CLI::IsMember({"auto", "euler", "mfi"}));
  cmd->add_option("--mode", o.mode, "weight normalization")
      ->required()
      ->check(CLI::IsMember({"symmetric", "stochastic"}));
  cmd->add_option("--M", o.M, "MFI subset size");
  cmd->add_option("--dt", o.dt, "time step");
  cmd->add_option("--t-final", o.t_final, "final time");
  cmd->add_option("--seed", o.seed, "MFI seed");
  cmd->add_option("--stop-tol", o.stop_tol, "stop when the largest displacement drops below this");
  cmd->add_option("--merge-tol", o.merge_tol, "cluster merge distance (0 = 1e-3 x domain diameter)");
  cmd->add_option("--format", o.format, "output PGM flavor")->check(CLI::IsMember({"raw", "plain"}));
  cmd->add_option("--out-dir", o.out_dir, "output directory")->required();
  cmd->add_option("--config", o.config, "key = value config file");
}

int cmd_segment(const CLI::App& cmd, const SegmentOptions& o, std::ostream& out,
                std::ostream& err) {
  SegmentConfig cfg;
  bool binary = false;
  double theta = 0.0;
  const PgmFormat format = o.format == "plain" ? PgmFormat::plain : PgmFormat::raw;
  auto prepare = [&] {
    cfg.spec = InteractionSpec{o.eps1, o.eps2, Metric::euclidean, Metric::euclidean,
                               parse_sigma_mode(o.mode)};
    cfg.spec.validate();
    if (!(o.eps1 > 0.0 && o.eps2 > 0.0)) throw ConfigError("--eps1 and --eps2 must be positive");
    cfg.method = parse_segment_method(o.method);
    cfg.mfi = MfiConfig{o.M, o.dt, o.t_final, o.seed, o.stop_tol, 1, 0, 1.0};
    cfg.mfi.integrator().validate();
    if (o.M == 0) throw ConfigError("--M must be positive");
    if (o.merge_tol < 0.0) throw ConfigError("--merge-tol must be >= 0");
    cfg.merge_tol = o.merge_tol;
    if (!o.threshold.empty()) {
      binary = true;
      theta = parse_number<double>(o.threshold, "threshold");
      if (!(theta >= 0.0 && theta <= 1.0)) throw ConfigError("--threshold must lie in [0, 1]");
    }
  };
  auto run = [&] {
    const GrayImage img = load_grayscale(o.input);
    const fs::path dir = prepare_out_dir(o.out_dir);
    const SegmentationResult sr = segment(img, cfg);
    write_image(sr.output, (dir / "segmented.pgm").string(), format);
    if (binary) write_image(threshold(sr, theta), (dir / "binary.pgm").string(), format);
    write_to(dir, "labels.csv", labels_csv(sr));
    write_to(dir, "clusters.csv", segment_clusters_csv(sr));
    write_manifest(cmd, dir,
                   {{"method_used", std::string(to_string(sr.method_used))},
                    {"steps", std::to_string(sr.steps)},
                    {"termination", sr.termination_reason}});
    out << "clusters: " << sr.cluster_intensity.size() << "\n";
    for (std::size_t k = 0; k < sr.cluster_intensity.size(); ++k)
      out << "  " << k << ": " << sr.cluster_size[k] << " pixels, mean intensity "
          << format_double(sr.cluster_intensity[k]) << ", level "
          << quantize(sr.cluster_intensity[k], img.maxval) << "\n";
  };
  return guarded(err, prepare, run);
}

// ---------------------------------------------------------------------------
// bench

struct BenchOptions {
  std::string n_list;
  std::string M_list;
  std::size_t steps = 5;
  std::size_t repeats = 5;
  bool full = false;
  double eps1 = 0.15;
  std::string mode = "stochastic";
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  std::string out_dir;
  std::string config;
};

void add_bench(CLI::App* cmd, BenchOptions& o) {
  cmd->add_option("--n-list", o.n_list, "comma-separated particle counts")->required();
  cmd->add_option("--M-list", o.M_list, "comma-separated subset sizes")->required();
  cmd->add_option("--steps", o.steps, "steps per timing");
  cmd->add_option("--repeats", o.repeats, "timings per cell (the median is reported)");
  cmd->add_option("--full", o.full, "also time the full subset M = n - 1");
  cmd->add_option("--eps1", o.eps1, "position confidence level");
  cmd->add_option("--mode", o.mode, "weight normalization")
      ->check(CLI::IsMember({"symmetric", "stochastic"}));
  cmd->add_option("--seed", o.seed, "seed");
  cmd->add_option("--threads", o.threads, "worker threads (0 = BC_THREADS or all cores)");
  cmd->add_option("--out-dir", o.out_dir, "also write bench.csv and a manifest here");
  cmd->add_option("--config", o.config, "key = value config file");
}

int cmd_bench(const CLI::App& cmd, const BenchOptions& o, std::ostream& out, std::ostream& err) {
  BenchConfig cfg;
  auto prepare = [&] {
    cfg.n_list = parse_count_list(o.n_list);
    cfg.M_list = parse_count_list(o.M_list);
    if (o.steps == 0 || o.repeats == 0) throw ConfigError("--steps and --repeats must be positive");
    cfg.steps = o.steps;
    cfg.repeats = o.repeats;
    cfg.full = o.full;
    cfg.eps1 = o.eps1;
    cfg.mode = parse_sigma_mode(o.mode);
    cfg.seed = o.seed;
    cfg.threads = o.threads;
    for (std::size_t n : cfg.n_list) {
      if (n < 2) throw ConfigError("bench needs n >= 2");
      for (std::size_t M : cfg.M_list)
        if (M == 0 || M > n - 1)
          throw ConfigError("M = " + std::to_string(M) + " is outside [1, n - 1] for n = " +
                            std::to_string(n));
    }
  };
  auto run = [&] {
    const std::string csv = bench_csv(run_bench(cfg));
    out << csv;
    if (!o.out_dir.empty()) {
      const fs::path dir = prepare_out_dir(o.out_dir);
      write_to(dir, "bench.csv", csv);
      write_manifest(cmd, dir, {});
    }
  };
  return guarded(err, prepare, run);
}

}  // namespace

ConfigEntries parse_config(std::string_view text) {
  ConfigEntries out;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string_view key = trim(line.substr(0, eq));
    std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    if (!value.empty() && value.front() == '"') {
      const std::size_t close = value.find('"', 1);
      if (close == std::string_view::npos)
        throw ConfigError("line " + std::to_string(line_no) + ": unterminated quote");
      const std::string_view rest = trim(value.substr(close + 1));
      if (!rest.empty() && rest.front() != '#')
        throw ConfigError("line " + std::to_string(line_no) + ": text after quoted value");
      value = value.substr(1, close - 1);
    } else {
      for (std::size_t k = 1; k < value.size(); ++k)
        if (value[k] == '#' && (value[k - 1] == ' ' || value[k - 1] == '\t')) {
          value = trim(value.substr(0, k));
          break;
        }
    }
    out.emplace_back(std::string(key), std::string(value));
  }
  return out;
}

std::vector<double> parse_real_list(std::string_view text) {
  return parse_list<double>(text, "real");
}

std::vector<std::size_t> parse_count_list(std::string_view text) {
  return parse_list<std::size_t>(text, "count");
}

std::vector<BenchRow> run_bench(const BenchConfig& cfg) {
  struct WorkerGuard {
    explicit WorkerGuard(std::size_t w) { set_worker_count(w); }
    ~WorkerGuard() { set_worker_count(0); }
  } guard(cfg.threads);

  const InteractionSpec spec{cfg.eps1, 0.0, Metric::euclidean, Metric::euclidean, cfg.mode};
  struct Cell {
    std::size_t input;
    std::string method;
    MfiConfig mc;
    std::vector<double> samples;
  };
  std::vector<ParticleSet> inputs;
  std::vector<Cell> cells;
  for (const std::size_t n : cfg.n_list) {
    inputs.push_back(uniform_positions(n, 1, cfg.seed));
    auto add = [&](std::size_t M, const char* method) {
      MfiConfig mc;
      mc.M = M;
      mc.seed = cfg.seed;
      mc.validate(n);
      cells.push_back({inputs.size() - 1, method, mc, {}});
    };
    for (const std::size_t M : cfg.M_list) add(M, "mfi");
    if (cfg.full) add(n - 1, "mfi-full");
  }
  // Repeats are interleaved across cells so slow drifts in machine load
  // affect every cell alike.
  for (Cell& c : cells) (void)mfi_step(inputs[c.input], spec, c.mc, 0);
  for (std::size_t r = 0; r < cfg.repeats; ++r) {
    for (Cell& c : cells) {
      ParticleSet ps = inputs[c.input];
      const auto start = std::chrono::steady_clock::now();
      for (std::size_t k = 0; k < cfg.steps; ++k) ps = mfi_step(ps, spec, c.mc, k);
      const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
      c.samples.push_back(elapsed.count() / static_cast<double>(cfg.steps));
    }
  }
  std::vector<BenchRow> rows;
  for (Cell& c : cells) {
    std::sort(c.samples.begin(), c.samples.end());
    const std::size_t m = c.samples.size();
    const double median = m % 2 ? c.samples[m / 2] : 0.5 * (c.samples[m / 2 - 1] + c.samples[m / 2]);
    rows.push_back({c.method, inputs[c.input].size(), c.mc.M, cfg.steps, median});
  }
  return rows;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bounded-confidence clustering with static features", "bcclust"};
  app.option_defaults()->always_capture_default()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1, 1);

  SimulateOptions so;
  ShapeOptions sh;
  SegmentOptions se;
  BenchOptions bo;
  CLI::App* sim = app.add_subcommand("simulate", "integrate the particle system and extract clusters");
  CLI::App* shape = app.add_subcommand("shape", "shape detection error sweep");
  CLI::App* seg = app.add_subcommand("segment", "segment a grayscale PGM image");
  CLI::App* bench = app.add_subcommand("bench", "time MFI steps over an (n, M) grid");
  add_simulate(sim, so);
  add_shape(shape, sh);
  add_segment(seg, se);
  add_bench(bench, bo);

  try {
    std::vector<std::string> expanded = args;
    expand_config(app, expanded);
    std::vector<std::string> reversed(expanded.rbegin(), expanded.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  } catch (const UsageError& e) {
    err << "bcclust: " << e.what() << "\n";
    return kExitUsage;
  }

  if (sim->parsed()) return cmd_simulate(*sim, so, out, err);
  if (shape->parsed()) return cmd_shape(*shape, sh, out, err);
  if (seg->parsed()) return cmd_segment(*seg, se, out, err);
  return cmd_bench(*bench, bo, out, err);
}

}  // namespace bcc
