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

#include "bcclust/shapes.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "bcclust/error.hpp"
#include "bcclust/rng.hpp"

namespace bcc {

double Segment::length() const { return std::hypot(x1 - x0, y1 - y0); }

std::vector<Segment> letter_a_segments() {
  return {{0.1, 0.1, 0.5, 0.9}, {0.9, 0.1, 0.5, 0.9}, {0.3, 0.5, 0.7, 0.5}};
}

Pattern sample_pattern(std::vector<Segment> segments, std::size_t n) {
  const std::size_t m = segments.size();
  if (m == 0) throw ConfigError("pattern has no segments");
  if (n < m) throw ConfigError("need at least one point per segment: n=" + std::to_string(n) +
                               " < " + std::to_string(m));
  // One point per segment up front, the rest by largest remainder.
  double total = 0.0;
  for (const Segment& s : segments) total += s.length();
  std::vector<std::size_t> count(m, 1);
  const std::size_t spare = n - m;
  std::vector<double> remainder(m, 0.0);
  std::size_t given = 0;
  for (std::size_t s = 0; s < m; ++s) {
    const double share = total > 0.0 ? spare * segments[s].length() / total
                                     : static_cast<double>(spare) / static_cast<double>(m);
    const auto whole = static_cast<std::size_t>(std::floor(share));
    count[s] += whole;
    given += whole;
    remainder[s] = share - static_cast<double>(whole);
  }
  std::vector<std::size_t> by_remainder(m);
  std::iota(by_remainder.begin(), by_remainder.end(), std::size_t{0});
  std::stable_sort(by_remainder.begin(), by_remainder.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t k = 0; given < spare; ++k, ++given) ++count[by_remainder[k % m]];

  Pattern p;
  p.points.reserve(2 * n);
  for (std::size_t s = 0; s < m; ++s) {
    const Segment& g = segments[s];
    for (std::size_t j = 0; j < count[s]; ++j) {
      const double t = count[s] == 1 ? 0.0
                                     : static_cast<double>(j) / static_cast<double>(count[s] - 1);
      p.points.push_back(g.x0 + t * (g.x1 - g.x0));
      p.points.push_back(g.y0 + t * (g.y1 - g.y0));
    }
  }
  p.segments = std::move(segments);
  return p;
}

std::vector<Segment> parse_segments(std::string_view text) {
  std::vector<Segment> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream fields(line);
    Segment s;
    std::string extra;
    if (!(fields >> s.x0 >> s.y0 >> s.x1 >> s.y1) || (fields >> extra))
      throw ConfigError("pattern line " + std::to_string(line_no) + ": expected \"x0 y0 x1 y1\"");
    out.push_back(s);
  }
  if (out.empty()) throw ConfigError("pattern file has no segments");
  return out;
}

std::vector<Segment> load_segments(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open pattern file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_segments(buf.str());
}

NoiseKind parse_noise_kind(std::string_view name) {
  if (name == "uniform") return NoiseKind::uniform;
  if (name == "gaussian") return NoiseKind::gaussian;
  throw ConfigError("unknown noise kind: " + std::string(name));
}

std::string_view to_string(NoiseKind kind) {
  return kind == NoiseKind::uniform ? "uniform" : "gaussian";
}

std::vector<double> perturb(const Pattern& pattern, const NoiseSpec& noise) {
  if (!(noise.alpha > 0.0)) throw ConfigError("noise alpha must be > 0");
  constexpr int kMaxAttempts = 100000;
  std::vector<double> out(pattern.points.size());
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    RngStream rng(noise.seed, 0, i, StreamDomain::noise);
    const double x = pattern.points[2 * i], y = pattern.points[2 * i + 1];
    int attempt = 0;
    for (;; ++attempt) {
      if (attempt == kMaxAttempts)
        throw ConfigError("noise keeps pushing point " + std::to_string(i) + " out of [0,1]^2");
      double tx, ty;
      if (noise.kind == NoiseKind::uniform) {
        tx = rng.uniform(-1.0, 1.0);
        ty = rng.uniform(-1.0, 1.0);
      } else {
        tx = rng.normal();
        ty = rng.normal();
      }
      const double px = x + noise.alpha * tx, py = y + noise.alpha * ty;
      if (px >= 0.0 && px <= 1.0 && py >= 0.0 && py <= 1.0) {
        out[2 * i] = px;
        out[2 * i + 1] = py;
        break;
      }
    }
  }
  return out;
}

double error_measure(const std::vector<std::vector<double>>& centers, const Pattern& pattern) {
  if (centers.empty()) throw ConfigError("error measure needs at least one cluster");
  if (pattern.size() == 0) throw ConfigError("error measure needs a non-empty pattern");
  double sum = 0.0;
  for (const auto& c : centers) {
    if (c.size() != 2) throw DimensionError("cluster centers must be two-dimensional");
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pattern.size(); ++i)
      best = std::min(best, std::hypot(c[0] - pattern.points[2 * i], c[1] - pattern.points[2 * i + 1]));
    sum += best;
  }
  return sum / static_cast<double>(centers.size());
}

double error_measure(const ClusterSet& cs, const Pattern& pattern) {
  std::vector<std::vector<double>> centers;
  for (const Cluster& c : cs.clusters) centers.push_back(c.center);
  return error_measure(centers, pattern);
}

std::uint64_t sweep_noise_seed(std::uint64_t master, std::size_t alpha_index, std::size_t run) {
  return derive_seed(master, 1, alpha_index, run);
}

std::uint64_t sweep_mfi_seed(std::uint64_t master, std::size_t alpha_index, std::size_t eps_index,
                             std::size_t run) {
  return derive_seed(derive_seed(master, 2, alpha_index), eps_index, run);
}

SweepResult sweep(const Pattern& pattern, const SweepConfig& cfg) {
  if (cfg.alphas.empty()) throw ConfigError("alpha list is empty");
  if (cfg.eps1_values.empty()) throw ConfigError("eps1 list is empty");
  if (cfg.runs == 0) throw ConfigError("runs must be >= 1");
  SweepResult result;
  for (std::size_t a = 0; a < cfg.alphas.size(); ++a) {
    std::vector<std::vector<double>> noisy(cfg.runs);
    for (std::size_t r = 0; r < cfg.runs; ++r)
      noisy[r] = perturb(pattern, {cfg.alphas[a], cfg.noise, sweep_noise_seed(cfg.seed, a, r)});
    for (std::size_t e = 0; e < cfg.eps1_values.size(); ++e) {
      InteractionSpec spec;
      spec.eps1 = cfg.eps1_values[e];
      spec.eps2 = 0.0;
      spec.sigma_mode = cfg.mode;
      SweepCell cell{cfg.alphas[a], cfg.eps1_values[e], 0.0, 0.0, cfg.runs, false};
      for (std::size_t r = 0; r < cfg.runs; ++r) {
        const ParticleSet ps0(2, 0, noisy[r], {});
        MfiConfig mfi = cfg.mfi;
        mfi.seed = sweep_mfi_seed(cfg.seed, a, e, r);
        const Trajectory tr = mfi_simulate(ps0, spec, mfi);
        const double tol = cfg.merge_tol > 0.0 ? cfg.merge_tol : default_merge_tol(ps0);
        const ClusterSet cs = extract_clusters(tr.final_state, tol, spec);

        SweepRun run{a, e, r, cfg.alphas[a], cfg.eps1_values[e], sweep_noise_seed(cfg.seed, a, r),
                     mfi.seed, 0.0, 0, {}, {}};
        for (const Cluster& c : cs.clusters) {
          if (c.weight < cfg.min_weight) continue;
          run.centers.push_back(c.center);
          run.weights.push_back(c.weight);
        }
        if (run.centers.empty())
          for (const Cluster& c : cs.clusters) {
            run.centers.push_back(c.center);
            run.weights.push_back(c.weight);
          }
        run.n_clusters = run.centers.size();
        run.error = error_measure(run.centers, pattern);
        cell.mean_error += run.error;
        cell.mean_clusters += static_cast<double>(run.n_clusters);
        result.runs.push_back(std::move(run));
      }
      cell.mean_error /= static_cast<double>(cfg.runs);
      cell.mean_clusters /= static_cast<double>(cfg.runs);
      result.cells.push_back(cell);
    }
    const auto first = result.cells.end() - static_cast<std::ptrdiff_t>(cfg.eps1_values.size());
    std::min_element(first, result.cells.end(), [](const SweepCell& x, const SweepCell& y) {
      return x.mean_error < y.mean_error;
    })->best = true;
  }
  return result;
}

}  // namespace bcc
