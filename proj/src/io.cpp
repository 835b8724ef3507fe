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

#include "bcclust/io.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>
#include <unistd.h>

#include "bcclust/format.hpp"

namespace bcc {

namespace {

std::string join(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t k = 0; k < fields.size(); ++k) {
    if (k) out.push_back(',');
    out += fields[k];
  }
  out.push_back('\n');
  return out;
}

std::string num(double v) { return format_double(v); }
std::string num(std::size_t v) { return std::to_string(v); }

void append_indexed(std::vector<std::string>& h, const char* prefix, std::size_t count) {
  for (std::size_t k = 1; k <= count; ++k) h.push_back(prefix + std::to_string(k));
}

double parse_double(std::string_view s, std::size_t row, std::size_t col) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ConfigError("row " + std::to_string(row + 1) + ", column " + std::to_string(col + 1) +
                      ": '" + std::string(s) + "' is not a number");
  return v;
}

std::size_t checked_bins(const DensityGrid& grid, std::size_t d1) {
  if (d1 != 1 && d1 != 2) throw DimensionError("density histograms need d1 = 1 or 2");
  if (grid.bins == 0) throw ConfigError("density histogram needs at least one bin");
  if (!(grid.hi > grid.lo)) throw ConfigError("density histogram needs hi > lo");
  return grid.bins;
}

std::size_t bin_of(double x, const DensityGrid& grid) {
  const double u = (x - grid.lo) / (grid.hi - grid.lo) * static_cast<double>(grid.bins);
  if (!(u > 0.0)) return 0;
  return std::min(grid.bins - 1, static_cast<std::size_t>(u));
}

/// Normalized counts: density[b] integrates to one over the grid.
std::vector<double> histogram(const Snapshot& s, std::size_t d1, const DensityGrid& grid) {
  const std::size_t bins = grid.bins;
  const std::size_t cells = d1 == 1 ? bins : bins * bins;
  std::vector<double> h(cells, 0.0);
  const std::size_t n = s.positions.size() / d1;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t b = bin_of(s.positions[i * d1], grid);
    if (d1 == 2) b = b * bins + bin_of(s.positions[i * d1 + 1], grid);
    h[b] += 1.0;
  }
  const double width = (grid.hi - grid.lo) / static_cast<double>(bins);
  const double volume = d1 == 1 ? width : width * width;
  for (double& v : h) v /= static_cast<double>(n) * volume;
  return h;
}

double edge(const DensityGrid& grid, std::size_t b) {
  return grid.lo + (grid.hi - grid.lo) * static_cast<double>(b) / static_cast<double>(grid.bins);
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error reading '" + path + "'");
  return ss.str();
}

void write_file_atomic(const std::string& path, std::string_view content) {
  static std::atomic<unsigned> counter{0};
  const std::string tmp = path + ".tmp." + std::to_string(::getpid()) + "." +
                          std::to_string(counter.fetch_add(1));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::remove(tmp.c_str());
      throw IoError("error writing '" + tmp + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::remove(tmp.c_str());
    throw IoError("cannot rename '" + tmp + "' to '" + path + "': " + ec.message());
  }
}

std::size_t CsvTable::column(std::string_view name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw ConfigError("CSV has no column '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - header.begin());
}

double CsvTable::number(std::size_t row, std::size_t col) const {
  return parse_double(rows.at(row).at(col), row, col);
}

CsvTable parse_csv(std::string_view text) {
  CsvTable table;
  std::size_t pos = 0;
  bool first = true;
  while (pos < text.size()) {
    const std::size_t start = pos;
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    pos = end + 1;
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t f = 0;
    while (true) {
      const std::size_t comma = line.find(',', f);
      fields.emplace_back(line.substr(f, comma == std::string_view::npos ? line.size() - f : comma - f));
      if (comma == std::string_view::npos) break;
      f = comma + 1;
    }
    if (first) {
      table.header = std::move(fields);
      first = false;
    } else {
      if (fields.size() != table.header.size())
        throw ParseError("row has " + std::to_string(fields.size()) + " fields, header has " +
                             std::to_string(table.header.size()),
                         start);
      table.rows.push_back(std::move(fields));
    }
  }
  if (first) throw ParseError("CSV has no header row", 0);
  return table;
}

CsvTable read_csv(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return parse_csv(text);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), e.offset());
  }
}

void expect_header(const CsvTable& table, const std::vector<std::string>& expected) {
  if (table.header != expected) {
    std::string got;
    for (const auto& h : table.header) got += (got.empty() ? "" : ",") + h;
    throw ParseError("unexpected CSV header '" + got + "'", 0);
  }
}

std::vector<std::string> trajectory_header(std::size_t d1, std::size_t d2) {
  std::vector<std::string> h{"t", "i"};
  append_indexed(h, "x", d1);
  append_indexed(h, "c", d2);
  return h;
}

std::vector<std::string> moments_header(std::size_t d1) {
  std::vector<std::string> h{"t"};
  append_indexed(h, "u", d1);
  for (std::size_t k = 1; k <= d1; ++k)
    for (std::size_t j = k; j <= d1; ++j) h.push_back("E" + std::to_string(k) + "_" + std::to_string(j));
  return h;
}

std::vector<std::string> clusters_header(std::size_t d1, std::size_t d2) {
  std::vector<std::string> h{"cluster_id", "weight", "size"};
  append_indexed(h, "center", d1);
  append_indexed(h, "feature_mean", d2);
  append_indexed(h, "feature_min", d2);
  append_indexed(h, "feature_max", d2);
  return h;
}

std::vector<std::string> steady_state_header() {
  return {"cluster_a", "cluster_b", "center_distance", "min_feature_gap"};
}

std::vector<std::string> density_header(std::size_t d1) {
  if (d1 == 1) return {"t", "x_lo", "x_hi", "density"};
  return {"t", "x_lo", "x_hi", "y_lo", "y_hi", "density"};
}

std::vector<std::string> labels_header() { return {"row", "col", "cluster_id"}; }
std::vector<std::string> segment_clusters_header() {
  return {"cluster_id", "size", "mean_intensity", "center_x", "center_y"};
}
std::vector<std::string> sweep_header() { return {"alpha", "eps1", "seed", "E", "n_clusters"}; }
std::vector<std::string> summary_header() {
  return {"alpha", "eps1", "mean_E", "mean_n_clusters", "runs", "best"};
}
std::vector<std::string> centers_header() { return {"cluster_id", "x", "y", "weight"}; }
std::vector<std::string> bench_header() { return {"method", "n", "M", "steps", "seconds_per_step"}; }

std::string trajectory_csv(const Trajectory& tr) {
  const ParticleSet& ps = tr.final_state;
  const std::size_t d1 = ps.d1();
  const std::size_t d2 = ps.d2();
  const std::size_t n = ps.size();
  std::string out = join(trajectory_header(d1, d2));
  std::vector<std::string> feat(n * d2);
  for (std::size_t k = 0; k < n * d2; ++k) feat[k] = num(ps.features()[k]);
  for (const Snapshot& s : tr.snapshots) {
    const std::string t = num(s.t);
    for (std::size_t i = 0; i < n; ++i) {
      out += t;
      out += ',';
      out += std::to_string(i);
      for (std::size_t k = 0; k < d1; ++k) {
        out += ',';
        out += num(s.positions[i * d1 + k]);
      }
      for (std::size_t k = 0; k < d2; ++k) {
        out += ',';
        out += feat[i * d2 + k];
      }
      out += '\n';
    }
  }
  return out;
}

std::string moments_csv(const MomentRecord& record) {
  const std::size_t d = record.dim;
  std::string out = join(moments_header(d));
  for (std::size_t s = 0; s < record.size(); ++s) {
    std::vector<std::string> row{num(record.times[s])};
    const Moments& m = record.samples[s];
    for (std::size_t k = 0; k < d; ++k) row.push_back(num(m.u[k]));
    for (std::size_t k = 0; k < d; ++k)
      for (std::size_t j = k; j < d; ++j) row.push_back(num(m.second(k, j)));
    out += join(row);
  }
  return out;
}

std::string clusters_csv(const ClusterSet& cs) {
  std::string out = join(clusters_header(cs.d1, cs.d2));
  for (std::size_t c = 0; c < cs.size(); ++c) {
    const Cluster& cl = cs.clusters[c];
    std::vector<std::string> row{num(c), num(cl.weight), num(cl.members.size())};
    for (double v : cl.center) row.push_back(num(v));
    for (double v : cl.feature_mean) row.push_back(num(v));
    for (double v : cl.feature_min) row.push_back(num(v));
    for (double v : cl.feature_max) row.push_back(num(v));
    out += join(row);
  }
  return out;
}

std::string steady_state_csv(const SteadyStateReport& report) {
  std::string out = join(steady_state_header());
  for (const auto& v : report.violations)
    out += join({num(v.a), num(v.b), num(v.center_distance), num(v.feature_gap)});
  return out;
}

std::string density_csv(const Trajectory& tr, const DensityGrid& grid) {
  const std::size_t d1 = tr.final_state.d1();
  const std::size_t bins = checked_bins(grid, d1);
  std::string out = join(density_header(d1));
  for (const Snapshot& s : tr.snapshots) {
    const auto h = histogram(s, d1, grid);
    const std::string t = num(s.t);
    for (std::size_t a = 0; a < bins; ++a) {
      if (d1 == 1) {
        out += join({t, num(edge(grid, a)), num(edge(grid, a + 1)), num(h[a])});
        continue;
      }
      for (std::size_t b = 0; b < bins; ++b)
        out += join({t, num(edge(grid, a)), num(edge(grid, a + 1)), num(edge(grid, b)),
                     num(edge(grid, b + 1)), num(h[a * bins + b])});
    }
  }
  return out;
}

std::string density_gnuplot(const Trajectory& tr, const DensityGrid& grid) {
  const std::size_t d1 = tr.final_state.d1();
  const std::size_t bins = checked_bins(grid, d1);
  std::string out;
  for (std::size_t si = 0; si < tr.snapshots.size(); ++si) {
    const Snapshot& s = tr.snapshots[si];
    if (si) out += "\n\n";
    out += "# t = " + num(s.t) + "\n";
    const auto h = histogram(s, d1, grid);
    for (std::size_t a = 0; a < bins; ++a) {
      const double xa = 0.5 * (edge(grid, a) + edge(grid, a + 1));
      if (d1 == 1) {
        out += num(xa) + " " + num(h[a]) + "\n";
        continue;
      }
      for (std::size_t b = 0; b < bins; ++b)
        out += num(xa) + " " + num(0.5 * (edge(grid, b) + edge(grid, b + 1))) + " " +
               num(h[a * bins + b]) + "\n";
      out += "\n";
    }
  }
  return out;
}

std::string labels_csv(const SegmentationResult& sr) {
  std::string out = join(labels_header());
  for (std::size_t r = 0; r < sr.height; ++r)
    for (std::size_t c = 0; c < sr.width; ++c)
      out += join({num(r), num(c), num(sr.labels[r * sr.width + c])});
  return out;
}

std::string segment_clusters_csv(const SegmentationResult& sr) {
  std::string out = join(segment_clusters_header());
  for (std::size_t k = 0; k < sr.cluster_intensity.size(); ++k)
    out += join({num(k), num(sr.cluster_size[k]), num(sr.cluster_intensity[k]),
                 num(sr.cluster_center[k][0]), num(sr.cluster_center[k][1])});
  return out;
}

std::string sweep_csv(const SweepResult& result) {
  std::string out = join(sweep_header());
  for (const SweepRun& r : result.runs)
    out += join({num(r.alpha), num(r.eps1), std::to_string(r.mfi_seed), num(r.error),
                 num(r.n_clusters)});
  return out;
}

std::string summary_csv(const SweepResult& result) {
  std::string out = join(summary_header());
  for (const SweepCell& c : result.cells)
    out += join({num(c.alpha), num(c.eps1), num(c.mean_error), num(c.mean_clusters), num(c.runs),
                 c.best ? "1" : "0"});
  return out;
}

std::string centers_csv(const SweepRun& run) {
  std::string out = join(centers_header());
  for (std::size_t k = 0; k < run.centers.size(); ++k)
    out += join({num(k), num(run.centers[k][0]), num(run.centers[k][1]), num(run.weights[k])});
  return out;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::string out = join(bench_header());
  for (const BenchRow& r : rows)
    out += join({r.method, num(r.n), num(r.M), num(r.steps), num(r.seconds_per_step)});
  return out;
}

std::vector<ParticleSet> read_trajectory(const CsvTable& table, std::size_t d1, std::size_t d2) {
  expect_header(table, trajectory_header(d1, d2));
  std::vector<ParticleSet> out;
  std::size_t row = 0;
  while (row < table.size()) {
    const double t = table.number(row, 0);
    std::vector<double> pos;
    std::vector<double> feat;
    std::size_t i = 0;
    while (row < table.size() && table.number(row, 0) == t) {
      if (table.number(row, 1) != static_cast<double>(i))
        throw ConfigError("trajectory rows out of order at row " + std::to_string(row + 1));
      for (std::size_t k = 0; k < d1; ++k) pos.push_back(table.number(row, 2 + k));
      for (std::size_t k = 0; k < d2; ++k) feat.push_back(table.number(row, 2 + d1 + k));
      ++row;
      ++i;
    }
    out.emplace_back(d1, d2, std::move(pos), std::move(feat), t);
  }
  return out;
}

MomentRecord read_moments(const CsvTable& table, std::size_t d1) {
  expect_header(table, moments_header(d1));
  MomentRecord rec;
  for (std::size_t r = 0; r < table.size(); ++r) {
    Moments m{d1, std::vector<double>(d1), std::vector<double>(d1 * d1)};
    std::size_t col = 1;
    for (std::size_t k = 0; k < d1; ++k) m.u[k] = table.number(r, col++);
    for (std::size_t k = 0; k < d1; ++k)
      for (std::size_t j = k; j < d1; ++j) {
        m.E[k * d1 + j] = table.number(r, col++);
        m.E[j * d1 + k] = m.E[k * d1 + j];
      }
    rec.append(table.number(r, 0), std::move(m));
  }
  return rec;
}

ParticleSet particles_from_csv(const CsvTable& table) {
  std::vector<std::size_t> xs;
  std::vector<std::size_t> cs;
  for (std::size_t k = 1;; ++k) {
    const auto it = std::find(table.header.begin(), table.header.end(), "x" + std::to_string(k));
    if (it == table.header.end()) break;
    xs.push_back(static_cast<std::size_t>(it - table.header.begin()));
  }
  for (std::size_t k = 1;; ++k) {
    const auto it = std::find(table.header.begin(), table.header.end(), "c" + std::to_string(k));
    if (it == table.header.end()) break;
    cs.push_back(static_cast<std::size_t>(it - table.header.begin()));
  }
  if (xs.empty()) throw ConfigError("particle file needs columns x1, x2, ...");
  if (table.size() == 0) throw ConfigError("particle file has no rows");
  std::vector<double> pos;
  std::vector<double> feat;
  pos.reserve(table.size() * xs.size());
  feat.reserve(table.size() * cs.size());
  for (std::size_t r = 0; r < table.size(); ++r) {
    for (std::size_t c : xs) pos.push_back(table.number(r, c));
    for (std::size_t c : cs) feat.push_back(table.number(r, c));
  }
  return ParticleSet(xs.size(), cs.size(), std::move(pos), std::move(feat));
}

}  // namespace bcc
