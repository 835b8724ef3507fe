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

#include "bcclust/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <unordered_map>

#include "bcclust/format.hpp"
#include "bcclust/parallel.hpp"
#include "bcclust/union_find.hpp"

namespace bcc {

namespace {

// A bounding-box diameter at most eps * kGlobalMargin guarantees that every
// computed pairwise distance is <= eps despite rounding.
constexpr double kGlobalMargin = 1.0 - 1e-12;

// Lexicographic order on (position, feature). Ties are identical particles,
// so summing neighbors in this order makes a step equivariant under any
// relabeling of the particles, bit for bit.
std::vector<std::size_t> canonical_order(const ParticleSet& ps) {
  std::vector<std::size_t> order(ps.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&ps](std::size_t a, std::size_t b) {
    const auto xa = ps.position(a), xb = ps.position(b);
    for (std::size_t k = 0; k < xa.size(); ++k)
      if (xa[k] != xb[k]) return xa[k] < xb[k];
    const auto ca = ps.feature(a), cb = ps.feature(b);
    for (std::size_t k = 0; k < ca.size(); ++k)
      if (ca[k] != cb[k]) return ca[k] < cb[k];
    return false;
  });
  return order;
}

inline void two_sum(double a, double b, double& s, double& e) noexcept {
  s = a + b;
  const double bb = s - a;
  e = (a - (s - bb)) + (b - bb);
}

double sigma_of(const InteractionSpec& spec, std::size_t n, std::size_t count) {
  return spec.sigma_mode == SigmaMode::symmetric ? static_cast<double>(n)
                                                 : static_cast<double>(count);
}

// Every pair interacts: sum_j (x_j - x_i) = n (mean - x_i).
void global_update(const ParticleSet& ps, const InteractionSpec& spec, double dt,
                   const std::vector<std::size_t>& order, std::vector<double>& next) {
  const std::size_t n = ps.size(), d = ps.d1();
  // Deviations from the first particle, so identical positions stay fixed.
  const auto ref = ps.position(order.front());
  std::vector<double> mean(d, 0.0);
  for (std::size_t j : order) {
    const auto x = ps.position(j);
    for (std::size_t k = 0; k < d; ++k) mean[k] += x[k] - ref[k];
  }
  for (std::size_t k = 0; k < d; ++k) mean[k] = ref[k] + mean[k] / static_cast<double>(n);
  const double rate = dt * static_cast<double>(n) / sigma_of(spec, n, n);
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto x = ps.position(i);
      for (std::size_t k = 0; k < d; ++k) next[i * d + k] = x[k] + rate * (mean[k] - x[k]);
    }
  });
}

// d1 == 1 with a vacuous feature gate: neighborhoods are contiguous ranges of
// the sorted positions, summed with compensated prefix sums.
void sorted_line_update(const ParticleSet& ps, const InteractionSpec& spec, double dt,
                        const std::vector<std::size_t>& order, std::vector<double>& next) {
  const std::size_t n = ps.size();
  std::vector<double> v(n);
  std::vector<std::size_t> rank(n);
  for (std::size_t r = 0; r < n; ++r) {
    v[r] = ps.position(order[r])[0];
    rank[order[r]] = r;
  }
  std::vector<double> hi(n + 1, 0.0), lo(n + 1, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    double s, e;
    two_sum(hi[r], v[r], s, e);
    const double low = lo[r] + e;
    hi[r + 1] = s + low;
    lo[r + 1] = low - (hi[r + 1] - s);
  }
  const double eps = spec.eps1;
  const Metric metric = spec.norm1;
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const double xi = ps.position(i)[0];
      const std::size_t r = rank[i];
      auto dist = [&](double y) {
        return distance_unchecked(std::span<const double>(&xi, 1),
                                  std::span<const double>(&y, 1), metric);
      };
      const auto first = std::partition_point(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(r),
                                              [&](double y) { return dist(y) > eps; });
      const auto last = std::partition_point(v.begin() + static_cast<std::ptrdiff_t>(r), v.end(),
                                             [&](double y) { return dist(y) <= eps; });
      const auto a = static_cast<std::size_t>(first - v.begin());
      const auto b = static_cast<std::size_t>(last - v.begin());
      const auto count = static_cast<double>(b - a);
      double diff, diff_err;
      two_sum(hi[b], -hi[a], diff, diff_err);
      const double product = count * xi;
      const double product_err = std::fma(count, xi, -product);
      const double acc = (diff - product) + (diff_err + (lo[b] - lo[a]) - product_err);
      next[i] = xi + dt * acc / sigma_of(spec, n, b - a);
    }
  });
}

void pairwise_update(const ParticleSet& ps, const InteractionSpec& spec, double dt,
                     const std::vector<std::size_t>& order, std::vector<double>& next) {
  const std::size_t n = ps.size(), d = ps.d1();
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    std::vector<double> acc(d);
    for (std::size_t i = begin; i < end; ++i) {
      std::fill(acc.begin(), acc.end(), 0.0);
      std::size_t count = 0;
      const auto xi = ps.position(i);
      for (std::size_t j : order) {
        if (!interacts(ps, i, j, spec)) continue;
        ++count;
        const auto xj = ps.position(j);
        for (std::size_t k = 0; k < d; ++k) acc[k] += xj[k] - xi[k];
      }
      const double rate = dt / sigma_of(spec, n, count);
      for (std::size_t k = 0; k < d; ++k) next[i * d + k] = xi[k] + rate * acc[k];
    }
  }, 64);
}


struct CellKeyHash {
  std::size_t operator()(const std::vector<std::int64_t>& key) const noexcept {
    std::uint64_t h = 0x9E3779B97F4A7C15ull;
    for (std::int64_t k : key)
      h ^= static_cast<std::uint64_t>(k) + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

using CellMap = std::unordered_map<std::vector<std::int64_t>, std::vector<std::size_t>, CellKeyHash>;

// Cell list over the positions and, for a scalar feature, the feature axis.
// Cells are slightly wider than the confidence levels, so every neighbor of
// a particle sits in one of the 3^dims surrounding cells. Cells are filled in
// canonical order and visited in a fixed stencil order, so the summation
// order depends on the configuration only, never on particle labels.
bool grid_update(const ParticleSet& ps, const InteractionSpec& spec, double dt,
                 const std::vector<std::size_t>& order, std::vector<double>& next,
                 bool features_global) {
  const std::size_t n = ps.size(), d = ps.d1();
  const bool feature_axis = !features_global && ps.d2() == 1;
  const std::size_t dims = d + (feature_axis ? 1 : 0);
  if (dims > 3 || !(spec.eps1 > 0.0) || (feature_axis && !(spec.eps2 > 0.0))) return false;
  std::vector<double> side(dims, spec.eps1 * (1.0 + 1e-9));
  if (feature_axis) side[d] = spec.eps2 * (1.0 + 1e-9);

  auto coord = [&](std::size_t i, std::size_t k) {
    return k < d ? ps.position(i)[k] : ps.feature(i)[0];
  };
  for (std::size_t k = 0; k < dims; ++k) {
    double lo = coord(0, k), hi = lo;
    for (std::size_t i = 1; i < n; ++i) {
      lo = std::min(lo, coord(i, k));
      hi = std::max(hi, coord(i, k));
    }
    if (std::max(std::abs(lo), std::abs(hi)) / side[k] > 1e12) return false;
  }
  auto key_of = [&](std::size_t i) {
    std::vector<std::int64_t> key(dims);
    for (std::size_t k = 0; k < dims; ++k)
      key[k] = static_cast<std::int64_t>(std::floor(coord(i, k) / side[k]));
    return key;
  };

  CellMap cells;
  for (std::size_t j : order) cells[key_of(j)].push_back(j);

  std::size_t stencil = 1;
  for (std::size_t k = 0; k < dims; ++k) stencil *= 3;

  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    std::vector<double> acc(d);
    std::vector<std::int64_t> probe(dims);
    for (std::size_t i = begin; i < end; ++i) {
      const auto home = key_of(i);
      const auto xi = ps.position(i);
      std::fill(acc.begin(), acc.end(), 0.0);
      std::size_t count = 0;
      for (std::size_t s = 0; s < stencil; ++s) {
        std::size_t code = s;
        for (std::size_t k = 0; k < dims; ++k) {
          probe[k] = home[k] + static_cast<std::int64_t>(code % 3) - 1;
          code /= 3;
        }
        const auto it = cells.find(probe);
        if (it == cells.end()) continue;
        for (std::size_t j : it->second) {
          if (!interacts(ps, i, j, spec)) continue;
          ++count;
          const auto xj = ps.position(j);
          for (std::size_t k = 0; k < d; ++k) acc[k] += xj[k] - xi[k];
        }
      }
      const double rate = dt / sigma_of(spec, n, count);
      for (std::size_t k = 0; k < d; ++k) next[i * d + k] = xi[k] + rate * acc[k];
    }
  }, 64);
  return true;
}

}  // namespace

void IntegratorConfig::validate() const {
  if (!(dt > 0.0 && dt <= 1.0)) throw ConfigError("dt must lie in (0, 1], got " + std::to_string(dt));
  if (!(t_final >= dt)) throw ConfigError("t_final must be >= dt");
  if (!(stop_tol >= 0.0)) throw ConfigError("stop_tol must be >= 0");
  if (record_every == 0) throw ConfigError("record_every must be >= 1");
}

std::size_t IntegratorConfig::step_count() const {
  return static_cast<std::size_t>(std::ceil(t_final / dt - 1e-9));
}

ParticleSet euler_step(const ParticleSet& ps, const InteractionSpec& spec, double dt) {
  if (!(dt > 0.0 && dt <= 1.0)) throw ConfigError("dt must lie in (0, 1], got " + std::to_string(dt));
  spec.validate();
  std::vector<double> next(ps.positions().begin(), ps.positions().end());
  const auto order = canonical_order(ps);

  const bool features_global =
      ps.d2() == 0 || bounding_diameter(ps.features(), ps.d2(), spec.norm2) <= spec.eps2 * kGlobalMargin;
  const bool positions_global =
      bounding_diameter(ps.positions(), ps.d1(), spec.norm1) <= spec.eps1 * kGlobalMargin;

  if (features_global && positions_global) {
    global_update(ps, spec, dt, order, next);
  } else if (features_global && ps.d1() == 1) {
    sorted_line_update(ps, spec, dt, order, next);
  } else if (!grid_update(ps, spec, dt, order, next, features_global)) {
    pairwise_update(ps, spec, dt, order, next);
  }
  return ps.advanced(std::move(next), ps.time() + dt);
}

Trajectory integrate(const ParticleSet& ps0, const IntegratorConfig& cfg, const StepFunction& step,
                     Metric displacement_metric, const StationarityTest& stationary) {
  cfg.validate();
  Trajectory tr(ps0);
  auto record = [&tr](const ParticleSet& ps) {
    tr.snapshots.push_back({ps.time(), std::vector<double>(ps.positions().begin(), ps.positions().end())});
    tr.moments.append(ps.time(), moments_of(ps));
  };
  record(ps0);

  const std::size_t steps = cfg.step_count();
  tr.termination_reason = "horizon";
  for (std::size_t k = 0; k < steps; ++k) {
    ParticleSet next = step(tr.final_state, k);
    double displacement = 0.0;
    for (std::size_t i = 0; i < next.size(); ++i)
      displacement = std::max(displacement, distance_unchecked(next.position(i),
                                                               tr.final_state.position(i),
                                                               displacement_metric));
    tr.final_state = std::move(next);
    tr.steps = k + 1;
    const bool last = k + 1 == steps;
    const bool converged = displacement < cfg.stop_tol;
    const bool settled = !converged && stationary && cfg.check_every != 0 &&
                         tr.steps % cfg.check_every == 0 && stationary(tr.final_state);
    if (last || converged || settled || tr.steps % cfg.record_every == 0) record(tr.final_state);
    if (converged || settled) {
      tr.termination_reason = converged ? "converged" : "stationary";
      tr.terminated_early = !last;
      break;
    }
  }
  return tr;
}

Trajectory simulate(const ParticleSet& ps0, const InteractionSpec& spec,
                    const IntegratorConfig& cfg, const StationarityTest& stationary) {
  spec.validate();
  Trajectory tr = integrate(
      ps0, cfg,
      [&](const ParticleSet& ps, std::uint64_t) { return euler_step(ps, spec, cfg.dt); },
      spec.norm1, stationary);
  tr.metadata = {{"method", "euler"},
                 {"mode", std::string(to_string(spec.sigma_mode))},
                 {"dt", format_double(cfg.dt)}};
  return tr;
}

// ---------------------------------------------------------------------------
// Clusters

std::size_t ClusterSet::count_with_min_weight(double min_weight) const {
  return static_cast<std::size_t>(std::count_if(
      clusters.begin(), clusters.end(), [&](const Cluster& c) { return c.weight >= min_weight; }));
}

std::vector<std::size_t> ClusterSet::labels() const {
  std::vector<std::size_t> out(n, 0);
  for (std::size_t c = 0; c < clusters.size(); ++c)
    for (std::size_t i : clusters[c].members) out[i] = c;
  return out;
}

double default_merge_tol(const ParticleSet& ps, Metric metric) {
  return 1e-3 * bounding_diameter(ps.positions(), ps.d1(), metric);
}

namespace {

struct Cell {
  std::vector<std::size_t> members;
  std::vector<double> lo, hi;
};

bool feature_close(const ParticleSet& ps, std::size_t a, std::size_t b, const InteractionSpec& spec) {
  return chi(spec.eps2, distance_unchecked(ps.feature(a), ps.feature(b), spec.norm2));
}

bool linked(const ParticleSet& ps, std::size_t a, std::size_t b, double tol,
            const InteractionSpec& spec) {
  return chi(tol, distance_unchecked(ps.position(a), ps.position(b), spec.norm1)) &&
         feature_close(ps, a, b, spec);
}

void link_pairwise(const ParticleSet& ps, double tol, const InteractionSpec& spec, UnionFind& uf) {
  for (std::size_t i = 0; i < ps.size(); ++i)
    for (std::size_t j = i + 1; j < ps.size(); ++j)
      if (!uf.same(i, j) && linked(ps, i, j, tol, spec)) uf.unite(i, j);
}

// Grid with cells small enough that any two points sharing a cell are within
// tol, so only the feature gate has to be checked inside a cell.
bool link_with_grid(const ParticleSet& ps, double tol, const InteractionSpec& spec, UnionFind& uf) {
  const std::size_t d = ps.d1();
  if (d > 4 || !(tol > 0.0)) return false;
  double side = tol;
  if (spec.norm1 == Metric::euclidean) side = tol / std::sqrt(static_cast<double>(d));
  if (spec.norm1 == Metric::manhattan) side = tol / static_cast<double>(d);
  side *= 1.0 - 1e-9;
  const double extent = bounding_diameter(ps.positions(), d, Metric::max);
  const auto lowest = *std::min_element(ps.positions().begin(), ps.positions().end());
  const auto highest = *std::max_element(ps.positions().begin(), ps.positions().end());
  if (extent / side > 1e15 || std::abs(lowest) / side > 1e15 || std::abs(highest) / side > 1e15)
    return false;

  std::unordered_map<std::vector<std::int64_t>, Cell, CellKeyHash> cells;
  std::vector<std::int64_t> key(d);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const auto x = ps.position(i);
    for (std::size_t k = 0; k < d; ++k) key[k] = static_cast<std::int64_t>(std::floor(x[k] / side));
    Cell& cell = cells[key];
    if (cell.members.empty()) {
      cell.lo.assign(x.begin(), x.end());
      cell.hi.assign(x.begin(), x.end());
    }
    for (std::size_t k = 0; k < d; ++k) {
      cell.lo[k] = std::min(cell.lo[k], x[k]);
      cell.hi[k] = std::max(cell.hi[k], x[k]);
    }
    cell.members.push_back(i);
  }

  // Inside a cell.
  for (auto& [unused, cell] : cells) {
    auto& m = cell.members;
    if (ps.d2() == 0) {
      for (std::size_t a = 1; a < m.size(); ++a) uf.unite(m[0], m[a]);
    } else if (ps.d2() == 1) {
      std::vector<std::size_t> by_feature = m;
      std::sort(by_feature.begin(), by_feature.end(), [&](std::size_t a, std::size_t b) {
        return ps.feature(a)[0] < ps.feature(b)[0];
      });
      for (std::size_t a = 1; a < by_feature.size(); ++a)
        if (feature_close(ps, by_feature[a - 1], by_feature[a], spec))
          uf.unite(by_feature[a - 1], by_feature[a]);
    } else {
      for (std::size_t a = 0; a < m.size(); ++a)
        for (std::size_t b = a + 1; b < m.size(); ++b)
          if (!uf.same(m[a], m[b]) && feature_close(ps, m[a], m[b], spec)) uf.unite(m[a], m[b]);
    }
  }

  // Between cells: offsets in [-r, r]^d that are lexicographically positive.
  const auto reach = static_cast<std::int64_t>(std::ceil(tol / side));
  std::vector<std::vector<std::int64_t>> offsets;
  std::vector<std::int64_t> off(d, -reach);
  while (true) {
    const auto nz = std::find_if(off.begin(), off.end(), [](std::int64_t v) { return v != 0; });
    if (nz != off.end() && *nz > 0) offsets.push_back(off);
    std::size_t k = 0;
    while (k < d && off[k] == reach) off[k++] = -reach;
    if (k == d) break;
    ++off[k];
  }

  for (const auto& [cell_key, cell] : cells) {
    for (const auto& o : offsets) {
      for (std::size_t k = 0; k < d; ++k) key[k] = cell_key[k] + o[k];
      const auto it = cells.find(key);
      if (it == cells.end()) continue;
      const Cell& other = it->second;
      double gap = 0.0;
      for (std::size_t k = 0; k < d; ++k)
        gap = std::max({gap, other.lo[k] - cell.hi[k], cell.lo[k] - other.hi[k]});
      if (gap > tol) continue;
      const bool cells_connected = ps.d2() == 0;
      if (cells_connected && uf.same(cell.members[0], other.members[0])) continue;
      bool done = false;
      for (std::size_t a : cell.members) {
        for (std::size_t b : other.members) {
          if (uf.same(a, b)) {
            if (cells_connected) { done = true; break; }
            continue;
          }
          if (linked(ps, a, b, tol, spec)) {
            uf.unite(a, b);
            if (cells_connected) { done = true; break; }
          }
        }
        if (done) break;
      }
    }
  }
  return true;
}

}  // namespace

ClusterSet extract_clusters(const ParticleSet& ps, double merge_tol, const InteractionSpec& spec) {
  if (!(merge_tol > 0.0)) throw ConfigError("merge_tol must be > 0");
  spec.validate();
  const std::size_t n = ps.size(), d1 = ps.d1(), d2 = ps.d2();
  UnionFind uf(n);
  if (!link_with_grid(ps, merge_tol, spec, uf)) link_pairwise(ps, merge_tol, spec, uf);

  ClusterSet cs;
  cs.n = n;
  cs.d1 = d1;
  cs.d2 = d2;
  cs.features = ps.shared_features();
  std::vector<std::size_t> cluster_of_root(n, std::numeric_limits<std::size_t>::max());
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t root = uf.find(i);
    if (cluster_of_root[root] == std::numeric_limits<std::size_t>::max()) {
      cluster_of_root[root] = cs.clusters.size();
      cs.clusters.emplace_back();
    }
    cs.clusters[cluster_of_root[root]].members.push_back(i);
  }
  for (Cluster& c : cs.clusters) {
    c.center.assign(d1, 0.0);
    c.feature_mean.assign(d2, 0.0);
    c.feature_min.assign(d2, std::numeric_limits<double>::infinity());
    c.feature_max.assign(d2, -std::numeric_limits<double>::infinity());
    for (std::size_t i : c.members) {
      const auto x = ps.position(i);
      for (std::size_t k = 0; k < d1; ++k) c.center[k] += x[k];
      const auto f = ps.feature(i);
      for (std::size_t k = 0; k < d2; ++k) {
        c.feature_mean[k] += f[k];
        c.feature_min[k] = std::min(c.feature_min[k], f[k]);
        c.feature_max[k] = std::max(c.feature_max[k], f[k]);
      }
    }
    const auto size = static_cast<double>(c.members.size());
    for (double& v : c.center) v /= size;
    for (double& v : c.feature_mean) v /= size;
    c.weight = size / static_cast<double>(n);
  }
  return cs;
}

double cluster_feature_gap(const ClusterSet& cs, std::size_t a, std::size_t b, Metric metric) {
  if (cs.d2 == 0) return 0.0;
  const auto& fa = cs.clusters.at(a).members;
  const auto& fb = cs.clusters.at(b).members;
  const double* f = cs.features->data();
  const std::size_t d2 = cs.d2;
  if (d2 == 1) {
    std::vector<double> va, vb;
    va.reserve(fa.size());
    vb.reserve(fb.size());
    for (std::size_t i : fa) va.push_back(f[i]);
    for (std::size_t i : fb) vb.push_back(f[i]);
    std::sort(va.begin(), va.end());
    std::sort(vb.begin(), vb.end());
    double best = std::numeric_limits<double>::infinity();
    std::size_t i = 0, j = 0;
    while (i < va.size() && j < vb.size()) {
      best = std::min(best, std::abs(va[i] - vb[j]));
      if (va[i] < vb[j]) ++i; else ++j;
    }
    return best;
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i : fa)
    for (std::size_t j : fb)
      best = std::min(best, distance_unchecked({f + i * d2, d2}, {f + j * d2, d2}, metric));
  return best;
}

ClusterSet significant_clusters(const ClusterSet& cs, double min_weight) {
  ClusterSet out;
  out.n = cs.n;
  out.d1 = cs.d1;
  out.d2 = cs.d2;
  out.features = cs.features;
  for (const Cluster& c : cs.clusters)
    if (c.weight >= min_weight) out.clusters.push_back(c);
  return out;
}

SteadyStateReport verify_steady_state(const ClusterSet& cs, const InteractionSpec& spec) {
  spec.validate();
  SteadyStateReport report;
  for (std::size_t a = 0; a < cs.size(); ++a) {
    for (std::size_t b = a + 1; b < cs.size(); ++b) {
      const double cd = distance(cs.clusters[a].center, cs.clusters[b].center, spec.norm1);
      if (cd > spec.eps1) continue;
      const double gap = cluster_feature_gap(cs, a, b, spec.norm2);
      if (gap > spec.eps2) continue;
      report.violations.push_back({a, b, cd, gap});
    }
  }
  return report;
}

bool EquilibriumRule::operator()(const ParticleSet& ps, const InteractionSpec& spec) const {
  const ClusterSet sig = significant_clusters(extract_clusters(ps, merge_tol, spec), min_weight);
  double mass = 0.0;
  for (const Cluster& c : sig.clusters) mass += c.weight;
  return mass >= min_mass && verify_steady_state(sig, spec).stationary();
}

}  // namespace bcc
