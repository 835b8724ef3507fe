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

#include "bcclust/mfi.hpp"

#include <algorithm>
#include <string>

#include "bcclust/format.hpp"
#include "bcclust/parallel.hpp"

namespace bcc {

namespace {

// Floyd's algorithm over the n - 1 indices other than i. Membership is
// tracked with generation stamps so a draw costs O(M) regardless of n.
class SubsetSampler {
 public:
  explicit SubsetSampler(std::size_t n) : stamp_(n, 0) {}

  /// Calls visit(j) for each of the M sampled indices, in draw order.
  template <typename Visit>
  void draw(RngStream& rng, std::size_t i, std::size_t M, Visit&& visit) {
    const std::size_t universe = stamp_.size() - 1;
    if (++generation_ == 0) {
      std::fill(stamp_.begin(), stamp_.end(), 0);
      generation_ = 1;
    }
    for (std::size_t j = universe - M; j < universe; ++j) {
      auto t = static_cast<std::size_t>(rng.below(j + 1));
      if (stamp_[t] == generation_) t = j;
      stamp_[t] = generation_;
      visit(t < i ? t : t + 1);
    }
  }

 private:
  std::vector<std::uint32_t> stamp_;
  std::uint32_t generation_ = 0;
};

void check_subset_size(std::size_t n, std::size_t M) {
  if (M < 1 || n < 2 || M > n - 1)
    throw ConfigError("subset size M=" + std::to_string(M) + " must lie in [1, n-1] with n=" +
                      std::to_string(n));
}

}  // namespace

void MfiConfig::validate(std::size_t n) const {
  check_subset_size(n, M);
  if (!(rate_scale > 0.0 && rate_scale <= 1.0)) throw ConfigError("rate_scale must lie in (0, 1]");
  integrator().validate();
}

IntegratorConfig MfiConfig::integrator() const {
  IntegratorConfig cfg;
  cfg.dt = dt;
  cfg.t_final = t_final;
  cfg.stop_tol = stop_tol;
  cfg.record_every = record_every;
  cfg.check_every = check_every;
  return cfg;
}

std::vector<std::size_t> sample_subset(RngStream& rng, std::size_t n, std::size_t i,
                                       std::size_t M) {
  check_subset_size(n, M);
  if (i >= n) throw IndexError("particle index " + std::to_string(i) + " out of range");
  SubsetSampler sampler(n);
  std::vector<std::size_t> out;
  sampler.draw(rng, i, M, [&](std::size_t j) { out.push_back(j); });
  return out;
}

namespace {

/// Updates particles [begin, end). D1 and D2 fix the dimensions at compile
/// time when nonzero; zero means "use the runtime value".
template <std::size_t D1, std::size_t D2>
void mfi_range(const ParticleSet& ps, const InteractionSpec& spec, const MfiConfig& cfg,
               std::uint64_t k, std::size_t begin, std::size_t end, std::vector<double>& next) {
  const std::size_t n = ps.size();
  const std::size_t d = D1 ? D1 : ps.d1();
  const std::size_t d2 = D2 ? D2 : ps.d2();
  const double* x = ps.positions().data();
  const double* feat = d2 ? ps.features().data() : nullptr;
  const bool symmetric = spec.sigma_mode == SigmaMode::symmetric;
  SubsetSampler sampler(n);
  std::vector<double> acc(d);
  for (std::size_t i = begin; i < end; ++i) {
    RngStream rng = mfi_stream(cfg.seed, k, i);
    std::fill(acc.begin(), acc.end(), 0.0);
    const std::span<const double> xi(x + i * d, d);
    const std::span<const double> ci(feat ? feat + i * d2 : nullptr, d2);
    std::size_t hits = 0;
    // Branch-free accumulation: the hit pattern is unpredictable, and adding
    // an exact zero leaves the sums unchanged.
    sampler.draw(rng, i, cfg.M, [&](std::size_t j) {
      const std::span<const double> xj(x + j * d, d);
      int hit = chi(spec.eps1, distance_unchecked(xi, xj, spec.norm1));
      if (d2 != 0) hit &= chi(spec.eps2, distance_unchecked(ci, {feat + j * d2, d2}, spec.norm2));
      hits += static_cast<std::size_t>(hit);
      const double w = hit;
      for (std::size_t c = 0; c < d; ++c) acc[c] += w * xj[c];
    });
    if (hits == 0) continue;
    const double abar = symmetric ? static_cast<double>(hits) / static_cast<double>(cfg.M) : 1.0;
    const double a = cfg.dt * cfg.rate_scale * abar;
    for (std::size_t c = 0; c < d; ++c) {
      const double xbar = acc[c] / static_cast<double>(hits);
      next[i * d + c] = xi[c] * (1.0 - a) + a * xbar;
    }
  }
}

}  // namespace

ParticleSet mfi_step(const ParticleSet& ps, const InteractionSpec& spec, const MfiConfig& cfg,
                     std::uint64_t k) {
  cfg.validate(ps.size());
  spec.validate();
  std::vector<double> next(ps.positions().begin(), ps.positions().end());
  const std::size_t d1 = ps.d1(), d2 = ps.d2();
  parallel_for(ps.size(), [&](std::size_t begin, std::size_t end) {
    if (d1 == 1 && d2 == 0) mfi_range<1, 0>(ps, spec, cfg, k, begin, end, next);
    else if (d1 == 1 && d2 == 1) mfi_range<1, 1>(ps, spec, cfg, k, begin, end, next);
    else if (d1 == 2 && d2 == 0) mfi_range<2, 0>(ps, spec, cfg, k, begin, end, next);
    else if (d1 == 2 && d2 == 1) mfi_range<2, 1>(ps, spec, cfg, k, begin, end, next);
    else mfi_range<0, 0>(ps, spec, cfg, k, begin, end, next);
  }, 256);
  return ps.advanced(std::move(next), ps.time() + cfg.dt);
}

Trajectory mfi_simulate(const ParticleSet& ps0, const InteractionSpec& spec,
                        const MfiConfig& cfg, const StationarityTest& stationary) {
  cfg.validate(ps0.size());
  spec.validate();
  Trajectory tr = integrate(
      ps0, cfg.integrator(),
      [&](const ParticleSet& ps, std::uint64_t k) { return mfi_step(ps, spec, cfg, k); },
      spec.norm1, stationary);
  tr.metadata = {{"method", "mfi"},
                 {"seed", std::to_string(cfg.seed)},
                 {"M", std::to_string(cfg.M)},
                 {"dt", format_double(cfg.dt)},
                 {"mode", std::string(to_string(spec.sigma_mode))},
                 {"rate_scale", format_double(cfg.rate_scale)}};
  return tr;
}

}  // namespace bcc
