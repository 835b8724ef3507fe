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

#include "bcclust/moments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bcc {

void MomentRecord::append(double t, Moments m) {
  if (samples.empty()) dim = m.dim;
  if (m.dim != dim) throw DimensionError("moment sample dimension changed");
  times.push_back(t);
  samples.push_back(std::move(m));
}

std::vector<double> first_moment(const ParticleSet& ps) {
  const std::size_t d = ps.d1();
  std::vector<double> u(d, 0.0);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const auto x = ps.position(i);
    for (std::size_t k = 0; k < d; ++k) u[k] += x[k];
  }
  for (double& v : u) v /= static_cast<double>(ps.size());
  return u;
}

std::vector<double> second_moment(const ParticleSet& ps) {
  const std::size_t d = ps.d1();
  std::vector<double> E(d * d, 0.0);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const auto x = ps.position(i);
    for (std::size_t k = 0; k < d; ++k)
      for (std::size_t j = k; j < d; ++j) E[k * d + j] += x[k] * x[j];
  }
  const auto n = static_cast<double>(ps.size());
  for (std::size_t k = 0; k < d; ++k) {
    for (std::size_t j = k; j < d; ++j) {
      E[k * d + j] /= n;
      E[j * d + k] = E[k * d + j];
    }
  }
  return E;
}

Moments moments_of(const ParticleSet& ps) {
  return Moments{ps.d1(), first_moment(ps), second_moment(ps)};
}

Moments analytic_global_moments(const Moments& initial, double t) {
  if (initial.u.size() != initial.dim || initial.E.size() != initial.dim * initial.dim)
    throw DimensionError("inconsistent moment dimensions");
  const double decay = std::exp(-2.0 * t);
  const double approach = -std::expm1(-2.0 * t);
  Moments out = initial;
  const std::size_t d = initial.dim;
  for (std::size_t k = 0; k < d; ++k) {
    for (std::size_t j = k; j < d; ++j) {
      const double v = initial.E[k * d + j] * decay + initial.u[k] * initial.u[j] * approach;
      out.E[k * d + j] = v;
      out.E[j * d + k] = v;
    }
  }
  return out;
}

MomentDriftReport moment_drift_report(const MomentRecord& record, double decay_tol) {
  if (record.size() < 2) throw ConfigError("moment drift report needs at least two samples");
  const std::size_t d = record.dim;
  const Moments& first = record.samples.front();
  MomentDriftReport report;
  report.max_mixed_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < record.size(); ++s) {
    const Moments& m = record.samples[s];
    for (std::size_t k = 0; k < d; ++k)
      report.max_first_moment_drift =
          std::max(report.max_first_moment_drift, std::abs(m.u[k] - first.u[k]));
    for (std::size_t k = 0; k < d; ++k) {
      for (std::size_t j = 0; j < d; ++j) {
        const double bound = 0.5 * (first.second(k, k) + first.second(j, j));
        const double value = std::abs(m.second(k, j));
        if (k != j) report.max_abs_mixed = std::max(report.max_abs_mixed, value);
        report.max_mixed_excess = std::max(report.max_mixed_excess, value - bound);
      }
    }
    if (s > 0) {
      const Moments& prev = record.samples[s - 1];
      for (std::size_t k = 0; k < d; ++k) {
        if (m.second(k, k) - prev.second(k, k) > decay_tol) {
          report.decay_violations.emplace_back(s - 1, s);
          break;
        }
      }
    }
  }
  report.mixed_bound_holds = report.max_mixed_excess <= 1e-12;
  return report;
}

}  // namespace bcc
