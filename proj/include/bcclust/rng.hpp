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

// Counter-based random streams. Every draw is a pure function of
// (seed, step, index, domain, draw number), so results do not depend on the
// number of workers or on the order in which particles are processed.

#pragma once

#include <array>
#include <cstdint>

namespace bcc {

/// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) noexcept;

/// Separates independent uses of the same seed.
enum class StreamDomain : std::uint32_t {
  mfi_sampling = 0x4d46u,
  initial_data = 0x494eu,
  noise = 0x4e4fu,
};

class RngStream {
 public:
  /// `step` and `index` must fit in 32 bits.
  RngStream(std::uint64_t seed, std::uint64_t step, std::uint64_t index,
            StreamDomain domain) noexcept;

  std::uint32_t next_u32() noexcept {
    if (used_ == 4) refill();
    return block_[used_++];
  }
  std::uint64_t next_u64() noexcept;

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() noexcept;
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [0, bound); bound must be > 0. Unbiased (Lemire).
  std::uint64_t below(std::uint64_t bound) noexcept {
    if (bound <= 0xffffffffull) return below32(static_cast<std::uint32_t>(bound));
    return below64(bound);
  }

  /// Standard normal via Box-Muller; the second variate is cached.
  double normal() noexcept;

 private:
  void refill() noexcept;
  std::uint64_t below64(std::uint64_t bound) noexcept;

  std::uint32_t below32(std::uint32_t bound) noexcept {
    std::uint64_t m = static_cast<std::uint64_t>(next_u32()) * bound;
    auto low = static_cast<std::uint32_t>(m);
    if (low < bound) {
      const std::uint32_t threshold = (0u - bound) % bound;
      while (low < threshold) {
        m = static_cast<std::uint64_t>(next_u32()) * bound;
        low = static_cast<std::uint32_t>(m);
      }
    }
    return static_cast<std::uint32_t>(m >> 32);
  }

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_;
  std::array<std::uint32_t, 4> block_{};
  unsigned used_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// splitmix64 finalizer; used to derive child seeds from a master seed.
std::uint64_t mix64(std::uint64_t x) noexcept;

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0,
                          std::uint64_t c = 0) noexcept;

}  // namespace bcc
