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

#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

#include "bcclust/parallel.hpp"
#include "bcclust/rng.hpp"

using namespace bcc;

TEST_CASE("philox4x32-10 known answers") {
  using A4 = std::array<std::uint32_t, 4>;
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are pure functions of their key") {
  RngStream a(7, 3, 11, StreamDomain::mfi_sampling);
  RngStream b(7, 3, 11, StreamDomain::mfi_sampling);
  for (int k = 0; k < 100; ++k) CHECK(a.next_u32() == b.next_u32());
  RngStream c(7, 3, 12, StreamDomain::mfi_sampling);
  RngStream d(7, 3, 11, StreamDomain::noise);
  RngStream e(7, 3, 11, StreamDomain::mfi_sampling);
  const auto first = e.next_u64();
  CHECK(c.next_u64() != first);
  CHECK(d.next_u64() != first);
}

TEST_CASE("uniform01 moments") {
  RngStream rng(1, 0, 0, StreamDomain::noise);
  const int n = 200000;
  double s = 0.0, s2 = 0.0;
  for (int k = 0; k < n; ++k) {
    const double u = rng.uniform01();
    CHECK_UNARY(u >= 0.0);
    CHECK_UNARY(u < 1.0);
    s += u;
    s2 += u * u;
  }
  CHECK(s / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(s2 / n == doctest::Approx(1.0 / 3.0).epsilon(0.01));
}

TEST_CASE("below is in range and roughly uniform") {
  RngStream rng(2, 0, 0, StreamDomain::noise);
  std::vector<int> counts(7, 0);
  for (int k = 0; k < 70000; ++k) {
    const auto v = rng.below(7);
    REQUIRE(v < 7);
    ++counts[v];
  }
  for (int c : counts) CHECK(std::abs(c - 10000) < 500);
}

TEST_CASE("normal moments") {
  RngStream rng(3, 0, 0, StreamDomain::noise);
  const int n = 200000;
  double s = 0.0, s2 = 0.0;
  for (int k = 0; k < n; ++k) {
    const double z = rng.normal();
    s += z;
    s2 += z * z;
  }
  CHECK(std::abs(s / n) < 0.01);
  CHECK(s2 / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("derived seeds differ across children") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t a = 0; a < 20; ++a)
    for (std::uint64_t b = 0; b < 20; ++b) seen.insert(derive_seed(42, a, b));
  CHECK(seen.size() == 400);
  CHECK(derive_seed(42, 1, 2) == derive_seed(42, 1, 2));
}

TEST_CASE("parallel_for covers the range exactly once") {
  for (std::size_t workers : {1, 2, 3, 8}) {
    set_worker_count(workers);
    CHECK(worker_count() == workers);
    std::vector<int> hits(10007, 0);
    parallel_for(hits.size(), [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) ++hits[i];
    }, 16);
    for (int h : hits) CHECK(h == 1);
  }
  set_worker_count(0);
}

TEST_CASE("parallel_for rethrows worker exceptions") {
  set_worker_count(4);
  CHECK_THROWS_AS(parallel_for(1000, [](std::size_t b, std::size_t) {
    if (b > 0) throw std::runtime_error("boom");
  }, 10), std::runtime_error);
  set_worker_count(0);
}
