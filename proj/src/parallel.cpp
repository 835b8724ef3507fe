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

#include "bcclust/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace bcc {

namespace {

std::atomic<std::size_t> g_override{0};

std::size_t env_workers() {
  const char* value = std::getenv("BC_THREADS");
  if (value == nullptr || *value == '\0') return 0;
  try {
    return static_cast<std::size_t>(std::stoul(value));
  } catch (const std::exception&) {
    return 0;
  }
}

}  // namespace

std::size_t worker_count() {
  if (const std::size_t forced = g_override.load(); forced != 0) return forced;
  if (const std::size_t env = env_workers(); env != 0) return env;
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

void set_worker_count(std::size_t workers) { g_override.store(workers); }

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t min_chunk) {
  if (n == 0) return;
  const std::size_t max_by_size = std::max<std::size_t>(1, n / std::max<std::size_t>(1, min_chunk));
  const std::size_t workers = std::min(worker_count(), max_by_size);
  if (workers <= 1) {
    body(0, n);
    return;
  }

  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> threads;
  threads.reserve(workers - 1);
  const std::size_t chunk = (n + workers - 1) / workers;
  auto run = [&](std::size_t begin, std::size_t end) {
    try {
      body(begin, end);
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };
  for (std::size_t w = 1; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    if (begin >= n) break;
    threads.emplace_back(run, begin, std::min(n, begin + chunk));
  }
  run(0, std::min(n, chunk));
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace bcc
