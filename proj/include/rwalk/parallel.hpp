// Copyright 2026 The rwalk Authors
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

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace rwalk {

/// Number of worker threads used by ensemble and kernel loops.
inline unsigned worker_count() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

/// Runs body(b) for every block b in [0, nblocks). Blocks are independent, so
/// the outcome does not depend on the thread count.
inline void parallel_blocks(std::size_t nblocks, const std::function<void(std::size_t)>& body) {
  const std::size_t nthreads = std::min<std::size_t>(worker_count(), nblocks);
  if (nthreads <= 1) {
    for (std::size_t b = 0; b < nblocks; ++b) body(b);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(nthreads);
  for (std::size_t t = 0; t < nthreads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t b = t; b < nblocks; b += nthreads) body(b);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// Deterministic map-reduce over sample indices [0, n).
///
/// Samples are grouped into fixed blocks of `block_size`; each block folds its
/// samples in index order into a fresh accumulator, and the block results are
/// merged in block order. Merging therefore never depends on scheduling. Blocks
/// run in waves of one block per worker so only a few accumulators are alive.
template <class Acc, class MakeAcc, class Fold, class Merge>
Acc deterministic_reduce(std::uint64_t n, std::uint64_t block_size, MakeAcc make, Fold fold,
                         Merge merge) {
  if (block_size == 0) block_size = 1;
  const std::uint64_t nblocks = (n + block_size - 1) / block_size;
  const std::uint64_t wave = worker_count();
  Acc total = make();
  for (std::uint64_t first = 0; first < nblocks; first += wave) {
    const std::size_t count = static_cast<std::size_t>(std::min(wave, nblocks - first));
    std::vector<Acc> partial;
    partial.reserve(count);
    for (std::size_t b = 0; b < count; ++b) partial.push_back(make());
    parallel_blocks(count, [&](std::size_t b) {
      const std::uint64_t lo = (first + b) * block_size;
      const std::uint64_t hi = std::min<std::uint64_t>(n, lo + block_size);
      for (std::uint64_t i = lo; i < hi; ++i) fold(partial[b], i);
    });
    for (auto& p : partial) merge(total, p);
  }
  return total;
}

}  // namespace rwalk
