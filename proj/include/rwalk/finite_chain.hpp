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

// Finite Markov chains with exact rational transition matrices: Green partial
// sums, first-passage probabilities, and a checker for the equivalent
// characterisations of recurrence via return probabilities and visit counts.

#include "rational.hpp"

#include <cmath>
#include <cstddef>
#include <deque>
#include <istream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace rwalk {

class FiniteChain {
 public:
  /// Row-major n x n matrix. Throws std::invalid_argument unless every entry
  /// is non-negative and every row sums exactly to 1.
  FiniteChain(std::size_t n, std::vector<Rational> p) : n_(n), p_(std::move(p)) {
    if (n_ == 0) throw std::invalid_argument("chain must have at least one state");
    if (p_.size() != n_ * n_) throw std::invalid_argument("transition matrix has wrong size");
    for (std::size_t i = 0; i < n_; ++i) {
      Rational row = 0;
      for (std::size_t j = 0; j < n_; ++j) {
        if (at(i, j) < 0) throw std::invalid_argument("negative transition probability");
        row += at(i, j);
      }
      if (row != 1)
        throw std::invalid_argument("row " + std::to_string(i) + " sums to " + to_string(row));
    }
  }

  std::size_t size() const { return n_; }
  const Rational& at(std::size_t i, std::size_t j) const { return p_[i * n_ + j]; }

  /// States reachable from `from` in zero or more steps.
  std::vector<bool> reachable_from(std::size_t from) const {
    std::vector<bool> seen(n_, false);
    std::deque<std::size_t> queue{from};
    seen[from] = true;
    while (!queue.empty()) {
      auto x = queue.front();
      queue.pop_front();
      for (std::size_t w = 0; w < n_; ++w) {
        if (at(x, w) > 0 && !seen[w]) {
          seen[w] = true;
          queue.push_back(w);
        }
      }
    }
    return seen;
  }

 private:
  std::size_t n_;
  std::vector<Rational> p_;
};

/// Reads a chain from CSV: first line n, then n rows of n rationals ("1/3").
inline FiniteChain parse_chain_csv(std::istream& in) {
  std::string line;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") != std::string::npos) return true;
    }
    return false;
  };
  if (!next_line()) throw std::invalid_argument("chain CSV is empty");
  std::size_t n = 0;
  try {
    n = std::stoul(line);
  } catch (const std::exception&) {
    throw std::invalid_argument("first line of chain CSV must be the state count");
  }
  std::vector<Rational> p;
  p.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!next_line()) throw std::invalid_argument("chain CSV has fewer than n rows");
    std::stringstream row(line);
    std::string cell;
    std::size_t cols = 0;
    while (std::getline(row, cell, ',')) {
      p.push_back(parse_rational(cell));
      ++cols;
    }
    if (cols != n)
      throw std::invalid_argument("row " + std::to_string(i) + " has " + std::to_string(cols) +
                                  " entries, expected " + std::to_string(n));
  }
  return FiniteChain(n, std::move(p));
}

inline std::string to_csv(const FiniteChain& chain) {
  std::ostringstream os;
  os << chain.size() << "\n";
  for (std::size_t i = 0; i < chain.size(); ++i) {
    for (std::size_t j = 0; j < chain.size(); ++j) {
      if (j) os << ",";
      os << to_string(chain.at(i, j));
    }
    os << "\n";
  }
  return os.str();
}

/// Solves A x = b exactly by Gauss-Jordan elimination. A is row-major, square.
/// Throws std::domain_error if A is singular.
inline std::vector<Rational> solve_exact(std::vector<Rational> a, std::vector<Rational> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && a[pivot * n + col] == 0) ++pivot;
    if (pivot == n) throw std::domain_error("singular linear system");
    if (pivot != col) {
      for (std::size_t k = 0; k < n; ++k) std::swap(a[pivot * n + k], a[col * n + k]);
      std::swap(b[pivot], b[col]);
    }
    const Rational inv = 1 / a[col * n + col];
    for (std::size_t k = col; k < n; ++k) a[col * n + k] *= inv;
    b[col] *= inv;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a[r * n + col] == 0) continue;
      const Rational f = a[r * n + col];
      for (std::size_t k = col; k < n; ++k) a[r * n + k] -= f * a[col * n + k];
      b[r] -= f * b[col];
    }
  }
  return b;
}

/// Minimal non-negative solution of h(x) = P_x(X_n in target for some n >= 0)
/// on a chain given by a row-major matrix.
inline std::vector<Rational> hitting_probabilities(std::size_t n, const std::vector<Rational>& p,
                                                   const std::vector<bool>& target) {
  // States that can reach the target, by reverse search.
  std::vector<bool> can(n, false);
  std::deque<std::size_t> queue;
  for (std::size_t x = 0; x < n; ++x) {
    if (target[x]) {
      can[x] = true;
      queue.push_back(x);
    }
  }
  while (!queue.empty()) {
    auto w = queue.front();
    queue.pop_front();
    for (std::size_t x = 0; x < n; ++x) {
      if (!can[x] && p[x * n + w] > 0) {
        can[x] = true;
        queue.push_back(x);
      }
    }
  }
  std::vector<std::size_t> unknown;
  std::vector<std::size_t> slot(n, n);
  for (std::size_t x = 0; x < n; ++x) {
    if (can[x] && !target[x]) {
      slot[x] = unknown.size();
      unknown.push_back(x);
    }
  }
  std::vector<Rational> h(n, Rational(0));
  for (std::size_t x = 0; x < n; ++x)
    if (target[x]) h[x] = 1;
  if (unknown.empty()) return h;
  const std::size_t m = unknown.size();
  std::vector<Rational> a(m * m, Rational(0));
  std::vector<Rational> b(m, Rational(0));
  for (std::size_t r = 0; r < m; ++r) {
    const std::size_t x = unknown[r];
    a[r * m + r] += 1;
    for (std::size_t w = 0; w < n; ++w) {
      const Rational& pxw = p[x * n + w];
      if (pxw == 0) continue;
      if (target[w]) b[r] += pxw;
      else if (slot[w] < n) a[r * m + slot[w]] -= pxw;
    }
  }
  const auto sol = solve_exact(std::move(a), std::move(b));
  for (std::size_t r = 0; r < m; ++r) h[unknown[r]] = sol[r];
  return h;
}

/// Partial sums S_N = sum_{n=0}^{N} P^n(z, y) for N = 0..max_n, exactly.
inline std::vector<Rational> green_partial_sums(const FiniteChain& chain, std::size_t z,
                                                std::size_t y, std::size_t max_n) {
  const std::size_t n = chain.size();
  if (z >= n || y >= n) throw std::out_of_range("state index out of range");
  std::vector<Rational> row(n, Rational(0));
  row[z] = 1;
  std::vector<Rational> sums;
  sums.reserve(max_n + 1);
  Rational acc = row[y];
  sums.push_back(acc);
  for (std::size_t step = 1; step <= max_n; ++step) {
    std::vector<Rational> next(n, Rational(0));
    for (std::size_t x = 0; x < n; ++x) {
      if (row[x] == 0) continue;
      for (std::size_t w = 0; w < n; ++w)
        if (chain.at(x, w) != 0) next[w] += row[x] * chain.at(x, w);
    }
    row = std::move(next);
    acc += row[y];
    sums.push_back(acc);
  }
  return sums;
}

/// Floating-point partial sums, for long horizons.
inline std::vector<long double> green_partial_sums_real(const FiniteChain& chain, std::size_t z,
                                                        std::size_t y, std::size_t max_n) {
  const std::size_t n = chain.size();
  if (z >= n || y >= n) throw std::out_of_range("state index out of range");
  std::vector<long double> p(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) p[i * n + j] = to_real(chain.at(i, j));
  std::vector<long double> row(n, 0.0L);
  row[z] = 1;
  std::vector<long double> sums{row[y]};
  sums.reserve(max_n + 1);
  for (std::size_t step = 1; step <= max_n; ++step) {
    std::vector<long double> next(n, 0.0L);
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t w = 0; w < n; ++w) next[w] += row[x] * p[x * n + w];
    row = std::move(next);
    sums.push_back(sums.back() + row[y]);
  }
  return sums;
}

struct EquivalenceReport {
  std::size_t z = 0;
  std::size_t y = 0;
  /// P_z(X_n = y for some n >= 0); equals 1 when z == y.
  Rational hit_from_z;
  /// P_z(R^1_y < infinity), first return strictly after time 0.
  Rational first_return_from_z;
  /// P_y(R^1_y < infinity).
  Rational return_to_y;
  /// Index k holds P_z(G_y >= k + 1) from the Markov-property product formula.
  std::vector<Rational> visits_tail_product;
  /// The same probabilities from an augmented visit-counting chain.
  std::vector<Rational> visits_tail_direct;
  /// E_z[G_y], G_y counting n = 0; nullopt when infinite.
  std::optional<Rational> expected_visits;
  std::optional<std::size_t> mismatch_k;
  bool green_consistent = false;
  std::string green_note;

  bool recurrent_y() const { return return_to_y == 1; }
  bool tails_agree() const { return !mismatch_k.has_value(); }
  bool ok() const { return tails_agree() && green_consistent; }
};

namespace detail {

// P_z(G_y >= k + 1) on the chain augmented with a visit counter c in [0, k].
inline Rational visits_at_least(const FiniteChain& chain, std::size_t z, std::size_t y,
                                std::size_t k) {
  const std::size_t n = chain.size();
  const std::size_t start_count = (z == y) ? 1 : 0;
  if (start_count >= k + 1) return Rational(1);
  const std::size_t levels = k + 1;
  const std::size_t total = n * levels + 1;
  const std::size_t success = total - 1;
  std::vector<Rational> p(total * total, Rational(0));
  for (std::size_t c = 0; c < levels; ++c) {
    for (std::size_t x = 0; x < n; ++x) {
      const std::size_t from = c * n + x;
      for (std::size_t w = 0; w < n; ++w) {
        if (chain.at(x, w) == 0) continue;
        const std::size_t c2 = c + (w == y ? 1 : 0);
        const std::size_t to = (c2 >= levels) ? success : c2 * n + w;
        p[from * total + to] += chain.at(x, w);
      }
    }
  }
  p[success * total + success] = 1;
  std::vector<bool> target(total, false);
  target[success] = true;
  const auto h = hitting_probabilities(total, p, target);
  return h[start_count * n + z];
}

}  // namespace detail

/// Checks the return-probability / visit-count characterisation of recurrence
/// on a finite chain, for visit thresholds k = 0..max_k.
///
/// The visit-count tail P_z(G_y >= k+1) = P_z(hit y) * P_y(R^1_y < inf)^k is
/// compared by exact rational equality with an independent computation on a
/// counting chain; E_z[G_y] = P_z(hit y) / (1 - P_y(R^1_y < inf)) is compared
/// with extrapolated Green partial sums.
inline EquivalenceReport verify_equivalences(const FiniteChain& chain, std::size_t z, std::size_t y,
                                             std::size_t max_k = 6,
                                             std::size_t green_horizon = 6000) {
  const std::size_t n = chain.size();
  if (z >= n || y >= n) throw std::out_of_range("state index out of range");
  std::vector<Rational> p(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) p[i * n + j] = chain.at(i, j);
  std::vector<bool> target(n, false);
  target[y] = true;
  const auto h = hitting_probabilities(n, p, target);
  auto first_return = [&](std::size_t x) {
    Rational s = 0;
    for (std::size_t w = 0; w < n; ++w) s += chain.at(x, w) * h[w];
    return s;
  };

  EquivalenceReport rep;
  rep.z = z;
  rep.y = y;
  rep.hit_from_z = h[z];
  rep.first_return_from_z = first_return(z);
  rep.return_to_y = first_return(y);

  Rational power = 1;
  for (std::size_t k = 0; k <= max_k; ++k) {
    rep.visits_tail_product.push_back(rep.hit_from_z * power);
    power *= rep.return_to_y;
    rep.visits_tail_direct.push_back(detail::visits_at_least(chain, z, y, k));
    if (!rep.mismatch_k && rep.visits_tail_product[k] != rep.visits_tail_direct[k])
      rep.mismatch_k = k;
  }

  if (rep.hit_from_z == 0) rep.expected_visits = Rational(0);
  else if (rep.return_to_y != 1) rep.expected_visits = rep.hit_from_z / (1 - rep.return_to_y);

  // Green partial sums: converge to E_z[G_y] when finite, grow linearly otherwise.
  const auto sums = green_partial_sums_real(chain, z, y, green_horizon);
  const long double last = sums.back();
  if (rep.expected_visits) {
    const long double expected = to_real(*rep.expected_visits);
    // Geometric tail extrapolation over blocks of 60 steps (a multiple of
    // every period of a chain with at most 6 states).
    const std::size_t blk = 60;
    const long double inc1 = sums[green_horizon] - sums[green_horizon - blk];
    const long double inc0 = sums[green_horizon - blk] - sums[green_horizon - 2 * blk];
    long double limit = last;
    if (inc0 > 0 && inc1 > 0 && inc1 < inc0) {
      const long double r = inc1 / inc0;
      limit = last + inc1 * r / (1 - r);
    }
    const long double tol = 1e-9L * std::max<long double>(1, expected);
    rep.green_consistent = last <= expected + tol && std::fabs(limit - expected) <= 1e-6L * std::max<long double>(1, expected);
    std::ostringstream note;
    note << "partial sum " << static_cast<double>(last) << " -> extrapolated "
         << static_cast<double>(limit) << " vs exact " << static_cast<double>(expected);
    rep.green_note = note.str();
  } else {
    const std::size_t half = green_horizon / 2;
    const long double rate = (last - sums[half]) / static_cast<long double>(green_horizon - half);
    rep.green_consistent = rate > 1e-6L;
    std::ostringstream note;
    note << "partial sums grow at rate " << static_cast<double>(rate) << " per step";
    rep.green_note = note.str();
  }
  return rep;
}

}  // namespace rwalk
