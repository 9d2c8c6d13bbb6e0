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

// Markov chains driven by a step measure acting on a space: exact one-step
// push-forward, seeded trajectory sampling, return observables and
// Monte Carlo hitting estimates with Wilson intervals.

#include "parallel.hpp"
#include "philox.hpp"
#include "space.hpp"
#include "sparse_dist.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <type_traits>
#include <vector>

namespace rwalk {

namespace detail {
template <class Prob>
Prob weight_as(const Rational& w) {
  if constexpr (std::is_same_v<Prob, Rational>) return w;
  else return to_real<Prob>(w);
}
template <class Prob>
long double as_long_double(const Prob& p) {
  if constexpr (std::is_same_v<Prob, Rational>) return to_real(p);
  else return static_cast<long double>(p);
}
}  // namespace detail

/// One step of the chain: sum over g of m(g) * (g . d).
///
/// Entries whose mass falls below `cutoff` are dropped and added to `leaked`.
/// With cutoff == 0 nothing is dropped; for Rational probabilities the total
/// mass is then preserved exactly.
template <class Key, class Prob, class Action>
SparseDist<Key, Prob> push_forward(const SparseDist<Key, Prob>& d, const StepMeasure& m,
                                   Action&& action, long double cutoff = 0) {
  if (cutoff < 0) throw std::invalid_argument("cutoff must be non-negative");
  SparseDist<Key, Prob> out;
  out.leaked = d.leaked;
  for (const auto& atom : m.atoms()) {
    const Prob w = detail::weight_as<Prob>(atom.weight);
    for (const auto& [state, p] : d.entries) out.add(action(atom.generator, state), p * w);
  }
  if (cutoff > 0) {
    for (auto it = out.entries.begin(); it != out.entries.end();) {
      if (detail::as_long_double(it->second) < cutoff) {
        out.leaked += it->second;
        it = out.entries.erase(it);
      } else {
        ++it;
      }
    }
  }
  return out;
}

template <Space S, class Prob>
SparseDist<typename S::State, Prob> push_forward(const SparseDist<typename S::State, Prob>& d,
                                                 const StepMeasure& m, long double cutoff = 0) {
  return push_forward(d, m, [](Generator g, const typename S::State& s) { return S::apply(g, s); },
                      cutoff);
}

/// Exact law of X_n started from `start`.
template <Space S, class Prob = Rational>
SparseDist<typename S::State, Prob> law_at(const StepMeasure& m, const typename S::State& start,
                                           int n, long double cutoff = 0) {
  auto d = SparseDist<typename S::State, Prob>::point(start);
  for (int k = 0; k < n; ++k) d = push_forward<S>(d, m, cutoff);
  return d;
}

// ---------------------------------------------------------------------------
// Trajectories.
// ---------------------------------------------------------------------------

template <Space S>
struct Trajectory {
  using State = typename S::State;

  State start;
  std::vector<Generator> steps;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  /// X_0, X_1, ..., X_horizon.
  std::vector<State> states() const {
    std::vector<State> xs;
    xs.reserve(steps.size() + 1);
    xs.push_back(start);
    for (auto g : steps) xs.push_back(S::apply(g, xs.back()));
    return xs;
  }
};

/// Domain tags separating the substreams of one seed.
enum class StreamDomain : std::uint32_t {
  Path = 0,
  Excursion = 1,
  Eta = 2,
  Direct = 3,
  Ldp = 4,
};

inline CounterStream make_stream(std::uint64_t seed, std::uint64_t stream, StreamDomain domain) {
  return CounterStream(seed, stream, static_cast<std::uint32_t>(domain));
}

/// Draws `horizon` i.i.d. generators from m. Sample index `stream` of an
/// ensemble with the same seed reproduces exactly this trajectory.
template <Space S>
Trajectory<S> sample_path(const StepMeasure& m, const typename S::State& start, std::int64_t horizon,
                          std::uint64_t seed, std::uint64_t stream = 0) {
  if (horizon < 0) throw std::invalid_argument("horizon must be non-negative");
  Trajectory<S> t{start, {}, seed, stream};
  t.steps.reserve(static_cast<std::size_t>(horizon));
  auto rng = make_stream(seed, stream, StreamDomain::Path);
  for (std::int64_t k = 0; k < horizon; ++k) t.steps.push_back(m.pick(rng.uniform01()));
  return t;
}

struct ReturnObservables {
  std::vector<std::int64_t> return_times;
  std::vector<std::int64_t> positions;
  std::size_t completed() const { return return_times.size(); }
};

/// Records the first `max_returns` times n >= 1 at which scalar(X_n) == 0,
/// with position(X_n) at those times. Fewer are returned when the trajectory
/// ends first.
template <Space S, class Scalar, class Position>
ReturnObservables observe_returns(const Trajectory<S>& t, Scalar&& scalar, Position&& position,
                                  std::size_t max_returns) {
  if (scalar(t.start) != 0) throw std::invalid_argument("observable must vanish at the start");
  ReturnObservables out;
  auto x = t.start;
  for (std::size_t n = 0; n < t.steps.size() && out.completed() < max_returns; ++n) {
    x = S::apply(t.steps[n], x);
    if (scalar(x) == 0) {
      out.return_times.push_back(static_cast<std::int64_t>(n + 1));
      out.positions.push_back(position(x));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Binomial estimates.
// ---------------------------------------------------------------------------

struct BinomialEstimate {
  std::uint64_t successes = 0;
  std::uint64_t trials = 0;
  double estimate = 0;
  double ci_lo = 0;
  double ci_hi = 0;

  double half_width() const { return (ci_hi - ci_lo) / 2; }
  /// Standard error of the estimate under success probability p.
  double sigma_at(double p) const {
    return trials == 0 ? 0.0 : std::sqrt(p * (1 - p) / static_cast<double>(trials));
  }
};

/// Wilson score interval; z = 1.96 gives 95% coverage.
inline BinomialEstimate wilson(std::uint64_t successes, std::uint64_t trials, double z = 1.959963984540054) {
  if (trials == 0) throw std::invalid_argument("wilson interval needs at least one trial");
  BinomialEstimate e{successes, trials};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1 + z2 / n;
  const double centre = (p + z2 / (2 * n)) / denom;
  const double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / denom;
  e.estimate = p;
  e.ci_lo = std::max(0.0, centre - half);
  e.ci_hi = std::min(1.0, centre + half);
  return e;
}

/// Monte Carlo estimate of P(X_n in target for some n in [1, horizon]).
///
/// `abandon`, when given, marks states from which the target is unreachable;
/// a trajectory entering one is stopped and counted as a miss.
template <Space S>
BinomialEstimate return_prob_estimate(
    const StepMeasure& m, const typename S::State& start,
    const std::function<bool(const typename S::State&)>& target, std::int64_t horizon,
    std::uint64_t nsamples, std::uint64_t seed,
    const std::function<bool(const typename S::State&)>& abandon = {}) {
  if (horizon < 1 || nsamples < 1) throw std::invalid_argument("horizon and nsamples must be >= 1");
  const std::uint64_t hits = deterministic_reduce<std::uint64_t>(
      nsamples, 1024, [] { return std::uint64_t{0}; },
      [&](std::uint64_t& acc, std::uint64_t i) {
        auto rng = make_stream(seed, i, StreamDomain::Path);
        auto x = start;
        for (std::int64_t n = 0; n < horizon; ++n) {
          x = S::apply(m.pick(rng.uniform01()), x);
          if (target(x)) {
            ++acc;
            return;
          }
          if (abandon && abandon(x)) return;
        }
      },
      [](std::uint64_t& total, const std::uint64_t& part) { total += part; });
  return wilson(hits, nsamples);
}

/// Empirical law of X_n over `nsamples` trajectories.
template <Space S>
SparseDist<typename S::State, double> sample_marginal(const StepMeasure& m,
                                                      const typename S::State& start, int n,
                                                      std::uint64_t nsamples, std::uint64_t seed) {
  using Counts = std::map<typename S::State, std::uint64_t>;
  const Counts counts = deterministic_reduce<Counts>(
      nsamples, 4096, [] { return Counts{}; },
      [&](Counts& acc, std::uint64_t i) {
        auto rng = make_stream(seed, i, StreamDomain::Path);
        auto x = start;
        for (int k = 0; k < n; ++k) x = S::apply(m.pick(rng.uniform01()), x);
        ++acc[x];
      },
      [](Counts& total, const Counts& part) {
        for (const auto& [k, c] : part) total[k] += c;
      });
  SparseDist<typename S::State, double> d;
  for (const auto& [k, c] : counts)
    d.add(k, static_cast<double>(c) / static_cast<double>(nsamples));
  return d;
}

}  // namespace rwalk
