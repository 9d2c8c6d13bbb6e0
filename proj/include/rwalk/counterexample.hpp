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

// The walk on Z: the per-excursion shift eta and its sums H_n, the large
// deviation bound on H_n, the Green sums at pi, exact absorption into the
// lattice region and the resulting classification of points.

#include "chain.hpp"
#include "parallel.hpp"
#include "rational.hpp"
#include "return_laws.hpp"
#include "space.hpp"

#include <boost/random/geometric_distribution.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rwalk {

// ---------------------------------------------------------------------------
// eta and H_n.
// ---------------------------------------------------------------------------

/// P(eta = 2m) = 4 / 5^{m+1} for m <= m_max, exact.
struct EtaLaw {
  std::int64_t m_max = 0;
  std::vector<Rational> probs;  // probs[m] = P(eta = 2m)
  Rational tail_mass;           // P(eta > 2 m_max) = 5^{-(m_max+1)}

  Rational total() const {
    Rational s = 0;
    for (const auto& p : probs) s += p;
    return s;
  }
  /// sum_{m <= m_max} 2m P(eta = 2m); the full mean is 1/2.
  Rational partial_mean() const {
    Rational s = 0;
    for (std::size_t m = 0; m < probs.size(); ++m) s += 2 * static_cast<long>(m) * probs[m];
    return s;
  }
};

inline EtaLaw eta_law(std::int64_t m_max) {
  if (m_max < 0) throw std::invalid_argument("m_max must be >= 0");
  EtaLaw law;
  law.m_max = m_max;
  BigInt pow5 = 5;
  for (std::int64_t m = 0; m <= m_max; ++m) {
    law.probs.emplace_back(BigInt(4), pow5);
    pow5 *= 5;
  }
  law.tail_mass = Rational(BigInt(1), pow5 / 5);
  return law;
}

/// P(H_n > n), H_n = eta_1 + ... + eta_n, exactly: the n-fold convolution of
/// eta restricted to H <= n, which only needs m_max >= n / 2.
inline Rational h_tail_exact(std::int64_t n, const EtaLaw& eta) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  const std::int64_t top = n / 2;  // H_n / 2 <= top  <=>  H_n <= n
  if (eta.m_max < top) throw std::invalid_argument("eta law too short for an exact tail");
  std::vector<Rational> dist(static_cast<std::size_t>(top) + 1, Rational(0));
  dist[0] = 1;
  for (std::int64_t step = 0; step < n; ++step) {
    std::vector<Rational> next(dist.size(), Rational(0));
    for (std::size_t s = 0; s < dist.size(); ++s) {
      if (dist[s] == 0) continue;
      for (std::size_t m = 0; s + m < dist.size(); ++m) next[s + m] += dist[s] * eta.probs[m];
    }
    dist = std::move(next);
  }
  Rational below = 0;
  for (const auto& p : dist) below += p;
  return 1 - below;
}

struct LdpFit {
  std::map<std::int64_t, BinomialEstimate> estimates;
  std::map<std::int64_t, Rational> exact;
  /// Least-squares rate: log p_hat(n) ~ intercept - c_hat n.
  double c_hat = 0;
  double intercept = 0;
  /// Largest c with p_hat(n) <= exp(-c n) at every n.
  double c_bound = 0;
  /// Fewer than 10 exceedances at some n: the fit is resolution-limited.
  bool resolution_warning = false;
  /// Every estimate within 4 sigma of the exact tail.
  bool agrees_with_exact = true;
  /// Estimates strictly decreasing in n.
  bool monotone = true;
  bool pass = false;
};

/// Samples H_n and fits the exponential decay of P(H_n > n).
inline LdpFit ldp_check(std::vector<std::int64_t> nvals, std::uint64_t nsamples, std::uint64_t seed) {
  if (nvals.empty() || nsamples == 0) throw std::invalid_argument("need n values and samples");
  std::sort(nvals.begin(), nvals.end());
  if (nvals.front() < 1) throw std::invalid_argument("n must be >= 1");
  const std::int64_t nmax = nvals.back();
  using Counts = std::vector<std::uint64_t>;
  const Counts hits = deterministic_reduce<Counts>(
      nsamples, 4096, [&] { return Counts(nvals.size(), 0); },
      [&](Counts& acc, std::uint64_t i) {
        auto rng = make_stream(seed, i, StreamDomain::Ldp);
        boost::random::geometric_distribution<std::int64_t, double> geo(0.8);
        std::int64_t h = 0;
        std::size_t next = 0;
        for (std::int64_t n = 1; n <= nmax; ++n) {
          h += 2 * geo(rng);
          if (n == nvals[next]) {
            if (h > n) ++acc[next];
            ++next;
          }
        }
      },
      [](Counts& total, const Counts& part) {
        for (std::size_t k = 0; k < total.size(); ++k) total[k] += part[k];
      });

  LdpFit fit;
  const EtaLaw eta = eta_law(nmax / 2);
  std::vector<double> xs, ys;
  fit.c_bound = INFINITY;
  double prev = INFINITY;
  for (std::size_t k = 0; k < nvals.size(); ++k) {
    const std::int64_t n = nvals[k];
    const auto est = wilson(hits[k], nsamples);
    fit.estimates[n] = est;
    fit.exact[n] = h_tail_exact(n, eta);
    const double p = to_real<double>(fit.exact[n]);
    if (std::abs(est.estimate - p) > 4 * est.sigma_at(p)) fit.agrees_with_exact = false;
    if (hits[k] < 10) fit.resolution_warning = true;
    if (!(est.estimate < prev)) fit.monotone = false;
    prev = est.estimate;
    if (hits[k] > 0) {
      xs.push_back(static_cast<double>(n));
      ys.push_back(std::log(est.estimate));
      fit.c_bound = std::min(fit.c_bound, -std::log(est.estimate) / static_cast<double>(n));
    }
  }
  if (xs.empty()) {
    // Nothing observed: only the direction of the bound can be checked.
    fit.c_bound = 0;
    fit.pass = true;
    return fit;
  }
  if (xs.size() == 1) {
    fit.c_hat = -ys[0] / xs[0];
  } else {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      mx += xs[i];
      my += ys[i];
    }
    mx /= static_cast<double>(xs.size());
    my /= static_cast<double>(xs.size());
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxx += (xs[i] - mx) * (xs[i] - mx);
      sxy += (xs[i] - mx) * (ys[i] - my);
    }
    fit.c_hat = -sxy / sxx;
    fit.intercept = my + fit.c_hat * mx;
  }
  fit.pass = fit.c_hat > 0;
  for (const auto& [n, est] : fit.estimates)
    if (est.estimate > std::exp(-fit.c_hat * static_cast<double>(n))) fit.pass = false;
  return fit;
}

// ---------------------------------------------------------------------------
// Green sums at pi.
// ---------------------------------------------------------------------------

enum class GreenMethod { Auxiliary, Direct, DirectEveryVisit };

inline const char* name(GreenMethod m) {
  switch (m) {
    case GreenMethod::Auxiliary: return "auxiliary";
    case GreenMethod::Direct: return "direct";
    case GreenMethod::DirectEveryVisit: return "direct_every_visit";
  }
  return "?";
}

/// Partial sums G_N = sum_{n=1}^N P(indicator at the n-th vertical return).
///
/// auxiliary: indicator 1{S_{R_n} = -H_n} with S the horizontal coordinate of
///   the diagonal walk and H_n an independent sum of eta's.
/// direct: the walk on the lattice region from pi under the five-generator
///   measure. The n-th return is the n-th time i comes back to 0 from i != 0;
///   the a-steps taken on the axis in between shift j by 2 only when j >= 0.
///   The indicator is j = 0 at the return.
/// direct_every_visit: as direct, but every time n >= 1 with i = 0 counts as a
///   return, including the a-steps taken on the axis.
struct GreenSums {
  GreenMethod method = GreenMethod::Auxiliary;
  std::int64_t N = 0;
  std::uint64_t nsamples = 0;
  std::uint64_t seed = 0;
  std::vector<double> terms;  // terms[n - 1]
  std::vector<double> partial;
  /// Standard error of G_N at each checkpoint, from the per-trajectory counts.
  std::map<std::int64_t, double> std_error;
  /// Trajectories that ran past `step_horizon` before the N-th return.
  std::uint64_t exhausted = 0;

  double at(std::int64_t n) const { return n < 1 ? 0.0 : partial.at(static_cast<std::size_t>(n - 1)); }
  double se(std::int64_t n) const { return std_error.at(n); }
};

namespace detail {

struct GreenAcc {
  std::vector<std::uint64_t> counts;
  std::vector<double> sum;  // per checkpoint: sum of trajectory counts
  std::vector<double> sumsq;
  std::uint64_t exhausted = 0;
};

}  // namespace detail

/// step_horizon = 0 means no horizon: excursions are sampled exactly, so every
/// trajectory reaches N returns. Otherwise vertical steps (and a-steps) are
/// counted and a trajectory stops once it exceeds the horizon. The eta stream
/// of the auxiliary method uses `eta_seed` when given, `seed` otherwise; it is
/// a separate substream either way.
inline GreenSums shifted_green_sum(std::int64_t N, std::uint64_t nsamples, std::uint64_t seed,
                                   GreenMethod method, std::vector<std::int64_t> checkpoints = {},
                                   std::int64_t step_horizon = 0,
                                   std::optional<std::uint64_t> eta_seed = std::nullopt) {
  if (N < 1 || nsamples < 1) throw std::invalid_argument("N and nsamples must be >= 1");
  checkpoints.push_back(N);
  std::sort(checkpoints.begin(), checkpoints.end());
  checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());
  if (checkpoints.front() < 1 || checkpoints.back() > N) throw std::invalid_argument("checkpoint outside [1, N]");
  const std::size_t ncp = checkpoints.size();
  const ExcursionSampler sampler;
  const double w_a = 0.2;

  auto acc = deterministic_reduce<detail::GreenAcc>(
      nsamples, 256,
      [&] { return detail::GreenAcc{std::vector<std::uint64_t>(static_cast<std::size_t>(N), 0),
                                    std::vector<double>(ncp, 0.0), std::vector<double>(ncp, 0.0), 0}; },
      [&](detail::GreenAcc& a, std::uint64_t i) {
        std::int64_t cum = 0, steps = 0;
        std::size_t cp = 0;
        auto record = [&](std::int64_t n) {
          while (cp < ncp && checkpoints[cp] <= n) {
            const double c = static_cast<double>(cum);
            a.sum[cp] += c;
            a.sumsq[cp] += c * c;
            ++cp;
          }
        };
        if (method == GreenMethod::Auxiliary) {
          auto walk = make_stream(seed, i, StreamDomain::Excursion);
          auto hstream = make_stream(eta_seed.value_or(seed), i, StreamDomain::Eta);
          boost::random::geometric_distribution<std::int64_t, double> geo(0.8);
          std::int64_t s = 0, h = 0;
          for (std::int64_t n = 1; n <= N; ++n) {
            const auto [k, x] = sampler.excursion(walk);
            s += x;
            h += 2 * geo(hstream);
            steps += k;
            if (step_horizon > 0 && steps > step_horizon) {
              ++a.exhausted;
              break;
            }
            if (s == -h) {
              ++a.counts[static_cast<std::size_t>(n - 1)];
              ++cum;
            }
            record(n);
          }
        } else if (method == GreenMethod::Direct) {
          auto rng = make_stream(seed, i, StreamDomain::Direct);
          std::int64_t j = 0;
          for (std::int64_t n = 1; n <= N; ++n) {
            while (rng.uniform01() < w_a) {
              if (j >= 0) j += 2;
              steps += 1;
            }
            const auto [k, x] = sampler.excursion(rng);
            j += x;
            steps += k;
            if (step_horizon > 0 && steps > step_horizon) {
              ++a.exhausted;
              break;
            }
            if (j == 0) {
              ++a.counts[static_cast<std::size_t>(n - 1)];
              ++cum;
            }
            record(n);
          }
        } else {
          auto rng = make_stream(seed, i, StreamDomain::Direct);
          std::int64_t j = 0;
          for (std::int64_t n = 1; n <= N; ++n) {
            if (rng.uniform01() < w_a) {
              if (j >= 0) j += 2;
              steps += 1;
            } else {
              const auto [k, x] = sampler.excursion(rng);
              j += x;
              steps += k;
            }
            if (step_horizon > 0 && steps > step_horizon) {
              ++a.exhausted;
              break;
            }
            if (j == 0) {
              ++a.counts[static_cast<std::size_t>(n - 1)];
              ++cum;
            }
            record(n);
          }
        }
        record(N);
      },
      [](detail::GreenAcc& total, const detail::GreenAcc& part) {
        for (std::size_t n = 0; n < total.counts.size(); ++n) total.counts[n] += part.counts[n];
        for (std::size_t c = 0; c < total.sum.size(); ++c) {
          total.sum[c] += part.sum[c];
          total.sumsq[c] += part.sumsq[c];
        }
        total.exhausted += part.exhausted;
      });

  GreenSums g;
  g.method = method;
  g.N = N;
  g.nsamples = nsamples;
  g.seed = seed;
  g.exhausted = acc.exhausted;
  const double ns = static_cast<double>(nsamples);
  double running = 0;
  for (std::int64_t n = 1; n <= N; ++n) {
    const double t = static_cast<double>(acc.counts[static_cast<std::size_t>(n - 1)]) / ns;
    g.terms.push_back(t);
    running += t;
    g.partial.push_back(running);
  }
  for (std::size_t c = 0; c < ncp; ++c) {
    const double mean = acc.sum[c] / ns;
    const double var = nsamples > 1 ? std::max(0.0, (acc.sumsq[c] - ns * mean * mean) / (ns - 1)) : 0.0;
    g.std_error[checkpoints[c]] = std::sqrt(var / ns);
  }
  return g;
}

/// Exact first term of each method. auxiliary and direct:
/// sum_m nu(-2m) 4 / 5^{m+1} (before the first excursion j = 0 >= 0, so every
/// a-step applies). direct_every_visit: (4/5) nu(0), since an a-step from j = 0
/// moves to j = 2.
inline long double green_first_term_exact(const NuLaw& nu, GreenMethod method) {
  if (method == GreenMethod::DirectEveryVisit) return 0.8L * nu(0);
  long double s = 0, w = 0.8L;
  for (std::int64_t m = 0; 2 * m <= nu.l_max; ++m) {
    s += nu(-2 * m) * w;
    w /= 5;
  }
  return s;
}

// ---------------------------------------------------------------------------
// Absorption and classification.
// ---------------------------------------------------------------------------

struct Absorption {
  Rational p_recurrent;  // eventual entry into the lattice region
  Rational p_escape;     // escape along the tail
};

/// Exact absorption probabilities from any state of Z.
///
/// Lattice states are already absorbed. Tail(k >= 1) can only move right. At
/// Tail(0) / Inlet(0) the b- and c-letters swap the two states and a leaves:
/// to Tail(1) from Tail(0), into the lattice from Inlet(0). With s = w_a + w_bc
/// (holding is allowed for measures without full support):
///   p_inlet = s / (w_a + 2 w_bc),  p_tail = w_bc / (w_a + 2 w_bc).
/// From k < 0 only a moves, to the right, so the endpoint is hit surely.
inline Absorption absorption_oracle(const ZState& s, const StepMeasure& m = StepMeasure::free_group()) {
  if (!is_valid(s)) throw std::invalid_argument("invalid state " + to_string(s));
  if (is_lattice(s)) return {Rational(1), Rational(0)};
  if (const auto* t = std::get_if<Tail>(&s); t != nullptr && t->k >= 1) return {Rational(0), Rational(1)};
  const Rational w_a = m.weight(Generator::A);
  if (w_a == 0) throw std::domain_error("measure without a: the side states never resolve");
  const Rational w_bc = m.weight(Generator::B) + m.weight(Generator::Binv) + m.weight(Generator::C) +
                        m.weight(Generator::Cinv);
  const Rational denom = w_a + 2 * w_bc;
  const Rational p_inlet = (w_a + w_bc) / denom;
  const Rational p_tail = w_bc / denom;
  const Rational p = is_tail(s) ? p_tail : p_inlet;
  return {p, 1 - p};
}

enum class Verdict { Recurrent, Transient, Neither };

inline const char* name(Verdict v) {
  switch (v) {
    case Verdict::Recurrent: return "Recurrent";
    case Verdict::Transient: return "Transient";
    case Verdict::Neither: return "Neither";
  }
  return "?";
}

struct ClassificationReport {
  ZState point;
  std::string label;
  Verdict verdict = Verdict::Neither;
  Rational p_recurrent;
  Rational p_escape;
  BinomialEstimate mc;
  std::int64_t horizon = 0;
  std::uint64_t nsamples = 0;
  std::uint64_t seed = 0;
  /// (mc - p) / sigma(p); zero when p is 0 or 1 and the estimate matches.
  double z_score = 0;
  bool contradiction = false;  // beyond 4 sigma
  bool wide_ci = false;        // CI half-width above 0.01
  std::string note;
};

/// Exact verdict from absorption_oracle, with a Monte Carlo estimate of entry
/// into the lattice region within `horizon` steps as a consistency check.
inline ClassificationReport classify_point(const ZState& s, std::int64_t horizon, std::uint64_t nsamples,
                                           std::uint64_t seed, std::string label = {},
                                           const StepMeasure& m = StepMeasure::free_group()) {
  ClassificationReport r;
  r.point = s;
  r.label = label.empty() ? to_string(s) : std::move(label);
  const Absorption a = absorption_oracle(s, m);
  r.p_recurrent = a.p_recurrent;
  r.p_escape = a.p_escape;
  r.verdict = a.p_recurrent == 1 ? Verdict::Recurrent : a.p_recurrent == 0 ? Verdict::Transient : Verdict::Neither;
  r.horizon = horizon;
  r.nsamples = nsamples;
  r.seed = seed;
  // Tail(k >= 1) cannot reach the lattice, so trajectories stop there.
  r.mc = return_prob_estimate<ZSpace>(
      m, s, [](const ZState& x) { return is_lattice(x); }, horizon, nsamples, seed,
      [](const ZState& x) {
        const auto* t = std::get_if<Tail>(&x);
        return t != nullptr && t->k >= 1;
      });
  const double p = to_real<double>(a.p_recurrent);
  const double sigma = r.mc.sigma_at(p);
  const double diff = r.mc.estimate - p;
  if (sigma > 0) {
    r.z_score = diff / sigma;
    r.contradiction = std::abs(r.z_score) > 4;
  } else {
    r.contradiction = diff != 0;
    r.z_score = diff == 0 ? 0.0 : (diff > 0 ? INFINITY : -INFINITY);
  }
  r.wide_ci = r.mc.half_width() > 0.01;
  switch (r.verdict) {
    case Verdict::Recurrent: r.note = "in the lattice region; recurrence of pi is supported by the divergent Green sum"; break;
    case Verdict::Transient: r.note = "only a moves this state, always to the right: escapes every finite set"; break;
    case Verdict::Neither: r.note = "absorption probability strictly between 0 and 1"; break;
  }
  return r;
}

}  // namespace rwalk
