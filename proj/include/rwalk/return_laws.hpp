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

// Laws attached to the returns of the vertical coordinate of the diagonal walk
// on Z^2: the first-return time R_1 of a simple +-1 walk, its n^{-3/2} decay,
// and the law nu of the horizontal coordinate at R_1, with its 1/m tail.

#include "parallel.hpp"
#include "philox.hpp"
#include "rational.hpp"

#include <boost/random/binomial_distribution.hpp>
#include <boost/random/normal_distribution.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rwalk {

// ---------------------------------------------------------------------------
// First-return time.
// ---------------------------------------------------------------------------

/// Law of the first return time R_1 to 0 of the simple +-1 walk, on even
/// n <= n_max, with exact rationals for n <= exact_limit.
class ReturnTimeLaw {
 public:
  ReturnTimeLaw() = default;

  /// A law given by float point masses on n = 2, 4, ..., 2 * probs.size().
  static ReturnTimeLaw from_probs(std::vector<long double> probs, long double tail_mass) {
    ReturnTimeLaw law;
    law.n_max_ = 2 * static_cast<std::int64_t>(probs.size());
    law.probs_.assign(1, 0.0L);
    law.probs_.insert(law.probs_.end(), probs.begin(), probs.end());
    law.tail_mass_ = tail_mass;
    return law;
  }

  std::int64_t n_max() const { return n_max_; }

  /// P(R_1 = n); zero for odd n and n outside [2, n_max].
  long double prob(std::int64_t n) const {
    if (n < 2 || n > n_max_ || n % 2 != 0) return 0.0L;
    return probs_[static_cast<std::size_t>(n / 2)];
  }

  /// Exact P(R_1 = n) when n is within the exact range.
  std::optional<Rational> exact(std::int64_t n) const {
    if (n < 0 || n > 2 * static_cast<std::int64_t>(exact_.size()) - 2) return std::nullopt;
    if (n % 2 != 0 || n == 0) return Rational(0);
    return exact_[static_cast<std::size_t>(n / 2)];
  }
  std::int64_t exact_limit() const { return 2 * static_cast<std::int64_t>(exact_.size()) - 2; }

  /// P(R_1 > n_max), from the closed form P(R_1 > 2m) = C(2m, m) / 4^m.
  long double tail_mass() const { return tail_mass_; }
  const std::optional<Rational>& exact_tail_mass() const { return exact_tail_; }

 private:
  friend ReturnTimeLaw first_return_law(std::int64_t, std::int64_t);

  std::int64_t n_max_ = 0;
  std::vector<long double> probs_;  // index m holds P(R_1 = 2m)
  std::vector<Rational> exact_;     // index m holds P(R_1 = 2m), m <= exact_limit / 2
  long double tail_mass_ = 1.0L;
  std::optional<Rational> exact_tail_;
};

/// P(R_1 = 2m) = 2 C_{m-1} / 4^m, where 2 C_{m-1} counts the bridges of length
/// 2m that avoid 0 in between (C the Catalan numbers).
inline ReturnTimeLaw first_return_law(std::int64_t n_max, std::int64_t exact_limit = 64) {
  if (n_max < 2 || n_max % 2 != 0)
    throw std::invalid_argument("n_max must be an even integer >= 2");
  ReturnTimeLaw law;
  law.n_max_ = n_max;
  const std::int64_t half = n_max / 2;

  const std::int64_t exact_half = std::min(half, std::max<std::int64_t>(exact_limit, 0) / 2);
  law.exact_.assign(1, Rational(0));
  BigInt catalan = 1;  // C_{m-1}
  BigInt four_pow = 4;
  for (std::int64_t m = 1; m <= exact_half; ++m) {
    law.exact_.push_back(Rational(2 * catalan, four_pow));
    // C_m = C_{m-1} * 2(2m - 1) / (m + 1)
    catalan = catalan * 2 * (2 * m - 1) / (m + 1);
    four_pow *= 4;
  }

  law.probs_.assign(static_cast<std::size_t>(half) + 1, 0.0L);
  long double p = 0.5L;
  for (std::int64_t m = 1; m <= half; ++m) {
    law.probs_[static_cast<std::size_t>(m)] =
        (m <= exact_half) ? to_real(law.exact_[static_cast<std::size_t>(m)]) : p;
    p *= static_cast<long double>(2 * m - 1) / static_cast<long double>(2 * m + 2);
  }

  // P(R_1 > 2m) = P(S_{2m} = 0) = C(2m, m) / 4^m.
  long double u = 1.0L;
  for (std::int64_t m = 1; m <= half; ++m)
    u *= static_cast<long double>(2 * m - 1) / static_cast<long double>(2 * m);
  law.tail_mass_ = u;
  if (half == exact_half) {
    BigInt binom = 1;
    for (std::int64_t m = 1; m <= half; ++m) binom = binom * 2 * (2 * m - 1) / m;
    law.exact_tail_ = Rational(binom, BigInt(1) << (2 * half));
  }
  return law;
}

struct KestenFit {
  double slope = 0;
  double intercept = 0;
  /// exp(mean(log P(R_1 = n) + 1.5 log n)): the constant of P(R_1 = n) ~ tau n^{-3/2}.
  double tau_hat = 0;
  std::size_t points = 0;
};

/// Least-squares fit of log P(R_1 = n) against log n over even n in [lo, hi].
inline KestenFit kesten_fit(const ReturnTimeLaw& law, std::int64_t lo, std::int64_t hi) {
  if (lo < 2 || hi > law.n_max() || lo > hi)
    throw std::invalid_argument("fit window must satisfy 2 <= lo <= hi <= n_max");
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::int64_t n = lo + (lo % 2); n <= hi; n += 2) {
    const long double p = law.prob(n);
    if (p <= 0) continue;
    xs.push_back(std::log(static_cast<double>(n)));
    ys.push_back(static_cast<double>(std::log(p)));
  }
  if (xs.size() < 10) throw std::invalid_argument("kesten_fit needs at least 10 points");
  const double k = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= k;
  my /= k;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  KestenFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.tau_hat = std::exp(my + 1.5 * mx);
  fit.points = xs.size();
  return fit;
}

/// sqrt(k) P(S_k = 0) for the simple walk at even k; tends to the local-limit
/// constant of the span-2 lattice.
inline long double local_constant_estimate(std::int64_t k) {
  if (k < 2 || k % 2 != 0) throw std::invalid_argument("k must be even and >= 2");
  long double p0 = 1.0L;
  for (std::int64_t m = 1; m <= k / 2; ++m)
    p0 *= static_cast<long double>(2 * m - 1) / static_cast<long double>(2 * m);
  return std::sqrt(static_cast<long double>(k)) * p0;
}

// ---------------------------------------------------------------------------
// The law nu of the horizontal position at the first vertical return.
// ---------------------------------------------------------------------------

/// nu truncated to return times R_1 <= k_max, tabulated on even |l| <= l_max.
struct NuLaw {
  std::int64_t l_max = 0;
  std::int64_t k_max = 0;
  /// half[t] = nu(2t) = nu(-2t).
  std::vector<long double> half;
  /// sum_{l > l_max} of the truncated law; the same mass sits below -l_max.
  long double beyond_lmax = 0;
  /// P(R_1 > k_max): mass not represented at all, and a pointwise error bound.
  long double return_tail = 0;
  /// P(R_1 = k_max) k_max^{3/2}, used for the asymptotic completion.
  long double tau_at_kmax = 0;

  long double operator()(std::int64_t l) const {
    if (l % 2 != 0) return 0.0L;
    const std::int64_t a = l < 0 ? -l : l;
    if (a > l_max) return 0.0L;
    return half[static_cast<std::size_t>(a / 2)];
  }

  /// Certified pointwise bound on nu(l) - nu_truncated(l).
  long double error_bound() const { return return_tail; }

  /// Mass outside the table: 1 - sum_{|l| <= l_max} nu_truncated(l).
  long double tail_mass() const { return 2 * beyond_lmax + return_tail; }

  long double window_mass() const {
    long double s = half.empty() ? 0.0L : half[0];
    for (std::size_t t = 1; t < half.size(); ++t) s += 2 * half[t];
    return s;
  }
};

/// nu(l) = sum_{k even <= k_max} P(S_k = l) P(R_1 = k), S the horizontal simple
/// walk, which is independent of the vertical return time.
///
/// Rows P(S_k = .) come from the ratio recurrence
/// P(S_k = l + 2) = P(S_k = l) (k - l) / (k + l + 2); the accumulation over k
/// runs in extended precision in a fixed order.
inline NuLaw nu_law(std::int64_t l_max, std::int64_t k_max = 0) {
  if (k_max == 0) k_max = l_max * l_max;
  if (l_max < 2 || l_max % 2 != 0 || k_max < 2 || k_max % 2 != 0)
    throw std::invalid_argument("l_max and k_max must be even integers >= 2");
  using LD = long double;
  NuLaw nu;
  nu.l_max = l_max;
  nu.k_max = k_max;
  const std::size_t width = static_cast<std::size_t>(l_max / 2) + 1;
  nu.half.assign(width, 0.0L);
  LD beyond = 0;

  LD r = 0.5L;   // P(R_1 = k)
  LD p0 = 0.5L;  // P(S_k = 0)
  auto advance = [&](std::int64_t k) {
    r *= static_cast<LD>(k - 1) / static_cast<LD>(k + 2);
    p0 *= static_cast<LD>(k + 1) / static_cast<LD>(k + 2);
  };

  std::int64_t k = 2;
  // Short rows: the whole support of S_k fits in the window.
  for (; k <= k_max && k <= l_max; k += 2) {
    LD p = p0;
    nu.half[0] += r * p;
    for (std::int64_t t = 1; t <= k / 2; ++t) {
      const std::int64_t l = 2 * t - 2;
      p *= static_cast<LD>(k - l) / static_cast<LD>(k + l + 2);
      nu.half[static_cast<std::size_t>(t)] += r * p;
    }
    advance(k);
  }

  // Full-width rows, four at a time so the recurrences interleave.
  const std::size_t last = width - 1;
  std::vector<double> block(width, 0.0);
  std::int64_t rows_in_block = 0;
  auto flush = [&] {
    for (std::size_t t = 0; t < width; ++t) {
      nu.half[t] += block[t];
      block[t] = 0.0;
    }
    rows_in_block = 0;
  };
  while (k <= k_max) {
    const int lanes = static_cast<int>(std::min<std::int64_t>(4, (k_max - k) / 2 + 1));
    double rr[4] = {0, 0, 0, 0}, pp[4] = {0, 0, 0, 0}, kk[4] = {1, 1, 1, 1}, win[4] = {0, 0, 0, 0};
    LD rl[4] = {0, 0, 0, 0};
    for (int q = 0; q < lanes; ++q) {
      rl[q] = r;
      rr[q] = static_cast<double>(r);
      pp[q] = static_cast<double>(p0);
      kk[q] = static_cast<double>(k + 2 * q);
      win[q] = pp[q];
      advance(k + 2 * q);
    }
    block[0] += rr[0] * pp[0] + rr[1] * pp[1] + rr[2] * pp[2] + rr[3] * pp[3];
    for (std::size_t t = 1; t <= last; ++t) {
      const double l = static_cast<double>(2 * t - 2);
      pp[0] *= (kk[0] - l) / (kk[0] + l + 2);
      pp[1] *= (kk[1] - l) / (kk[1] + l + 2);
      pp[2] *= (kk[2] - l) / (kk[2] + l + 2);
      pp[3] *= (kk[3] - l) / (kk[3] + l + 2);
      block[t] += rr[0] * pp[0] + rr[1] * pp[1] + rr[2] * pp[2] + rr[3] * pp[3];
      win[0] += 2 * pp[0];
      win[1] += 2 * pp[1];
      win[2] += 2 * pp[2];
      win[3] += 2 * pp[3];
      if ((t & 63) == 0 && std::max({pp[0], pp[1], pp[2], pp[3]}) < 1e-290) break;
    }
    for (int q = 0; q < lanes; ++q) beyond += rl[q] * static_cast<LD>(1.0 - win[q]) / 2;
    k += 2 * lanes;
    if (++rows_in_block == 256) flush();
  }
  flush();

  nu.beyond_lmax = beyond;
  nu.tau_at_kmax = [&] {
    // r now holds P(R_1 = k_max + 2); step back one ratio.
    const LD rk = r * static_cast<LD>(k_max + 2) / static_cast<LD>(k_max - 1);
    return rk * std::pow(static_cast<LD>(k_max), 1.5L);
  }();
  // P(R_1 > k_max) = C(k_max, k_max / 2) / 2^{k_max} = P(S_{k_max} = 0).
  LD u = 1.0L;
  for (std::int64_t m = 1; m <= k_max / 2; ++m)
    u *= static_cast<LD>(2 * m - 1) / static_cast<LD>(2 * m);
  nu.return_tail = u;
  return nu;
}

/// m F~(m), F~(m) = nu([m, infinity)), decomposed by where the mass comes from.
struct TailFunctional {
  std::int64_t m = 0;
  /// sum_{m <= l <= l_max} nu_truncated(l).
  long double window = 0;
  /// sum_{l > l_max} nu_truncated(l), from the binomial survival function.
  long double beyond_lmax = 0;
  /// Estimated contribution of return times beyond k_max.
  long double completion = 0;
  /// Certified bound on the error of `completion`.
  long double error_bound = 0;

  long double tail() const { return window + beyond_lmax + completion; }
  long double value() const { return static_cast<long double>(m) * tail(); }
  long double value_error() const { return static_cast<long double>(m) * error_bound; }
};

/// Computes m F~(m) for 1 <= m <= l_max.
///
/// Return times k > k_max contribute sum_k P(R_1 = k) P(S_k >= m). With
/// u = P(R_1 > k_max) this lies in [u/2 - B, u/2], B = (m' - 1) / (2 pi k_max),
/// m' the even integer >= m; the estimate inside that interval uses the
/// n^{-3/2} asymptotics and a Gaussian approximation of S_k.
///
/// Throws std::domain_error when m is outside the table or when the certified
/// error exceeds 10% of the value.
inline TailFunctional tail_functional(const NuLaw& nu, std::int64_t m, double max_rel_error = 0.10) {
  if (m < 1 || m > nu.l_max) throw std::domain_error("m must satisfy 1 <= m <= l_max");
  TailFunctional tf;
  tf.m = m;
  const std::int64_t me = m + (m % 2);
  long double window = 0;
  // Summed from the far end so small terms accumulate first.
  for (std::int64_t l = nu.l_max; l >= me; l -= 2) window += nu(l);
  tf.window = window;
  tf.beyond_lmax = nu.beyond_lmax;

  using LD = long double;
  const LD c = static_cast<LD>(me - 1);
  const LD K = static_cast<LD>(nu.k_max);
  const LD U = c / std::sqrt(K);
  const LD phi0 = 1.0L / std::sqrt(2.0L * std::numbers::pi_v<LD>);
  const LD phiU = phi0 * std::exp(-U * U / 2);
  const LD PhiU = 0.5L * std::erfc(-U / std::sqrt(2.0L));
  const LD correction = (nu.tau_at_kmax / c) * (U * PhiU + phiU - phi0 - U / 2);
  const LD bound = c / (2.0L * std::numbers::pi_v<LD> * K);
  tf.completion = nu.return_tail / 2 - std::clamp(correction, 0.0L, bound);
  tf.error_bound = bound;
  if (tf.error_bound > max_rel_error * tf.tail())
    throw std::domain_error("certified truncation error exceeds the tolerance at m = " +
                            std::to_string(m) + "; increase k_max");
  return tf;
}

/// Richardson extrapolation of f(m) = sigma + b / m + o(1/m) from m and 2m.
inline long double richardson_limit(long double f_m, long double f_2m) { return 2 * f_2m - f_m; }

// ---------------------------------------------------------------------------
// Sampling excursions of the vertical coordinate.
// ---------------------------------------------------------------------------

/// Samples (R_1, S_{R_1}) exactly: R_1 by inverting P(R_1 > 2m) = C(2m, m) / 4^m
/// and S_{R_1} as a +-1 sum of R_1 independent signs.
class ExcursionSampler {
 public:
  explicit ExcursionSampler(std::int64_t table_half = std::int64_t{1} << 18)
      : survival_(static_cast<std::size_t>(table_half) + 1) {
    survival_[0] = 1.0;
    long double u = 1.0L;
    for (std::size_t m = 1; m < survival_.size(); ++m) {
      u *= static_cast<long double>(2 * m - 1) / static_cast<long double>(2 * m);
      survival_[m] = static_cast<double>(u);
    }
    guide_.resize(kGuide + 1);
    std::size_t m = 0;
    for (std::size_t b = kGuide + 1; b-- > 0;) {
      const double level = static_cast<double>(b) / kGuide;
      while (m + 1 < survival_.size() && survival_[m] >= level) ++m;
      guide_[b] = m;
    }
  }

  /// R_1 for a uniform u in (0, 1]: the smallest even 2m with P(R_1 > 2m) < u.
  std::int64_t return_time(double u) const {
    const std::size_t top = survival_.size() - 1;
    if (u <= survival_[top]) return 2 * asymptotic_half(u);
    const std::size_t b = static_cast<std::size_t>(u * kGuide);
    // survival_[guide_[b + 1]] < (b + 1) / G ... the answer lies in [guide_[b+1], guide_[b]].
    std::size_t lo = guide_[std::min(b + 1, kGuide)];
    std::size_t hi = guide_[b];
    if (lo > 0) --lo;
    while (lo < hi) {
      const std::size_t mid = lo + (hi - lo) / 2;
      if (survival_[mid] < u) hi = mid;
      else lo = mid + 1;
    }
    return 2 * static_cast<std::int64_t>(lo);
  }

  /// S_k for the simple walk, k even.
  template <class Rng>
  std::int64_t increment(std::int64_t k, Rng& rng) const {
    if (k <= 4096) {
      std::int64_t ones = 0;
      std::int64_t left = k;
      while (left >= 64) {
        ones += std::popcount(rng.next_u64());
        left -= 64;
      }
      if (left > 0) ones += std::popcount(rng.next_u64() & ((std::uint64_t{1} << left) - 1));
      return 2 * ones - k;
    }
    if (k <= (std::int64_t{1} << 40)) {
      boost::random::binomial_distribution<std::int64_t, double> bin(k, 0.5);
      return 2 * bin(rng) - k;
    }
    // Far tail (probability below 1e-6): Gaussian with the parity of k.
    boost::random::normal_distribution<double> normal(0.0, std::sqrt(static_cast<double>(k)));
    const double x = normal(rng);
    return 2 * static_cast<std::int64_t>(std::llround(x / 2));
  }

  /// One excursion: (length, horizontal displacement).
  template <class Rng>
  std::pair<std::int64_t, std::int64_t> excursion(Rng& rng) const {
    const std::int64_t k = return_time(rng.uniform01_open_low());
    return {k, increment(k, rng)};
  }

 private:
  static constexpr std::size_t kGuide = 4096;

  // Inverts P(R_1 > 2m) ~ (pi m)^{-1/2} (1 - 1/(8m)) beyond the table.
  std::int64_t asymptotic_half(double u) const {
    double m = 1.0 / (std::numbers::pi * u * u);
    for (int it = 0; it < 3; ++it) m = (1.0 - 1.0 / (8 * m)) * (1.0 - 1.0 / (8 * m)) / (std::numbers::pi * u * u);
    const double cap = static_cast<double>(std::int64_t{1} << 61);
    return static_cast<std::int64_t>(std::min(std::floor(m) + 1, cap));
  }

  std::vector<double> survival_;
  std::vector<std::size_t> guide_;
};

// ---------------------------------------------------------------------------
// Cache files.
// ---------------------------------------------------------------------------

/// Decimal with 18 significant digits.
inline std::string format_prob(long double p) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17Le", p);
  return buf;
}

inline void write_nu_csv(std::ostream& os, const NuLaw& nu) {
  os << "kind,param,truncation\n";
  os << "nu,l_max=" << nu.l_max << " k_max=" << nu.k_max
     << ",return_tail=" << format_prob(nu.return_tail)
     << " beyond_lmax=" << format_prob(nu.beyond_lmax)
     << " tau_at_kmax=" << format_prob(nu.tau_at_kmax) << "\n";
  os << "index,probability\n";
  for (std::int64_t l = -nu.l_max; l <= nu.l_max; l += 2) os << l << "," << format_prob(nu(l)) << "\n";
}

/// Parses a cache written by write_nu_csv. Throws std::runtime_error when the
/// file is malformed or does not match (l_max, k_max).
inline NuLaw read_nu_csv(std::istream& is, std::int64_t l_max, std::int64_t k_max) {
  auto fail = [](const std::string& why) -> NuLaw {
    throw std::runtime_error("corrupt nu cache: " + why);
  };
  std::string line;
  if (!std::getline(is, line) || line != "kind,param,truncation") return fail("bad header");
  if (!std::getline(is, line)) return fail("missing parameter line");
  NuLaw nu;
  {
    long long lm = 0, km = 0;
    char rt[64] = {0}, bl[64] = {0}, tk[64] = {0};
    if (std::sscanf(line.c_str(), "nu,l_max=%lld k_max=%lld,return_tail=%63s beyond_lmax=%63s tau_at_kmax=%63s",
                    &lm, &km, rt, bl, tk) != 5)
      return fail("bad parameter line");
    if (lm != l_max || km != k_max) return fail("parameters do not match the requested law");
    nu.l_max = lm;
    nu.k_max = km;
    nu.return_tail = std::strtold(rt, nullptr);
    nu.beyond_lmax = std::strtold(bl, nullptr);
    nu.tau_at_kmax = std::strtold(tk, nullptr);
  }
  if (!std::getline(is, line) || line != "index,probability") return fail("bad column header");
  nu.half.assign(static_cast<std::size_t>(l_max / 2) + 1, 0.0L);
  std::vector<long double> negative(nu.half.size(), 0.0L);
  std::int64_t expected = -l_max;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) return fail("row without comma");
    const std::int64_t l = std::stoll(line.substr(0, comma));
    if (l != expected) return fail("unexpected index " + std::to_string(l));
    const long double p = std::strtold(line.c_str() + comma + 1, nullptr);
    if (!(p >= 0 && p <= 1)) return fail("probability out of range");
    if (l <= 0) negative[static_cast<std::size_t>(-l / 2)] = p;
    if (l >= 0) nu.half[static_cast<std::size_t>(l / 2)] = p;
    expected += 2;
  }
  if (expected != l_max + 2) return fail("truncated file");
  if (negative != nu.half) return fail("table is not symmetric");
  return nu;
}

}  // namespace rwalk
