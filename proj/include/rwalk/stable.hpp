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

// Stable-law numerics: the Cauchy and Gaussian targets, finite-grid checks of
// the domain-of-attraction conditions, exact lattice self-convolution and the
// local-limit error functional.

#include "parallel.hpp"
#include "rational.hpp"
#include "return_laws.hpp"
#include "sparse_dist.hpp"

#include <boost/math/quadrature/sinh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace rwalk {

inline double cauchy_density(double s, double gamma = 1.0) {
  return gamma / (std::numbers::pi * (s * s + gamma * gamma));
}

inline double gaussian_density(double s, double sd = 1.0) {
  const double z = s / sd;
  return std::exp(-z * z / 2) / (sd * std::sqrt(2 * std::numbers::pi));
}

/// Limit object of the local limit theorem: density g, lattice a + hZ, and
/// normings B_n, A_n.
struct StableTarget {
  double alpha = 1.0;
  std::function<double(double)> g;
  std::int64_t span = 1;
  std::int64_t offset = 0;
  std::function<double(std::int64_t)> B;
  std::function<double(std::int64_t)> A;
  std::string name;

  /// Cauchy with scale gamma, B_n = n, A_n = 0.
  static StableTarget cauchy(double gamma = 1.0, std::int64_t span = 2) {
    return {1.0,
            [gamma](double s) { return cauchy_density(s, gamma); },
            span,
            0,
            [](std::int64_t n) { return static_cast<double>(n); },
            [](std::int64_t) { return 0.0; },
            "cauchy(gamma=" + std::to_string(gamma) + ")"};
  }

  /// Cauchy whose tail constant gamma / pi equals sigma = lim m P(Z >= m).
  static StableTarget cauchy_from_tail_constant(double sigma, std::int64_t span = 2) {
    return cauchy(std::numbers::pi * sigma, span);
  }

  /// Gaussian with standard deviation sd, B_n = sqrt(n), A_n = 0.
  static StableTarget gaussian(double sd = 1.0, std::int64_t span = 2) {
    return {2.0,
            [sd](double s) { return gaussian_density(s, sd); },
            span,
            0,
            [](std::int64_t n) { return std::sqrt(static_cast<double>(n)); },
            [](std::int64_t) { return 0.0; },
            "gaussian(sd=" + std::to_string(sd) + ")"};
  }

  /// Integral of g over the real line.
  double integral() const {
    boost::math::quadrature::sinh_sinh<double> integrator;
    return integrator.integrate(g, 1e-13);
  }
};

// ---------------------------------------------------------------------------
// Domain-of-attraction checks.
// ---------------------------------------------------------------------------

/// x -> (F(-x), 1 - F(x)).
using TailData = std::map<double, std::pair<double, double>>;

struct ConditionCheck {
  std::string label;
  double target = 0;
  std::vector<std::pair<double, double>> sequence;  // (x, value)
  double discrepancy = 0;  // relative, at the largest x
  bool trend_ok = false;
  bool pass = false;
};

struct DoAReport {
  double alpha = 0;
  double tolerance = 0.10;
  ConditionCheck ratio_left_right;
  std::vector<ConditionCheck> right_scaling;  // one per scale a
  std::vector<ConditionCheck> left_scaling;
  bool pass() const {
    bool ok = ratio_left_right.pass;
    for (const auto& c : right_scaling) ok = ok && c.pass;
    for (const auto& c : left_scaling) ok = ok && c.pass;
    return ok;
  }
};

namespace detail {

inline ConditionCheck judge(std::string label, double target,
                            std::vector<std::pair<double, double>> seq, double tol) {
  ConditionCheck c{std::move(label), target, std::move(seq), 0, false, false};
  if (c.sequence.size() < 3) throw std::invalid_argument("insufficient range for " + c.label);
  auto rel = [&](double v) { return std::abs(v - target) / std::max(std::abs(target), 1e-300); };
  const std::size_t n = c.sequence.size();
  c.discrepancy = rel(c.sequence[n - 1].second);
  c.trend_ok = rel(c.sequence[n - 1].second) <= rel(c.sequence[n - 2].second) + 1e-12 &&
               rel(c.sequence[n - 2].second) <= rel(c.sequence[n - 3].second) + 1e-12;
  c.pass = c.trend_ok && c.discrepancy < tol;
  return c;
}

}  // namespace detail

/// Checks the three limit conditions on a geometric grid, at the largest
/// available x, with a trend check over the last three grid points.
/// Scales a must map grid points onto grid points.
inline DoAReport doa_check(const TailData& data, double alpha, const std::vector<double>& scales,
                           double left_right_ratio = 1.0, double tolerance = 0.10) {
  if (data.size() < 4) throw std::invalid_argument("insufficient range: need at least 4 grid points");
  DoAReport rep;
  rep.alpha = alpha;
  rep.tolerance = tolerance;
  std::vector<std::pair<double, double>> lr;
  for (const auto& [x, v] : data)
    if (v.second > 0) lr.emplace_back(x, v.first / v.second);
  rep.ratio_left_right = detail::judge("F(-x)/(1-F(x))", left_right_ratio, lr, tolerance);

  auto lookup = [&](double x) -> const std::pair<double, double>* {
    auto it = data.lower_bound(x * (1 - 1e-9));
    if (it == data.end() || std::abs(it->first - x) > 1e-9 * x) return nullptr;
    return &it->second;
  };
  for (double a : scales) {
    std::vector<std::pair<double, double>> right, left;
    for (const auto& [x, v] : data) {
      const auto* ax = lookup(a * x);
      if (ax == nullptr) continue;
      if (v.second > 0) right.emplace_back(x, ax->second / v.second);
      if (v.first > 0) left.emplace_back(x, ax->first / v.first);
    }
    const double target = std::pow(a, -alpha);
    const std::string suffix = "(a=" + std::to_string(a) + ")";
    rep.right_scaling.push_back(detail::judge("(1-F(ax))/(1-F(x))" + suffix, target, right, tolerance));
    if (left_right_ratio > 0)
      rep.left_scaling.push_back(detail::judge("F(-ax)/F(-x)" + suffix, target, left, tolerance));
  }
  return rep;
}

/// Tail data of the symmetric law nu at grid points x: (P(Z < -x), P(Z > x)).
inline TailData nu_tail_data(const NuLaw& nu, const std::vector<std::int64_t>& grid) {
  TailData d;
  for (std::int64_t x : grid) {
    const double t = static_cast<double>(tail_functional(nu, x + 1).tail());
    d[static_cast<double>(x)] = {t, t};
  }
  return d;
}

// ---------------------------------------------------------------------------
// Dense lattice laws and convolution.
// ---------------------------------------------------------------------------

/// Law on offset + span * {0, ..., p.size() - 1}, with the mass that was cut
/// off tracked in `leaked`.
template <class P = double>
struct LatticeDist {
  std::int64_t offset = 0;
  std::int64_t span = 1;
  std::vector<P> p;
  P leaked = P(0);

  std::int64_t point(std::size_t i) const { return offset + span * static_cast<std::int64_t>(i); }
  std::int64_t last_point() const { return point(p.size() - 1); }

  P at(std::int64_t x) const {
    const std::int64_t d = x - offset;
    if (d < 0 || d % span != 0) return P(0);
    const std::size_t i = static_cast<std::size_t>(d / span);
    return i < p.size() ? p[i] : P(0);
  }

  P total() const {
    P s(0);
    for (const auto& v : p) s += v;
    return s;
  }

  /// Exact mirror symmetry about 0.
  bool symmetric() const {
    if (p.empty() || offset != -last_point()) return false;
    for (std::size_t i = 0, j = p.size() - 1; i < j; ++i, --j)
      if (!(p[i] == p[j])) return false;
    return true;
  }

  static LatticeDist point_mass(std::int64_t x, std::int64_t span = 1) { return {x, span, {P(1)}, P(0)}; }

  static LatticeDist from_sparse(const SparseDist<std::int64_t, P>& d, std::int64_t span) {
    if (d.entries.empty()) throw std::invalid_argument("empty distribution");
    LatticeDist out;
    out.span = span;
    out.offset = d.entries.begin()->first;
    const std::int64_t last = d.entries.rbegin()->first;
    if ((last - out.offset) % span != 0) throw std::invalid_argument("support is not on the lattice");
    out.p.assign(static_cast<std::size_t>((last - out.offset) / span) + 1, P(0));
    for (const auto& [x, v] : d.entries) {
      if ((x - out.offset) % span != 0) throw std::invalid_argument("support is not on the lattice");
      out.p[static_cast<std::size_t>((x - out.offset) / span)] = v;
    }
    out.leaked = d.leaked;
    return out;
  }

  SparseDist<std::int64_t, P> to_sparse() const {
    SparseDist<std::int64_t, P> d;
    for (std::size_t i = 0; i < p.size(); ++i) d.add(point(i), p[i]);
    d.leaked = leaked;
    return d;
  }
};

/// nu on {-l_max, ..., l_max}; the mass outside the table is counted as leaked.
inline LatticeDist<double> to_lattice(const NuLaw& nu) {
  LatticeDist<double> d;
  d.span = 2;
  d.offset = -nu.l_max;
  for (std::int64_t l = -nu.l_max; l <= nu.l_max; l += 2) d.p.push_back(static_cast<double>(nu(l)));
  d.leaked = static_cast<double>(nu.tail_mass());
  return d;
}

/// Bound on nu(l) for |l| > l_max. Each row P(S_k = .) is symmetric and
/// unimodal on the even lattice, hence so is nu; rows beyond k_max add at most
/// P(R_1 > k_max) P(S_{k_max} = 0) = P(R_1 > k_max)^2.
inline double dropped_point_bound(const NuLaw& nu) {
  return static_cast<double>(nu(nu.l_max) + nu.return_tail * nu.return_tail);
}

/// Law of X + Y for independent X ~ a, Y ~ b. Edge entries below `cutoff` are
/// dropped and counted as leaked. Each output cell is a sum in a fixed order,
/// so the result does not depend on the thread count; symmetric inputs give
/// an exactly symmetric output.
template <class P>
LatticeDist<P> convolve(const LatticeDist<P>& a, const LatticeDist<P>& b, const P& cutoff = P(0)) {
  if (a.span != b.span) throw std::invalid_argument("convolution of laws on different lattices");
  if (a.p.empty() || b.p.empty()) throw std::invalid_argument("convolution of an empty law");
  LatticeDist<P> out;
  out.span = a.span;
  out.offset = a.offset + b.offset;
  const std::size_t na = a.p.size(), nb = b.p.size(), nout = na + nb - 1;
  out.p.assign(nout, P(0));
  const bool mirror = a.symmetric() && b.symmetric();
  const std::size_t ncompute = mirror ? nout / 2 + 1 : nout;

  auto cell = [&](std::size_t t) -> P {
    const std::size_t lo = t >= nb - 1 ? t - (nb - 1) : 0;
    const std::size_t hi = std::min(t, na - 1);
    P acc[4] = {P(0), P(0), P(0), P(0)};
    std::size_t i = lo;
    for (; i + 3 <= hi; i += 4) {
      acc[0] += a.p[i] * b.p[t - i];
      acc[1] += a.p[i + 1] * b.p[t - i - 1];
      acc[2] += a.p[i + 2] * b.p[t - i - 2];
      acc[3] += a.p[i + 3] * b.p[t - i - 3];
    }
    for (; i <= hi; ++i) acc[0] += a.p[i] * b.p[t - i];
    return (acc[0] + acc[1]) + (acc[2] + acc[3]);
  };
  constexpr std::size_t kChunk = 256;
  const std::size_t nchunks = (ncompute + kChunk - 1) / kChunk;
  if (nchunks > 1 && na * nb > (1u << 20)) {
    parallel_blocks(nchunks, [&](std::size_t c) {
      const std::size_t end = std::min(ncompute, (c + 1) * kChunk);
      for (std::size_t t = c * kChunk; t < end; ++t) out.p[t] = cell(t);
    });
  } else {
    for (std::size_t t = 0; t < ncompute; ++t) out.p[t] = cell(t);
  }
  if (mirror)
    for (std::size_t t = ncompute; t < nout; ++t) out.p[t] = out.p[nout - 1 - t];

  // 1 - (1 - la)(1 - lb) = la + lb - la lb
  out.leaked = a.leaked + b.leaked - a.leaked * b.leaked;
  if (cutoff > P(0)) {
    std::size_t first = 0, last = nout;
    while (last - first > 1 && out.p[first] < cutoff && out.p[last - 1] < cutoff) {
      out.leaked += out.p[first] + out.p[last - 1];
      ++first;
      --last;
    }
    out.offset += out.span * static_cast<std::int64_t>(first);
    out.p = std::vector<P>(out.p.begin() + static_cast<std::ptrdiff_t>(first),
                           out.p.begin() + static_cast<std::ptrdiff_t>(last));
  }
  return out;
}

/// Law of the sum of n independent copies, by binary exponentiation.
template <class P>
LatticeDist<P> self_convolve(const LatticeDist<P>& d, std::int64_t n, const P& cutoff = P(0)) {
  if (n < 1) throw std::invalid_argument("self_convolve needs n >= 1");
  std::optional<LatticeDist<P>> result;
  LatticeDist<P> base = d;
  while (true) {
    if (n & 1) result = result ? convolve(*result, base, cutoff) : base;
    n >>= 1;
    if (n == 0) break;
    base = convolve(base, base, cutoff);
  }
  return *result;
}

/// Laws of Z_n for each n in the schedule; a value twice the previous one is
/// obtained by a single squaring.
template <class P>
std::map<std::int64_t, LatticeDist<P>> convolution_powers(const LatticeDist<P>& d,
                                                          std::vector<std::int64_t> schedule,
                                                          const P& cutoff = P(0)) {
  std::sort(schedule.begin(), schedule.end());
  schedule.erase(std::unique(schedule.begin(), schedule.end()), schedule.end());
  std::map<std::int64_t, LatticeDist<P>> out;
  const LatticeDist<P>* prev = nullptr;
  std::int64_t prev_n = 0;
  for (std::int64_t n : schedule) {
    if (prev != nullptr && n == 2 * prev_n)
      out.emplace(n, convolve(*prev, *prev, cutoff));
    else
      out.emplace(n, self_convolve(d, n, cutoff));
    prev = &out.at(n);
    prev_n = n;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Local limit error.
// ---------------------------------------------------------------------------

struct LllError {
  std::int64_t n = 0;
  double sup_error = 0;
  std::int64_t argmax = 0;  // lattice point where the sup is attained
  double n_times_p0 = 0;
  /// Largest value of the scaled density just outside the computed support.
  double outside = 0;
  /// Rough bound on how much the truncated mass can move the sup.
  double truncation_effect = 0;
  bool truncation_warning = false;
};

/// sup_x |B_n / h P(Z_n = x) - g(x / B_n - A_n)| over the lattice a n + h Z.
/// Outside the support only g contributes; its largest value there is at the
/// nearest lattice points past the edges.
///
/// Dropped one-step mass changes P(Z_n = x) by at most
/// n * min(leaked_per_step * sup P(Z_{n-1} = .), sup of a dropped point mass);
/// the warning fires when that, scaled by B_n / h, exceeds 10% of the sup.
/// A negative `dropped_point_bound` means no pointwise bound is known.
inline LllError lll_error(const LatticeDist<double>& dn, const StableTarget& target, std::int64_t n,
                          double leaked_per_step = -1, double dropped_point_bound = -1) {
  if (dn.span != target.span) throw std::invalid_argument("lattice span mismatch");
  const std::int64_t base = target.offset * n;
  if (((dn.offset - base) % dn.span + dn.span) % dn.span != 0)
    throw std::invalid_argument("law is not carried by the target lattice");
  const double Bn = target.B(n);
  const double An = target.A(n);
  const double scale = Bn / static_cast<double>(target.span);
  LllError r;
  r.n = n;
  double pmax = 0;
  for (std::size_t i = 0; i < dn.p.size(); ++i) {
    const std::int64_t x = dn.point(i);
    const double e = std::abs(scale * dn.p[i] - target.g(static_cast<double>(x) / Bn - An));
    if (e > r.sup_error) {
      r.sup_error = e;
      r.argmax = x;
    }
    pmax = std::max(pmax, dn.p[i]);
  }
  for (std::int64_t x : {dn.offset - dn.span, dn.last_point() + dn.span}) {
    const double e = target.g(static_cast<double>(x) / Bn - An);
    r.outside = std::max(r.outside, e);
    if (e > r.sup_error) {
      r.sup_error = e;
      r.argmax = x;
    }
  }
  r.n_times_p0 = static_cast<double>(n) * dn.at(0);
  if (leaked_per_step < 0) leaked_per_step = 1 - std::pow(1 - dn.leaked, 1.0 / static_cast<double>(n));
  double per_point = leaked_per_step * pmax;
  if (dropped_point_bound >= 0) per_point = std::min(per_point, dropped_point_bound);
  r.truncation_effect = static_cast<double>(n) * per_point * scale;
  r.truncation_warning = r.truncation_effect > 0.10 * r.sup_error;
  return r;
}

struct LowerBoundVerdict {
  bool pass = false;
  double a_const = 0;
  std::int64_t n0 = 0;
  double min_value = 0;       // min of n P(Z_n = 0) over n >= n0
  double limit_estimate = 0;  // value at the largest n
  std::vector<std::pair<std::int64_t, double>> values;
};

/// Checks n P(Z_n = 0) >= a_const for every computed n >= n0.
inline LowerBoundVerdict lower_bound_check(const std::map<std::int64_t, LatticeDist<double>>& laws,
                                           double a_const, std::int64_t n0) {
  LowerBoundVerdict v;
  v.a_const = a_const;
  v.n0 = n0;
  v.min_value = INFINITY;
  for (const auto& [n, d] : laws) {
    const double x = static_cast<double>(n) * d.at(0);
    v.values.emplace_back(n, x);
    if (n >= n0) v.min_value = std::min(v.min_value, x);
  }
  if (!v.values.empty()) v.limit_estimate = v.values.back().second;
  v.pass = std::isfinite(v.min_value) && v.min_value >= a_const;
  return v;
}

inline void write_error_curve_csv(std::ostream& os, const std::vector<LllError>& rows) {
  os << "n,sup_error,argmax_k,n_times_p0\n";
  for (const auto& r : rows)
    os << r.n << "," << format_prob(r.sup_error) << "," << r.argmax << "," << format_prob(r.n_times_p0) << "\n";
}

}  // namespace rwalk
