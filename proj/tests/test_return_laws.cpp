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

#include <rwalk/chain.hpp>
#include <rwalk/return_laws.hpp>

#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

namespace rwalk {
namespace {

// Exact P(R_1 = n) for n <= 16 by running all 2^n sign paths.
Rational enumerate_first_return(int n) {
  BigInt count = 0;
  for (std::uint32_t bits = 0; bits < (1u << n); ++bits) {
    int x = 0, first = 0;
    for (int k = 0; k < n && first == 0; ++k) {
      x += (bits >> k & 1u) ? 1 : -1;
      if (x == 0) first = k + 1;
    }
    if (first == n) ++count;
  }
  return Rational(count, BigInt(1) << n);
}

BigInt binomial(long n, long k) {
  BigInt r = 1;
  for (long i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

const NuLaw& reference_nu() {
  static const NuLaw nu = nu_law(2000, 4000000);
  return nu;
}

TEST(FirstReturnLaw, SmallValues) {
  const auto law = first_return_law(64);
  EXPECT_EQ(*law.exact(2), Rational(1, 2));
  EXPECT_EQ(*law.exact(4), Rational(1, 8));
  EXPECT_EQ(*law.exact(3), Rational(0));
  EXPECT_EQ(law.prob(3), 0.0L);
  EXPECT_EQ(law.prob(0), 0.0L);
}

TEST(FirstReturnLaw, MatchesPathEnumeration) {
  const auto law = first_return_law(16);
  for (int n = 1; n <= 16; ++n) EXPECT_EQ(*law.exact(n), enumerate_first_return(n)) << "n=" << n;
}

TEST(FirstReturnLaw, MatchesCatalanClosedForm) {
  // P(R_1 = 2m) = C(2m - 2, m - 1) / (m 2^{2m - 1}).
  const auto law = first_return_law(64);
  for (long m = 1; m <= 32; ++m)
    EXPECT_EQ(*law.exact(2 * m), Rational(binomial(2 * m - 2, m - 1), BigInt(m) << (2 * m - 1))) << m;
}

TEST(FirstReturnLaw, MassAccounting) {
  const auto small = first_return_law(64);
  Rational s = *small.exact_tail_mass();
  for (int n = 2; n <= 64; n += 2) s += *small.exact(n);
  EXPECT_EQ(s, Rational(1));

  const auto big = first_return_law(20000);
  long double t = big.tail_mass();
  for (std::int64_t n = 2; n <= 20000; n += 2) t += big.prob(n);
  EXPECT_NEAR(static_cast<double>(t), 1.0, 1e-12);
  EXPECT_FALSE(big.exact(66).has_value());
  EXPECT_NEAR(static_cast<double>(big.prob(64)), to_real<double>(*big.exact(64)), 1e-18);
}

TEST(FirstReturnLaw, RejectsOddOrSmallBound) {
  EXPECT_THROW(first_return_law(3), std::invalid_argument);
  EXPECT_THROW(first_return_law(0), std::invalid_argument);
}

TEST(KestenFit, SlopeAndConstant) {
  const auto law = first_return_law(1000);
  const auto fit = kesten_fit(law, 100, 1000);
  EXPECT_GE(fit.slope, -1.55);
  EXPECT_LE(fit.slope, -1.45);
  EXPECT_NEAR(fit.tau_hat, 0.798, 0.02);
  // n^{3/2} P(R_1 = n) is flat to within 3% over [500, 1000].
  double lo = 1e9, hi = 0;
  for (std::int64_t n = 500; n <= 1000; n += 2) {
    const double v = static_cast<double>(law.prob(n) * std::pow(static_cast<long double>(n), 1.5L));
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  EXPECT_LT((hi - lo) / lo, 0.03);
}

TEST(KestenFit, RecoversPlantedExponent) {
  std::vector<long double> probs;
  long double z = 0;
  for (int m = 1; m <= 500; ++m) z += std::pow(2.0L * m, -1.5L);
  for (int m = 1; m <= 500; ++m) probs.push_back(std::pow(2.0L * m, -1.5L) / z);
  const auto law = ReturnTimeLaw::from_probs(probs, 0);
  const auto fit = kesten_fit(law, 100, 1000);
  EXPECT_NEAR(fit.slope, -1.5, 1e-6);
  EXPECT_NEAR(fit.tau_hat, static_cast<double>(1 / z), 1e-6);
}

TEST(KestenFit, NeedsTenPoints) {
  const auto law = first_return_law(100);
  EXPECT_THROW(kesten_fit(law, 80, 96), std::invalid_argument);
  EXPECT_THROW(kesten_fit(law, 2, 200), std::invalid_argument);
  EXPECT_NO_THROW(kesten_fit(law, 80, 100));
}

TEST(LocalConstant, ApproachesLatticeValue) {
  EXPECT_NEAR(static_cast<double>(local_constant_estimate(1000000)), std::sqrt(2 / std::numbers::pi), 1e-6);
  EXPECT_THROW(local_constant_estimate(3), std::invalid_argument);
}

TEST(NuLaw, SymmetryAndParity) {
  const auto nu = nu_law(300, 90000);
  for (std::int64_t l = -300; l <= 300; ++l) {
    EXPECT_EQ(nu(l), nu(-l));
    if (l % 2 != 0) EXPECT_EQ(nu(l), 0.0L);
    else EXPECT_GT(nu(l), 0.0L);
  }
  EXPECT_EQ(nu(1), 0.0L);
  EXPECT_EQ(nu(302), 0.0L);
  EXPECT_NEAR(static_cast<double>(nu.window_mass() + nu.tail_mass()), 1.0, 1e-12);
  EXPECT_THROW(nu_law(3, 10), std::invalid_argument);
}

TEST(NuLaw, ShortTableMatchesDirectSum) {
  // Direct double sum with exact rationals on a small truncation.
  const std::int64_t K = 40;
  const auto nu = nu_law(6, K);
  const auto law = first_return_law(K, K);
  for (std::int64_t l = 0; l <= 6; l += 2) {
    Rational s = 0;
    for (std::int64_t k = std::max<std::int64_t>(l, 2); k <= K; k += 2)
      s += *law.exact(k) * Rational(binomial(k, (k + l) / 2), BigInt(1) << k);
    EXPECT_NEAR(static_cast<double>(nu(l)), to_real<double>(s), 1e-15) << l;
  }
}

TEST(NuLaw, TruncationBoundIsHonoured) {
  const auto a = nu_law(200, 40000);
  const auto b = nu_law(200, 80000);
  for (std::int64_t l = -200; l <= 200; l += 2) EXPECT_LT(std::fabs(b(l) - a(l)), a.error_bound());
  EXPECT_NEAR(static_cast<double>(a.return_tail),
              static_cast<double>(first_return_law(40000).tail_mass()), 1e-15);
}

TEST(NuLaw, ZeroMatchesStepLevelMonteCarlo) {
  // Diagonal walk run step by step until the vertical coordinate returns,
  // capped at K steps; the exact counterpart is nu truncated at K.
  const std::int64_t K = 4000;
  const std::uint64_t n = 1000000;
  const auto hits = deterministic_reduce<std::uint64_t>(
      n, 4096, [] { return std::uint64_t{0}; },
      [&](std::uint64_t& acc, std::uint64_t s) {
        auto rng = make_stream(31, s, StreamDomain::Path);
        std::int64_t i = 0, j = 0;
        std::uint32_t bits = 0;
        int left = 0;
        for (std::int64_t k = 1; k <= K; ++k) {
          if (left == 0) {
            bits = rng();
            left = 16;
          }
          i += (bits & 1u) ? 1 : -1;
          j += (bits & 2u) ? 1 : -1;
          bits >>= 2;
          --left;
          if (i == 0) {
            if (j == 0) ++acc;
            return;
          }
        }
      },
      [](std::uint64_t& t, const std::uint64_t& p) { t += p; });
  const double exact = static_cast<double>(nu_law(2, K)(0));
  const auto est = wilson(hits, n);
  EXPECT_LT(std::abs(est.estimate - exact), 3 * est.sigma_at(exact));
}

TEST(TailFunctional, StableTailConstant) {
  const auto& nu = reference_nu();
  std::map<std::int64_t, long double> f;
  for (std::int64_t m : {50, 100, 200, 400, 800}) f[m] = tail_functional(nu, m).value();
  const long double sigma = richardson_limit(f[200], f[400]);
  EXPECT_NEAR(static_cast<double>(sigma), 0.318, 0.02);
  for (std::int64_t m : {50, 100, 200, 400}) EXPECT_LT(std::fabs(f[m] - sigma) / sigma, 0.15L) << m;
  // m F~(m) moves by less than 5% between m and 2m once m >= 200.
  EXPECT_LT(std::fabs(f[400] - f[200]) / f[200], 0.05L);
  EXPECT_LT(std::fabs(f[800] - f[400]) / f[400], 0.05L);
  // The correction is of order 1/m: successive differences halve.
  const long double r = (f[100] - f[200]) / (f[200] - f[400]);
  EXPECT_NEAR(static_cast<double>(r), 2.0, 0.2);
}

TEST(TailFunctional, MonotoneAndTotalMass) {
  const auto& nu = reference_nu();
  long double prev = 2;
  for (std::int64_t m = 1; m <= 800; ++m) {
    const long double t = tail_functional(nu, m).tail();
    EXPECT_LE(t, prev) << m;
    prev = t;
  }
  // nu(0) + P(Z >= 2) + P(Z <= -2) = 1.
  const auto t2 = tail_functional(nu, 2);
  EXPECT_NEAR(static_cast<double>(nu(0) + 2 * t2.tail()), 1.0, static_cast<double>(2 * t2.error_bound) + 1e-12);
}

TEST(TailFunctional, RefusesUncertifiedPoints) {
  const auto& nu = reference_nu();
  EXPECT_THROW(tail_functional(nu, 0), std::domain_error);
  EXPECT_THROW(tail_functional(nu, 2002), std::domain_error);
  const auto coarse = nu_law(2000, 20000);
  EXPECT_THROW(tail_functional(coarse, 1000), std::domain_error);
  EXPECT_NO_THROW(tail_functional(coarse, 10));
}

TEST(NuCache, RoundTrip) {
  const auto nu = nu_law(100, 10000);
  std::stringstream a;
  write_nu_csv(a, nu);
  const auto back = read_nu_csv(a, 100, 10000);
  for (std::int64_t l = -100; l <= 100; l += 2)
    EXPECT_NEAR(static_cast<double>(back(l)), static_cast<double>(nu(l)), 1e-17);
  std::stringstream b, c;
  write_nu_csv(b, back);
  const auto again = read_nu_csv(b, 100, 10000);
  write_nu_csv(c, again);
  std::stringstream b2;
  write_nu_csv(b2, back);
  EXPECT_EQ(b2.str(), c.str());
  EXPECT_EQ(back.half, again.half);
}

TEST(NuCache, DetectsCorruption) {
  const auto nu = nu_law(20, 400);
  std::stringstream s;
  write_nu_csv(s, nu);
  const std::string text = s.str();
  auto read = [](std::string t, std::int64_t l, std::int64_t k) {
    std::istringstream in(t);
    return read_nu_csv(in, l, k);
  };
  EXPECT_NO_THROW(read(text, 20, 400));
  EXPECT_THROW(read(text, 20, 800), std::runtime_error);
  EXPECT_THROW(read("junk\n" + text, 20, 400), std::runtime_error);
  EXPECT_THROW(read(text.substr(0, text.size() / 2), 20, 400), std::runtime_error);
  std::string asym = text;
  const auto pos = asym.find("\n-20,");
  asym[pos + 6] = asym[pos + 6] == '1' ? '2' : '1';
  EXPECT_THROW(read(asym, 20, 400), std::runtime_error);
}

TEST(ExcursionSampler, InversionBoundaries) {
  const ExcursionSampler s(1024);
  EXPECT_EQ(s.return_time(1.0), 2);
  EXPECT_EQ(s.return_time(0.5000001), 2);
  EXPECT_EQ(s.return_time(0.4999999), 4);
  EXPECT_EQ(s.return_time(0.3749999), 6);
  // Beyond the table the asymptotic inversion lands within one step of
  // the exact quantile.
  for (double u : {1e-2, 1e-3, 1e-5}) {
    const std::int64_t m = s.return_time(u) / 2;
    auto log_surv = [](double mm) {
      return std::lgamma(2 * mm + 1) - 2 * std::lgamma(mm + 1) - 2 * mm * std::log(2.0);
    };
    EXPECT_LT(log_surv(static_cast<double>(m) + 1), std::log(u)) << u;
    EXPECT_GE(log_surv(static_cast<double>(m) - 2), std::log(u)) << u;
  }
}

TEST(ExcursionSampler, ReturnTimeAndIncrementLaws) {
  const ExcursionSampler s;
  const auto law = first_return_law(10000);
  const auto& nu = reference_nu();
  const std::uint64_t n = 1000000;
  std::map<std::int64_t, std::uint64_t> rt, inc;
  std::uint64_t long_ones = 0;
  auto rng = make_stream(5, 0, StreamDomain::Excursion);
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto [k, x] = s.excursion(rng);
    ASSERT_EQ(k % 2, 0);
    ASSERT_EQ(x % 2, 0);
    if (k <= 10) ++rt[k];
    if (k > 10000) ++long_ones;
    if (std::abs(x) <= 10) ++inc[x];
  }
  auto check = [&](std::uint64_t c, double p, const std::string& what) {
    const double sd = std::sqrt(p * (1 - p) / static_cast<double>(n));
    EXPECT_LT(std::abs(static_cast<double>(c) / static_cast<double>(n) - p), 4 * sd) << what;
  };
  for (std::int64_t k = 2; k <= 10; k += 2) check(rt[k], static_cast<double>(law.prob(k)), "R=" + std::to_string(k));
  check(long_ones, static_cast<double>(law.tail_mass()), "R>10000");
  for (std::int64_t l = -10; l <= 10; l += 2) check(inc[l], static_cast<double>(nu(l)), "S=" + std::to_string(l));
}

TEST(ExcursionSampler, IncrementMoments) {
  const ExcursionSampler s;
  auto rng = make_stream(6, 0, StreamDomain::Excursion);
  for (std::int64_t k : {10, 64, 130, 5000, 1000000}) {
    const int n = 20000;
    double sum = 0, sq = 0;
    for (int i = 0; i < n; ++i) {
      const auto x = s.increment(k, rng);
      ASSERT_EQ((x + k) % 2, 0);
      ASSERT_LE(std::abs(x), k);
      sum += static_cast<double>(x);
      sq += static_cast<double>(x) * static_cast<double>(x);
    }
    const double kk = static_cast<double>(k);
    EXPECT_LT(std::abs(sum / n), 5 * std::sqrt(kk / n)) << k;
    EXPECT_NEAR(sq / n / kk, 1.0, 0.05) << k;
  }
}

}  // namespace
}  // namespace rwalk
