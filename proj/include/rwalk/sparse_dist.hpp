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

#include "rational.hpp"

#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>

namespace rwalk {

/// Finitely supported distribution with explicit truncation accounting.
///
/// Invariant: every stored entry is strictly positive and
/// total() + leaked == 1 (exactly for Rational, to rounding for floats).
template <class Key, class Prob = Rational>
struct SparseDist {
  std::map<Key, Prob> entries;
  Prob leaked = Prob(0);

  static SparseDist point(const Key& k) {
    SparseDist d;
    d.entries.emplace(k, Prob(1));
    return d;
  }

  void add(const Key& k, const Prob& p) {
    if (p == Prob(0)) return;
    auto [it, inserted] = entries.try_emplace(k, p);
    if (!inserted) it->second += p;
  }

  Prob mass(const Key& k) const {
    auto it = entries.find(k);
    return it == entries.end() ? Prob(0) : it->second;
  }

  Prob total() const {
    Prob s(0);
    for (const auto& [k, p] : entries) s += p;
    return s;
  }

  std::size_t size() const { return entries.size(); }
};

/// Total variation distance between two distributions on the same keys,
/// ignoring leaked mass.
template <class Key, class P1, class P2>
long double total_variation(const SparseDist<Key, P1>& a, const SparseDist<Key, P2>& b) {
  auto as_real = [](const auto& p) -> long double {
    if constexpr (std::is_same_v<std::decay_t<decltype(p)>, Rational>) return to_real(p);
    else return static_cast<long double>(p);
  };
  long double tv = 0;
  auto ia = a.entries.begin();
  auto ib = b.entries.begin();
  while (ia != a.entries.end() || ib != b.entries.end()) {
    if (ib == b.entries.end() || (ia != a.entries.end() && ia->first < ib->first)) {
      tv += std::fabs(as_real(ia->second));
      ++ia;
    } else if (ia == a.entries.end() || ib->first < ia->first) {
      tv += std::fabs(as_real(ib->second));
      ++ib;
    } else {
      tv += std::fabs(as_real(ia->second) - as_real(ib->second));
      ++ia;
      ++ib;
    }
  }
  return tv / 2;
}

}  // namespace rwalk
