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

// State spaces and generator actions: the integer line, the diagonal lattice
// Z^2 and the Schreier graph Z of the free group F_3 on {a, b, c}.

#include "rational.hpp"

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace rwalk {

enum class Generator : std::uint8_t { A, B, Binv, C, Cinv };

inline constexpr std::array<Generator, 5> kAllGenerators = {
    Generator::A, Generator::B, Generator::Binv, Generator::C, Generator::Cinv};

inline constexpr std::string_view name(Generator g) {
  switch (g) {
    case Generator::A: return "a";
    case Generator::B: return "b";
    case Generator::Binv: return "b^-1";
    case Generator::C: return "c";
    case Generator::Cinv: return "c^-1";
  }
  return "?";
}

/// Inverse generator; A has none.
inline Generator inverse(Generator g) {
  switch (g) {
    case Generator::B: return Generator::Binv;
    case Generator::Binv: return Generator::B;
    case Generator::C: return Generator::Cinv;
    case Generator::Cinv: return Generator::C;
    case Generator::A: break;
  }
  throw std::invalid_argument("generator a has no inverse in any supported step measure");
}

// ---------------------------------------------------------------------------
// States of Z.
//
// Tail(k):   the bi-infinite ray T; Tail(0) = O1, Tail(1) = R.
// Inlet(k):  the ray I indexed by k <= 0; Inlet(0) = O2.
// Lattice(i, j): the lattice part with i + j even; Lattice(0, 0) = pi.
//
// Lattice frame: i is the coordinate transverse to the half-axis Delta and j
// the coordinate along it, Delta = {(0, j) : j >= 0}. b and c move i by +1
// and j by +1 / -1; a translates Delta by two lattice units.
// ---------------------------------------------------------------------------

struct Tail {
  std::int64_t k = 0;
  auto operator<=>(const Tail&) const = default;
};
struct Inlet {
  std::int64_t k = 0;
  auto operator<=>(const Inlet&) const = default;
};
struct Lattice {
  std::int64_t i = 0;
  std::int64_t j = 0;
  auto operator<=>(const Lattice&) const = default;
};

/// Totally ordered by (region, coordinates), which fixes iteration order of
/// distributions keyed by ZState.
using ZState = std::variant<Tail, Inlet, Lattice>;

inline bool is_lattice(const ZState& s) { return std::holds_alternative<Lattice>(s); }
inline bool is_tail(const ZState& s) { return std::holds_alternative<Tail>(s); }
inline bool is_inlet(const ZState& s) { return std::holds_alternative<Inlet>(s); }

inline bool is_valid(const ZState& s) {
  if (const auto* in = std::get_if<Inlet>(&s)) return in->k <= 0;
  if (const auto* l = std::get_if<Lattice>(&s)) return ((l->i + l->j) % 2) == 0;
  return true;
}

inline std::string to_string(const ZState& s) {
  std::ostringstream os;
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Tail>) os << "Tail(" << v.k << ")";
        else if constexpr (std::is_same_v<T, Inlet>) os << "Inlet(" << v.k << ")";
        else os << "Lattice(" << v.i << "," << v.j << ")";
      },
      s);
  return os.str();
}

inline std::ostream& operator<<(std::ostream& os, const ZState& s) { return os << to_string(s); }

/// Named points of Z. P and Q sit `side_offset` arrows left of O1 and O2.
struct NamedPoints {
  std::int64_t side_offset = 3;

  static ZState pi() { return Lattice{0, 0}; }
  static ZState o1() { return Tail{0}; }
  static ZState o2() { return Inlet{0}; }
  static ZState r() { return Tail{1}; }
  ZState p() const { return Tail{-side_offset}; }
  ZState q() const { return Inlet{-side_offset}; }
};

/// Action of a generator on Z. Throws std::invalid_argument on an invalid state.
inline ZState apply_z(Generator g, const ZState& s) {
  if (!is_valid(s)) throw std::invalid_argument("invalid state " + to_string(s));
  if (const auto* t = std::get_if<Tail>(&s)) {
    if (g == Generator::A) return Tail{t->k + 1};
    if (t->k == 0) return Inlet{0};
    return s;
  }
  if (const auto* in = std::get_if<Inlet>(&s)) {
    if (g == Generator::A) {
      if (in->k == 0) return Lattice{0, 0};
      return Inlet{in->k + 1};
    }
    if (in->k == 0) return Tail{0};
    return s;
  }
  const auto& l = std::get<Lattice>(s);
  switch (g) {
    case Generator::A:
      if (l.i == 0 && l.j >= 0) return Lattice{0, l.j + 2};
      return s;
    case Generator::B: return Lattice{l.i + 1, l.j + 1};
    case Generator::Binv: return Lattice{l.i - 1, l.j - 1};
    case Generator::C: return Lattice{l.i + 1, l.j - 1};
    case Generator::Cinv: return Lattice{l.i - 1, l.j + 1};
  }
  return s;
}

/// Maps the lattice frame used here to the frame of the usual picture of Z,
/// where Delta is the horizontal half-axis to the right of pi: (X, Y) = (j, i).
inline std::pair<std::int64_t, std::int64_t> to_figure_frame(const Lattice& l) {
  return {l.j, l.i};
}
inline Lattice from_figure_frame(std::int64_t x, std::int64_t y) { return Lattice{y, x}; }

using Point2 = std::pair<std::int64_t, std::int64_t>;

/// Diagonal steps on Z^2. Rejects the generator a.
inline Point2 apply_diag(Generator g, Point2 p) {
  switch (g) {
    case Generator::B: return {p.first + 1, p.second + 1};
    case Generator::Binv: return {p.first - 1, p.second - 1};
    case Generator::C: return {p.first + 1, p.second - 1};
    case Generator::Cinv: return {p.first - 1, p.second + 1};
    case Generator::A: break;
  }
  throw std::invalid_argument("generator a does not act on the diagonal lattice");
}

/// Nearest-neighbour steps on Z: b = +1, b^-1 = -1.
inline std::int64_t apply_line(Generator g, std::int64_t x) {
  switch (g) {
    case Generator::B: return x + 1;
    case Generator::Binv: return x - 1;
    default: break;
  }
  throw std::invalid_argument("only b and b^-1 act on the integer line");
}

// Space traits consumed by the chain engine.
struct ZSpace {
  using State = ZState;
  static State apply(Generator g, const State& s) { return apply_z(g, s); }
};
struct DiagonalLattice {
  using State = Point2;
  static State apply(Generator g, const State& s) { return apply_diag(g, s); }
};
struct IntegerLine {
  using State = std::int64_t;
  static State apply(Generator g, State s) { return apply_line(g, s); }
};

template <class S>
concept Space = requires(Generator g, const typename S::State& s) {
  { S::apply(g, s) } -> std::convertible_to<typename S::State>;
};

// ---------------------------------------------------------------------------
// Step measures.
// ---------------------------------------------------------------------------

/// A finitely supported probability measure on generators with exact weights.
class StepMeasure {
 public:
  struct Atom {
    Generator generator;
    Rational weight;
  };

  /// Throws std::invalid_argument unless weights are positive, generators
  /// distinct, and the weights sum exactly to 1.
  explicit StepMeasure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
    if (atoms_.empty()) throw std::invalid_argument("step measure has empty support");
    Rational total = 0;
    std::array<bool, 5> seen{};
    for (const auto& a : atoms_) {
      if (a.weight <= 0) throw std::invalid_argument("step measure weights must be positive");
      auto idx = static_cast<std::size_t>(a.generator);
      if (seen[idx]) throw std::invalid_argument("duplicate generator in step measure");
      seen[idx] = true;
      total += a.weight;
    }
    if (total != 1) throw std::invalid_argument("step measure weights sum to " + to_string(total));
    double acc = 0.0;
    for (const auto& a : atoms_) {
      acc += to_real<double>(a.weight);
      cumulative_.push_back(acc);
    }
    cumulative_.back() = 1.0;
  }

  static StepMeasure uniform(std::initializer_list<Generator> gens) {
    std::vector<Atom> atoms;
    const Rational w(1, static_cast<long>(gens.size()));
    for (auto g : gens) atoms.push_back({g, w});
    return StepMeasure(std::move(atoms));
  }

  /// (1/5)(a + b + b^-1 + c + c^-1), the walk on Z.
  static StepMeasure free_group() {
    return uniform({Generator::A, Generator::B, Generator::Binv, Generator::C, Generator::Cinv});
  }
  /// (1/4)(b + b^-1 + c + c^-1), the four diagonal steps.
  static StepMeasure diagonal() {
    return uniform({Generator::B, Generator::Binv, Generator::C, Generator::Cinv});
  }
  /// (1/2)(b + b^-1), the simple walk on the integer line.
  static StepMeasure simple_line() { return uniform({Generator::B, Generator::Binv}); }

  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }

  Rational weight(Generator g) const {
    for (const auto& a : atoms_)
      if (a.generator == g) return a.weight;
    return Rational(0);
  }

  /// Maps u in [0, 1) to a generator by inverting the cumulative weights.
  Generator pick(double u) const {
    for (std::size_t i = 0; i + 1 < cumulative_.size(); ++i)
      if (u < cumulative_[i]) return atoms_[i].generator;
    return atoms_.back().generator;
  }

 private:
  std::vector<Atom> atoms_;
  std::vector<double> cumulative_;
};

}  // namespace rwalk
