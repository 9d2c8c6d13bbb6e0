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

#include <rwalk/space.hpp>

#include <gtest/gtest.h>

#include <set>

namespace rwalk {
namespace {

TEST(Generators, InversesPairUp) {
  EXPECT_EQ(inverse(Generator::B), Generator::Binv);
  EXPECT_EQ(inverse(Generator::Cinv), Generator::C);
  EXPECT_THROW(inverse(Generator::A), std::invalid_argument);
}

TEST(ZAction, TailMovesRightUnderA) {
  EXPECT_EQ(apply_z(Generator::A, Tail{-3}), ZState(Tail{-2}));
  EXPECT_EQ(apply_z(Generator::A, Tail{0}), ZState(Tail{1}));
  EXPECT_EQ(apply_z(Generator::A, Tail{7}), ZState(Tail{8}));
}

TEST(ZAction, SideLettersSwapTheTwoEndpoints) {
  for (auto g : {Generator::B, Generator::Binv, Generator::C, Generator::Cinv}) {
    EXPECT_EQ(apply_z(g, Tail{0}), ZState(Inlet{0}));
    EXPECT_EQ(apply_z(g, Inlet{0}), ZState(Tail{0}));
    EXPECT_EQ(apply_z(g, Tail{4}), ZState(Tail{4}));
    EXPECT_EQ(apply_z(g, Tail{-4}), ZState(Tail{-4}));
    EXPECT_EQ(apply_z(g, Inlet{-2}), ZState(Inlet{-2}));
  }
}

TEST(ZAction, InletFeedsPi) {
  EXPECT_EQ(apply_z(Generator::A, Inlet{0}), NamedPoints::pi());
  EXPECT_EQ(apply_z(Generator::A, Inlet{-1}), ZState(Inlet{0}));
}

TEST(ZAction, ATranslatesOnlyTheHalfAxis) {
  EXPECT_EQ(apply_z(Generator::A, Lattice{0, 0}), ZState(Lattice{0, 2}));
  EXPECT_EQ(apply_z(Generator::A, Lattice{0, 6}), ZState(Lattice{0, 8}));
  EXPECT_EQ(apply_z(Generator::A, Lattice{0, -2}), ZState(Lattice{0, -2}));
  EXPECT_EQ(apply_z(Generator::A, Lattice{1, 1}), ZState(Lattice{1, 1}));
}

TEST(ZAction, DiagonalStepsAreInvertible) {
  for (std::int64_t i = -3; i <= 3; ++i)
    for (std::int64_t j = -3; j <= 3; ++j) {
      if ((i + j) % 2 != 0) continue;
      const ZState s = Lattice{i, j};
      for (auto g : {Generator::B, Generator::Binv, Generator::C, Generator::Cinv})
        EXPECT_EQ(apply_z(inverse(g), apply_z(g, s)), s);
    }
  // On the side states as well: b and b^-1 act by the same involution.
  for (const ZState s : {ZState(Tail{0}), ZState(Inlet{0}), ZState(Tail{-2})})
    EXPECT_EQ(apply_z(Generator::Binv, apply_z(Generator::B, s)), s);
}

TEST(ZAction, RejectsInvalidStates) {
  EXPECT_THROW(apply_z(Generator::A, Lattice{1, 0}), std::invalid_argument);
  EXPECT_THROW(apply_z(Generator::B, Inlet{2}), std::invalid_argument);
}

TEST(ZAction, StaysOnTheParityLattice) {
  const ZState s = Lattice{2, 4};
  for (auto g : kAllGenerators) EXPECT_TRUE(is_valid(apply_z(g, s)));
}

TEST(NamedPoints, Layout) {
  NamedPoints np;
  EXPECT_EQ(np.o1(), ZState(Tail{0}));
  EXPECT_EQ(np.o2(), ZState(Inlet{0}));
  EXPECT_EQ(np.r(), ZState(Tail{1}));
  EXPECT_EQ(np.p(), ZState(Tail{-3}));
  EXPECT_EQ(np.q(), ZState(Inlet{-3}));
  EXPECT_EQ(to_string(np.pi()), "Lattice(0,0)");
}

TEST(FigureFrame, IsABijection) {
  for (std::int64_t i = -4; i <= 4; ++i)
    for (std::int64_t j = -4; j <= 4; ++j) {
      const Lattice l{i, j};
      const auto [x, y] = to_figure_frame(l);
      EXPECT_EQ(from_figure_frame(x, y), l);
    }
  // Delta is the horizontal half-axis of the picture.
  EXPECT_EQ(to_figure_frame(Lattice{0, 4}), std::make_pair(std::int64_t{4}, std::int64_t{0}));
}

TEST(ZState, OrderIsTotal) {
  std::set<ZState> s{Tail{1}, Inlet{0}, Lattice{0, 0}, Tail{-1}, Lattice{1, 1}};
  EXPECT_EQ(s.size(), 5u);
}

TEST(DiagonalLattice, RejectsA) {
  EXPECT_THROW(apply_diag(Generator::A, {0, 0}), std::invalid_argument);
  EXPECT_EQ(apply_diag(Generator::C, {0, 0}), Point2(1, -1));
  EXPECT_THROW(apply_line(Generator::C, 0), std::invalid_argument);
}

TEST(StepMeasure, Factories) {
  const auto mu = StepMeasure::free_group();
  EXPECT_EQ(mu.size(), 5u);
  for (auto g : kAllGenerators) EXPECT_EQ(mu.weight(g), Rational(1, 5));
  EXPECT_EQ(StepMeasure::diagonal().weight(Generator::A), Rational(0));
  EXPECT_EQ(StepMeasure::simple_line().weight(Generator::B), Rational(1, 2));
}

TEST(StepMeasure, Validation) {
  using G = Generator;
  EXPECT_THROW(StepMeasure({}), std::invalid_argument);
  EXPECT_THROW(StepMeasure({{G::A, Rational(1, 2)}, {G::A, Rational(1, 2)}}), std::invalid_argument);
  EXPECT_THROW(StepMeasure({{G::A, Rational(1, 2)}, {G::B, Rational(1, 3)}}), std::invalid_argument);
  EXPECT_THROW(StepMeasure({{G::A, Rational(3, 2)}, {G::B, Rational(-1, 2)}}), std::invalid_argument);
  EXPECT_NO_THROW(StepMeasure({{G::A, Rational(1, 3)}, {G::B, Rational(2, 3)}}));
}

TEST(StepMeasure, PickInvertsTheCumulativeWeights) {
  const auto mu = StepMeasure::free_group();
  EXPECT_EQ(mu.pick(0.0), Generator::A);
  EXPECT_EQ(mu.pick(0.19), Generator::A);
  EXPECT_EQ(mu.pick(0.21), Generator::B);
  EXPECT_EQ(mu.pick(0.999999), Generator::Cinv);
}

static_assert(Space<ZSpace>);
static_assert(Space<DiagonalLattice>);
static_assert(Space<IntegerLine>);

}  // namespace
}  // namespace rwalk
