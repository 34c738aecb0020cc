// Copyright 2026 The rwre-boundary Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <doctest.h>

#include <set>

#include "rwre/geometry.hpp"

using namespace rwre;

TEST_CASE("face validation") {
  CHECK_THROWS_AS(Face({1}), ValidationError);
  CHECK_THROWS_AS(Face({1, 1, 1, 1, 1, 1, 1, 1, 1}), ValidationError);
  CHECK_THROWS_AS(Face({1, 0, -1}), ValidationError);
  const Face f({1, -1, 1});
  CHECK(f.dimension() == 3);
  CHECK(f.Allows({1, -1}));
  CHECK_FALSE(f.Allows({1, 1}));
  CHECK(FaceJumpSet(f).size() == 3);
}

TEST_CASE("projection sends the last jump to minus the all-ones vector") {
  const Face f = Face::Positive(4);
  CHECK(Project(f, {3, 1}) == ProjectedVector{-1, -1, -1});
  CHECK(Project(f, {0, 1}) == ProjectedVector{1, 0, 0});
  CHECK_THROWS_AS(Project(f, {0, -1}), ValidationError);
  const Face g({-1, 1, -1});
  CHECK(Project(g, {2, -1}) == ProjectedVector{-1, -1});
  const double theta[] = {0.3, -0.2};
  CHECK(TiltExponent(theta, 0) == doctest::Approx(0.3));
  CHECK(TiltExponent(theta, 2) == doctest::Approx(-0.1));
}

TEST_CASE("boundary point checks the simplex") {
  const Face f = Face::Positive(4);
  CHECK_THROWS_AS(BoundaryPoint(f, {0.5, 0.5, 0.1, 0.0}), ValidationError);
  CHECK_THROWS_AS(BoundaryPoint(f, {1.1, -0.1, 0.0, 0.0}), ValidationError);
  CHECK_THROWS_AS(BoundaryPoint(f, {1.0, 0.0, 0.0}), ValidationError);
  const BoundaryPoint x(Face({1, -1, 1, 1}), {0.4, 0.3, 0.2, 0.1});
  CHECK_FALSE(x.on_facet());
  const auto c = x.Coordinates();
  CHECK(c[1] == doctest::Approx(-0.3));
  const auto p = x.Projected();
  CHECK(p[0] == doctest::Approx(0.3));
  CHECK(p[2] == doctest::Approx(0.1));
  CHECK(BoundaryPoint(f, {0.5, 0.5, 0.0, 0.0}).on_facet());
}

TEST_CASE("admissible sequence apportions by largest remainder") {
  const Face f = Face::Positive(4);
  CHECK(AdmissibleSequence(BoundaryPoint(f, {0.5, 0.3, 0.2, 0.0}), 7) == Composition{4, 2, 1, 0});
  CHECK(AdmissibleSequence(BoundaryPoint(f, {0.25, 0.25, 0.25, 0.25}), 6) == Composition{2, 2, 1, 1});
  CHECK_THROWS_AS(AdmissibleSequence(BoundaryPoint(f, {0.25, 0.25, 0.25, 0.25}), 0), ValidationError);
  const BoundaryPoint x(f, {0.4, 0.3, 0.2, 0.1});
  for (int n = 1; n <= 200; ++n) {
    const auto m = AdmissibleSequence(x, n);
    int sum = 0;
    for (std::size_t i = 0; i < m.size(); ++i) {
      sum += m[i];
      CHECK(std::abs(m[i] - n * x.delta()[i]) < 1.0);
    }
    CHECK(sum == n);
  }
}

TEST_CASE("boundary sites of a level") {
  const Face f({1, -1, 1, -1});
  const auto sites = BoundarySites(f, 2);
  CHECK(sites.size() == 10);
  std::set<LatticeSite> unique(sites.begin(), sites.end());
  CHECK(unique.size() == 10);
  for (const auto& x : sites) {
    CHECK(x.L1Norm() == 2);
    for (int i = 0; i < 4; ++i) CHECK(f.sign(i) * x[i] >= 0);
  }
  CHECK(BoundarySites(Face::Positive(5), 4).size() == CompositionCount(4, 5));
}

TEST_CASE("level index ranks compositions in enumeration order") {
  for (int d = 2; d <= 5; ++d) {
    const LevelIndex index(d, 7);
    for (int level = 0; level <= 7; ++level) {
      std::uint64_t expected = 0;
      ForEachComposition(level, d, [&](std::span<const int> m) {
        CHECK(index.Rank(m) == expected);
        ++expected;
      });
      CHECK(expected == index.Size(level));
      CHECK(expected == CompositionCount(level, d));
    }
  }
}

TEST_CASE("site of counts applies signs and origin") {
  const Face f({1, -1, -1});
  const int m[] = {2, 1, 0};
  const LatticeSite x = SiteOf(f, m);
  CHECK(x == LatticeSite{2, -1, 0});
  const LatticeSite o{1, 1, 1};
  CHECK(SiteOf(f, m, &o) == LatticeSite{3, 0, 1});
  CHECK(LatticeSiteHash{}(x) == LatticeSiteHash{}(LatticeSite{2, -1, 0}));
}
