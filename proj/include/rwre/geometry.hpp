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

// Lattice and boundary combinatorics for walks restricted to one face of the
// l1 unit sphere.
//
// A face is indexed by a sign vector s in {-1,+1}^d. Its allowed jumps are
// V(s) = {s_i e_i}. A site reachable from the origin in j face jumps is
// described by its jump counts m = (m_1..m_d) with sum j, i.e. by a
// composition of j into d parts; its lattice coordinates are x_i = s_i m_i.
// Within a level, compositions are ordered lexicographically on the first
// d-1 counts; LevelIndex ranks them.

#ifndef RWRE_GEOMETRY_HPP_
#define RWRE_GEOMETRY_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "rwre/common.hpp"

namespace rwre {

/// One of the 2d unit vectors +-e_axis.
struct Direction {
  int axis = 0;
  int sign = 1;

  /// Position in the canonical ordering +e_1, -e_1, +e_2, -e_2, ...
  int Index() const { return 2 * axis + (sign < 0 ? 1 : 0); }
  static Direction FromIndex(int index) {
    return {index / 2, (index % 2 == 0) ? 1 : -1};
  }
  friend bool operator==(const Direction&, const Direction&) = default;
};

class Face {
 public:
  Face() = default;
  /// Throws ValidationError unless every entry is +1 or -1 and the
  /// length lies in [kMinDimension, kMaxDimension].
  explicit Face(std::vector<int> signs);

  /// The all-plus face of dimension d.
  static Face Positive(int d);

  int dimension() const { return static_cast<int>(signs_.size()); }
  int sign(int axis) const { return signs_[axis]; }
  const std::vector<int>& signs() const { return signs_; }

  /// The allowed jump s_i e_i.
  Direction jump(int axis) const { return {axis, signs_[axis]}; }
  bool Allows(const Direction& e) const {
    return e.axis >= 0 && e.axis < dimension() && e.sign == signs_[e.axis];
  }

  friend bool operator==(const Face&, const Face&) = default;

 private:
  std::vector<int> signs_;
};

/// The d allowed jumps V(s), ordered by axis.
std::vector<Direction> FaceJumpSet(const Face& face);

/// Point of the hyperplane {x_d = 0} identified with R^{d-1}.
using ProjectedVector = std::vector<double>;

/// Image of the allowed jump `e` under the affine projection of the face
/// hyperplane onto {x_d = 0}: e_i for i < d and -(e_1 + ... + e_{d-1}) for
/// the last axis. Throws ValidationError when e is not in V(s).
ProjectedVector Project(const Face& face, const Direction& e);

/// Inner product <theta, pi(s_axis e_axis)> without materializing pi.
double TiltExponent(std::span<const double> theta, int axis);

class BoundaryPoint {
 public:
  BoundaryPoint() = default;
  /// `delta` holds |x_i|; it must be nonnegative and sum to one within
  /// 1e-12. Throws ValidationError otherwise.
  BoundaryPoint(Face face, std::vector<double> delta);

  const Face& face() const { return face_; }
  const std::vector<double>& delta() const { return delta_; }
  int dimension() const { return face_.dimension(); }

  /// True iff some delta_i vanishes (the point lies on a (d-2)-facet).
  bool on_facet() const;

  /// x = sum_i delta_i s_i e_i.
  std::vector<double> Coordinates() const;

  /// pi(x) = sum_{i<d} (delta_i - delta_d) e_i.
  ProjectedVector Projected() const;

 private:
  Face face_;
  std::vector<double> delta_;
};

/// Integer lattice point of dimension at most kMaxDimension.
class LatticeSite {
 public:
  LatticeSite() = default;
  explicit LatticeSite(int dim) : dim_(dim) {}
  LatticeSite(std::initializer_list<int> coords);
  explicit LatticeSite(std::span<const int> coords);

  int dimension() const { return dim_; }
  int operator[](int i) const { return c_[i]; }
  int& operator[](int i) { return c_[i]; }
  std::span<const int> coords() const { return {c_.data(), static_cast<std::size_t>(dim_)}; }

  int L1Norm() const;
  LatticeSite Step(const Direction& e) const {
    LatticeSite out = *this;
    out.c_[e.axis] += e.sign;
    return out;
  }
  LatticeSite operator+(const LatticeSite& other) const;

  friend bool operator==(const LatticeSite& a, const LatticeSite& b) {
    return a.dim_ == b.dim_ && a.c_ == b.c_;
  }
  friend auto operator<=>(const LatticeSite& a, const LatticeSite& b) {
    return a.coords_tuple() <=> b.coords_tuple();
  }

 private:
  std::array<int, kMaxDimension> coords_tuple() const { return c_; }
  std::array<int, kMaxDimension> c_{};
  int dim_ = 0;
};

struct LatticeSiteHash {
  std::size_t operator()(const LatticeSite& s) const;
};

/// Jump counts along the face axes; sum is the level.
using Composition = std::vector<int>;

/// Lattice site with coordinates s_i m_i, shifted by `origin`.
LatticeSite SiteOf(const Face& face, std::span<const int> counts,
                   const LatticeSite* origin = nullptr);

/// Number of compositions of `total` into `parts` nonnegative parts.
std::uint64_t CompositionCount(int total, int parts);

/// Calls fn(counts) for every composition of `total` into `parts` parts in
/// lexicographic order.
void ForEachComposition(int total, int parts,
                        const std::function<void(std::span<const int>)>& fn);

/// Ranks compositions of a fixed level in the lexicographic order used by the
/// DP sweeps.
class LevelIndex {
 public:
  LevelIndex(int dimension, int max_level);

  int dimension() const { return d_; }
  std::uint64_t Size(int level) const { return count(level, d_); }
  std::uint64_t Rank(std::span<const int> counts) const;

 private:
  std::uint64_t count(int total, int parts) const {
    // compositions of total into parts = C(total + parts - 1, parts - 1)
    return binom_[total + parts - 1][parts - 1];
  }
  int d_;
  int max_level_;
  std::vector<std::vector<std::uint64_t>> binom_;
};

/// All sites x with |x|_1 = n and s_j x_j >= 0, in level-major lexicographic
/// order. Cardinality C(n+d-1, d-1).
std::vector<LatticeSite> BoundarySites(const Face& face, int n);

/// Integer counts (n_1..n_d) with sum n approximating n * delta by
/// largest-remainder apportionment, ties to the lowest index. n_i = 0
/// whenever delta_i = 0.
Composition AdmissibleSequence(const BoundaryPoint& x, int n);

}  // namespace rwre

#endif  // RWRE_GEOMETRY_HPP_
