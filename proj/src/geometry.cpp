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

#include "rwre/geometry.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace rwre {

Face::Face(std::vector<int> signs) : signs_(std::move(signs)) {
  const int d = dimension();
  if (d < kMinDimension || d > kMaxDimension) {
    throw ValidationError("face dimension must lie in [2, 8], got " + std::to_string(d));
  }
  for (int s : signs_) {
    if (s != 1 && s != -1) throw ValidationError("face signs must be +1 or -1");
  }
}

Face Face::Positive(int d) { return Face(std::vector<int>(static_cast<std::size_t>(d), 1)); }

std::vector<Direction> FaceJumpSet(const Face& face) {
  std::vector<Direction> out;
  out.reserve(static_cast<std::size_t>(face.dimension()));
  for (int i = 0; i < face.dimension(); ++i) out.push_back(face.jump(i));
  return out;
}

ProjectedVector Project(const Face& face, const Direction& e) {
  if (!face.Allows(e)) throw ValidationError("direction is not an allowed jump of the face");
  const int d = face.dimension();
  ProjectedVector out(static_cast<std::size_t>(d - 1), 0.0);
  if (e.axis < d - 1) {
    out[e.axis] = 1.0;
  } else {
    std::fill(out.begin(), out.end(), -1.0);
  }
  return out;
}

double TiltExponent(std::span<const double> theta, int axis) {
  if (axis < static_cast<int>(theta.size())) return theta[axis];
  double sum = 0.0;
  for (double t : theta) sum += t;
  return -sum;
}

BoundaryPoint::BoundaryPoint(Face face, std::vector<double> delta)
    : face_(std::move(face)), delta_(std::move(delta)) {
  if (static_cast<int>(delta_.size()) != face_.dimension()) {
    throw ValidationError("boundary point weights must have one entry per axis");
  }
  double sum = 0.0;
  for (double v : delta_) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ValidationError("boundary point weights must be finite and nonnegative");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw ValidationError("boundary point weights must sum to 1 (got " + std::to_string(sum) + ")");
  }
}

bool BoundaryPoint::on_facet() const {
  return std::any_of(delta_.begin(), delta_.end(), [](double v) { return v == 0.0; });
}

std::vector<double> BoundaryPoint::Coordinates() const {
  std::vector<double> x(delta_.size());
  for (std::size_t i = 0; i < delta_.size(); ++i) x[i] = face_.sign(static_cast<int>(i)) * delta_[i];
  return x;
}

ProjectedVector BoundaryPoint::Projected() const {
  const std::size_t m = delta_.size() - 1;
  ProjectedVector out(m);
  for (std::size_t i = 0; i < m; ++i) out[i] = delta_[i] - delta_[m];
  return out;
}

LatticeSite::LatticeSite(std::initializer_list<int> coords)
    : LatticeSite(std::span<const int>(coords.begin(), coords.size())) {}

LatticeSite::LatticeSite(std::span<const int> coords) : dim_(static_cast<int>(coords.size())) {
  if (dim_ > kMaxDimension) throw ValidationError("lattice site dimension exceeds 8");
  std::copy(coords.begin(), coords.end(), c_.begin());
}

int LatticeSite::L1Norm() const {
  int s = 0;
  for (int i = 0; i < dim_; ++i) s += std::abs(c_[i]);
  return s;
}

LatticeSite LatticeSite::operator+(const LatticeSite& other) const {
  LatticeSite out = *this;
  for (int i = 0; i < dim_; ++i) out.c_[i] += other.c_[i];
  return out;
}

std::size_t LatticeSiteHash::operator()(const LatticeSite& s) const {
  std::uint64_t h = 1469598103934665603ull;
  for (int v : s.coords()) {
    h ^= static_cast<std::uint32_t>(v);
    h *= 1099511628211ull;
  }
  return static_cast<std::size_t>(h);
}

LatticeSite SiteOf(const Face& face, std::span<const int> counts, const LatticeSite* origin) {
  LatticeSite out(face.dimension());
  for (int i = 0; i < face.dimension(); ++i) {
    out[i] = face.sign(i) * counts[i] + (origin ? (*origin)[i] : 0);
  }
  return out;
}

std::uint64_t CompositionCount(int total, int parts) {
  if (total < 0 || parts < 1) return 0;
  return Choose(total + parts - 1, parts - 1);
}

namespace {

void CompositionsRec(int remaining, int index, std::vector<int>& counts,
                     const std::function<void(std::span<const int>)>& fn) {
  const int parts = static_cast<int>(counts.size());
  if (index == parts - 1) {
    counts[index] = remaining;
    fn(counts);
    return;
  }
  for (int v = 0; v <= remaining; ++v) {
    counts[index] = v;
    CompositionsRec(remaining - v, index + 1, counts, fn);
  }
}

}  // namespace

void ForEachComposition(int total, int parts,
                        const std::function<void(std::span<const int>)>& fn) {
  if (total < 0 || parts < 1) return;
  std::vector<int> counts(static_cast<std::size_t>(parts), 0);
  CompositionsRec(total, 0, counts, fn);
}

LevelIndex::LevelIndex(int dimension, int max_level) : d_(dimension), max_level_(max_level) {
  const int rows = max_level + dimension + 1;
  binom_.assign(static_cast<std::size_t>(rows), std::vector<std::uint64_t>(static_cast<std::size_t>(dimension), 0));
  for (int r = 0; r < rows; ++r) {
    for (int k = 0; k < dimension; ++k) binom_[r][k] = Choose(r, k);
  }
}

std::uint64_t LevelIndex::Rank(std::span<const int> counts) const {
  int remaining = 0;
  for (int v : counts) remaining += v;
  std::uint64_t rank = 0;
  for (int k = 0; k + 1 < d_; ++k) {
    const int parts_after = d_ - k - 1;
    // Compositions whose k-th count is smaller than counts[k]; the sum over
    // v < c of C(r-v+p-1, p-1) telescopes to C(r+p, p) - C(r-c+p, p).
    rank += binom_[remaining + parts_after][parts_after] -
            binom_[remaining - counts[k] + parts_after][parts_after];
    remaining -= counts[k];
  }
  return rank;
}

std::vector<LatticeSite> BoundarySites(const Face& face, int n) {
  std::vector<LatticeSite> out;
  if (n < 0) return out;
  out.reserve(static_cast<std::size_t>(CompositionCount(n, face.dimension())));
  ForEachComposition(n, face.dimension(),
                     [&](std::span<const int> m) { out.push_back(SiteOf(face, m)); });
  return out;
}

Composition AdmissibleSequence(const BoundaryPoint& x, int n) {
  if (n < 1) throw ValidationError("admissible sequence requires n >= 1");
  const auto& delta = x.delta();
  const std::size_t d = delta.size();
  Composition counts(d, 0);
  std::vector<double> remainder(d, 0.0);
  int assigned = 0;
  for (std::size_t i = 0; i < d; ++i) {
    double q = n * delta[i];
    if (std::abs(q - std::round(q)) < 1e-9) q = std::round(q);
    counts[i] = static_cast<int>(std::floor(q));
    remainder[i] = q - counts[i];
    assigned += counts[i];
  }
  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t k = 0; assigned < n; ++k) {
    const std::size_t i = order[k % d];
    if (delta[i] == 0.0) continue;
    ++counts[i];
    ++assigned;
  }
  return counts;
}

}  // namespace rwre
