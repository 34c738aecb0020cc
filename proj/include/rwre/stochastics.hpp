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

// Tilted projected walks and the collision machinery behind the L2 bound on
// the partition function.
//
// Two independent walks X, Y with jump law alpha^theta on the projected jumps
// pi(e), e in V(s), collide when their difference Z = X - Y returns to 0. The
// expected number of collisions (the Green function at 0) controls
// E[exp(V sum_j 1{Z_j = 0})] through the Khas'minskii bound.

#ifndef RWRE_STOCHASTICS_HPP_
#define RWRE_STOCHASTICS_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rwre/environment.hpp"
#include "rwre/geometry.hpp"

namespace rwre {

/// alpha^theta(pi(e)) = alpha(e) exp<theta, pi(e)> / psi(theta) over the
/// face jumps, indexed by axis.
class TiltedLaw {
 public:
  TiltedLaw(const JumpLaw& alpha, const Face& face, ProjectedVector theta);

  const Face& face() const { return face_; }
  const ProjectedVector& theta() const { return theta_; }
  int dimension() const { return face_.dimension(); }
  const std::vector<double>& weights() const { return weights_; }
  double weight(int axis) const { return weights_[axis]; }

  /// Mean of Z_1 = X_1 - Y_1; zero up to round-off.
  ProjectedVector DifferenceMean() const;
  /// Covariance of Z_1, twice the covariance of pi(e) under the law.
  Eigen::MatrixXd DifferenceCovariance() const;
  /// E|Z_1|^4.
  double DifferenceFourthMoment() const;
  /// chi(xi) = E exp(i <xi, Z_1>) = |sum_i q_i exp(i <xi, pi(e_i)>)|^2.
  double CharacteristicFunction(std::span<const double> xi) const;

 private:
  Face face_;
  ProjectedVector theta_;
  std::vector<double> weights_;
};

struct GreenResult {
  double partial_sum = 0.0;       // sum_{j <= J} P(Z_j = 0)
  std::vector<double> terms;      // P(Z_j = 0), j = 0..J
  int truncation = 0;             // J
  /// Heuristic: geometric extrapolation of the tail from the ratio of the
  /// last two terms. Not a bound.
  double tail_estimate = 0.0;
  /// Raised when d - 1 <= 2, where the difference walk is recurrent.
  bool divergence_warning = false;
};

/// Exact return probabilities P(Z_j = 0), j <= J. Collisions happen exactly
/// when the two jump-count vectors agree, so
///   P(Z_j = 0) = sum_{|m| = j} Multinomial(m; j, q)^2,
/// which is evaluated by splitting off one axis at a time with binomial
/// weights. Cost O(d J^{3/2}).
GreenResult GreenFunction(const TiltedLaw& law, int J);

/// 1 / (1 - c * eta_green), or nullopt when c * eta_green >= 1 and the
/// bound does not apply.
std::optional<double> KhasminskiiBound(double c, double eta_green);

/// V(pi(e), pi(e')) = log(E[omega(0,e) omega(0,e')] / (alpha(e) alpha(e'))).
double CollisionPotential(const DisorderSpec& spec, const Direction& e, const Direction& e2);
/// max over e, e' in V(s) of the collision potential.
double MaxCollisionPotential(const DisorderSpec& spec, const Face& face);

struct FourierOptions {
  double radius = 0.0;              // 0 selects pi sqrt(d-1) / d
  int grid = 48;                    // cells per axis in each radial shell
  std::optional<double> c0;         // overrides the analytic inner-ball coefficient
};

struct FourierReport {
  double bound = 0.0;
  double constant = 0.0;            // C_m = m^{m/2} / (2 (1 - cos 1))^m, m = d - 1
  double radius = 0.0;
  double inner_radius = 0.0;
  double c0 = 0.0;
  double inner_integral = 0.0;
  double outer_integral = 0.0;
};

/// C_m r^{-m} int_{B_r} d xi / (1 - chi(xi)), m = d - 1. On the inner ball
/// |xi| <= rho the integrand is replaced by 1 / (c0 |xi|^2), using
/// 1 - chi >= lambda_min/2 |xi|^2 - E|Z|^4 |xi|^4 / 24. The outer region is
/// integrated by the midpoint rule on dyadic radial shells. Infinite when
/// m <= 2.
FourierReport FourierBound(const TiltedLaw& law, const FourierOptions& options = {});

/// E[exp(v * #{j < n : Z_j = 0})], computed exactly by the pair DP.
double OccupationExponential(const TiltedLaw& law, double v, int n,
                             std::size_t budget_bytes = kDefaultBudgetBytes);

struct Trajectory {
  std::vector<LatticeSite> sites;   // X_0 .. X_n
  std::vector<Direction> jumps;     // Delta_1 .. Delta_n
  bool in_face = false;             // B_n: every jump lies in V(s)
  ProjectedVector projected_sum;    // sum_j pi(Delta_j) when in_face, else empty
};

/// Quenched walk of n steps from the origin. Step j draws its uniform from
/// the walk stream of `seed` keyed by j.
template <EnvironmentView Env>
Trajectory SimulateWalk(const Env& env, const Face& face, int n, std::uint64_t seed);

/// Only the indicator of B_n; stops at the first jump leaving V(s).
template <EnvironmentView Env>
bool SimulateStaysInFace(const Env& env, const Face& face, int n, std::uint64_t seed);

// Implementation -----------------------------------------------------------

namespace detail {

template <EnvironmentView Env>
Direction DrawJump(const Env& env, const LatticeSite& x, double u) {
  const int d = x.dimension();
  double acc = 0.0;
  for (int k = 0; k < 2 * d; ++k) {
    const Direction e = Direction::FromIndex(k);
    acc += env.Omega(x, e);
    if (u < acc) return e;
  }
  return Direction::FromIndex(2 * d - 1);
}

inline double WalkUniform(std::uint64_t seed, int step) {
  const int key[1] = {step};
  return ToUnitInterval(KeyedBits(seed, Stream::kWalk, key));
}

}  // namespace detail

template <EnvironmentView Env>
Trajectory SimulateWalk(const Env& env, const Face& face, int n, std::uint64_t seed) {
  Trajectory t;
  LatticeSite x(face.dimension());
  t.sites.push_back(x);
  t.in_face = true;
  for (int j = 1; j <= n; ++j) {
    const Direction e = detail::DrawJump(env, x, detail::WalkUniform(seed, j));
    if (!face.Allows(e)) t.in_face = false;
    t.jumps.push_back(e);
    x = x.Step(e);
    t.sites.push_back(x);
  }
  if (t.in_face) {
    t.projected_sum.assign(static_cast<std::size_t>(face.dimension() - 1), 0.0);
    for (const Direction& e : t.jumps) {
      const auto p = Project(face, e);
      for (std::size_t k = 0; k < p.size(); ++k) t.projected_sum[k] += p[k];
    }
  }
  return t;
}

template <EnvironmentView Env>
bool SimulateStaysInFace(const Env& env, const Face& face, int n, std::uint64_t seed) {
  LatticeSite x(face.dimension());
  for (int j = 1; j <= n; ++j) {
    const Direction e = detail::DrawJump(env, x, detail::WalkUniform(seed, j));
    if (!face.Allows(e)) return false;
    x = x.Step(e);
  }
  return true;
}

}  // namespace rwre

#endif  // RWRE_STOCHASTICS_HPP_
