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

// Annealed rate functions on a face of the l1 sphere.
//
// psi(theta) = sum_{e in V(s)} alpha(e) exp<theta, pi(e)> is the face
// moment generating function of the projected walk. Its log is smooth and
// strictly convex, and for x in the face
//
//   I_a(x) = sup_theta <theta, pi(x)> - log psi(theta)
//          = sum_i delta_i log(delta_i / alpha(s_i e_i))      (0 log 0 = 0).

#ifndef RWRE_RATE_FUNCTIONS_HPP_
#define RWRE_RATE_FUNCTIONS_HPP_

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rwre/environment.hpp"
#include "rwre/geometry.hpp"

namespace rwre {

double Psi(const JumpLaw& alpha, const Face& face, std::span<const double> theta);
double LogPsi(const JumpLaw& alpha, const Face& face, std::span<const double> theta);
ProjectedVector GradLogPsi(const JumpLaw& alpha, const Face& face, std::span<const double> theta);
/// Symmetric positive definite (d-1)x(d-1) Hessian of log psi.
Eigen::MatrixXd HessLogPsi(const JumpLaw& alpha, const Face& face, std::span<const double> theta);

/// lambda(theta) = sum over all 2d directions of alpha(e) exp<theta, e>,
/// theta in R^d.
double LambdaMgf(const JumpLaw& alpha, std::span<const double> theta);

/// sum_i delta_i log(delta_i / alpha(s_i e_i)) with zero terms dropped.
double AnnealedRateBoundary(const JumpLaw& alpha, const BoundaryPoint& x);

struct TiltResult {
  ProjectedVector theta;  // empty when the supremum is not attained
  double value = 0.0;
  bool attained = false;
  int iterations = 0;
};

/// theta(x)_i = log(delta_i C / alpha(s_i e_i)),
/// C = (prod_i alpha(s_i e_i) / delta_i)^(1/d). Requires every delta_i > 0;
/// throws ValidationError on facet points.
ProjectedVector ExposingTilt(const JumpLaw& alpha, const BoundaryPoint& x);

/// Maximizes <theta, pi(x)> - log psi(theta) by safeguarded Newton from the
/// closed-form tilt. Facet points report attained = false with the limiting
/// closed-form value. Throws NumericalError if the iteration fails.
TiltResult LegendreSup(const JumpLaw& alpha, const BoundaryPoint& x);

struct FaceSummary {
  Face face;
  double min_value = 0.0;     // -log sum_i alpha(s_i e_i)
  BoundaryPoint minimizer;    // delta_i proportional to alpha(s_i e_i)
};

FaceSummary FaceMinimizer(const JumpLaw& alpha, const Face& face);

}  // namespace rwre

#endif  // RWRE_RATE_FUNCTIONS_HPP_
