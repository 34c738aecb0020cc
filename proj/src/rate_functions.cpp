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

#include "rwre/rate_functions.hpp"

#include <algorithm>
#include <cmath>

namespace rwre {

namespace {

constexpr double kGradTol = 1e-12;
constexpr int kMaxNewton = 100;
constexpr int kBisectionSteps = 200;

void CheckTheta(const Face& face, std::span<const double> theta) {
  if (static_cast<int>(theta.size()) != face.dimension() - 1) {
    throw ValidationError("theta must have d-1 entries");
  }
}

// Terms alpha(s_i e_i) exp(<theta, pi(s_i e_i)>) scaled by exp(-max exponent).
// Returns the log of the scale.
double ScaledTerms(const JumpLaw& alpha, const Face& face, std::span<const double> theta,
                   std::vector<double>& terms) {
  const int d = face.dimension();
  terms.resize(static_cast<std::size_t>(d));
  double top = kNegInf;
  for (int i = 0; i < d; ++i) top = std::max(top, TiltExponent(theta, i));
  for (int i = 0; i < d; ++i) terms[i] = alpha(face.jump(i)) * std::exp(TiltExponent(theta, i) - top);
  return top;
}

double Objective(const JumpLaw& alpha, const Face& face, std::span<const double> target,
                 std::span<const double> theta) {
  double dot = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) dot += theta[i] * target[i];
  return dot - LogPsi(alpha, face, theta);
}

double MaxAbsResidual(const JumpLaw& alpha, const Face& face, std::span<const double> target,
                      std::span<const double> theta) {
  const auto g = GradLogPsi(alpha, face, theta);
  double r = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) r = std::max(r, std::abs(target[i] - g[i]));
  return r;
}

}  // namespace

double Psi(const JumpLaw& alpha, const Face& face, std::span<const double> theta) {
  return std::exp(LogPsi(alpha, face, theta));
}

double LogPsi(const JumpLaw& alpha, const Face& face, std::span<const double> theta) {
  CheckTheta(face, theta);
  std::vector<double> terms;
  const double top = ScaledTerms(alpha, face, theta, terms);
  double s = 0.0;
  for (double t : terms) s += t;
  return top + std::log(s);
}

ProjectedVector GradLogPsi(const JumpLaw& alpha, const Face& face, std::span<const double> theta) {
  CheckTheta(face, theta);
  std::vector<double> terms;
  ScaledTerms(alpha, face, theta, terms);
  double s = 0.0;
  for (double t : terms) s += t;
  const int d = face.dimension();
  ProjectedVector g(static_cast<std::size_t>(d - 1));
  for (int i = 0; i + 1 < d; ++i) g[i] = (terms[i] - terms[d - 1]) / s;
  return g;
}

Eigen::MatrixXd HessLogPsi(const JumpLaw& alpha, const Face& face, std::span<const double> theta) {
  CheckTheta(face, theta);
  std::vector<double> terms;
  ScaledTerms(alpha, face, theta, terms);
  double s = 0.0;
  for (double t : terms) s += t;
  const int d = face.dimension();
  const int m = d - 1;
  // Covariance of pi(e) under the tilted law q_i = terms_i / s.
  Eigen::VectorXd q(d);
  for (int i = 0; i < d; ++i) q(i) = terms[i] / s;
  Eigen::VectorXd mean(m);
  for (int k = 0; k < m; ++k) mean(k) = q(k) - q(d - 1);
  Eigen::MatrixXd second = Eigen::MatrixXd::Constant(m, m, q(d - 1));
  for (int k = 0; k < m; ++k) second(k, k) += q(k);
  return second - mean * mean.transpose();
}

double LambdaMgf(const JumpLaw& alpha, std::span<const double> theta) {
  const int d = alpha.dimension();
  if (static_cast<int>(theta.size()) != d) throw ValidationError("theta must have d entries");
  double s = 0.0;
  for (int k = 0; k < 2 * d; ++k) {
    const Direction e = Direction::FromIndex(k);
    s += alpha(e) * std::exp(e.sign * theta[e.axis]);
  }
  return s;
}

double AnnealedRateBoundary(const JumpLaw& alpha, const BoundaryPoint& x) {
  double v = 0.0;
  for (int i = 0; i < x.dimension(); ++i) {
    const double di = x.delta()[i];
    if (di > 0.0) v += di * std::log(di / alpha(x.face().jump(i)));
  }
  return v;
}

ProjectedVector ExposingTilt(const JumpLaw& alpha, const BoundaryPoint& x) {
  if (x.on_facet()) throw ValidationError("exposing tilt is undefined on a facet (some delta_i = 0)");
  const int d = x.dimension();
  double log_c = 0.0;
  for (int i = 0; i < d; ++i) log_c += std::log(alpha(x.face().jump(i)) / x.delta()[i]);
  log_c /= d;
  ProjectedVector theta(static_cast<std::size_t>(d - 1));
  for (int i = 0; i + 1 < d; ++i) {
    theta[i] = std::log(x.delta()[i] / alpha(x.face().jump(i))) + log_c;
  }
  return theta;
}

TiltResult LegendreSup(const JumpLaw& alpha, const BoundaryPoint& x) {
  TiltResult out;
  const Face& face = x.face();
  if (x.on_facet()) {
    out.attained = false;
    out.value = AnnealedRateBoundary(alpha, x);
    return out;
  }
  const ProjectedVector target = x.Projected();
  const int m = face.dimension() - 1;
  ProjectedVector theta = ExposingTilt(alpha, x);
  double f = Objective(alpha, face, target, theta);

  bool converged = false;
  for (int it = 0; it < kMaxNewton; ++it) {
    const auto g = GradLogPsi(alpha, face, theta);
    Eigen::VectorXd resid(m);
    for (int k = 0; k < m; ++k) resid(k) = target[k] - g[k];
    if (resid.lpNorm<Eigen::Infinity>() <= kGradTol) {
      converged = true;
      break;
    }
    const Eigen::VectorXd step = HessLogPsi(alpha, face, theta).ldlt().solve(resid);
    double t = 1.0;
    ProjectedVector trial(theta.size());
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
      for (int k = 0; k < m; ++k) trial[k] = theta[k] + t * step(k);
      const double ft = Objective(alpha, face, target, trial);
      if (ft >= f - 1e-15 * (1.0 + std::abs(f))) {
        theta = trial;
        f = ft;
        accepted = true;
        break;
      }
    }
    ++out.iterations;
    if (!accepted) break;
  }

  if (!converged && MaxAbsResidual(alpha, face, target, theta) > kGradTol) {
    // Bisection on the directional derivative along t * theta(x); the
    // objective is concave so the derivative is monotone in t.
    const ProjectedVector dir = ExposingTilt(alpha, x);
    auto slope = [&](double t) {
      ProjectedVector p(dir.size());
      for (int k = 0; k < m; ++k) p[k] = t * dir[k];
      const auto g = GradLogPsi(alpha, face, p);
      double s = 0.0;
      for (int k = 0; k < m; ++k) s += (target[k] - g[k]) * dir[k];
      return s;
    };
    double lo = 0.0;
    double hi = 1.0;
    while (slope(hi) > 0.0 && hi < 1e6) hi *= 2.0;
    for (int k = 0; k < kBisectionSteps; ++k) {
      const double mid = 0.5 * (lo + hi);
      (slope(mid) > 0.0 ? lo : hi) = mid;
    }
    for (int k = 0; k < m; ++k) theta[k] = 0.5 * (lo + hi) * dir[k];
    f = Objective(alpha, face, target, theta);
    if (MaxAbsResidual(alpha, face, target, theta) > 1e-8) {
      throw NumericalError("Legendre supremum did not converge");
    }
  }

  out.theta = theta;
  out.value = f;
  out.attained = true;
  return out;
}

FaceSummary FaceMinimizer(const JumpLaw& alpha, const Face& face) {
  const double mass = alpha.FaceMass(face);
  std::vector<double> delta(static_cast<std::size_t>(face.dimension()));
  for (int i = 0; i < face.dimension(); ++i) delta[i] = alpha(face.jump(i)) / mass;
  // Guard the unit-sum check against round-off in the division.
  double sum = 0.0;
  for (double v : delta) sum += v;
  for (double& v : delta) v /= sum;
  return {face, -std::log(mass), BoundaryPoint(face, std::move(delta))};
}

}  // namespace rwre
