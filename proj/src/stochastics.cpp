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

#include "rwre/stochastics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "rwre/exact_kernel.hpp"
#include "rwre/rate_functions.hpp"

namespace rwre {

namespace {

// pi(e_i)_c for the projected jump of axis i.
int ProjectedCoord(int i, int c, int m) { return i == m ? -1 : (i == c ? 1 : 0); }

}  // namespace

TiltedLaw::TiltedLaw(const JumpLaw& alpha, const Face& face, ProjectedVector theta)
    : face_(face), theta_(std::move(theta)) {
  if (alpha.dimension() != face.dimension()) throw ValidationError("alpha and face dimensions differ");
  const double log_psi = LogPsi(alpha, face_, theta_);
  const int d = face_.dimension();
  weights_.resize(static_cast<std::size_t>(d));
  double sum = 0.0;
  for (int i = 0; i < d; ++i) {
    weights_[i] = alpha(face_.jump(i)) * std::exp(TiltExponent(theta_, i) - log_psi);
    sum += weights_[i];
  }
  for (double& w : weights_) w /= sum;
}

ProjectedVector TiltedLaw::DifferenceMean() const {
  const int d = dimension();
  const int m = d - 1;
  ProjectedVector mean(static_cast<std::size_t>(m), 0.0);
  for (int i = 0; i < d; ++i) {
    for (int k = 0; k < d; ++k) {
      for (int c = 0; c < m; ++c) {
        mean[c] += weights_[i] * weights_[k] * (ProjectedCoord(i, c, m) - ProjectedCoord(k, c, m));
      }
    }
  }
  return mean;
}

Eigen::MatrixXd TiltedLaw::DifferenceCovariance() const {
  const int d = dimension();
  const int m = d - 1;
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd z(m);
  for (int i = 0; i < d; ++i) {
    for (int k = 0; k < d; ++k) {
      for (int c = 0; c < m; ++c) z(c) = ProjectedCoord(i, c, m) - ProjectedCoord(k, c, m);
      cov += weights_[i] * weights_[k] * z * z.transpose();
    }
  }
  return cov;
}

double TiltedLaw::DifferenceFourthMoment() const {
  const int d = dimension();
  const int m = d - 1;
  double acc = 0.0;
  for (int i = 0; i < d; ++i) {
    for (int k = 0; k < d; ++k) {
      double sq = 0.0;
      for (int c = 0; c < m; ++c) {
        const double z = ProjectedCoord(i, c, m) - ProjectedCoord(k, c, m);
        sq += z * z;
      }
      acc += weights_[i] * weights_[k] * sq * sq;
    }
  }
  return acc;
}

double TiltedLaw::CharacteristicFunction(std::span<const double> xi) const {
  const int d = dimension();
  const int m = d - 1;
  std::complex<double> phi = 0.0;
  double total = 0.0;
  for (int c = 0; c < m; ++c) {
    phi += weights_[c] * std::polar(1.0, xi[c]);
    total += xi[c];
  }
  phi += weights_[m] * std::polar(1.0, -total);
  return std::norm(phi);
}

GreenResult GreenFunction(const TiltedLaw& law, int J) {
  if (J < 1) throw ValidationError("green function truncation J must be >= 1");
  const int d = law.dimension();
  const auto& q = law.weights();
  std::vector<double> log_fact(static_cast<std::size_t>(J) + 1, 0.0);
  for (int r = 1; r <= J; ++r) log_fact[r] = log_fact[r - 1] + std::log(static_cast<double>(r));

  // g[r] = probability that the two count vectors agree on axes k..d-1,
  // given both walks put r jumps on those axes.
  std::vector<double> g(static_cast<std::size_t>(J) + 1, 1.0);
  std::vector<double> next(g.size());
  double tail_mass = q[d - 1];
  for (int k = d - 2; k >= 0; --k) {
    tail_mass += q[k];
    const double p = std::min(1.0, q[k] / tail_mass);
    const double lp = std::log(p);
    const double lq = std::log1p(-p);
    for (int r = 0; r <= J; ++r) {
      // Binomial terms more than 15 standard deviations (plus a margin)
      // from the mean are below double precision once squared.
      const double sd = std::sqrt(r * p * (1.0 - p));
      const int width = static_cast<int>(std::ceil(15.0 * sd)) + 30;
      const int centre = static_cast<int>(std::lround(r * p));
      const int lo = std::max(0, centre - width);
      const int hi = std::min(r, centre + width);
      double acc = 0.0;
      for (int c = lo; c <= hi; ++c) {
        const double log_pmf = log_fact[r] - log_fact[c] - log_fact[r - c] + c * lp + (r - c) * lq;
        acc += std::exp(2.0 * log_pmf) * g[r - c];
      }
      next[r] = acc;
    }
    g.swap(next);
  }

  GreenResult out;
  out.truncation = J;
  out.terms = std::move(g);
  out.terms[0] = 1.0;
  for (double t : out.terms) out.partial_sum += t;
  const double last = out.terms[J];
  const double ratio = last / out.terms[J - 1];
  out.tail_estimate = ratio < 1.0 ? last * ratio / (1.0 - ratio)
                                  : std::numeric_limits<double>::infinity();
  out.divergence_warning = d - 1 <= 2;
  return out;
}

std::optional<double> KhasminskiiBound(double c, double eta_green) {
  const double x = c * eta_green;
  if (x >= 1.0) return std::nullopt;
  return 1.0 / (1.0 - x);
}

double CollisionPotential(const DisorderSpec& spec, const Direction& e, const Direction& e2) {
  return std::log(spec.PairMoment(e, e2) / (spec.alpha()(e) * spec.alpha()(e2)));
}

double MaxCollisionPotential(const DisorderSpec& spec, const Face& face) {
  double v = kNegInf;
  for (int i = 0; i < face.dimension(); ++i) {
    for (int k = 0; k < face.dimension(); ++k) {
      v = std::max(v, CollisionPotential(spec, face.jump(i), face.jump(k)));
    }
  }
  return v;
}

FourierReport FourierBound(const TiltedLaw& law, const FourierOptions& options) {
  const int m = law.dimension() - 1;
  FourierReport rep;
  rep.radius = options.radius > 0.0 ? options.radius
                                     : std::numbers::pi * std::sqrt(static_cast<double>(m)) /
                                           law.dimension();
  rep.constant = std::pow(m, 0.5 * m) / std::pow(2.0 * (1.0 - std::cos(1.0)), m);

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(law.DifferenceCovariance());
  const double lambda_min = eig.eigenvalues().minCoeff();
  const double m4 = law.DifferenceFourthMoment();
  rep.inner_radius = std::min(rep.radius, std::sqrt(6.0 * lambda_min / m4));
  const double rho = rep.inner_radius;
  rep.c0 = options.c0 ? *options.c0 : 0.5 * lambda_min - m4 * rho * rho / 24.0;
  if (rep.c0 <= 0.0) throw ValidationError("inner-ball coefficient c0 must be positive");

  if (m <= 2) {
    rep.inner_integral = std::numeric_limits<double>::infinity();
    rep.bound = rep.inner_integral;
    return rep;
  }
  const double sphere = 2.0 * std::pow(std::numbers::pi, 0.5 * m) / std::tgamma(0.5 * m);
  rep.inner_integral = sphere * std::pow(rho, m - 2) / ((m - 2) * rep.c0);

  // Cells per axis, capped so one shell stays below a few million points.
  const int per_axis = std::max(
      4, std::min(options.grid, static_cast<int>(std::floor(std::pow(4.0e6, 1.0 / m)))));
  std::vector<double> xi(static_cast<std::size_t>(m));
  std::vector<int> cell(static_cast<std::size_t>(m));
  for (double a = rho; a < rep.radius; a *= 2.0) {
    const double b = std::min(2.0 * a, rep.radius);
    const double h = 2.0 * b / per_axis;
    const double volume = std::pow(h, m);
    std::fill(cell.begin(), cell.end(), 0);
    while (true) {
      double norm2 = 0.0;
      for (int c = 0; c < m; ++c) {
        xi[c] = -b + (cell[c] + 0.5) * h;
        norm2 += xi[c] * xi[c];
      }
      if (norm2 > a * a && norm2 <= b * b) {
        rep.outer_integral += volume / (1.0 - law.CharacteristicFunction(xi));
      }
      int c = m - 1;
      while (c >= 0 && cell[c] == per_axis - 1) cell[c--] = 0;
      if (c < 0) break;
      ++cell[c];
    }
  }
  rep.bound = rep.constant * std::pow(rep.radius, -m) * (rep.inner_integral + rep.outer_integral);
  return rep;
}

double OccupationExponential(const TiltedLaw& law, double v, int n, std::size_t budget_bytes) {
  const double factor = std::exp(v);
  return PairCollisionExpectation(law.weights(), [factor](int, int) { return factor; }, n,
                                  budget_bytes);
}

}  // namespace rwre
