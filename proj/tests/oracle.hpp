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

// Brute-force reference computations for the tests. Nothing here calls the
// dynamic programs, the Green recursion or the environment enumerator of the
// library; environments are read only through their jump weights.

#ifndef RWRE_TESTS_ORACLE_HPP_
#define RWRE_TESTS_ORACLE_HPP_

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

#include "rwre/environment.hpp"
#include "rwre/geometry.hpp"

namespace oracle {

using rwre::Direction;
using rwre::Face;
using rwre::JumpLaw;
using rwre::LatticeSite;

inline std::vector<double> ProjectedJump(int axis, int d) {
  std::vector<double> v(static_cast<std::size_t>(d - 1), 0.0);
  if (axis < d - 1) {
    v[axis] = 1.0;
  } else {
    for (double& c : v) c = -1.0;
  }
  return v;
}

inline double Dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double FacePsi(const JumpLaw& alpha, const Face& face, const std::vector<double>& theta) {
  double s = 0.0;
  for (int i = 0; i < face.dimension(); ++i) {
    s += alpha(face.jump(i)) * std::exp(Dot(theta, ProjectedJump(i, face.dimension())));
  }
  return s;
}

struct PathSums {
  double partition = 0.0;   // Z_{n,theta}
  double point = 0.0;       // P(X_n = target)
  std::size_t paths = 0;
};

using OmegaFn = std::function<double(const LatticeSite&, const Direction&)>;

/// Every face path of length n from the origin, one at a time. Asserts that
/// the path sits on level j at time j, which makes two paths meet only at
/// equal times.
inline PathSums EnumerateFacePaths(const JumpLaw& alpha, const Face& face, int n,
                                   const std::vector<double>& theta,
                                   const std::vector<int>& target, const OmegaFn& omega) {
  const int d = face.dimension();
  const double psi = FacePsi(alpha, face, theta);
  std::vector<double> tilt(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) tilt[i] = std::exp(Dot(theta, ProjectedJump(i, d))) / psi;

  PathSums out;
  std::vector<int> axes(static_cast<std::size_t>(n), 0);
  while (true) {
    LatticeSite x(d);
    double w = 1.0;
    double wt = 1.0;
    std::vector<int> counts(static_cast<std::size_t>(d), 0);
    for (int j = 0; j < n; ++j) {
      if (x.L1Norm() != j) throw std::logic_error("face path left its level");
      const Direction e = face.jump(axes[j]);
      const double o = omega(x, e);
      w *= o;
      wt *= o * tilt[axes[j]];
      x = x.Step(e);
      ++counts[axes[j]];
    }
    if (x.L1Norm() != n) throw std::logic_error("face path left its level");
    out.partition += wt;
    if (counts == target) out.point += w;
    ++out.paths;
    int k = n - 1;
    while (k >= 0 && axes[k] == d - 1) axes[k--] = 0;
    if (k < 0) break;
    ++axes[k];
  }
  return out;
}

/// Environment determined by a map from site to eta atom.
struct AtomMapEnv {
  const rwre::DisorderSpec* spec;
  std::map<std::vector<int>, std::size_t> atom;

  double Omega(const LatticeSite& x, const Direction& e) const {
    const auto c = x.coords();
    const std::size_t k = atom.at(std::vector<int>(c.begin(), c.end()));
    return spec->alpha()(e) * (1.0 + spec->eps() * spec->eta().support()[k][e.Index()]);
  }
};

/// Sites of levels 0..n-1 on the face, by direct filtering of a cube.
inline std::vector<LatticeSite> SitesBelowLevel(const Face& face, int n) {
  const int d = face.dimension();
  std::vector<LatticeSite> out;
  std::vector<int> m(static_cast<std::size_t>(d), 0);
  while (true) {
    int level = 0;
    for (int v : m) level += v;
    if (level < n) {
      LatticeSite x(d);
      for (int i = 0; i < d; ++i) x[i] = face.sign(i) * m[i];
      out.push_back(x);
    }
    int k = d - 1;
    while (k >= 0 && m[k] == n - 1) m[k--] = 0;
    if (k < 0) break;
    ++m[k];
  }
  return out;
}

/// Calls fn(env, probability) for every atom assignment on `sites`.
inline void EnumerateEta(const rwre::DisorderSpec& spec, const std::vector<LatticeSite>& sites,
                         const std::function<void(const AtomMapEnv&, double)>& fn) {
  const std::size_t atoms = spec.eta().size();
  std::vector<std::size_t> digit(sites.size(), 0);
  AtomMapEnv env{&spec, {}};
  while (true) {
    double p = 1.0;
    for (std::size_t s = 0; s < sites.size(); ++s) {
      const auto c = sites[s].coords();
      env.atom[std::vector<int>(c.begin(), c.end())] = digit[s];
      p *= spec.eta().weights()[digit[s]];
    }
    fn(env, p);
    std::size_t k = 0;
    while (k < digit.size() && digit[k] == atoms - 1) digit[k++] = 0;
    if (k == digit.size()) break;
    ++digit[k];
  }
}

/// log of n!/prod n_i! prod alpha^n_i by running products.
inline double AnnealedLogProb(const JumpLaw& alpha, const Face& face, const std::vector<int>& counts) {
  long double v = 0.0L;
  int n = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    for (int k = 1; k <= counts[i]; ++k) {
      ++n;
      v += std::log(static_cast<long double>(n)) - std::log(static_cast<long double>(k));
    }
    v += counts[i] * std::log(static_cast<long double>(alpha(face.jump(static_cast<int>(i)))));
  }
  return static_cast<double>(v);
}

/// P(Z_j = 0), j <= J, by convolving the law of the difference walk on
/// Z^{d-1} one step at a time.
inline std::vector<double> GreenTermsByConvolution(const std::vector<double>& q, int J) {
  const int d = static_cast<int>(q.size());
  std::map<std::vector<int>, double> step;
  for (int i = 0; i < d; ++i) {
    for (int k = 0; k < d; ++k) {
      const auto a = ProjectedJump(i, d);
      const auto b = ProjectedJump(k, d);
      std::vector<int> z(static_cast<std::size_t>(d - 1));
      for (int c = 0; c < d - 1; ++c) z[c] = static_cast<int>(a[c] - b[c]);
      step[z] += q[i] * q[k];
    }
  }
  std::map<std::vector<int>, double> law{{std::vector<int>(static_cast<std::size_t>(d - 1), 0), 1.0}};
  std::vector<double> terms{1.0};
  for (int j = 1; j <= J; ++j) {
    std::map<std::vector<int>, double> next;
    for (const auto& [z, p] : law) {
      for (const auto& [s, w] : step) {
        std::vector<int> y = z;
        for (std::size_t c = 0; c < y.size(); ++c) y[c] += s[c];
        next[y] += p * w;
      }
    }
    law.swap(next);
    terms.push_back(law[std::vector<int>(static_cast<std::size_t>(d - 1), 0)]);
  }
  return terms;
}

/// sum_i delta_i log(delta_i / alpha_i), skipping delta_i = 0.
inline double ClosedFormRate(const JumpLaw& alpha, const Face& face, const std::vector<double>& delta) {
  double v = 0.0;
  for (std::size_t i = 0; i < delta.size(); ++i) {
    if (delta[i] > 0.0) v += delta[i] * std::log(delta[i] / alpha(face.jump(static_cast<int>(i))));
  }
  return v;
}

}  // namespace oracle

#endif  // RWRE_TESTS_ORACLE_HPP_
