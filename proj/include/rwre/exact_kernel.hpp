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

// Exact dynamic programs over face-restricted paths.
//
// A face path visits one site per level |x|_1 = j, so a path from the origin
// is a lattice path in jump-count space. Point probabilities sweep the box
// {m <= counts}; the partition function sweeps whole levels. Everything is
// accumulated in the log domain, in a fixed lexicographic order.

#ifndef RWRE_EXACT_KERNEL_HPP_
#define RWRE_EXACT_KERNEL_HPP_

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "rwre/environment.hpp"
#include "rwre/geometry.hpp"
#include "rwre/rate_functions.hpp"
#include "rwre/stochastics.hpp"

namespace rwre {

enum class DpKind { kAnnealedProb, kQuenchedProb, kPartition, kSecondMoment, kDerivativePair };
const char* ToString(DpKind kind);

struct DpResult {
  DpKind kind = DpKind::kPartition;
  double log_value = 0.0;     // -inf when no path contributes
  int n = 0;
  std::optional<ProjectedVector> theta;
  std::optional<std::uint64_t> seed;
};

/// log[n! / (n_1! ... n_d!) prod_i alpha(s_i e_i)^{n_i}].
double AnnealedPointLogProb(const JumpLaw& alpha, const Face& face, std::span<const int> counts);

/// log P_{0,omega}(X_n = x) for x = sum_i counts_i s_i e_i, shifted by
/// `origin` when given.
template <EnvironmentView Env>
double QuenchedPointLogProb(const Env& env, const Face& face, std::span<const int> counts,
                            const LatticeSite* origin = nullptr);

/// Same, for an endpoint given as a lattice site with |x|_1 = n. Zero
/// coordinates are assigned the + sign. Throws ValidationError when the
/// dimensions disagree or n = 0.
template <EnvironmentView Env>
double QuenchedPointLogProbAt(const Env& env, const LatticeSite& x);

struct LogProbDerivative {
  double log_prob = 0.0;
  double d_log_prob = 0.0;    // d/d eps log P_{0,omega}(X_n = x)
};

/// Value and eps-derivative in one sweep. The derivative is the path-measure
/// average of B = sum_j eta / (1 + eps eta) along the path, carried as a
/// ratio next to the log value.
template <EnvironmentView Env>
LogProbDerivative QuenchedPointLogProbWithDerivative(const Env& env, const Face& face,
                                                     std::span<const int> counts);

/// log Z_{n,theta}(omega, origin).
template <EnvironmentView Env>
double LogPartitionFunction(const Env& env, const Face& face, std::span<const double> theta,
                            int n, const LatticeSite* origin = nullptr);

/// (1/n) log E_{0,omega}[exp<theta, S_n> 1{B_n}] = log psi(theta) + (1/n) log Z_{n,theta},
/// where S_n is the sum of the projected jumps and B_n the event that every
/// jump lies in V(s). Requires n >= 1.
template <EnvironmentView Env>
double FiniteLogMgf(const Env& env, const Face& face, std::span<const double> theta, int n) {
  if (n < 1) throw ValidationError("n must be >= 1");
  return LogPsi(env.spec().alpha(), face, theta) + LogPartitionFunction(env, face, theta, n) / n;
}

/// E[prod_{j < n : Z_j = 0} factor(I_j, K_j)] for two independent walks with
/// jump law q (indexed by axis) on the projected jumps, where I_j, K_j are
/// the axes of their j-th jumps. Dense box of half-width 2n in Z^{d-1};
/// throws ResourceLimitError when two levels exceed `budget_bytes`.
double PairCollisionExpectation(std::span<const double> q,
                                const std::function<double(int, int)>& collision_factor, int n,
                                std::size_t budget_bytes = kDefaultBudgetBytes);

/// E[Z_{n,theta}^2], exact for the finite-support eta law.
double SecondMomentExact(const DisorderSpec& spec, const Face& face, std::span<const double> theta,
                         int n, std::size_t budget_bytes = kDefaultBudgetBytes);

/// Sites from which some face path to `counts` takes a step:
/// {m <= counts, |m| < n}, in lexicographic order of m.
std::vector<LatticeSite> PointRelevantSites(const Face& face, std::span<const int> counts);
/// All sites of levels 0..n-1.
std::vector<LatticeSite> LevelRelevantSites(const Face& face, int n);

/// atoms^sites, saturating at UINT64_MAX.
std::uint64_t AssignmentCount(const DisorderSpec& spec, std::size_t sites);

/// Calls fn(env, probability) for every assignment of eta atoms to `sites`
/// in odometer order (last site fastest). Throws ResourceLimitError when
/// the number of assignments exceeds `max_assignments`.
void ForEachAssignment(const DisorderSpec& spec, std::span<const LatticeSite> sites,
                       std::uint64_t max_assignments,
                       const std::function<void(const AssignedEnvironment&, double)>& fn);

enum class Mode { kExact, kMonteCarlo };
const char* ToString(Mode mode);

inline constexpr std::uint64_t kDefaultAssignmentBudget = std::uint64_t{1} << 20;

struct DnOptions {
  /// nullopt selects exact mode when the assignment count fits the budget.
  std::optional<Mode> mode;
  std::size_t samples = 1000;
  std::uint64_t seed = 0;
  std::uint64_t assignment_budget = kDefaultAssignmentBudget;
  int workers = 1;
};

struct DnEstimate {
  double value = 0.0;
  double std_error = 0.0;     // 0 in exact mode
  Mode mode = Mode::kExact;
  std::size_t samples = 0;    // assignments in exact mode
};

/// Mode chosen for (spec, counts) under `options`.
Mode ResolveMode(const DisorderSpec& spec, const Face& face, std::span<const int> counts,
                 const DnOptions& options);

/// D_n(eps) = (1/n) (E log P_{0,omega}(X_n = x) - log P_0(X_n = x)).
/// Monte Carlo sample k uses TaskSeed(seed, k), so rows at different eps
/// share their environments. Exactly 0 at eps = 0.
DnEstimate DnValue(const DisorderSpec& spec, const Face& face, std::span<const int> counts,
                   const DnOptions& options = {});

/// dD_n/d eps = (1/n) E[d/d eps log P_{0,omega}(X_n = x)]. Requires eps in
/// (0, 1).
DnEstimate DnDerivative(const DisorderSpec& spec, const Face& face, std::span<const int> counts,
                        const DnOptions& options = {});

/// Runs fn(i) for i < count on up to `workers` threads. Each index runs
/// exactly once; callers write into per-index slots.
void ParallelFor(std::size_t count, int workers, const std::function<void(std::size_t)>& fn);

// Implementation -----------------------------------------------------------

namespace detail {

/// Mixed-radix box {0..counts_0} x ... with the last axis fastest.
struct CountBox {
  explicit CountBox(std::span<const int> counts);
  std::size_t size = 1;
  std::vector<std::size_t> stride;
  std::vector<int> extent;
};

// Log-sum-exp of up to kMaxDimension terms.
inline double SmallLogSumExp(const double* v, int k) {
  double m = kNegInf;
  for (int i = 0; i < k; ++i) m = std::max(m, v[i]);
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (int i = 0; i < k; ++i) s += std::exp(v[i] - m);
  return m + std::log(s);
}

void CheckCounts(const Face& face, std::span<const int> counts);

}  // namespace detail

template <EnvironmentView Env>
LogProbDerivative QuenchedPointLogProbWithDerivative(const Env& env, const Face& face,
                                                     std::span<const int> counts) {
  detail::CheckCounts(face, counts);
  const int d = face.dimension();
  const double eps = env.spec().eps();
  const detail::CountBox box(counts);
  std::vector<double> f(box.size, kNegInf);
  std::vector<double> r(box.size, 0.0);
  f[0] = 0.0;
  std::vector<int> m(static_cast<std::size_t>(d), 0);
  double terms[kMaxDimension];
  double ratios[kMaxDimension];
  for (std::size_t idx = 1; idx < box.size; ++idx) {
    for (int a = d - 1; a >= 0; --a) {
      if (++m[a] <= box.extent[a]) break;
      m[a] = 0;
    }
    int k = 0;
    for (int i = 0; i < d; ++i) {
      if (m[i] == 0) continue;
      --m[i];
      const LatticeSite pred = SiteOf(face, m);
      ++m[i];
      const Direction e = face.jump(i);
      const std::size_t p = idx - box.stride[i];
      const double eta = env.Eta(pred, e);
      terms[k] = f[p] + std::log(env.Omega(pred, e));
      ratios[k] = r[p] + eta / (1.0 + eps * eta);
      ++k;
    }
    f[idx] = detail::SmallLogSumExp(terms, k);
    double acc = 0.0;
    for (int i = 0; i < k; ++i) acc += std::exp(terms[i] - f[idx]) * ratios[i];
    r[idx] = acc;
  }
  return {f[box.size - 1], r[box.size - 1]};
}

template <EnvironmentView Env>
double QuenchedPointLogProb(const Env& env, const Face& face, std::span<const int> counts,
                            const LatticeSite* origin) {
  detail::CheckCounts(face, counts);
  const int d = face.dimension();
  const detail::CountBox box(counts);
  std::vector<double> f(box.size, kNegInf);
  f[0] = 0.0;
  std::vector<int> m(static_cast<std::size_t>(d), 0);
  double terms[kMaxDimension];
  for (std::size_t idx = 1; idx < box.size; ++idx) {
    for (int a = d - 1; a >= 0; --a) {
      if (++m[a] <= box.extent[a]) break;
      m[a] = 0;
    }
    int k = 0;
    for (int i = 0; i < d; ++i) {
      if (m[i] == 0) continue;
      --m[i];
      const LatticeSite pred = SiteOf(face, m, origin);
      ++m[i];
      terms[k++] = f[idx - box.stride[i]] + std::log(env.Omega(pred, face.jump(i)));
    }
    f[idx] = detail::SmallLogSumExp(terms, k);
  }
  return f[box.size - 1];
}

template <EnvironmentView Env>
double QuenchedPointLogProbAt(const Env& env, const LatticeSite& x) {
  const int d = env.spec().dimension();
  if (x.dimension() != d) throw ValidationError("endpoint dimension does not match the environment");
  if (x.L1Norm() == 0) throw ValidationError("endpoint must satisfy |x|_1 = n >= 1");
  std::vector<int> signs(static_cast<std::size_t>(d));
  std::vector<int> counts(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    signs[i] = x[i] < 0 ? -1 : 1;
    counts[i] = std::abs(x[i]);
  }
  return QuenchedPointLogProb(env, Face(std::move(signs)), counts);
}

template <EnvironmentView Env>
double LogPartitionFunction(const Env& env, const Face& face, std::span<const double> theta,
                            int n, const LatticeSite* origin) {
  if (n < 0) throw ValidationError("n must be nonnegative");
  const int d = face.dimension();
  if (static_cast<int>(theta.size()) != d - 1) throw ValidationError("theta must have d-1 entries");
  if (n == 0) return 0.0;
  const double log_psi = LogPsi(env.spec().alpha(), face, theta);
  std::vector<double> tilt(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) tilt[i] = TiltExponent(theta, i) - log_psi;

  const LevelIndex index(d, n);
  std::vector<double> prev(1, 0.0);
  std::vector<double> next;
  std::vector<int> pred(static_cast<std::size_t>(d));
  double terms[kMaxDimension];
  for (int j = 1; j <= n; ++j) {
    next.assign(static_cast<std::size_t>(index.Size(j)), kNegInf);
    std::size_t slot = 0;
    ForEachComposition(j, d, [&](std::span<const int> m) {
      int k = 0;
      for (int i = 0; i < d; ++i) {
        if (m[i] == 0) continue;
        std::copy(m.begin(), m.end(), pred.begin());
        --pred[i];
        const LatticeSite x = SiteOf(face, pred, origin);
        terms[k++] = prev[index.Rank(pred)] + std::log(env.Omega(x, face.jump(i))) + tilt[i];
      }
      next[slot++] = detail::SmallLogSumExp(terms, k);
    });
    prev.swap(next);
  }
  return LogSumExp(prev);
}

}  // namespace rwre

#endif  // RWRE_EXACT_KERNEL_HPP_
