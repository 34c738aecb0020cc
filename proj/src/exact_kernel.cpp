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

#include "rwre/exact_kernel.hpp"

#include <atomic>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

namespace rwre {

const char* ToString(DpKind kind) {
  switch (kind) {
    case DpKind::kAnnealedProb: return "annealed_prob";
    case DpKind::kQuenchedProb: return "quenched_prob";
    case DpKind::kPartition: return "partition";
    case DpKind::kSecondMoment: return "second_moment";
    case DpKind::kDerivativePair: return "derivative_pair";
  }
  return "unknown";
}

const char* ToString(Mode mode) { return mode == Mode::kExact ? "exact" : "mc"; }

namespace detail {

CountBox::CountBox(std::span<const int> counts) {
  const std::size_t d = counts.size();
  stride.assign(d, 1);
  extent.assign(counts.begin(), counts.end());
  double total = 1.0;
  for (int c : counts) total *= c + 1.0;
  if (total > static_cast<double>(std::numeric_limits<std::int32_t>::max())) {
    throw ResourceLimitError("point-probability box is too large");
  }
  for (std::size_t a = d - 1; a > 0; --a) stride[a - 1] = stride[a] * (extent[a] + 1);
  size = stride[0] * (extent[0] + 1);
}

void CheckCounts(const Face& face, std::span<const int> counts) {
  if (static_cast<int>(counts.size()) != face.dimension()) {
    throw ValidationError("counts must have one entry per axis");
  }
  int n = 0;
  for (int c : counts) {
    if (c < 0) throw ValidationError("counts must be nonnegative");
    n += c;
  }
  if (n < 1) throw ValidationError("counts must sum to n >= 1");
}

}  // namespace detail

double AnnealedPointLogProb(const JumpLaw& alpha, const Face& face, std::span<const int> counts) {
  detail::CheckCounts(face, counts);
  int n = 0;
  double v = 0.0;
  for (int i = 0; i < face.dimension(); ++i) {
    n += counts[i];
    v -= std::lgamma(counts[i] + 1.0);
    if (counts[i] > 0) v += counts[i] * std::log(alpha(face.jump(i)));
  }
  return v + std::lgamma(n + 1.0);
}

double PairCollisionExpectation(std::span<const double> q,
                                const std::function<double(int, int)>& collision_factor, int n,
                                std::size_t budget_bytes) {
  if (n < 0) throw ValidationError("n must be nonnegative");
  const int d = static_cast<int>(q.size());
  const int m = d - 1;
  if (n == 0) return 1.0;
  const int half = 2 * n;
  const int width = 2 * half + 1;
  const double states = std::pow(static_cast<double>(width), m);
  if (2.0 * sizeof(double) * states > static_cast<double>(budget_bytes)) {
    throw ResourceLimitError("pair DP state space exceeds the memory budget");
  }
  std::vector<std::ptrdiff_t> stride(static_cast<std::size_t>(m), 1);
  for (int c = m - 1; c > 0; --c) stride[c - 1] = stride[c] * width;
  const auto total = static_cast<std::size_t>(states);

  // pi(e_i) = e_i for i < m and -(1, ..., 1) for i = m.
  auto projected = [&](int i, int c) { return i == m ? -1 : (i == c ? 1 : 0); };
  std::vector<std::ptrdiff_t> offset(static_cast<std::size_t>(d * d), 0);
  std::vector<double> pair_weight(static_cast<std::size_t>(d * d));
  std::vector<double> collision_weight(static_cast<std::size_t>(d * d));
  for (int i = 0; i < d; ++i) {
    for (int k = 0; k < d; ++k) {
      std::ptrdiff_t off = 0;
      for (int c = 0; c < m; ++c) off += (projected(i, c) - projected(k, c)) * stride[c];
      offset[i * d + k] = off;
      pair_weight[i * d + k] = q[i] * q[k];
      collision_weight[i * d + k] = q[i] * q[k] * collision_factor(i, k);
    }
  }

  std::ptrdiff_t center = 0;
  for (int c = 0; c < m; ++c) center += half * stride[c];
  std::vector<double> cur(total, 0.0);
  std::vector<double> nxt(total, 0.0);
  cur[static_cast<std::size_t>(center)] = 1.0;
  std::vector<int> coord(static_cast<std::size_t>(m));
  for (int j = 0; j < n; ++j) {
    std::fill(nxt.begin(), nxt.end(), 0.0);
    // Reachable differences satisfy |D_c| <= 2j.
    const int r = 2 * j;
    std::fill(coord.begin(), coord.end(), -r);
    while (true) {
      std::ptrdiff_t at = center;
      bool zero = true;
      for (int c = 0; c < m; ++c) {
        at += coord[c] * stride[c];
        zero = zero && coord[c] == 0;
      }
      const double v = cur[static_cast<std::size_t>(at)];
      if (v != 0.0) {
        const auto& w = zero ? collision_weight : pair_weight;
        for (int p = 0; p < d * d; ++p) nxt[static_cast<std::size_t>(at + offset[p])] += v * w[p];
      }
      int c = m - 1;
      while (c >= 0 && coord[c] == r) coord[c--] = -r;
      if (c < 0) break;
      ++coord[c];
    }
    cur.swap(nxt);
  }
  double sum = 0.0;
  for (double v : cur) sum += v;
  return sum;
}

double SecondMomentExact(const DisorderSpec& spec, const Face& face, std::span<const double> theta,
                         int n, std::size_t budget_bytes) {
  const TiltedLaw law(spec.alpha(), face, ProjectedVector(theta.begin(), theta.end()));
  const JumpLaw& alpha = spec.alpha();
  return PairCollisionExpectation(
      law.weights(),
      [&](int i, int k) {
        const Direction e = face.jump(i);
        const Direction e2 = face.jump(k);
        return spec.PairMoment(e, e2) / (alpha(e) * alpha(e2));
      },
      n, budget_bytes);
}

std::vector<LatticeSite> PointRelevantSites(const Face& face, std::span<const int> counts) {
  detail::CheckCounts(face, counts);
  const int d = face.dimension();
  const int n = std::accumulate(counts.begin(), counts.end(), 0);
  const detail::CountBox box(counts);
  std::vector<LatticeSite> out;
  std::vector<int> m(static_cast<std::size_t>(d), 0);
  for (std::size_t idx = 0; idx < box.size; ++idx) {
    if (idx > 0) {
      for (int a = d - 1; a >= 0; --a) {
        if (++m[a] <= box.extent[a]) break;
        m[a] = 0;
      }
    }
    if (std::accumulate(m.begin(), m.end(), 0) < n) out.push_back(SiteOf(face, m));
  }
  return out;
}

std::vector<LatticeSite> LevelRelevantSites(const Face& face, int n) {
  std::vector<LatticeSite> out;
  for (int j = 0; j < n; ++j) {
    const auto level = BoundarySites(face, j);
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

std::uint64_t AssignmentCount(const DisorderSpec& spec, std::size_t sites) {
  const std::uint64_t atoms = spec.eta().size();
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < sites; ++i) {
    if (total > std::numeric_limits<std::uint64_t>::max() / atoms) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    total *= atoms;
  }
  return total;
}

void ForEachAssignment(const DisorderSpec& spec, std::span<const LatticeSite> sites,
                       std::uint64_t max_assignments,
                       const std::function<void(const AssignedEnvironment&, double)>& fn) {
  if (AssignmentCount(spec, sites.size()) > max_assignments) {
    throw ResourceLimitError("eta-assignment enumeration exceeds the budget");
  }
  const auto atoms = static_cast<std::uint32_t>(spec.eta().size());
  const auto& w = spec.eta().weights();
  AssignedEnvironment env(spec);
  std::vector<std::uint32_t> digit(sites.size(), 0);
  for (const auto& x : sites) env.Assign(x, 0);
  while (true) {
    double prob = 1.0;
    for (std::uint32_t a : digit) prob *= w[a];
    fn(env, prob);
    std::size_t k = sites.size();
    while (k > 0) {
      --k;
      if (++digit[k] < atoms) {
        env.Assign(sites[k], digit[k]);
        break;
      }
      digit[k] = 0;
      env.Assign(sites[k], 0);
      if (k == 0) return;
    }
    if (sites.empty()) return;
  }
}

void ParallelFor(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < count;) {
      try {
        fn(i);
      } catch (...) {
        const std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = count;
      }
    }
  };
  std::vector<std::thread> pool;
  const auto threads = std::min<std::size_t>(static_cast<std::size_t>(workers), count);
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

Mode ResolveMode(const DisorderSpec& spec, const Face& face, std::span<const int> counts,
                 const DnOptions& options) {
  if (options.mode) return *options.mode;
  const auto sites = PointRelevantSites(face, counts).size();
  return AssignmentCount(spec, sites) <= options.assignment_budget ? Mode::kExact
                                                                   : Mode::kMonteCarlo;
}

namespace {

// Expectation over the environment of per-environment values, either by
// enumeration or by keyed Monte Carlo.
template <class PerEnv>
DnEstimate Average(const DisorderSpec& spec, const Face& face, std::span<const int> counts,
                   const DnOptions& options, PerEnv per_env) {
  DnEstimate out;
  out.mode = ResolveMode(spec, face, counts, options);
  if (out.mode == Mode::kExact) {
    const auto sites = PointRelevantSites(face, counts);
    double acc = 0.0;
    std::size_t k = 0;
    ForEachAssignment(spec, sites, options.assignment_budget,
                      [&](const AssignedEnvironment& env, double prob) {
                        acc += prob * per_env(env);
                        ++k;
                      });
    out.value = acc;
    out.samples = k;
    return out;
  }
  if (options.samples < 2) throw ValidationError("Monte Carlo mode needs at least 2 samples");
  std::vector<double> values(options.samples);
  ParallelFor(options.samples, options.workers, [&](std::size_t k) {
    values[k] = per_env(KeyedEnvironment(spec, TaskSeed(options.seed, k)));
  });
  const SampleStats stats = Summarize(values);
  out.value = stats.mean;
  out.std_error = stats.std_error;
  out.samples = stats.count;
  return out;
}

}  // namespace

DnEstimate DnValue(const DisorderSpec& spec, const Face& face, std::span<const int> counts,
                   const DnOptions& options) {
  detail::CheckCounts(face, counts);
  const int n = std::accumulate(counts.begin(), counts.end(), 0);
  if (spec.eps() == 0.0) {
    DnEstimate zero;
    zero.mode = ResolveMode(spec, face, counts, options);
    return zero;
  }
  DnEstimate est = Average(spec, face, counts, options, [&](const auto& env) {
    return QuenchedPointLogProb(env, face, counts);
  });
  est.value = (est.value - AnnealedPointLogProb(spec.alpha(), face, counts)) / n;
  est.std_error /= n;
  return est;
}

DnEstimate DnDerivative(const DisorderSpec& spec, const Face& face, std::span<const int> counts,
                        const DnOptions& options) {
  detail::CheckCounts(face, counts);
  if (!(spec.eps() > 0.0 && spec.eps() < 1.0)) {
    throw ValidationError("the derivative requires eps in (0, 1)");
  }
  const int n = std::accumulate(counts.begin(), counts.end(), 0);
  DnEstimate est = Average(spec, face, counts, options, [&](const auto& env) {
    return QuenchedPointLogProbWithDerivative(env, face, counts).d_log_prob;
  });
  est.value /= n;
  est.std_error /= n;
  return est;
}

}  // namespace rwre
