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

// Disorder sweeps of D_n(eps) over the family omega_eps = alpha (1 + eps eta).
//
// The critical value eps_c is defined through n -> infinity; everything here
// works at finite n and reports a surrogate bracket only.

#ifndef RWRE_PHASE_SCAN_HPP_
#define RWRE_PHASE_SCAN_HPP_

#include <cstdint>
#include <optional>
#include <vector>

#include "rwre/environment.hpp"
#include "rwre/exact_kernel.hpp"
#include "rwre/geometry.hpp"

namespace rwre {

/// 21 points 0, 0.0475, ..., 0.95.
std::vector<double> DefaultEpsGrid();

struct ScanOptions {
  std::size_t samples = 1000;
  std::uint64_t seed = 0;
  std::uint64_t assignment_budget = kDefaultAssignmentBudget;
  std::optional<Mode> mode;
  int workers = 1;
};

struct ScanResult {
  BoundaryPoint x;
  std::vector<double> eps_grid;
  std::vector<int> n_list;
  std::vector<Composition> counts;           // per n
  std::vector<std::vector<DnEstimate>> table;  // table[n index][eps index]
};

/// Fills D_n(eps) for every (n, eps). Every cell of a row uses the same
/// seeds, so Monte Carlo columns are coupled across eps. Throws
/// ValidationError for an unsorted grid or values outside [0, 1).
ScanResult Scan(const DisorderSpec& family, const BoundaryPoint& x, const std::vector<int>& n_list,
                const std::vector<double>& eps_grid, const ScanOptions& options = {});

struct EpsCEstimate {
  double eps_c_hat = 0.0;
  double lower = 0.0;
  double upper = 1.0;
  double tau = 0.0;
  int n = 0;                // column used
  bool no_crossing = false;
  const char* label = "finite-n surrogate";
};

/// sqrt(mean se^2) over the largest-n column.
double PooledStdError(const ScanResult& scan);

/// On the largest-n column: upper is the smallest eps with
/// D + 3 se < -tau, lower the largest grid eps below it with |D| <= tau
/// (0 if none), and eps_c_hat their midpoint. Without a crossing the
/// interval is [last grid point, 1) and no_crossing is set. tau defaults to
/// 10 times the pooled standard error.
EpsCEstimate EstimateEpsC(const ScanResult& scan, std::optional<double> tau = std::nullopt);

struct LipschitzColumn {
  int n = 0;
  double c_hat = 0.0;           // max |D(eps_{k+1}) - D(eps_k)| / (eps_{k+1} - eps_k)
  double max_increment = 0.0;   // max |D(eps_{k+1}) - D(eps_k)|
};

struct LipschitzReport {
  double eps_prime = 0.0;
  double bound = 0.0;           // 1 / (1 - eps'), the bound on |dD_n/d eps| on [0, eps']
  std::vector<LipschitzColumn> columns;
  bool finite = true;
  bool within_bound = true;
};

/// Uses adjacent grid cells with eps <= eps_prime.
LipschitzReport LipschitzCheck(const ScanResult& scan, double eps_prime);

struct Extrapolation {
  int n_small = 0;
  int n_large = 0;
  std::vector<double> values;   // per eps
  const char* label = "heuristic";
};

/// Eliminates a 1/n term from the two largest columns:
/// (n2 D_n2 - n1 D_n1) / (n2 - n1). Heuristic; the true error of D_n is not
/// known to be of order 1/n. Throws ValidationError with fewer than two
/// distinct n.
Extrapolation RichardsonExtrapolate(const ScanResult& scan);

}  // namespace rwre

#endif  // RWRE_PHASE_SCAN_HPP_
