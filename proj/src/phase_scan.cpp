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

#include "rwre/phase_scan.hpp"

#include <algorithm>
#include <cmath>

namespace rwre {

std::vector<double> DefaultEpsGrid() {
  std::vector<double> grid(21);
  for (int k = 0; k < 21; ++k) grid[k] = 0.95 * k / 20.0;
  return grid;
}

ScanResult Scan(const DisorderSpec& family, const BoundaryPoint& x, const std::vector<int>& n_list,
                const std::vector<double>& eps_grid, const ScanOptions& options) {
  if (eps_grid.empty() || n_list.empty()) throw ValidationError("scan needs an eps grid and n list");
  for (std::size_t k = 0; k < eps_grid.size(); ++k) {
    if (!(eps_grid[k] >= 0.0 && eps_grid[k] < 1.0)) throw ValidationError("eps grid must lie in [0, 1)");
    if (k > 0 && eps_grid[k] <= eps_grid[k - 1]) throw ValidationError("eps grid must be increasing");
  }
  if (x.dimension() != family.dimension()) throw ValidationError("point and law dimensions differ");
  ScanResult out;
  out.x = x;
  out.eps_grid = eps_grid;
  out.n_list = n_list;
  DnOptions dn;
  dn.mode = options.mode;
  dn.samples = options.samples;
  dn.seed = options.seed;
  dn.assignment_budget = options.assignment_budget;
  dn.workers = options.workers;
  for (int n : n_list) {
    out.counts.push_back(AdmissibleSequence(x, n));
    auto& row = out.table.emplace_back();
    for (double eps : eps_grid) row.push_back(DnValue(family.WithEps(eps), x.face(), out.counts.back(), dn));
  }
  return out;
}

namespace {

std::size_t LargestColumn(const ScanResult& scan) {
  if (scan.n_list.empty()) throw ValidationError("scan has no columns");
  return static_cast<std::size_t>(
      std::max_element(scan.n_list.begin(), scan.n_list.end()) - scan.n_list.begin());
}

}  // namespace

double PooledStdError(const ScanResult& scan) {
  const auto& row = scan.table[LargestColumn(scan)];
  double acc = 0.0;
  for (const auto& cell : row) acc += cell.std_error * cell.std_error;
  return row.empty() ? 0.0 : std::sqrt(acc / row.size());
}

EpsCEstimate EstimateEpsC(const ScanResult& scan, std::optional<double> tau) {
  const std::size_t col = LargestColumn(scan);
  const auto& row = scan.table[col];
  EpsCEstimate est;
  est.n = scan.n_list[col];
  est.tau = tau ? *tau : 10.0 * PooledStdError(scan);
  std::optional<std::size_t> upper;
  for (std::size_t k = 0; k < row.size(); ++k) {
    if (row[k].value + 3.0 * row[k].std_error < -est.tau) {
      upper = k;
      break;
    }
  }
  if (!upper) {
    est.no_crossing = true;
    est.lower = scan.eps_grid.back();
    est.upper = 1.0;
    est.eps_c_hat = est.lower;
    return est;
  }
  est.upper = scan.eps_grid[*upper];
  est.lower = 0.0;
  for (std::size_t k = 0; k < *upper; ++k) {
    if (std::abs(row[k].value) <= est.tau) est.lower = scan.eps_grid[k];
  }
  est.eps_c_hat = 0.5 * (est.lower + est.upper);
  return est;
}

LipschitzReport LipschitzCheck(const ScanResult& scan, double eps_prime) {
  if (!(eps_prime >= 0.0 && eps_prime < 1.0)) throw ValidationError("eps' must lie in [0, 1)");
  LipschitzReport rep;
  rep.eps_prime = eps_prime;
  rep.bound = 1.0 / (1.0 - eps_prime);
  for (std::size_t c = 0; c < scan.n_list.size(); ++c) {
    LipschitzColumn col;
    col.n = scan.n_list[c];
    const auto& row = scan.table[c];
    for (std::size_t k = 0; k + 1 < row.size(); ++k) {
      if (scan.eps_grid[k + 1] > eps_prime) break;
      const double inc = std::abs(row[k + 1].value - row[k].value);
      col.max_increment = std::max(col.max_increment, inc);
      col.c_hat = std::max(col.c_hat, inc / (scan.eps_grid[k + 1] - scan.eps_grid[k]));
    }
    rep.finite = rep.finite && std::isfinite(col.c_hat);
    rep.within_bound = rep.within_bound && col.c_hat <= rep.bound;
    rep.columns.push_back(col);
  }
  return rep;
}

Extrapolation RichardsonExtrapolate(const ScanResult& scan) {
  std::vector<std::size_t> order(scan.n_list.size());
  for (std::size_t c = 0; c < order.size(); ++c) order[c] = c;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scan.n_list[a] < scan.n_list[b]; });
  if (order.size() < 2 || scan.n_list[order.back()] == scan.n_list[order[order.size() - 2]]) {
    throw ValidationError("extrapolation needs two distinct n");
  }
  const std::size_t hi = order.back();
  const std::size_t lo = order[order.size() - 2];
  Extrapolation out;
  out.n_small = scan.n_list[lo];
  out.n_large = scan.n_list[hi];
  const double n1 = out.n_small;
  const double n2 = out.n_large;
  for (std::size_t k = 0; k < scan.eps_grid.size(); ++k) {
    out.values.push_back((n2 * scan.table[hi][k].value - n1 * scan.table[lo][k].value) / (n2 - n1));
  }
  return out;
}

}  // namespace rwre
