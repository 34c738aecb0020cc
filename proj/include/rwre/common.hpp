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

#ifndef RWRE_COMMON_HPP_
#define RWRE_COMMON_HPP_

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rwre {

/// Invalid input: bad dimension, malformed law, point off the face, ...
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation would exceed the configured memory budget.
class ResourceLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative method failed to converge.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline constexpr int kMinDimension = 2;
inline constexpr int kMaxDimension = 8;

/// Default memory budget for DP state spaces, in bytes.
inline constexpr std::size_t kDefaultBudgetBytes = std::size_t{512} << 20;

/// log(exp(a) + exp(b)) without overflow; -inf is the additive identity.
inline double LogAdd(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

/// Log-sum-exp over a span, summed in index order.
inline double LogSumExp(std::span<const double> xs) {
  double m = kNegInf;
  for (double x : xs) m = std::max(m, x);
  if (m == kNegInf) return kNegInf;
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - m);
  return m + std::log(acc);
}

/// Natural log of the binomial coefficient.
inline double LogChoose(int n, int k) {
  if (k < 0 || k > n) return kNegInf;
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

/// Exact binomial coefficient for the small arguments used in lattice
/// indexing. Saturates at UINT64_MAX.
std::uint64_t Choose(int n, int k);

/// Mean and standard error of a sample.
struct SampleStats {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t count = 0;
};
SampleStats Summarize(std::span<const double> xs);

}  // namespace rwre

#endif  // RWRE_COMMON_HPP_
