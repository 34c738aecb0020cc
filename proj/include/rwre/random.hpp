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

// Counter-based keyed randomness. Every random quantity is a pure function of
// (seed, key, stream) so that environments can be regenerated site by site
// and Monte Carlo replicas can run in any order.

#ifndef RWRE_RANDOM_HPP_
#define RWRE_RANDOM_HPP_

#include <cstdint>
#include <span>

namespace rwre {

/// SplitMix64 finalizer (Steele, Lea, Flood 2014).
constexpr std::uint64_t Mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Stream identifiers. Distinct uses of one seed never share a stream.
enum class Stream : std::uint64_t {
  kEnvironment = 1,
  kWalk = 2,
  kTask = 3,
};

/// Hash of (seed, stream, coordinates).
inline std::uint64_t KeyedBits(std::uint64_t seed, Stream stream, std::span<const int> coords) {
  std::uint64_t h = Mix64(seed ^ Mix64(static_cast<std::uint64_t>(stream)));
  for (int c : coords) h = Mix64(h ^ static_cast<std::uint32_t>(c));
  return h;
}

/// Uniform double in [0, 1) from the top 53 bits.
constexpr double ToUnitInterval(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Seed of the k-th task derived from a master seed:
/// Mix64(Mix64(master ^ Mix64(kTask)) + k).
constexpr std::uint64_t TaskSeed(std::uint64_t master, std::uint64_t k) {
  return Mix64(Mix64(master ^ Mix64(static_cast<std::uint64_t>(Stream::kTask))) + k);
}

}  // namespace rwre

#endif  // RWRE_RANDOM_HPP_
