/*
 * Copyright 2026 The hsbm Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <random>
#include <unordered_set>
#include <vector>

namespace hsbm {

using Engine = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent stream seed for a named stage of a computation. Used so that
// membership sampling, edge sampling and the recovery pipeline of one trial
// never share a generator.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  return splitmix64(splitmix64(seed) ^ splitmix64(tag + 0x632be59bd9b4e019ULL));
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return derive_seed(derive_seed(seed, a), b);
}

// Uniform integer in [0, bound) keyed by (seed, a, b). Draws made this way do
// not depend on evaluation order, so per-vertex decisions can be computed in
// any order (or in parallel) with identical results.
inline std::uint64_t keyed_uniform(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                                   std::uint64_t bound) {
  Engine engine(derive_seed(seed, a, b));
  return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(engine);
}

// Floyd's algorithm: `count` distinct values from [0, population), in the
// order they were drawn. Cost is O(count) regardless of the population size.
inline std::vector<std::uint64_t> sample_without_replacement(std::uint64_t population,
                                                             std::uint64_t count,
                                                             Engine& engine) {
  std::vector<std::uint64_t> out;
  if (count == 0) return out;
  out.reserve(static_cast<std::size_t>(count));
  std::unordered_set<std::uint64_t> chosen;
  chosen.reserve(static_cast<std::size_t>(count) * 2);
  for (std::uint64_t j = population - count; j < population; ++j) {
    const std::uint64_t t = std::uniform_int_distribution<std::uint64_t>(0, j)(engine);
    if (chosen.insert(t).second) {
      out.push_back(t);
    } else {
      chosen.insert(j);
      out.push_back(j);
    }
  }
  return out;
}

}  // namespace hsbm
