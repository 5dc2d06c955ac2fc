/*
 Copyright 2026 The ddd-lqr-lab Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#pragma once

#include <cstdint>
#include <random>

namespace ddd {

/// Seeded standard-normal stream that is bit-stable across platforms.
///
/// Uniforms come from std::mt19937_64 (fully specified by the standard) using
/// the top 53 bits; normals use the Box-Muller transform, emitting the cosine
/// branch first and caching the sine branch. std::normal_distribution is not
/// used because its algorithm is implementation-defined.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

  double uniform_open();
  double next();

 private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

/// SplitMix64 finalizer; used to derive independent per-cell seeds.
std::uint64_t mix64(std::uint64_t x);

/// Seed of one Monte Carlo cell: base_seed XOR hash(T, run_index).
std::uint64_t cell_seed(std::uint64_t base_seed, int horizon, int run_index);

}  // namespace ddd
