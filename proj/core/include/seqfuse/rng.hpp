// Copyright 2026 The seqfuse Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SEQFUSE_RNG_HPP_
#define SEQFUSE_RNG_HPP_

#include <cstddef>
#include <cstdint>
#include <random>

namespace seqfuse {

/// Seeded generator with fully specified output. std::mt19937_64 is defined
/// bit-for-bit by the standard, but the <random> distributions are not, so
/// the transforms to uniform/normal/index live here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller.
  double normal();

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
};

/// Derives an independent seed from a base seed and a stream index
/// (splitmix64 finalizer over the combination).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace seqfuse

#endif  // SEQFUSE_RNG_HPP_
