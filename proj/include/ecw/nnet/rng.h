// Copyright 2026 The ECW Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ECW_NNET_RNG_H_
#define ECW_NNET_RNG_H_

#include <cstdint>
#include <random>

namespace ecw::nnet {

// SplitMix64 finalizer over a pair of words. Used to derive child seeds so
// that stream identity depends only on (parent seed, stream id).
std::uint64_t MixSeed(std::uint64_t a, std::uint64_t b);

// Seeded random source. Identical seeds give identical draw sequences on a
// given standard library; Split() derives independent child streams without
// consuming draws from the parent.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);

  std::uint64_t seed() const { return seed_; }
  Rng Split(std::uint64_t stream) const;

  // Uniform on [0, 1) with 53 random bits.
  double Uniform();
  double Uniform(double lo, double hi);
  // Uniform integer on the closed range [lo, hi].
  int UniformInt(int lo, int hi);
  // Standard normal via Box-Muller (no cached second draw).
  double Normal();
  int Poisson(double mean);
  bool Bernoulli(double p) { return Uniform() < p; }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace ecw::nnet

#endif  // ECW_NNET_RNG_H_
