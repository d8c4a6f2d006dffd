// Copyright 2026 The DRAGGN Authors.
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

#ifndef DRAGGN_RANDOM_H_
#define DRAGGN_RANDOM_H_

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace draggn {

// Deterministic generator. Draws are built from the raw 64-bit engine output
// so streams are identical across standard libraries.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  // Uniform in [lo, hi).
  double Uniform(double lo, double hi);
  // Uniform integer in [0, n), n > 0.
  uint64_t Below(uint64_t n);
  bool Bernoulli(double p) { return Uniform(0.0, 1.0) < p; }

  template <typename T>
  void Shuffle(std::span<T> items) {
    for (size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[Below(i)]);
    }
  }

  std::mt19937_64 &engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

// SplitMix64 finalizer; derives independent stream seeds from one seed.
uint64_t MixSeed(uint64_t seed, uint64_t stream);

}  // namespace draggn

#endif  // DRAGGN_RANDOM_H_
