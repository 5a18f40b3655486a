// Copyright 2026 The delcert Authors.
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

#ifndef DELCERT_RANDOM_H_
#define DELCERT_RANDOM_H_

#include <cstdint>
#include <random>

namespace delcert {

// All sampling goes through a 64-bit Mersenne Twister. Its output sequence is
// fixed by the standard, so seeded runs are reproducible across platforms.
using BitGen = std::mt19937_64;

// Named substreams derived from one master seed.
enum class Stream : uint32_t {
  kPrediction = 1,
  kCertification = 2,
  kCalibration = 3,
  kSampling = 4,
};

// Independent generator for (seed, stream, index). std::seed_seq has a
// standardized mixing algorithm, so the derived state is portable.
inline BitGen MakeStream(uint64_t seed, Stream stream, uint64_t index) {
  std::seed_seq seq{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32),
                    static_cast<uint32_t>(stream), static_cast<uint32_t>(index),
                    static_cast<uint32_t>(index >> 32)};
  return BitGen(seq);
}

// Uniform double in [0, 1) built from the top 53 bits.
inline double UniformUnit(BitGen& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n). Rejection sampling keeps it unbiased.
inline uint64_t UniformIndex(BitGen& gen, uint64_t n) {
  const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  uint64_t v;
  do {
    v = gen();
  } while (v >= limit);
  return v % n;
}

}  // namespace delcert

#endif  // DELCERT_RANDOM_H_
