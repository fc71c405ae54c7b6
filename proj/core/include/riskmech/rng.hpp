// Copyright 2026 The Authors.
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

#ifndef RISKMECH_RNG_HPP_
#define RISKMECH_RNG_HPP_

#include <cstdint>
#include <random>
#include <string_view>

namespace riskmech {

// splitmix64 step. Used both as a seed deriver and as a string hash
// folder so that replays are identical across platforms.
constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic child seed for stream `index` of `base`.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  return splitmix64(base ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

inline std::uint64_t hash_bytes(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) h = splitmix64(h ^ c);
  return h;
}

// Deterministic U[0,1) stream. mt19937_64 output is pinned by the
// standard and the double conversion below avoids the
// implementation-defined std::uniform_real_distribution.
class UniformStream {
 public:
  explicit UniformStream(std::uint64_t seed) : gen_(seed) {}

  double next() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace riskmech

#endif  // RISKMECH_RNG_HPP_
