// Copyright 2026 The blip Authors
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

#pragma once

#include <cstdint>
#include <limits>

namespace blip {

/// SplitMix64 output finalizer (https://prng.di.unimi.it).
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/**
 * Counter-based random stream.
 *
 * Draw k of stream s under seed is mix64(key(seed, s) + (k + 1) * phi), so
 * any (seed, stream, counter) triple can be evaluated directly. Trajectory i
 * of an ensemble uses stream i; its numbers never depend on how many other
 * trajectories ran before it or on which thread.
 */
class StreamRng {
  public:
    using result_type = std::uint64_t;

    StreamRng(std::uint64_t seed, std::uint64_t stream)
        : key_(mix64(mix64(seed) ^ (stream * 0xd1b54a32d192ed03ull + 0x9e3779b97f4a7c15ull))) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return at(counter_++); }

    /// Draw number k without advancing the stream.
    result_type at(std::uint64_t k) const { return mix64(key_ + (k + 1) * 0x9e3779b97f4a7c15ull); }

    /// Uniform double in the open interval (0, 1).
    double uniform() { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

    std::uint64_t counter() const { return counter_; }

  private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace blip
