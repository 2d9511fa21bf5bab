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

#include <doctest.h>

#include <cmath>
#include <set>

#include "blip/rng.hpp"

using namespace blip;

TEST_SUITE("rng") {

TEST_CASE("SplitMix64 finalizer reference values") {
    // first outputs of the reference generator seeded with 0
    CHECK(mix64(0x9e3779b97f4a7c15ull) == 0xe220a8397b1dcdafull);
    CHECK(mix64(2 * 0x9e3779b97f4a7c15ull) == 0x6e789e6aa1b965f4ull);
}

TEST_CASE("random access matches sequential draws") {
    StreamRng a(7, 3);
    const StreamRng b(7, 3);
    for (std::uint64_t k = 0; k < 100; ++k) CHECK(a() == b.at(k));
    CHECK(a.counter() == 100);
}

TEST_CASE("streams and seeds are distinct") {
    std::set<std::uint64_t> firsts;
    for (std::uint64_t s = 0; s < 1000; ++s) firsts.insert(StreamRng(1, s).at(0));
    for (std::uint64_t s = 0; s < 1000; ++s) firsts.insert(StreamRng(2, s).at(0));
    CHECK(firsts.size() == 2000);
}

TEST_CASE("uniform draws lie in the open unit interval") {
    StreamRng r(0, 0);
    double sum = 0.0, sum2 = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double u = r.uniform();
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
        sum += u;
        sum2 += u * u;
    }
    const double mean = sum / n;
    CHECK(std::abs(mean - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / n));
    CHECK(std::abs(sum2 / n - mean * mean - 1.0 / 12.0) < 2e-3);
}

}
