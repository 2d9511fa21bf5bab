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

// Per-element bodies shared by the serial and OpenMP kernels.

#include <cmath>
#include <limits>

#include "blip/kernels.hpp"
#include "blip/rng.hpp"

namespace blip::kernels::detail {

inline cplx advect_cell(std::span<const cplx> u, std::size_t i, UpwindStencil s, const SourceJump& j) {
    cplx left1 = i >= 1 ? u[i - 1] : cplx{};
    cplx left2 = i >= 2 ? u[i - 2] : cplx{};
    if (i == j.source) {
        left1 += j.near;
        left2 += j.far;
    } else if (i == j.source + 1) {
        left2 += j.near;
    }
    return s.a0 * u[i] + s.a1 * left1 + s.a2 * left2;
}

// Phase recurrence, re-anchored every kResync terms to bound drift.
inline cplx dft_bin(std::span<const cplx> u, double r0, double dr, double k) {
    constexpr std::size_t kResync = 256;
    const cplx step = std::polar(1.0, -k * dr);
    cplx acc{};
    cplx phase;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (i % kResync == 0) phase = std::polar(1.0, -k * (r0 + static_cast<double>(i) * dr));
        acc += phase * u[i];
        phase *= step;
    }
    return acc * (dr / std::sqrt(2.0 * 3.14159265358979323846));
}

inline double jump_time(std::uint64_t seed, std::uint64_t index, double excited_weight, double gamma) {
    StreamRng rng(seed, index);
    const double u = rng.uniform();
    if (u >= excited_weight) return std::numeric_limits<double>::infinity();
    return -std::log1p(-u / excited_weight) / gamma;
}

// Conditional excited population of a no-jump trajectory at time t is
// w e^{-gamma t} / (1 - w + w e^{-gamma t}); one Bernoulli trial per step.
inline double jump_time_stepped(std::uint64_t seed, std::uint64_t index, double excited_weight,
                                double gamma, double dt, double t_max) {
    StreamRng rng(seed, index);
    const auto steps = static_cast<std::uint64_t>(std::ceil(t_max / dt - 1e-9));
    for (std::uint64_t n = 0; n < steps; ++n) {
        const double t = static_cast<double>(n) * dt;
        const double decayed = excited_weight * std::exp(-gamma * t);
        const double p_exc = decayed / (1.0 - excited_weight + decayed);
        if (rng.uniform() < gamma * dt * p_exc) return t + dt;
    }
    return std::numeric_limits<double>::infinity();
}

}  // namespace blip::kernels::detail
