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

// Data-parallel inner loops. Every kernel exists twice with identical
// signatures: kernels::serial is the reference, kernels::omp the OpenMP
// version. Each output element is computed independently and by the same
// arithmetic in both, so the two agree bitwise.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>

namespace blip {

using cplx = std::complex<double>;

enum class Backend { Serial, OpenMP };

/// Coefficients of a one-sided three-point update
/// out[i] = a0 u[i] + a1 u[i-1] + a2 u[i-2].
struct UpwindStencil {
    double a0;
    double a1;
    double a2;

    /// First-order upwind / forward Euler at Courant number nu.
    static UpwindStencil euler(double nu) { return {1.0 - nu, nu, 0.0}; }
    /// Second-order upwind (Warming-Beam) at Courant number nu.
    static UpwindStencil warming_beam(double nu) {
        return {0.5 * (1.0 - nu) * (2.0 - nu), nu * (2.0 - nu), 0.5 * nu * (nu - 1.0)};
    }
};

/// Inflow jump injected at the edge r = 0 (left edge of cell `source`).
/// `near` is added to the ghost value half a cell left of the edge, `far` to
/// the one a cell and a half left of it.
struct SourceJump {
    std::size_t source;
    cplx near;
    cplx far;
};

namespace kernels {

namespace serial {

void advect(std::span<const cplx> u, std::span<cplx> out, UpwindStencil s, SourceJump jump);

/// out[j] = dr / sqrt(2 pi) * sum_i exp(-i k_j r_i) u[i], r_i = r0 + i dr.
void window_dft(std::span<const cplx> u, double r0, double dr, std::span<const double> ks,
                std::span<cplx> out);

/// Jump time per trajectory for the exact exponential law; +inf = never.
void sample_jump_times(std::uint64_t seed, std::uint64_t first_index, double excited_weight,
                       double gamma, std::span<double> out);

/// Same law sampled by per-step Bernoulli thinning up to t_max.
void sample_jump_times_stepped(std::uint64_t seed, std::uint64_t first_index, double excited_weight,
                               double gamma, double dt, double t_max, std::span<double> out);

}  // namespace serial

namespace omp {

void advect(std::span<const cplx> u, std::span<cplx> out, UpwindStencil s, SourceJump jump);
void window_dft(std::span<const cplx> u, double r0, double dr, std::span<const double> ks,
                std::span<cplx> out);
void sample_jump_times(std::uint64_t seed, std::uint64_t first_index, double excited_weight,
                       double gamma, std::span<double> out);
void sample_jump_times_stepped(std::uint64_t seed, std::uint64_t first_index, double excited_weight,
                               double gamma, double dt, double t_max, std::span<double> out);

}  // namespace omp

}  // namespace kernels

}  // namespace blip
