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

#include <cstdint>

#include "blip/kernels.hpp"

#include "kernel_elements.hpp"

namespace blip::kernels::omp {

void advect(std::span<const cplx> u, std::span<cplx> out, UpwindStencil s, SourceJump jump) {
    const auto n = static_cast<std::int64_t>(u.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] = detail::advect_cell(u, static_cast<std::size_t>(i), s, jump);
    }
}

void window_dft(std::span<const cplx> u, double r0, double dr, std::span<const double> ks,
                std::span<cplx> out) {
    const auto n = static_cast<std::int64_t>(ks.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (std::int64_t j = 0; j < n; ++j) {
        const auto jj = static_cast<std::size_t>(j);
        out[jj] = detail::dft_bin(u, r0, dr, ks[jj]);
    }
}

void sample_jump_times(std::uint64_t seed, std::uint64_t first_index, double excited_weight,
                       double gamma, std::span<double> out) {
    const auto n = static_cast<std::int64_t>(out.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t k = 0; k < n; ++k) {
        out[static_cast<std::size_t>(k)] =
            detail::jump_time(seed, first_index + static_cast<std::uint64_t>(k), excited_weight, gamma);
    }
}

void sample_jump_times_stepped(std::uint64_t seed, std::uint64_t first_index, double excited_weight,
                               double gamma, double dt, double t_max, std::span<double> out) {
    const auto n = static_cast<std::int64_t>(out.size());
#pragma omp parallel for schedule(dynamic, 64)
    for (std::int64_t k = 0; k < n; ++k) {
        out[static_cast<std::size_t>(k)] = detail::jump_time_stepped(
            seed, first_index + static_cast<std::uint64_t>(k), excited_weight, gamma, dt, t_max);
    }
}

}  // namespace blip::kernels::omp
