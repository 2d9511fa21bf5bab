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

#include "blip/kernels.hpp"

#include "kernel_elements.hpp"

namespace blip::kernels::serial {

void advect(std::span<const cplx> u, std::span<cplx> out, UpwindStencil s, SourceJump jump) {
    for (std::size_t i = 0; i < u.size(); ++i) {
        out[i] = detail::advect_cell(u, i, s, jump);
    }
}

void window_dft(std::span<const cplx> u, double r0, double dr, std::span<const double> ks,
                std::span<cplx> out) {
    for (std::size_t j = 0; j < ks.size(); ++j) {
        out[j] = detail::dft_bin(u, r0, dr, ks[j]);
    }
}

void sample_jump_times(std::uint64_t seed, std::uint64_t first_index, double excited_weight,
                       double gamma, std::span<double> out) {
    for (std::size_t n = 0; n < out.size(); ++n) {
        out[n] = detail::jump_time(seed, first_index + n, excited_weight, gamma);
    }
}

void sample_jump_times_stepped(std::uint64_t seed, std::uint64_t first_index, double excited_weight,
                               double gamma, double dt, double t_max, std::span<double> out) {
    for (std::size_t n = 0; n < out.size(); ++n) {
        out[n] = detail::jump_time_stepped(seed, first_index + n, excited_weight, gamma, dt, t_max);
    }
}

}  // namespace blip::kernels::serial
