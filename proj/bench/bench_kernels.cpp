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

// Serial reference against OpenMP kernels on the hot loops of the
// propagator, the spectrum transform and the trajectory sampler.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#include "blip/kernels.hpp"
#include "blip/rng.hpp"

using namespace blip;

namespace {

double seconds(const std::function<void()>& f, int reps) {
    f();  // warm-up
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < reps; ++i) f();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count() / reps;
}

template <class T>
bool same(const std::vector<T>& a, const std::vector<T>& b) {
    return std::memcmp(a.data(), b.data(), a.size() * sizeof(T)) == 0;
}

void report(const char* name, double serial, double parallel, bool identical) {
    std::printf("%-22s serial %10.3f ms   omp %10.3f ms   speedup %5.2fx   %s\n", name, 1e3 * serial, 1e3 * parallel,
                serial / parallel, identical ? "bitwise identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
    const double scale = argc > 1 ? std::stod(argv[1]) : 1.0;
    std::printf("OpenMP threads: %d\n", omp_get_max_threads());

    const auto n_cells = static_cast<std::size_t>(2'000'000 * scale);
    std::vector<cplx> u(n_cells), a(n_cells), b(n_cells);
    StreamRng rng(1, 0);
    for (auto& v : u) v = {rng.uniform(), rng.uniform()};
    const UpwindStencil st = UpwindStencil::warming_beam(0.9);
    const SourceJump jump{0, {0.1, 0.0}, {0.05, 0.0}};
    const double ts = seconds([&] { kernels::serial::advect(u, a, st, jump); }, 20);
    const double tp = seconds([&] { kernels::omp::advect(u, b, st, jump); }, 20);
    report("advect", ts, tp, same(a, b));

    const std::vector<cplx> field(u.begin(), u.begin() + static_cast<std::ptrdiff_t>(n_cells / 100));
    std::vector<double> ks(401);
    for (std::size_t j = 0; j < ks.size(); ++j) ks[j] = 0.05 * static_cast<double>(j);
    std::vector<cplx> fa(ks.size()), fb(ks.size());
    const double ds = seconds([&] { kernels::serial::window_dft(field, 0.0, 1e-3, ks, fa); }, 3);
    const double dp = seconds([&] { kernels::omp::window_dft(field, 0.0, 1e-3, ks, fb); }, 3);
    report("window_dft", ds, dp, same(fa, fb));

    const auto n_traj = static_cast<std::size_t>(1'000'000 * scale);
    std::vector<double> ja(n_traj), jb(n_traj);
    const double js = seconds([&] { kernels::serial::sample_jump_times(7, 0, 0.8, 1.0, ja); }, 5);
    const double jp = seconds([&] { kernels::omp::sample_jump_times(7, 0, 0.8, 1.0, jb); }, 5);
    report("sample_jump_times", js, jp, same(ja, jb));

    std::vector<double> sa(n_traj / 100), sb(n_traj / 100);
    const double bs = seconds([&] { kernels::serial::sample_jump_times_stepped(7, 0, 0.8, 1.0, 1e-3, 5.0, sa); }, 2);
    const double bp = seconds([&] { kernels::omp::sample_jump_times_stepped(7, 0, 0.8, 1.0, 1e-3, 5.0, sb); }, 2);
    report("sample_jump_stepped", bs, bp, same(sa, sb));
    return 0;
}
