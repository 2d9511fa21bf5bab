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
#include <cstring>
#include <limits>

#include "blip/analytic.hpp"
#include "blip/propagator.hpp"

using namespace blip;

namespace {

SystemParams params(double omega0 = 0.0, double gamma = 1.0, double c = 1.0, cplx alpha = {}, cplx beta = {1.0, 0.0}) {
    return validate_params({omega0, gamma, c, alpha, beta});
}

double max_p0_error(const RunResult& r, const SystemParams& p) {
    const AnalyticSolution a(p);
    double e = 0.0;
    for (std::size_t i = 0; i < r.times.size(); ++i) {
        e = std::max(e, std::abs(std::norm(r.c0_history[i]) - a.p0(r.times[i]) + p.ground_weight()));
    }
    return e;
}

}  // namespace

TEST_SUITE("propagator") {

TEST_CASE("configuration checks") {
    const SystemParams p = params();
    PropagatorConfig cfg = PropagatorConfig::for_run(p, 1e-2, 2.0);
    CHECK_NOTHROW(validate_config(cfg, p));
    CHECK(cfg.courant(1.0) == 1.0);

    cfg.dt = 1.5e-2;
    CHECK_THROWS_AS(validate_config(cfg, p), CFLViolation);
    cfg.dt = 1e-2;
    cfg.t_end = 3.0;
    CHECK_THROWS_AS(validate_config(cfg, p), InvalidGrid);
    cfg.t_end = 2.0;
    cfg.grid = RadialGrid(-0.015, 2.0, 100);
    CHECK_THROWS_AS(validate_config(cfg, p), InvalidGrid);
}

TEST_CASE("ground state with vacuum is stationary") {
    const SystemParams p = params(3.0, 1.0, 1.0, {1.0, 0.0}, {0.0, 0.0});
    const PropagatorConfig cfg = PropagatorConfig::for_run(p, 1e-2, 3.0);
    const std::array<double, 2> snaps{1.0, 3.0};
    const RunResult r = run(p, cfg, snaps);
    for (const auto& c : r.c0_history) CHECK(c == cplx{});
    for (const auto& s : r.snapshots) {
        for (const auto& v : s.cr) CHECK(v == cplx{});
        CHECK(s.cvac == cplx(1.0, 0.0));
    }
}

TEST_CASE("decoupled transport at unit Courant number is exact") {
    const SystemParams p = params();
    const auto bump = [](double r) { return cplx{std::exp(-40.0 * (r - 1.0) * (r - 1.0)), 0.0}; };
    for (Scheme s : {Scheme::UpwindEuler, Scheme::UpwindRK2}) {
        std::vector<PropagatorConfig> cfgs;
        for (double dr : {1e-2, 5e-3}) {
            PropagatorConfig c = PropagatorConfig::for_run(p, dr, 1.0, 1.0, s);
            c.grid = RadialGrid::with_spacing(0.0, 3.0, dr);
            cfgs.push_back(c);
        }
        const ConvergenceStudy st = transport_convergence(p, cfgs, bump);
        for (const auto& smp : st.samples) CHECK(smp.l2_error < 1e-14);
    }
}

TEST_CASE("decoupled transport below unit Courant number converges at the scheme order") {
    const SystemParams p = params();
    const auto bump = [](double r) { return cplx{std::exp(-40.0 * (r - 1.0) * (r - 1.0)), 0.0}; };
    std::vector<PropagatorConfig> cfgs;
    for (double dr : {4e-3, 2e-3, 1e-3}) {
        PropagatorConfig c = PropagatorConfig::for_run(p, dr, 1.0, 0.5, Scheme::UpwindRK2);
        c.grid = RadialGrid::with_spacing(0.0, 3.0, dr);
        cfgs.push_back(c);
    }
    CHECK(transport_convergence(p, cfgs, bump).observed_order == doctest::Approx(2.0).epsilon(0.1));
    for (auto& c : cfgs) c.scheme = Scheme::UpwindEuler;
    CHECK(transport_convergence(p, cfgs, bump).observed_order == doctest::Approx(1.0).epsilon(0.15));
}

TEST_CASE("emergent decay rate approaches gamma as the grid is refined") {
    const SystemParams p = params();
    double previous = std::numeric_limits<double>::infinity();
    for (double dr : {8e-3, 4e-3, 2e-3}) {
        const RunResult r = run(p, PropagatorConfig::for_run(p, dr, 5.0));
        const double dev = std::abs(fitted_decay_rate(r, 0.0, 5.0) - 1.0);
        CHECK(dev < previous);
        previous = dev;
    }
    CHECK(previous < 5e-3);
}

TEST_CASE("survival probability and norm at the reference resolution") {
    const SystemParams p = params(10.0);
    const RunResult r = run(p, PropagatorConfig::for_run(p, 1e-3, 5.0));
    CHECK(max_p0_error(r, p) < 1e-3);
    CHECK(r.max_norm_drift < 1e-4);
}

TEST_CASE("the field never leaves the light cone") {
    const SystemParams p = params(5.0);
    PropagatorConfig cfg = PropagatorConfig::for_run(p, 5e-3, 2.0);
    cfg.grid = RadialGrid::with_spacing(-0.5, 3.0, 5e-3);
    const std::array<double, 3> snaps{0.5, 1.0, 2.0};
    const RunResult r = run(p, cfg, snaps);
    REQUIRE(r.snapshots.size() == 3);
    for (const auto& s : r.snapshots) {
        const std::size_t first_outside = s.grid.source_cell() + static_cast<std::size_t>(std::llround(s.t / s.grid.dr()));
        for (std::size_t i = 0; i < s.cr.size(); ++i) {
            if (i < s.grid.source_cell() || i >= first_outside) {
                const double re = s.cr[i].real(), im = s.cr[i].imag();
                std::uint64_t bits_re, bits_im;
                std::memcpy(&bits_re, &re, 8);
                std::memcpy(&bits_im, &im, 8);
                CHECK((bits_re | bits_im) == 0);
            }
        }
        CHECK(s.cr[first_outside - 1] != cplx{});
    }
}

TEST_CASE("detection density behind the wavefront") {
    const SystemParams p = params(10.0);
    const std::array<double, 1> snaps{3.0};
    const RunResult r = run(p, PropagatorConfig::for_run(p, 1e-3, 3.0), snaps);
    const JointState& s = r.snapshots.at(0);
    const AnalyticSolution a(p);
    double worst = 0.0;
    for (std::size_t i = 0; i < s.cr.size(); ++i) {
        const double rr = s.grid.center(i);
        if (rr > 3.0 - 10.0 * s.grid.dr()) continue;
        const double want = a.pr(rr, 3.0);
        worst = std::max(worst, std::abs(std::norm(s.cr[i]) - want) / want);
    }
    CHECK(worst < 5e-3);
}

TEST_CASE("each blip keeps the emitter phase of its creation") {
    const SystemParams p = params(4.0);
    const std::array<double, 1> snaps{2.0};
    const RunResult r = run(p, PropagatorConfig::for_run(p, 1e-3, 2.0), snaps);
    const JointState& s = r.snapshots.at(0);
    const AnalyticSolution a(p);
    for (std::size_t i = 20; i < 1980; i += 97) {
        const double rr = s.grid.center(i);
        const double d = std::arg(s.cr[i] / a.c0_exact(2.0 - rr));
        CHECK(std::abs(d + 0.5 * kPi) < 5e-3);
    }
}

TEST_CASE("first-order scheme error halves with the grid spacing") {
    const SystemParams p = params(2.0);
    std::vector<PropagatorConfig> cfgs;
    for (double dr : {4e-3, 2e-3}) {
        PropagatorConfig c = PropagatorConfig::for_run(p, dr, 3.0, 1.0, Scheme::UpwindEuler);
        c.norm_budget = std::numeric_limits<double>::infinity();
        cfgs.push_back(c);
    }
    const ConvergenceStudy st = convergence_order(p, cfgs);
    const double ratio = st.samples[0].l2_error / st.samples[1].l2_error;
    CHECK(ratio > 1.6);
    CHECK(ratio < 2.4);
}

TEST_CASE("second-order scheme converges at second order") {
    const SystemParams p = params(2.0);
    std::vector<PropagatorConfig> cfgs;
    for (double dr : {4e-3, 2e-3, 1e-3}) cfgs.push_back(PropagatorConfig::for_run(p, dr, 3.0));
    CHECK(convergence_order(p, cfgs).observed_order == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("full-cell read-back doubles the decay rate") {
    const SystemParams p = params();
    PropagatorConfig cfg = PropagatorConfig::for_run(p, 2e-3, 3.0);
    cfg.source_convention = SourceConvention::FullCell;
    cfg.norm_budget = std::numeric_limits<double>::infinity();
    const double rate = fitted_decay_rate(run(p, cfg), 0.0, 3.0);
    CHECK(rate > 1.8);
    CHECK(rate < 2.2);
}

TEST_CASE("the first-order scheme drifts beyond a tight norm budget") {
    const SystemParams p = params();
    PropagatorConfig cfg = PropagatorConfig::for_run(p, 1e-2, 3.0, 1.0, Scheme::UpwindEuler);
    CHECK_THROWS_AS(run(p, cfg), NormDrift);
}

TEST_CASE("serial and OpenMP runs are bitwise identical") {
    const SystemParams p = params(10.0, 1.0, 1.0, {0.6, 0.0}, {0.0, 0.8});
    PropagatorConfig cfg = PropagatorConfig::for_run(p, 2e-3, 1.5, 0.8);
    cfg.norm_budget = std::numeric_limits<double>::infinity();
    const std::array<double, 1> snaps{1.5};
    cfg.backend = Backend::Serial;
    const RunResult a = run(p, cfg, snaps);
    cfg.backend = Backend::OpenMP;
    const RunResult b = run(p, cfg, snaps);
    REQUIRE(a.snapshots.size() == 1);
    CHECK(std::memcmp(a.snapshots[0].cr.data(), b.snapshots[0].cr.data(), a.snapshots[0].cr.size() * sizeof(cplx)) == 0);
    CHECK(std::memcmp(a.c0_history.data(), b.c0_history.data(), a.c0_history.size() * sizeof(cplx)) == 0);
}

TEST_CASE("physical units: rate scales with gamma") {
    const SystemParams p = params(20.0, 2.0, 3.0);
    const RunResult r = run(p, PropagatorConfig::for_run(p, 3e-3, 2.5));
    CHECK(fitted_decay_rate(r, 0.0, 2.5) == doctest::Approx(2.0).epsilon(5e-3));
    CHECK(max_p0_error(r, p) < 1e-3);
}

}
