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
#include <limits>

#include "blip/analytic.hpp"
#include "blip/propagator.hpp"
#include "blip/rng.hpp"
#include "blip/spectroscopy.hpp"
#include "oracles.hpp"

using namespace blip;

namespace {

SystemParams params(double omega0, double gamma = 1.0, double c = 1.0) {
    return validate_params({omega0, gamma, c, {}, {1.0, 0.0}});
}

JointState analytic_state(const SystemParams& p, double t, double dr) {
    return AnalyticSolution(p).sample_state(t, RadialGrid::with_spacing(0.0, p.c_light() * t, dr));
}

}  // namespace

TEST_SUITE("spectroscopy") {

TEST_CASE("momentum amplitude limits") {
    const SystemParams p = params(10.0);
    for (double k : {-3.0, 0.0, 10.0, 50.0}) CHECK(ck_exact(p, k, 0.0) == cplx{});
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(std::abs(std::abs(ck_exact(p, 10.0, inf)) - 0.7978845608028654) < 1e-15);
    // the stable form agrees with the direct bracket away from cancellation
    const cplx a{0.5, 10.0 - 7.0};
    const cplx direct = cplx{0.0, std::sqrt(1.0 / (2.0 * kPi))} *
                        (std::exp(-cplx{0.5, 10.0} * 2.0) - std::polar(1.0, -7.0 * 2.0)) / a;
    CHECK(std::abs(ck_exact(p, 7.0, 2.0) - direct) < 1e-15);
}

TEST_CASE("momentum weight equals the emitted probability") {
    const SystemParams p = params(10.0);
    const auto dens = [&](double k) { return std::norm(ck_exact(p, k, 5.0)) / p.c_light(); };
    double w = oracle::integrate(dens, -std::numeric_limits<double>::infinity(), -40.0, 1e-10);
    for (double lo = -40.0; lo < 60.0; lo += 10.0) w += oracle::integrate(dens, lo, lo + 10.0, 1e-12);
    w += oracle::integrate(dens, 60.0, std::numeric_limits<double>::infinity(), 1e-10);
    CHECK(std::abs(w - 0.9932620530009145) < 1e-4);

    const AnalyticSolution a(p);
    const double field = oracle::integrate([&](double r) { return a.pr(r, 5.0); }, 0.0, 5.0);
    CHECK(std::abs(w - field) < 1e-4);
}

TEST_CASE("asymptotic line") {
    const SystemParams p = params(10.0);
    CHECK(std::abs(spectrum_asymptotic(p, 10.0) - 0.6366197723675814) < 1e-15);
    CHECK(std::abs(spectrum_asymptotic(p, 10.5) - 0.5 * spectrum_asymptotic(p, 10.0)) < 1e-15);
    CHECK(std::abs(spectrum_asymptotic(p, 9.5) - 0.5 * spectrum_asymptotic(p, 10.0)) < 1e-15);
    const auto f = [&](double w) { return spectrum_asymptotic(p, w); };
    const double inf = std::numeric_limits<double>::infinity();
    const double total = oracle::integrate(f, -inf, 0.0) + oracle::integrate(f, 0.0, 20.0) + oracle::integrate(f, 20.0, inf);
    CHECK(std::abs(total - 1.0) < 1e-10);
    CHECK(std::abs(spectrum_asymptotic(p, 3.0) - oracle::lorentzian(1.0, 10.0, 3.0)) < 1e-16);
    for (double g : {0.5, 2.0}) CHECK(std::abs(spectrum_asymptotic(params(10.0, g), 10.0) - 2.0 / (kPi * g)) < 1e-15);
}

TEST_CASE("tail weight matches quadrature of the line") {
    const SystemParams p = params(10.0);
    const auto f = [&](double w) { return spectrum_asymptotic(p, w); };
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(std::abs(lorentzian_tail_weight(p, 10.0 * kPi) -
                   (oracle::integrate(f, 10.0 * kPi, inf) + oracle::integrate(f, -inf, -10.0 * kPi))) < 1e-12);
    // the negative-frequency part of the line
    CHECK(std::abs(oracle::integrate(f, -inf, 0.0) - (0.5 - std::atan(20.0) / kPi)) < 1e-12);
}

TEST_CASE("empty field gives an empty spectrum") {
    const SystemParams p = params(10.0);
    const JointState s = initial_state(p, RadialGrid::with_spacing(0.0, 2.0, 1e-3));
    const SpectrumSeries sp = spectrum_from_state(s, p, {0.0, 20.0}, 101);
    for (double d : sp.density) CHECK(d == 0.0);
    CHECK(sp.total_weight == 0.0);
}

TEST_CASE("transformed analytic state reproduces the Lorentzian") {
    const SystemParams p = params(10.0);
    const JointState s = analytic_state(p, 12.0, 1e-3);
    const SpectrumSeries sp = spectrum_from_state(s, p, {0.0, 20.0}, 401);
    double worst = 0.0;
    for (std::size_t j = 0; j < sp.omegas.size(); ++j) {
        if (std::abs(sp.omegas[j] - 10.0) > 3.0) continue;
        const double want = spectrum_asymptotic(p, sp.omegas[j]);
        worst = std::max(worst, std::abs(sp.density[j] - want) / want);
    }
    CHECK(worst < 0.02);
    const LineShape line = analyze_line(sp);
    CHECK(std::abs(line.peak_omega - 10.0) <= sp.d_omega);
    CHECK(std::abs(line.fwhm - 1.0) < 0.03);
    CHECK(std::abs(sp.total_weight - sp.field_weight) < 1e-12);
}

TEST_CASE("serial and OpenMP spectra agree") {
    const SystemParams p = params(10.0);
    const JointState s = analytic_state(p, 4.0, 2e-3);
    const SpectrumSeries a = spectrum_from_state(s, p, {5.0, 15.0}, 64, Backend::Serial);
    const SpectrumSeries b = spectrum_from_state(s, p, {5.0, 15.0}, 64, Backend::OpenMP);
    CHECK(a.density == b.density);
}

TEST_CASE("windows the grid cannot resolve are rejected") {
    const SystemParams p = params(10.0);
    const JointState fine = analytic_state(p, 4.0, 1e-2);
    CHECK_THROWS_AS(spectrum_from_state(fine, p, {0.0, 400.0}, 11), WindowTooNarrow);
    const JointState coarse = analytic_state(p, 4.0, 0.1);
    CHECK_THROWS_AS(spectrum_from_state(coarse, p, {0.0, 20.0}, 11), WindowTooNarrow);
    CHECK_THROWS_AS(spectrum_from_state(fine, p, {5.0, 5.0}, 11), Error);
}

TEST_CASE("full-band transform obeys Parseval and matches the direct sum") {
    StreamRng rng(77, 0);
    const RadialGrid g(-0.3, 0.5, 40);
    JointState s{0.0, {}, {}, g, std::vector<cplx>(g.size())};
    for (auto& v : s.cr) v = {rng.uniform() - 0.5, rng.uniform() - 0.5};

    for (std::size_t pad : {2, 3, 8}) {
        const BandTransform bt = band_transform(s, pad);
        double sum = 0.0;
        for (double v : bt.power) sum += v * bt.dk;
        CHECK(std::abs(sum - s.field_weight()) < 1e-6 * s.field_weight());
        CHECK(std::abs(sum - s.field_weight()) < 1e-13);

        const auto ref = oracle::direct_dft(s.cr, g.center(0), g.dr(), bt.k);
        for (std::size_t j = 0; j < bt.k.size(); ++j) CHECK(std::abs(bt.power[j] - std::norm(ref[j])) < 1e-13);
    }
}

TEST_CASE("energy of the initial state is the emitter energy") {
    const SystemParams p = params(10.0);
    const EnergyReport e = energy_expectation(initial_state(p, RadialGrid(0.0, 1.0, 100)), p);
    CHECK(e.total == 10.0);
    CHECK(e.field_weight == 0.0);
}

TEST_CASE("free transport leaves the field energy unchanged") {
    const SystemParams p = params(10.0);
    PropagatorConfig cfg = PropagatorConfig::for_run(p, 2e-3, 1.0);
    cfg.grid = RadialGrid::with_spacing(0.0, 4.0, 2e-3);
    cfg.coupling_scale = 0.0;
    cfg.norm_budget = std::numeric_limits<double>::infinity();
    JointState init{0.0, {}, {}, cfg.grid, std::vector<cplx>(cfg.grid.size())};
    for (std::size_t i = 0; i < init.cr.size(); ++i) {
        const double r = cfg.grid.center(i);
        init.cr[i] = std::polar(std::exp(-30.0 * (r - 1.0) * (r - 1.0)), 6.0 * r);
    }
    const std::array<double, 1> snaps{1.0};
    const RunResult r = run_from(init, p, cfg, snaps);
    const EnergyReport before = energy_expectation(init, p);
    const EnergyReport after = energy_expectation(r.snapshots.at(0), p);
    CHECK(std::abs(before.total - after.total) < 1e-12);
    CHECK(std::abs(before.field_positive - after.field_positive) < 1e-12);
}

TEST_CASE("energy after emission stays near the transition energy") {
    const SystemParams p = params(10.0);
    const JointState s = analytic_state(p, 12.0, 2e-3);
    const EnergyReport e = energy_expectation(s, p);
    CHECK(std::abs(e.total - 10.0) < 0.2);
    CHECK(std::abs(e.negative_weight - 0.0159) < 0.1 * 0.0159);
}

}
