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

#include "blip/analytic.hpp"
#include "blip/dyson.hpp"
#include "oracles.hpp"

using namespace blip;

namespace {

SystemParams params(double omega0, double gamma = 1.0, double c = 1.0) {
    return validate_params({omega0, gamma, c, {}, {1.0, 0.0}});
}

// Narrow normalized Gaussian standing in for the contact delta.
double smeared_delta(double tau, double sigma) {
    return std::exp(-0.5 * tau * tau / (sigma * sigma)) / (sigma * std::sqrt(2.0 * kPi));
}

// int_0^{t1} delta_sigma(t1 - t2) dt2, by quadrature over the support.
double endpoint_weight(double t1, double sigma) {
    const double lo = std::max(0.0, t1 - 12.0 * sigma);
    return oracle::integrate([&](double t2) { return smeared_delta(t1 - t2, sigma); }, lo, t1, 1e-12);
}

}  // namespace

TEST_SUITE("dyson") {

TEST_CASE("zeroth order is free evolution") {
    const DysonExpansion d(params(10.0));
    for (double t : {0.0, 0.7, 3.0}) {
        const cplx c = d.c0_partial(t, 0);
        CHECK(std::abs(c - std::polar(1.0, -10.0 * t)) < 1e-15);
    }
}

TEST_CASE("low orders match the truncated series") {
    const DysonExpansion d(params(0.0));
    CHECK(std::abs(d.c0_partial(1.0, 2) - 0.625) < 1e-16);
    CHECK(std::abs(d.c0_partial(1.0, 20) - 0.6065306597126334) < 1e-15);
}

TEST_CASE("double-double sum matches 50-digit arithmetic") {
    for (double x : {-0.5, -5.0, -15.0, -40.0}) {
        for (int m : {0, 1, 7, 30, 80, 170}) {
            const double ref = oracle::exp_partial(x, m);
            // rounding of the result plus the double-double cancellation floor
            const double tol = 2e-16 * std::abs(ref) + 1e-31 * std::exp(std::abs(x));
            CHECK(std::abs(detail::truncated_exp(x, m) - ref) <= tol);
        }
    }
}

TEST_CASE("emitter phase is common to all orders") {
    const DysonExpansion d(params(10.0));
    for (double t : {0.3, 1.0, 4.0}) {
        for (int m : {1, 5, 40}) {
            CHECK(std::abs((d.c0_partial(t, m) * std::polar(1.0, 10.0 * t)).imag()) < 1e-15);
        }
    }
}

TEST_CASE("field partial sums") {
    const DysonExpansion d(params(0.0));
    CHECK(d.cr_partial(1.6, 1.0, 10) == cplx{});
    for (double r : {0.0, 0.4, 1.0}) CHECK(std::abs(std::abs(d.cr_partial(r, 1.0, 0)) - 1.0) < 1e-15);

    const AnalyticSolution a(params(0.0));
    CHECK(std::abs(d.cr_partial(0.0, 1.0, 30) - cplx(0.0, -0.6065306597126334)) < 1e-14);
    CHECK(std::abs(d.cr_partial(0.0, 1.0, 30) - a.cr_exact(0.0, 1.0)) < 1e-14);

    const DysonExpansion e(params(6.0, 2.0, 0.5));
    const AnalyticSolution b(params(6.0, 2.0, 0.5));
    for (double r : {0.0, 0.3, 1.0, 1.5}) CHECK(std::abs(e.cr_partial(r, 3.0, 60) - b.cr_exact(r, 3.0)) < 1e-13);
}

TEST_CASE("convergence profile") {
    const DysonExpansion d(params(10.0));
    const auto prof = d.convergence_profile(1.0, 20);
    REQUIRE(prof.size() == 21);
    CHECK(std::abs(prof[0].error - 0.3934693402873666) < 1e-15);
    CHECK(prof[10].error < 1e-10);
    CHECK(std::abs(prof[10].remainder_bound - 2.0167941392071683e-11) < 1e-24);

    for (const auto& pt : d.convergence_profile(0.0, 40)) {
        CHECK(pt.error == 0.0);
        CHECK(pt.remainder_bound == 0.0);
    }
}

TEST_CASE("order limits") {
    CHECK_THROWS_AS(DysonExpansion(params(1.0), 171), OrderOverflow);
    CHECK_THROWS_AS(DysonExpansion(params(1.0), -1), OrderOverflow);
    const DysonExpansion d(params(1.0), 12);
    CHECK_THROWS_AS(d.c0_partial(1.0, 13), OrderOverflow);
    CHECK_NOTHROW(d.c0_partial(1.0, 12));
}

TEST_CASE("time-ordered integrals with a smeared contact reproduce the closed terms") {
    // omega0 = 0 so the interaction-picture phases are trivial.
    const SystemParams p = params(0.0, 1.3, 0.8);
    const DysonExpansion d(p);
    const double g2c = p.g() * p.g() / p.c_light();
    const double sigma = 1e-5;

    for (double t : {0.5, 2.0}) {
        // U2: (-i)^2 (g^2/c) int_0^t dt1 int_0^t1 delta(t1 - t2) dt2
        const double u2 = -g2c * oracle::integrate([&](double t1) { return endpoint_weight(t1, sigma); }, 0.0, t, 1e-10);
        const cplx closed = d.c0_partial(t, 1) - d.c0_partial(t, 0);
        CHECK(std::abs(u2 - closed.real()) < 1e-4);
        CHECK(std::abs(closed.imag()) < 1e-15);

        // U1 and U3 at r: the outgoing delta fixes t1 = t - r/c; the loop
        // before it is the same contact integral over [0, t1].
        const double r = 0.6 * p.c_light() * t;
        const double t1 = t - r / p.c_light();
        const cplx u1{0.0, -p.g() / p.c_light()};
        const double loop = -g2c * oracle::integrate([&](double s) { return endpoint_weight(s, sigma); }, 0.0, t1, 1e-10);
        CHECK(std::abs(d.cr_partial(r, t, 0) - u1) < 1e-15);
        CHECK(std::abs(d.cr_partial(r, t, 1) - d.cr_partial(r, t, 0) - u1 * loop) < 1e-4);
    }
}

}
