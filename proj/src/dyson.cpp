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

#include "blip/dyson.hpp"

#include <cmath>
#include <string>

#include "blip/analytic.hpp"

namespace blip {

namespace {

// Unevaluated sum hi + lo with |lo| <= ulp(hi)/2.
struct DoubleDouble {
    double hi = 0.0;
    double lo = 0.0;
};

DoubleDouble two_sum(double a, double b) {
    const double s = a + b;
    const double bb = s - a;
    const double err = (a - (s - bb)) + (b - bb);
    return {s, err};
}

DoubleDouble quick_two_sum(double a, double b) {
    const double s = a + b;
    return {s, b - (s - a)};
}

DoubleDouble add(DoubleDouble a, DoubleDouble b) {
    DoubleDouble s = two_sum(a.hi, b.hi);
    DoubleDouble t = two_sum(a.lo, b.lo);
    s.lo += t.hi;
    s = quick_two_sum(s.hi, s.lo);
    s.lo += t.lo;
    return quick_two_sum(s.hi, s.lo);
}

DoubleDouble mul(DoubleDouble a, double b) {
    const double p = a.hi * b;
    const double e = std::fma(a.hi, b, -p);
    return quick_two_sum(p, e + a.lo * b);
}

DoubleDouble div(DoubleDouble a, double b) {
    const double q1 = a.hi / b;
    DoubleDouble r = add(a, mul(DoubleDouble{q1, 0.0}, -b));
    const double q2 = r.hi / b;
    return quick_two_sum(q1, q2);
}

}  // namespace

namespace detail {

double truncated_exp(double x, int order) {
    DoubleDouble term{1.0, 0.0};
    DoubleDouble sum{1.0, 0.0};
    for (int m = 1; m <= order; ++m) {
        term = div(mul(term, x), static_cast<double>(m));
        sum = add(sum, term);
    }
    return sum.hi + sum.lo;
}

}  // namespace detail

DysonExpansion::DysonExpansion(const SystemParams& p, int max_order) : p_(p), max_order_(max_order) {
    if (max_order < 0 || max_order > kMaxOrderLimit) {
        throw OrderOverflow("max_order must lie in [0, 170], got " + std::to_string(max_order));
    }
}

void DysonExpansion::check_order(int order) const {
    if (order < 0 || order > max_order_) {
        throw OrderOverflow("order " + std::to_string(order) + " exceeds max_order " +
                            std::to_string(max_order_));
    }
}

cplx DysonExpansion::c0_partial(double t, int order) const {
    check_order(order);
    const double x = -0.5 * p_.gamma() * t;
    const cplx phase = std::polar(1.0, -p_.omega0() * t);
    return phase * detail::truncated_exp(x, order);
}

cplx DysonExpansion::cr_partial(double r, double t, int order) const {
    check_order(order);
    const double c = p_.c_light();
    if (t < 0.0 || r < 0.0 || r > c * t) return {};
    const double g = p_.g();
    const double retarded = r / c - t;  // <= 0 on the support
    const double x = g * g / (2.0 * c) * retarded;
    const cplx phase = std::polar(1.0, p_.omega0() * retarded);
    return cplx{0.0, -g / c} * phase * detail::truncated_exp(x, order);
}

double DysonExpansion::remainder_bound(double t, int order) const {
    const double half = 0.5 * p_.gamma() * t;
    // log form keeps (half)^(M+1)/(M+1)! finite for large M
    const double n = static_cast<double>(order + 1);
    if (half == 0.0) return 0.0;
    return std::exp(n * std::log(half) - std::lgamma(n + 1.0) + half);
}

std::vector<ConvergencePoint> DysonExpansion::convergence_profile(double t, int max_order) const {
    check_order(max_order);
    const AnalyticSolution exact(p_);
    const cplx target = exact.c0_exact(t);
    std::vector<ConvergencePoint> out(static_cast<std::size_t>(max_order) + 1);
#pragma omp parallel for schedule(static)
    for (int m = 0; m <= max_order; ++m) {
        out[static_cast<std::size_t>(m)] = {m, std::abs(c0_partial(t, m) - target), remainder_bound(t, m)};
    }
    return out;
}

}  // namespace blip
