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

#include "blip/analytic.hpp"

#include <cmath>

namespace blip {

namespace {

bool in_light_cone(double r, double t, double c) { return t >= 0.0 && r >= 0.0 && r <= c * t; }

}  // namespace

cplx AnalyticSolution::c0_exact(double t) const {
    if (t < 0.0) return {1.0, 0.0};
    const cplx rate{0.5 * p_.gamma(), p_.omega0()};
    return std::exp(-rate * t);
}

cplx AnalyticSolution::cr_exact(double r, double t) const {
    const double c = p_.c_light();
    if (!in_light_cone(r, t, c)) return {};
    const cplx rate{0.5 * p_.gamma(), p_.omega0()};
    const double amp = std::sqrt(p_.gamma() / c);
    return cplx{0.0, -amp} * std::exp(rate * (r / c - t));
}

double AnalyticSolution::p0(double t) const {
    if (t < 0.0) return 1.0;
    return p_.ground_weight() + p_.excited_weight() * std::exp(-p_.gamma() * t);
}

double AnalyticSolution::pr(double r, double t) const {
    const double c = p_.c_light();
    if (!in_light_cone(r, t, c)) return 0.0;
    return p_.gamma() / c * p_.excited_weight() * std::exp(p_.gamma() * (r / c - t));
}

double AnalyticSolution::field_probability(double t) const {
    if (t <= 0.0) return 0.0;
    return -p_.excited_weight() * std::expm1(-p_.gamma() * t);
}

DensityMatrix2 AnalyticSolution::rho_emitter(double t) const {
    // trace over the field: |0_E><0_E| collects the vacuum and every blip
    const cplx c0 = c0_exact(t);
    DensityMatrix2 rho;
    rho.rho11 = p_.excited_weight() * std::norm(c0);
    rho.rho00 = p_.ground_weight() + field_probability(t);
    rho.rho01 = p_.alpha() * std::conj(p_.beta()) * std::conj(c0);
    return rho;
}

JointState AnalyticSolution::sample_state(double t, const RadialGrid& grid) const {
    JointState s{t, p_.beta() * c0_exact(t), p_.alpha(), grid, std::vector<cplx>(grid.size())};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        s.cr[i] = p_.beta() * cr_exact(grid.center(i), t);
    }
    return s;
}

}  // namespace blip
