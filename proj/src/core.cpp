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

#include "blip/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace blip {

SystemParams validate_params(const RawParams& p) {
    if (!(p.gamma > 0.0) || !std::isfinite(p.gamma)) {
        throw NonPositiveRate("gamma must be positive, got " + std::to_string(p.gamma));
    }
    if (!(p.c_light > 0.0) || !std::isfinite(p.c_light)) {
        throw NonPositiveRate("c_light must be positive, got " + std::to_string(p.c_light));
    }
    if (!std::isfinite(p.omega0)) {
        throw Error("omega0 must be finite");
    }
    const double n2 = std::norm(p.alpha) + std::norm(p.beta);
    if (!std::isfinite(n2) || std::abs(n2 - 1.0) > kNormalizationTolerance) {
        throw BadNormalization("|alpha|^2 + |beta|^2 = " + std::to_string(n2) + ", expected 1");
    }

    SystemParams out;
    out.omega0_ = p.omega0;
    out.gamma_ = p.gamma;
    out.c_ = p.c_light;
    out.g_ = std::sqrt(p.gamma * p.c_light);
    const double scale = 1.0 / std::sqrt(n2);
    out.alpha_ = p.alpha * scale;
    out.beta_ = p.beta * scale;
    return out;
}

NaturalUnits natural_units(const SystemParams& p) {
    const double time_scale = 1.0 / p.gamma();
    const double length_scale = p.c_light() / p.gamma();
    RawParams raw = p.raw();
    raw.omega0 = p.omega0() / p.gamma();
    raw.gamma = 1.0;
    raw.c_light = 1.0;
    return {validate_params(raw), time_scale, length_scale};
}

SystemParams NaturalUnits::to_physical() const {
    RawParams raw = params.raw();
    raw.gamma = params.gamma() / time_scale;
    raw.c_light = params.c_light() * length_scale / time_scale;
    raw.omega0 = params.omega0() / time_scale;
    return validate_params(raw);
}

RadialGrid::RadialGrid(double r_min, double r_max, std::size_t n_cells)
    : r_min_(r_min), r_max_(r_max), n_(n_cells), dr_(0.0) {
    if (n_cells == 0) {
        throw InvalidGrid("grid needs at least one cell");
    }
    dr_ = (r_max - r_min) / static_cast<double>(n_cells);
    if (!(dr_ > 0.0) || !std::isfinite(dr_)) {
        throw InvalidGrid("grid spacing must be positive");
    }
}

RadialGrid RadialGrid::with_spacing(double r_min, double r_max, double dr) {
    if (!(dr > 0.0) || !(r_max > r_min)) {
        throw InvalidGrid("need dr > 0 and r_max > r_min");
    }
    // Tolerate round-off so that e.g. (5 - 0) / 1e-3 gives 5000 cells, not 5001.
    const double cells = (r_max - r_min) / dr;
    auto n = static_cast<std::size_t>(std::ceil(cells - 1e-9 * cells));
    if (n == 0) n = 1;
    return RadialGrid(r_min, r_min + static_cast<double>(n) * dr, n);
}

std::size_t RadialGrid::source_cell() const {
    const double edge = -r_min_ / dr_;
    const double k = std::round(edge);
    if (r_min_ > 0.0 || std::abs(edge - k) > 1e-9 * std::max(1.0, std::abs(edge)) ||
        k >= static_cast<double>(n_)) {
        throw InvalidGrid("r = 0 must be a cell edge inside the grid");
    }
    return static_cast<std::size_t>(k);
}

double JointState::field_weight() const {
    double s = 0.0;
    for (const auto& a : cr) s += std::norm(a);
    return s * grid.dr();
}

double JointState::norm() const { return std::norm(cvac) + std::norm(c0) + field_weight(); }

JointState initial_state(const SystemParams& p, const RadialGrid& grid) {
    return JointState{0.0, p.beta(), p.alpha(), grid, std::vector<cplx>(grid.size(), cplx{})};
}

}  // namespace blip
