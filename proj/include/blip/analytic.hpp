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

#include "blip/core.hpp"
#include "blip/density_matrix.hpp"

namespace blip {

/**
 * Closed-form emitter and field amplitudes for an emitter coupled locally to
 * the radial field, starting from alpha|0_F,0_E> + beta|0_F,1_E>.
 *
 * c0 and c_r are the bare coefficients (no beta factor); p0, pr and the
 * density matrix include the initial weights. Before the interaction starts
 * (t < 0) and outside the light cone the field amplitude is zero.
 */
class AnalyticSolution {
  public:
    explicit AnalyticSolution(const SystemParams& p) : p_(p) {}

    const SystemParams& params() const { return p_; }

    cplx c0_exact(double t) const;
    /// Nonzero on the closed interval 0 <= r <= c t.
    cplx cr_exact(double r, double t) const;

    /// Probability that no photon has been found by time t.
    double p0(double t) const;
    /// Detection density per unit distance.
    double pr(double r, double t) const;

    /// Total probability carried by the field, the integral of pr over r.
    double field_probability(double t) const;

    /// Emitter state obtained by tracing the field out of the joint state.
    DensityMatrix2 rho_emitter(double t) const;

    /// Samples the full joint state (beta-weighted) at cell centres.
    JointState sample_state(double t, const RadialGrid& grid) const;

  private:
    SystemParams p_;
};

}  // namespace blip
