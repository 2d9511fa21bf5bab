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

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "blip/core.hpp"
#include "blip/kernels.hpp"

namespace blip {

class CFLViolation : public Error {
  public:
    using Error::Error;
};

class NormDrift : public Error {
  public:
    using Error::Error;
};

enum class Scheme {
    UpwindEuler,  // first-order upwind, forward Euler
    UpwindRK2,    // second-order upwind predictor/corrector, Heun emitter
};

/// How the emitter reads the field back at its own position.
enum class SourceConvention {
    HalfCell,  // half of the left and right traces at r = 0 (endpoint delta)
    FullCell,  // full weight of the right trace; doubles the decay rate
};

std::string to_string(Scheme s);
std::string to_string(SourceConvention s);

struct PropagatorConfig {
    RadialGrid grid{0.0, 5.0, 5000};
    double dt = 1e-3;
    double t_end = 5.0;
    Scheme scheme = Scheme::UpwindRK2;
    SourceConvention source_convention = SourceConvention::HalfCell;
    /// Allowed | norm - 1 | at any step; +inf disables the check.
    double norm_budget = 1e-4;
    /// Multiplies g; 0 decouples emitter and field.
    double coupling_scale = 1.0;
    Backend backend = Backend::OpenMP;

    /// c dt / dr, snapped to exactly 1 when within 1e-12 of it.
    double courant(double c_light) const;

    /// Grid [0, c t_end] at spacing dr, dt = cfl * dr / c.
    static PropagatorConfig for_run(const SystemParams& p, double dr, double t_end, double cfl = 1.0,
                                    Scheme scheme = Scheme::UpwindRK2);
};

/// Throws CFLViolation or InvalidGrid.
void validate_config(const PropagatorConfig& cfg, const SystemParams& p);

/// Advances the state by one time step dt. Throws NormDrift if the resulting
/// norm leaves [1 - budget, 1 + budget].
JointState step(const JointState& state, const SystemParams& p, const PropagatorConfig& cfg);

struct RunResult {
    std::vector<JointState> snapshots;
    std::vector<double> times;           // every step, including t = 0
    std::vector<cplx> c0_history;        // emitter amplitude at `times`
    std::vector<double> norm_history;    // total norm at `times`
    double max_norm_drift = 0.0;
};

/// Integrates from the initial state alpha|0,0> + beta|0,1> to cfg.t_end,
/// keeping snapshots at the requested times (rounded to the step grid).
RunResult run(const SystemParams& p, const PropagatorConfig& cfg,
              std::span<const double> snapshot_times = {});

/// Same, from an arbitrary initial state.
RunResult run_from(JointState initial, const SystemParams& p, const PropagatorConfig& cfg,
                   std::span<const double> snapshot_times = {});

/// Least-squares rate of ln|c0|^2 over [t_lo, t_hi].
double fitted_decay_rate(const RunResult& r, double t_lo, double t_hi);

struct ConvergenceSample {
    double dr;
    double l2_error;
};

struct ConvergenceStudy {
    std::vector<ConvergenceSample> samples;
    double observed_order;  // least-squares slope of log error vs log dr
};

/// L2 error of c_r at each config's t_end against the closed form, excluding
/// `wavefront_cells` cells behind the wavefront. Configs should differ only
/// in resolution.
ConvergenceStudy convergence_order(const SystemParams& p, std::span<const PropagatorConfig> cfgs,
                                   std::size_t wavefront_cells = 10);

/// Pure transport check: emitter decoupled, initial field `profile(r)`,
/// error against profile(r - c t_end).
ConvergenceStudy transport_convergence(const SystemParams& p, std::span<const PropagatorConfig> cfgs,
                                       const std::function<cplx(double)>& profile);

}  // namespace blip
