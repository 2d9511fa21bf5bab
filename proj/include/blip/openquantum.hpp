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

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "blip/core.hpp"
#include "blip/density_matrix.hpp"
#include "blip/kernels.hpp"

namespace blip {

/// Emitter amplitudes under the no-detection (conditional) Hamiltonian
/// (w0 - i G/2)|1><1|, unnormalized, with the no-jump probability.
struct ConditionalState {
    cplx ground;
    cplx excited;
    double no_jump_probability;
};

ConditionalState conditional_evolve(const SystemParams& p, double t);

/// Emitter density matrix obtained by tracing the field out of a joint state.
DensityMatrix2 partial_trace(const JointState& s);

/// Right-hand side of the emitter master equation.
DensityMatrix2 master_rhs(const SystemParams& p, const DensityMatrix2& rho);

/// Largest gamma * dt accepted by master_step.
inline constexpr double kMasterStepLimit = 0.01;

/// One classical RK4 step. Throws NotAState for an invalid input and Error
/// if gamma * dt is outside (0, kMasterStepLimit].
DensityMatrix2 master_step(const SystemParams& p, const DensityMatrix2& rho, double dt);

/// Integrates from rho0 at t = 0 and returns rho at each (ascending) time in
/// t_grid, using steps no longer than dt_max.
std::vector<DensityMatrix2> master_integrate(const SystemParams& p, const DensityMatrix2& rho0,
                                             std::span<const double> t_grid, double dt_max = 1e-3);

enum class JumpSampler {
    InverseCdf,  // exact exponential no-jump law
    Bernoulli,   // one trial per step of length bernoulli_dt
};

struct EnsembleOptions {
    JumpSampler sampler = JumpSampler::InverseCdf;
    double bernoulli_dt = 1e-3;
    bool keep_records = false;
    /// Reported jump times are shifted by detector_distance / c (0 = emitter
    /// time). Statistics always use emitter time.
    double detector_distance = 0.0;
    Backend backend = Backend::OpenMP;
};

struct TrajectoryRecord {
    std::uint64_t seed;
    std::uint64_t index;
    std::optional<double> jump_time;
    /// Normalized conditional state (ground, excited) at each ensemble time.
    std::vector<std::pair<cplx, cplx>> samples;
};

struct EnsembleRow {
    double t;
    DensityMatrix2 rho;         // ensemble mean of the conditional projectors
    double p_excited_mean;
    double p_excited_ci95;
    double rho01_abs_mean;
    double unjumped_fraction;
    double sigma_rho11;         // binomial standard error of rho11
    double sigma_rho01;         // binomial standard error of |rho01|
};

struct EnsembleResult {
    std::uint64_t seed;
    std::size_t n_traj;
    std::vector<EnsembleRow> rows;
    std::vector<double> jump_times;  // per trajectory, +inf = none
    std::vector<TrajectoryRecord> records;
};

/// Photon-counting unravelling: every trajectory follows the conditional
/// Hamiltonian until its jump, then sits in |0>. Trajectory i depends only on
/// (params, seed, i).
EnsembleResult mc_trajectories(const SystemParams& p, std::size_t n_traj, std::span<const double> t_grid,
                               std::uint64_t seed, const EnsembleOptions& opts = {});

struct ConsistencyRow {
    double t;
    DensityMatrix2 traced;
    DensityMatrix2 master;
    DensityMatrix2 ensemble;
    double master_discrepancy;
    double ensemble_sigmas;  // largest |ensemble - traced| in binomial sigmas
};

struct ConsistencyReport {
    std::vector<ConsistencyRow> rows;
    double max_master_discrepancy = 0.0;
    double max_ensemble_sigmas = 0.0;
    /// Fitted decay rate of |rho01| from each route; NaN if no coherence.
    double coherence_rate_traced;
    double coherence_rate_master;
    double coherence_rate_ensemble;
    bool master_ok = false;
    bool ensemble_ok = false;
};

inline constexpr double kMasterAgreement = 1e-8;
inline constexpr double kEnsembleSigmas = 5.0;

ConsistencyReport consistency_report(const SystemParams& p, std::span<const double> t_grid,
                                     std::size_t n_traj = 100000, std::uint64_t seed = 20240601,
                                     double master_dt = 1e-3);

/// Least-squares slope of -ln y against t (points with y <= 0 skipped).
double log_linear_rate(std::span<const double> t, std::span<const double> y);

}  // namespace blip
