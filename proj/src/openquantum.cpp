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

#include "blip/openquantum.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "blip/analytic.hpp"

namespace blip {

// ---------------------------------------------------------------------------
// DensityMatrix2
// ---------------------------------------------------------------------------

std::array<double, 2> DensityMatrix2::eigenvalues() const {
    const double mean = 0.5 * (rho00 + rho11);
    const double half_gap = 0.5 * (rho00 - rho11);
    const double d = std::sqrt(half_gap * half_gap + std::norm(rho01));
    return {mean - d, mean + d};
}

void DensityMatrix2::check(double tol) const {
    if (!std::isfinite(rho00) || !std::isfinite(rho11) || !std::isfinite(std::abs(rho01))) {
        throw NotAState("density matrix has non-finite entries");
    }
    if (std::abs(trace() - 1.0) > tol) {
        std::ostringstream os;
        os << "trace " << trace() << " differs from 1";
        throw NotAState(os.str());
    }
    if (eigenvalues()[0] < -tol) {
        std::ostringstream os;
        os << "negative eigenvalue " << eigenvalues()[0];
        throw NotAState(os.str());
    }
}

DensityMatrix2 DensityMatrix2::pure(cplx ground, cplx excited) {
    return {std::norm(ground), std::norm(excited), ground * std::conj(excited)};
}

double max_abs_diff(const DensityMatrix2& a, const DensityMatrix2& b) {
    return std::max({std::abs(a.rho00 - b.rho00), std::abs(a.rho11 - b.rho11), std::abs(a.rho01 - b.rho01)});
}

// ---------------------------------------------------------------------------
// Conditional dynamics and partial trace
// ---------------------------------------------------------------------------

ConditionalState conditional_evolve(const SystemParams& p, double t) {
    const cplx decay = std::exp(-cplx{0.5 * p.gamma(), p.omega0()} * t);
    const cplx excited = p.beta() * decay;
    return {p.alpha(), excited, std::norm(p.alpha()) + std::norm(excited)};
}

DensityMatrix2 partial_trace(const JointState& s) {
    return {std::norm(s.cvac) + s.field_weight(), std::norm(s.c0), s.cvac * std::conj(s.c0)};
}

// ---------------------------------------------------------------------------
// Master equation
// ---------------------------------------------------------------------------

namespace {

using Mat2 = std::array<cplx, 4>;  // row-major {00, 01, 10, 11}

Mat2 to_mat(const DensityMatrix2& r) { return {r.rho00, r.rho01, std::conj(r.rho01), r.rho11}; }

Mat2 mul(const Mat2& a, const Mat2& b) {
    return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2],
            a[2] * b[1] + a[3] * b[3]};
}

Mat2 adjoint(const Mat2& a) { return {std::conj(a[0]), std::conj(a[2]), std::conj(a[1]), std::conj(a[3])}; }

DensityMatrix2 axpy(const DensityMatrix2& x, double a, const DensityMatrix2& y) {
    return {x.rho00 + a * y.rho00, x.rho11 + a * y.rho11, x.rho01 + a * y.rho01};
}

}  // namespace

DensityMatrix2 master_rhs(const SystemParams& p, const DensityMatrix2& rho) {
    const Mat2 h_cond{0.0, 0.0, 0.0, cplx{p.omega0(), -0.5 * p.gamma()}};
    const Mat2 lower{0.0, 1.0, 0.0, 0.0};  // |0><1|
    const Mat2 r = to_mat(rho);
    const Mat2 hr = mul(h_cond, r);
    const Mat2 rh = mul(r, adjoint(h_cond));
    const Mat2 jump = mul(mul(lower, r), adjoint(lower));
    Mat2 d;
    for (std::size_t i = 0; i < 4; ++i) d[i] = cplx{0.0, -1.0} * (hr[i] - rh[i]) + p.gamma() * jump[i];
    return {d[0].real(), d[3].real(), d[1]};
}

DensityMatrix2 master_step(const SystemParams& p, const DensityMatrix2& rho, double dt) {
    rho.check();
    if (!(dt > 0.0) || p.gamma() * dt > kMasterStepLimit * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "master_step needs 0 < gamma dt <= " << kMasterStepLimit << ", got " << p.gamma() * dt;
        throw Error(os.str());
    }
    const DensityMatrix2 k1 = master_rhs(p, rho);
    const DensityMatrix2 k2 = master_rhs(p, axpy(rho, 0.5 * dt, k1));
    const DensityMatrix2 k3 = master_rhs(p, axpy(rho, 0.5 * dt, k2));
    const DensityMatrix2 k4 = master_rhs(p, axpy(rho, dt, k3));
    DensityMatrix2 out = rho;
    out = axpy(out, dt / 6.0, k1);
    out = axpy(out, dt / 3.0, k2);
    out = axpy(out, dt / 3.0, k3);
    out = axpy(out, dt / 6.0, k4);
    return out;
}

std::vector<DensityMatrix2> master_integrate(const SystemParams& p, const DensityMatrix2& rho0,
                                             std::span<const double> t_grid, double dt_max) {
    dt_max = std::min(dt_max, kMasterStepLimit / p.gamma());
    std::vector<DensityMatrix2> out;
    out.reserve(t_grid.size());
    DensityMatrix2 rho = rho0;
    double t = 0.0;
    for (double target : t_grid) {
        if (target < t) throw Error("master_integrate needs ascending times >= 0");
        const double span = target - t;
        const auto n = static_cast<std::size_t>(std::ceil(span / dt_max - 1e-9));
        for (std::size_t k = 0; k < n; ++k) rho = master_step(p, rho, span / static_cast<double>(n));
        t = target;
        out.push_back(rho);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Monte Carlo unravelling
// ---------------------------------------------------------------------------

EnsembleResult mc_trajectories(const SystemParams& p, std::size_t n_traj, std::span<const double> t_grid,
                               std::uint64_t seed, const EnsembleOptions& opts) {
    if (n_traj == 0) throw Error("mc_trajectories needs at least one trajectory");
    EnsembleResult res{seed, n_traj, {}, std::vector<double>(n_traj), {}};
    const double w = p.excited_weight();

    if (opts.sampler == JumpSampler::InverseCdf) {
        if (opts.backend == Backend::OpenMP) {
            kernels::omp::sample_jump_times(seed, 0, w, p.gamma(), res.jump_times);
        } else {
            kernels::serial::sample_jump_times(seed, 0, w, p.gamma(), res.jump_times);
        }
    } else {
        double t_max = 0.0;
        for (double t : t_grid) t_max = std::max(t_max, t);
        if (opts.backend == Backend::OpenMP) {
            kernels::omp::sample_jump_times_stepped(seed, 0, w, p.gamma(), opts.bernoulli_dt, t_max, res.jump_times);
        } else {
            kernels::serial::sample_jump_times_stepped(seed, 0, w, p.gamma(), opts.bernoulli_dt, t_max,
                                                       res.jump_times);
        }
    }

    const double n = static_cast<double>(n_traj);
    std::vector<std::pair<cplx, cplx>> normalized(t_grid.size());
    for (std::size_t it = 0; it < t_grid.size(); ++it) {
        const double t = t_grid[it];
        const ConditionalState cs = conditional_evolve(p, t);
        const double norm = std::sqrt(cs.no_jump_probability);
        normalized[it] = {cs.ground / norm, cs.excited / norm};

        std::size_t unjumped = 0;
        for (double tj : res.jump_times) {
            if (tj > t) ++unjumped;
        }
        const double f = static_cast<double>(unjumped) / n;
        const DensityMatrix2 cond = DensityMatrix2::pure(normalized[it].first, normalized[it].second);

        EnsembleRow row{};
        row.t = t;
        row.rho = {f * cond.rho00 + (1.0 - f), f * cond.rho11, f * cond.rho01};
        row.p_excited_mean = row.rho.rho11;
        row.p_excited_ci95 = 1.96 * cond.rho11 * std::sqrt(f * (1.0 - f) / n);
        row.rho01_abs_mean = std::abs(row.rho.rho01);
        row.unjumped_fraction = f;
        const double p0 = cs.no_jump_probability;
        const double binom = std::sqrt(std::max(0.0, p0 * (1.0 - p0)) / n);
        row.sigma_rho11 = cond.rho11 * binom;
        row.sigma_rho01 = std::abs(cond.rho01) * binom;
        res.rows.push_back(row);
    }

    if (opts.keep_records) {
        res.records.reserve(n_traj);
        for (std::size_t i = 0; i < n_traj; ++i) {
            TrajectoryRecord rec{seed, i, std::nullopt, {}};
            const double tj = res.jump_times[i];
            if (std::isfinite(tj)) rec.jump_time = tj;
            for (std::size_t it = 0; it < t_grid.size(); ++it) {
                rec.samples.push_back(tj > t_grid[it] ? normalized[it] : std::pair<cplx, cplx>{1.0, 0.0});
            }
            res.records.push_back(std::move(rec));
        }
    }

    if (opts.detector_distance != 0.0) {
        const double delay = opts.detector_distance / p.c_light();
        for (double& tj : res.jump_times) tj += delay;
        for (auto& rec : res.records) {
            if (rec.jump_time) *rec.jump_time += delay;
        }
    }
    return res;
}

// ---------------------------------------------------------------------------
// Three-way consistency
// ---------------------------------------------------------------------------

double log_linear_rate(std::span<const double> t, std::span<const double> y) {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (y[i] > 0.0) {
            xs.push_back(t[i]);
            ys.push_back(std::log(y[i]));
        }
    }
    if (xs.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    const double n = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i] / n;
        my += ys[i] / n;
    }
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    return -sxy / sxx;
}

namespace {

double in_sigmas(double diff, double sigma) {
    if (sigma > 0.0) return diff / sigma;
    return diff <= 1e-12 ? 0.0 : std::numeric_limits<double>::infinity();
}

}  // namespace

ConsistencyReport consistency_report(const SystemParams& p, std::span<const double> t_grid, std::size_t n_traj,
                                     std::uint64_t seed, double master_dt) {
    const AnalyticSolution exact(p);
    const auto master = master_integrate(p, DensityMatrix2::pure(p.alpha(), p.beta()), t_grid, master_dt);
    const EnsembleResult mc = mc_trajectories(p, n_traj, t_grid, seed);

    ConsistencyReport rep;
    std::vector<double> coh_traced, coh_master, coh_mc;
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        ConsistencyRow row{t_grid[i], exact.rho_emitter(t_grid[i]), master[i], mc.rows[i].rho, 0.0, 0.0};
        row.master_discrepancy = max_abs_diff(row.traced, row.master);
        const double s11 = in_sigmas(std::abs(row.ensemble.rho11 - row.traced.rho11), mc.rows[i].sigma_rho11);
        const double s01 = in_sigmas(std::abs(row.ensemble.rho01 - row.traced.rho01), mc.rows[i].sigma_rho01);
        row.ensemble_sigmas = std::max(s11, s01);
        rep.max_master_discrepancy = std::max(rep.max_master_discrepancy, row.master_discrepancy);
        rep.max_ensemble_sigmas = std::max(rep.max_ensemble_sigmas, row.ensemble_sigmas);
        coh_traced.push_back(std::abs(row.traced.rho01));
        coh_master.push_back(std::abs(row.master.rho01));
        coh_mc.push_back(std::abs(row.ensemble.rho01));
        rep.rows.push_back(row);
    }
    rep.coherence_rate_traced = log_linear_rate(t_grid, coh_traced);
    rep.coherence_rate_master = log_linear_rate(t_grid, coh_master);
    rep.coherence_rate_ensemble = log_linear_rate(t_grid, coh_mc);
    rep.master_ok = rep.max_master_discrepancy < kMasterAgreement;
    rep.ensemble_ok = rep.max_ensemble_sigmas < kEnsembleSigmas;
    return rep;
}

}  // namespace blip
