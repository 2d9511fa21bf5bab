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

#include "blip/propagator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "blip/analytic.hpp"

namespace blip {

std::string to_string(Scheme s) {
    switch (s) {
        case Scheme::UpwindEuler: return "UpwindEuler";
        case Scheme::UpwindRK2: return "UpwindRK2";
    }
    return "?";
}

std::string to_string(SourceConvention s) {
    switch (s) {
        case SourceConvention::HalfCell: return "HalfCell";
        case SourceConvention::FullCell: return "FullCell";
    }
    return "?";
}

double PropagatorConfig::courant(double c_light) const {
    const double nu = c_light * dt / grid.dr();
    return std::abs(nu - 1.0) < 1e-12 ? 1.0 : nu;
}

PropagatorConfig PropagatorConfig::for_run(const SystemParams& p, double dr, double t_end, double cfl,
                                           Scheme scheme) {
    PropagatorConfig cfg;
    cfg.grid = RadialGrid::with_spacing(0.0, p.c_light() * t_end, dr);
    cfg.dt = cfl * dr / p.c_light();
    cfg.t_end = t_end;
    cfg.scheme = scheme;
    return cfg;
}

void validate_config(const PropagatorConfig& cfg, const SystemParams& p) {
    if (!(cfg.dt > 0.0)) throw CFLViolation("dt must be positive");
    const double nu = cfg.courant(p.c_light());
    if (nu > 1.0) {
        std::ostringstream os;
        os << "Courant number c dt / dr = " << nu << " exceeds 1";
        throw CFLViolation(os.str());
    }
    (void)cfg.grid.source_cell();
    const double reach = p.c_light() * cfg.t_end;
    if (cfg.grid.r_max() < reach * (1.0 - 1e-12)) {
        std::ostringstream os;
        os << "grid ends at r = " << cfg.grid.r_max() << " but the light cone reaches " << reach;
        throw InvalidGrid(os.str());
    }
}

namespace {

void advect(Backend b, std::span<const cplx> u, std::span<cplx> out, UpwindStencil s, SourceJump j) {
    if (b == Backend::OpenMP) {
        kernels::omp::advect(u, out, s, j);
    } else {
        kernels::serial::advect(u, out, s, j);
    }
}

// Field traces on either side of r = 0, reconstructed from the cells with
// the same order as the scheme. The second-order reconstruction is linear in
// the envelope u(r) e^{-i k0 r}, k0 = w0 / c, so the carrier of the emitted
// field does not enter the extrapolation error.
struct Traces {
    cplx left;
    cplx right;
};

Traces traces(const std::vector<cplx>& u, std::size_t s, Scheme scheme, double k0dr) {
    const std::size_t n = u.size();
    Traces tr{};
    if (scheme == Scheme::UpwindEuler) {
        tr.right = u[s];
        if (s >= 1) tr.left = u[s - 1];
        return tr;
    }
    const cplx near = std::polar(1.0, -0.5 * k0dr);
    const cplx far = std::polar(1.0, -1.5 * k0dr);
    tr.right = s + 1 < n ? 1.5 * near * u[s] - 0.5 * far * u[s + 1] : near * u[s];
    if (s >= 2) {
        tr.left = 1.5 * std::conj(near) * u[s - 1] - 0.5 * std::conj(far) * u[s - 2];
    } else if (s == 1) {
        tr.left = std::conj(near) * u[0];
    }
    return tr;
}

// While the emitted front is still inside the two-cell reconstruction
// stencil, the right trace is taken from the emission jump
// c(0+) = c(0-) - i (g/c) c0 instead.
Traces startup_traces(const std::vector<cplx>& u, std::size_t s, Scheme scheme, double k0dr, cplx jump) {
    Traces tr = traces(u, s, scheme, k0dr);
    tr.right = tr.left + jump;
    return tr;
}

cplx source_amplitude(const Traces& tr, SourceConvention conv) {
    return conv == SourceConvention::HalfCell ? 0.5 * (tr.left + tr.right) : tr.right;
}

}  // namespace

JointState step(const JointState& state, const SystemParams& p, const PropagatorConfig& cfg) {
    const double c = p.c_light();
    const double nu = cfg.courant(c);
    if (nu > 1.0) throw CFLViolation("Courant number exceeds 1");

    const std::size_t s = state.grid.source_cell();
    const double dt = cfg.dt;
    const double dr = state.grid.dr();
    const double g = p.g() * cfg.coupling_scale;
    const cplx rotate = std::polar(1.0, -p.omega0() * dt);
    const cplx minus_ig{0.0, -g};

    JointState next{state.t + dt, {}, state.cvac, state.grid, std::vector<cplx>(state.cr.size())};

    const cplx emit{0.0, -g / c};
    const double k0dr = p.omega0() / c * dr;
    const auto source_at = [&](const std::vector<cplx>& u, double t, cplx c0) {
        const bool startup = cfg.scheme == Scheme::UpwindRK2 && c * t < 2.0 * dr * (1.0 - 1e-9);
        const Traces tr = startup ? startup_traces(u, s, cfg.scheme, k0dr, emit * c0) : traces(u, s, cfg.scheme, k0dr);
        return minus_ig * source_amplitude(tr, cfg.source_convention);
    };

    const cplx src0 = source_at(state.cr, state.t, state.c0);

    if (cfg.scheme == Scheme::UpwindEuler) {
        // Deposit -i g c0 dt / dr into the source cell; as an inflow value
        // this is nu * (-i g / c) c0.
        advect(cfg.backend, state.cr, next.cr, UpwindStencil::euler(nu), {s, emit * state.c0, {}});
        next.c0 = rotate * (state.c0 + dt * src0);
    } else {
        // Ghost cells left of r = 0 carry the amplitude the emitter will
        // release in the next dr/(2c) and 3dr/(2c): exact free rotation of
        // c0 plus a first-order step of the coupling term.
        const auto jump_at = [&](double tau) {
            return emit * std::polar(1.0, -p.omega0() * tau) * (state.c0 + tau * src0);
        };
        const SourceJump jump{s, jump_at(0.5 * dr / c), jump_at(1.5 * dr / c)};
        advect(cfg.backend, state.cr, next.cr, UpwindStencil::warming_beam(nu), jump);

        const cplx predicted = rotate * (state.c0 + dt * src0);
        const cplx src1 = source_at(next.cr, next.t, predicted);
        next.c0 = rotate * state.c0 + 0.5 * dt * (rotate * src0 + src1);
    }

    const double drift = std::abs(next.norm() - 1.0);
    if (drift > cfg.norm_budget) {
        std::ostringstream os;
        os << "norm drift " << drift << " at t = " << next.t << " exceeds budget " << cfg.norm_budget;
        throw NormDrift(os.str());
    }
    return next;
}

RunResult run(const SystemParams& p, const PropagatorConfig& cfg, std::span<const double> snapshot_times) {
    return run_from(initial_state(p, cfg.grid), p, cfg, snapshot_times);
}

RunResult run_from(JointState state, const SystemParams& p, const PropagatorConfig& cfg,
                   std::span<const double> snapshot_times) {
    validate_config(cfg, p);
    const auto n_steps = static_cast<std::size_t>(std::llround(cfg.t_end / cfg.dt));

    std::vector<std::size_t> wanted;
    for (double t : snapshot_times) {
        wanted.push_back(static_cast<std::size_t>(std::max(0LL, std::llround(t / cfg.dt))));
    }

    RunResult out;
    out.times.reserve(n_steps + 1);
    out.c0_history.reserve(n_steps + 1);
    out.norm_history.reserve(n_steps + 1);
    const double t0 = state.t;
    auto record = [&](std::size_t n) {
        const double norm = state.norm();
        out.times.push_back(state.t);
        out.c0_history.push_back(state.c0);
        out.norm_history.push_back(norm);
        out.max_norm_drift = std::max(out.max_norm_drift, std::abs(norm - 1.0));
        for (std::size_t w : wanted) {
            if (w == n) out.snapshots.push_back(state);
        }
    };

    record(0);
    for (std::size_t n = 1; n <= n_steps; ++n) {
        state = step(state, p, cfg);
        state.t = t0 + static_cast<double>(n) * cfg.dt;  // no accumulated round-off in t
        record(n);
    }
    return out;
}

namespace {

double least_squares_slope(std::span<const double> x, std::span<const double> y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    return sxy / sxx;
}

ConvergenceStudy finish_study(std::vector<ConvergenceSample> samples) {
    std::vector<double> lx, ly;
    for (const auto& s : samples) {
        if (s.l2_error > 0.0) {
            lx.push_back(std::log(s.dr));
            ly.push_back(std::log(s.l2_error));
        }
    }
    const double order = lx.size() >= 2 ? least_squares_slope(lx, ly) : std::numeric_limits<double>::quiet_NaN();
    return {std::move(samples), order};
}

}  // namespace

double fitted_decay_rate(const RunResult& r, double t_lo, double t_hi) {
    std::vector<double> t, y;
    for (std::size_t i = 0; i < r.times.size(); ++i) {
        const double p = std::norm(r.c0_history[i]);
        if (r.times[i] >= t_lo && r.times[i] <= t_hi && p > 0.0) {
            t.push_back(r.times[i]);
            y.push_back(std::log(p));
        }
    }
    if (t.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    return -least_squares_slope(t, y);
}

ConvergenceStudy convergence_order(const SystemParams& p, std::span<const PropagatorConfig> cfgs,
                                   std::size_t wavefront_cells) {
    const AnalyticSolution exact(p);
    std::vector<ConvergenceSample> samples;
    for (const auto& cfg : cfgs) {
        const double t_end = cfg.t_end;
        const RunResult res = run(p, cfg, std::array<double, 1>{t_end});
        const JointState& st = res.snapshots.back();
        const double dr = st.grid.dr();
        const double cutoff = p.c_light() * st.t - static_cast<double>(wavefront_cells) * dr;
        double err2 = 0.0;
        for (std::size_t i = 0; i < st.cr.size(); ++i) {
            const double r = st.grid.center(i);
            if (r > cutoff) continue;
            err2 += std::norm(st.cr[i] - p.beta() * exact.cr_exact(r, st.t));
        }
        samples.push_back({dr, std::sqrt(err2 * dr)});
    }
    return finish_study(std::move(samples));
}

ConvergenceStudy transport_convergence(const SystemParams& p, std::span<const PropagatorConfig> cfgs,
                                       const std::function<cplx(double)>& profile) {
    std::vector<ConvergenceSample> samples;
    for (PropagatorConfig cfg : cfgs) {
        cfg.coupling_scale = 0.0;
        cfg.norm_budget = std::numeric_limits<double>::infinity();
        JointState init{0.0, {}, {}, cfg.grid, std::vector<cplx>(cfg.grid.size())};
        for (std::size_t i = 0; i < init.cr.size(); ++i) init.cr[i] = profile(cfg.grid.center(i));
        init.cvac = std::sqrt(std::max(0.0, 1.0 - init.field_weight()));

        const RunResult res = run_from(init, p, cfg, std::array<double, 1>{cfg.t_end});
        const JointState& st = res.snapshots.back();
        const double shift = p.c_light() * st.t;
        double err2 = 0.0;
        for (std::size_t i = 0; i < st.cr.size(); ++i) {
            err2 += std::norm(st.cr[i] - profile(st.grid.center(i) - shift));
        }
        samples.push_back({st.grid.dr(), std::sqrt(err2 * st.grid.dr())});
    }
    return finish_study(std::move(samples));
}

}  // namespace blip
