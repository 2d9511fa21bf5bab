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

#include "blip/spectroscopy.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

namespace blip {

namespace {

// (e^z - 1) / z without cancellation near z = 0.
cplx expm1_over(cplx z) {
    if (std::abs(z) < 1e-4) return 1.0 + z * (0.5 + z * (1.0 / 6.0 + z / 24.0));
    return (std::exp(z) - 1.0) / z;
}

struct FftwFree {
    void operator()(void* p) const { fftw_free(p); }
};

using FftwBuffer = std::unique_ptr<fftw_complex[], FftwFree>;

FftwBuffer fftw_buffer(std::size_t n) {
    return FftwBuffer(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n)));
}

}  // namespace

cplx ck_exact(const SystemParams& p, double k, double t) {
    const double c = p.c_light();
    const double pref = std::sqrt(c * p.gamma() / (2.0 * kPi));
    const cplx a{0.5 * p.gamma(), p.omega0() - c * k};
    if (std::isinf(t) && t > 0.0) return cplx{0.0, -pref} / a;
    if (t <= 0.0) return {};
    // i pref [e^{-(G/2 + i w0) t} - e^{-ickt}] / a  =  -i pref t e^{-ickt} phi(-a t)
    return cplx{0.0, -pref * t} * std::polar(1.0, -c * k * t) * expm1_over(-a * t);
}

double spectrum_asymptotic(const SystemParams& p, double omega) {
    const double half = 0.5 * p.gamma();
    const double detune = p.omega0() - omega;
    return p.gamma() / (2.0 * kPi * (half * half + detune * detune));
}

double lorentzian_tail_weight(const SystemParams& p, double nyquist) {
    const double above = 0.5 - std::atan(2.0 * (nyquist - p.omega0()) / p.gamma()) / kPi;
    const double below = 0.5 - std::atan(2.0 * (nyquist + p.omega0()) / p.gamma()) / kPi;
    return above + below;
}

BandTransform band_transform(const JointState& state, std::size_t padding) {
    const std::size_t n = state.cr.size();
    const std::size_t m = std::max<std::size_t>(2, padding) * n;
    const double dr = state.grid.dr();

    FftwBuffer in = fftw_buffer(m);
    FftwBuffer out = fftw_buffer(m);
    for (std::size_t i = 0; i < m; ++i) {
        const cplx v = i < n ? state.cr[i] : cplx{};
        in[i][0] = v.real();
        in[i][1] = v.imag();
    }
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(m), in.get(), out.get(), FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);

    BandTransform bt;
    bt.dk = 2.0 * kPi / (static_cast<double>(m) * dr);
    bt.k.resize(m);
    bt.power.resize(m);
    const double scale = dr * dr / (2.0 * kPi);
    // ascending k: indices m/2 .. m-1 are negative, 0 .. m/2-1 non-negative
    const std::size_t half = m / 2;
    for (std::size_t j = 0; j < m; ++j) {
        const std::size_t src = (j + half) % m;
        const double idx = src >= half ? static_cast<double>(src) - static_cast<double>(m) : static_cast<double>(src);
        bt.k[j] = idx * bt.dk;
        bt.power[j] = scale * (out[src][0] * out[src][0] + out[src][1] * out[src][1]);
    }
    return bt;
}

SpectrumSeries spectrum_from_state(const JointState& state, const SystemParams& p, FrequencyWindow window,
                                   std::size_t n_bins, Backend backend) {
    if (n_bins < 2 || !(window.omega_hi > window.omega_lo)) {
        throw Error("spectrum window needs omega_hi > omega_lo and at least two bins");
    }
    const double c = p.c_light();
    const double dr = state.grid.dr();
    const double nyquist = c * kPi / dr;
    if (window.omega_lo < -nyquist || window.omega_hi > nyquist) {
        std::ostringstream os;
        os << "window [" << window.omega_lo << ", " << window.omega_hi << "] exceeds the grid band +-" << nyquist;
        throw WindowTooNarrow(os.str());
    }
    const double aliased = lorentzian_tail_weight(p, nyquist);
    if (aliased > kMaxAliasedWeight) {
        std::ostringstream os;
        os << "grid spacing " << dr << " aliases " << aliased << " of the line (limit " << kMaxAliasedWeight << ")";
        throw WindowTooNarrow(os.str());
    }

    SpectrumSeries s;
    s.t_eval = state.t;
    s.window = window;
    s.nyquist = nyquist;
    s.d_omega = (window.omega_hi - window.omega_lo) / static_cast<double>(n_bins - 1);
    s.omegas.resize(n_bins);
    std::vector<double> ks(n_bins);
    for (std::size_t j = 0; j < n_bins; ++j) {
        s.omegas[j] = window.omega_lo + static_cast<double>(j) * s.d_omega;
        ks[j] = s.omegas[j] / c;
    }

    std::vector<cplx> amp(n_bins);
    const double r0 = state.grid.center(0);
    if (backend == Backend::OpenMP) {
        kernels::omp::window_dft(state.cr, r0, dr, ks, amp);
    } else {
        kernels::serial::window_dft(state.cr, r0, dr, ks, amp);
    }
    s.density.resize(n_bins);
    for (std::size_t j = 0; j < n_bins; ++j) s.density[j] = std::norm(amp[j]) / c;

    for (std::size_t j = 0; j + 1 < n_bins; ++j) {
        s.window_weight += 0.5 * (s.density[j] + s.density[j + 1]) * s.d_omega;
    }

    const BandTransform bt = band_transform(state, 8);
    for (std::size_t j = 0; j < bt.k.size(); ++j) {
        s.total_weight += bt.power[j] * bt.dk;
        if (bt.k[j] < 0.0) s.negative_weight += bt.power[j] * bt.dk;
    }
    s.field_weight = state.field_weight();
    return s;
}

LineShape analyze_line(const SpectrumSeries& s) {
    const auto& d = s.density;
    const auto peak_it = std::max_element(d.begin(), d.end());
    const auto ip = static_cast<std::size_t>(peak_it - d.begin());
    const double half = 0.5 * *peak_it;
    const double nan = std::numeric_limits<double>::quiet_NaN();

    double left = nan, right = nan;
    for (std::size_t j = ip; j > 0; --j) {
        if (d[j - 1] <= half) {
            const double f = (half - d[j - 1]) / (d[j] - d[j - 1]);
            left = s.omegas[j - 1] + f * s.d_omega;
            break;
        }
    }
    for (std::size_t j = ip; j + 1 < d.size(); ++j) {
        if (d[j + 1] <= half) {
            const double f = (d[j] - half) / (d[j] - d[j + 1]);
            right = s.omegas[j] + f * s.d_omega;
            break;
        }
    }
    return {s.omegas[ip], *peak_it, right - left};
}

EnergyReport energy_expectation(const JointState& state, const SystemParams& p) {
    EnergyReport e;
    const double c = p.c_light();
    e.emitter = p.omega0() * std::norm(state.c0);
    const BandTransform bt = band_transform(state, 8);
    for (std::size_t j = 0; j < bt.k.size(); ++j) {
        const double w = bt.power[j] * bt.dk;
        e.field_weight += w;
        e.field_signed += c * bt.k[j] * w;
        e.field_positive += c * std::abs(bt.k[j]) * w;
        if (bt.k[j] < 0.0) e.negative_weight += w;
    }
    e.total = e.emitter + e.field_signed;
    e.total_positive = e.emitter + e.field_positive;
    return e;
}

}  // namespace blip
