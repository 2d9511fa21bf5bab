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

#include <cstddef>
#include <vector>

#include "blip/core.hpp"
#include "blip/kernels.hpp"

namespace blip {

class WindowTooNarrow : public Error {
  public:
    using Error::Error;
};

/// Largest fraction of the emitted line allowed to fold back from beyond
/// the grid's Nyquist frequency.
inline constexpr double kMaxAliasedWeight = 1e-3;

struct FrequencyWindow {
    double omega_lo;
    double omega_hi;
};

/// Photon frequency density p_omega sampled on a uniform window.
struct SpectrumSeries {
    std::vector<double> omegas;
    std::vector<double> density;
    double t_eval = 0.0;
    FrequencyWindow window{0.0, 0.0};
    double d_omega = 0.0;
    double nyquist = 0.0;          // c pi / dr of the source grid
    double window_weight = 0.0;    // trapezoid integral over the window
    double total_weight = 0.0;     // integral over the full grid band
    double negative_weight = 0.0;  // part of total_weight at omega < 0
    double field_weight = 0.0;     // sum |c_r|^2 dr of the source state
};

/// Peak and full width at half maximum of a sampled line.
struct LineShape {
    double peak_omega;
    double peak_density;
    double fwhm;
};

/// Momentum amplitude of the emitted photon at time t (beta factor
/// excluded). t = +inf drops the oscillating e^{-ickt} phase and returns the
/// asymptotic amplitude.
cplx ck_exact(const SystemParams& p, double k, double t);

/// Lorentzian line of the fully emitted photon.
double spectrum_asymptotic(const SystemParams& p, double omega);

/// Lorentzian weight beyond +-nyquist.
double lorentzian_tail_weight(const SystemParams& p, double nyquist);

/// Fourier transforms the field of `state` with (2 pi)^{-1/2} int dr e^{-ikr}
/// and bins |c_k|^2 / c over `window` at n_bins points (inclusive ends).
/// Throws WindowTooNarrow if the window reaches past the grid's Nyquist
/// frequency or the grid would alias more than kMaxAliasedWeight of the line.
SpectrumSeries spectrum_from_state(const JointState& state, const SystemParams& p, FrequencyWindow window,
                                   std::size_t n_bins, Backend backend = Backend::OpenMP);

LineShape analyze_line(const SpectrumSeries& s);

/// Emitter and field energy (hbar = 1). `total` is <H_E + H_F> with the
/// signed field generator c k, which the dynamics conserves. `total_positive`
/// uses the positive observable c|k|; the difference comes from the
/// negative-frequency part of the photon and grows with the grid cutoff.
struct EnergyReport {
    double emitter = 0.0;
    double field_signed = 0.0;
    double field_positive = 0.0;
    double negative_weight = 0.0;  // field probability at omega < 0
    double field_weight = 0.0;
    double total = 0.0;
    double total_positive = 0.0;
};

EnergyReport energy_expectation(const JointState& state, const SystemParams& p);

/// Full-band momentum transform on the zero-padded FFT grid: returns
/// (k_j, |c_k|^2) for k in [-pi/dr, pi/dr). padding >= 2 makes sums of
/// |c_k|^2 dk exact (Parseval).
struct BandTransform {
    std::vector<double> k;
    std::vector<double> power;
    double dk;
};

BandTransform band_transform(const JointState& state, std::size_t padding = 2);

}  // namespace blip
