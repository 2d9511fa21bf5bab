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

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace blip {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class NonPositiveRate : public Error {
  public:
    using Error::Error;
};

class BadNormalization : public Error {
  public:
    using Error::Error;
};

class InvalidGrid : public Error {
  public:
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Parameters
// ---------------------------------------------------------------------------

/// Unchecked parameter set as it comes from a config file or the caller.
struct RawParams {
    double omega0 = 10.0;  // transition angular frequency
    double gamma = 1.0;    // spontaneous decay rate
    double c_light = 1.0;  // propagation speed
    cplx alpha{0.0, 0.0};  // ground-state amplitude
    cplx beta{1.0, 0.0};   // excited-state amplitude
};

/**
 * Validated physical constants of one run.
 *
 * Only obtainable through validate_params(), so every consumer can rely on
 * gamma > 0, c > 0, |alpha|^2 + |beta|^2 = 1 and g^2 = gamma * c.
 */
class SystemParams {
  public:
    double omega0() const { return omega0_; }
    double gamma() const { return gamma_; }
    double c_light() const { return c_; }
    cplx alpha() const { return alpha_; }
    cplx beta() const { return beta_; }
    /// Effective emitter-field coupling, sqrt(gamma * c).
    double g() const { return g_; }

    double ground_weight() const { return std::norm(alpha_); }
    double excited_weight() const { return std::norm(beta_); }

    RawParams raw() const { return {omega0_, gamma_, c_, alpha_, beta_}; }

  private:
    friend SystemParams validate_params(const RawParams& p);
    SystemParams() = default;

    double omega0_ = 0.0;
    double gamma_ = 0.0;
    double c_ = 0.0;
    double g_ = 0.0;
    cplx alpha_;
    cplx beta_;
};

/// Tolerance on | |alpha|^2 + |beta|^2 - 1 | below which the amplitudes are
/// silently renormalized.
inline constexpr double kNormalizationTolerance = 1e-9;

/// Checks rates and normalization, renormalizes tiny drift, computes g.
/// Throws NonPositiveRate or BadNormalization.
SystemParams validate_params(const RawParams& p);

/// Parameters rescaled to gamma = c = 1 together with the factors that map
/// results back to the original units.
struct NaturalUnits {
    SystemParams params;
    double time_scale;    // physical time = natural time * time_scale
    double length_scale;  // physical length = natural length * length_scale

    double time_to_physical(double t) const { return t * time_scale; }
    double length_to_physical(double r) const { return r * length_scale; }
    double rate_to_physical(double w) const { return w / time_scale; }
    /// Reconstructs the original parameter set.
    SystemParams to_physical() const;
};

NaturalUnits natural_units(const SystemParams& p);

// ---------------------------------------------------------------------------
// Grid and state
// ---------------------------------------------------------------------------

/// Uniform cell-centred grid over [r_min, r_max].
class RadialGrid {
  public:
    RadialGrid(double r_min, double r_max, std::size_t n_cells);

    /// Grid with cell width dr covering [r_min, r_max]; r_max is rounded up
    /// to a whole number of cells.
    static RadialGrid with_spacing(double r_min, double r_max, double dr);

    double r_min() const { return r_min_; }
    double r_max() const { return r_max_; }
    std::size_t size() const { return n_; }
    double dr() const { return dr_; }
    double center(std::size_t i) const { return r_min_ + (static_cast<double>(i) + 0.5) * dr_; }

    /// Index of the first cell whose left edge is at r = 0. Throws InvalidGrid
    /// if r = 0 is not a cell edge inside the grid.
    std::size_t source_cell() const;

  private:
    double r_min_;
    double r_max_;
    std::size_t n_;
    double dr_;
};

/// Pure state of emitter + field in the single-excitation sector.
/// Amplitudes already include the initial alpha / beta weights.
struct JointState {
    double t = 0.0;
    cplx c0;    // |0_F, 1_E>
    cplx cvac;  // |0_F, 0_E>
    RadialGrid grid;
    std::vector<cplx> cr;  // amplitude density per cell, 1/sqrt(length)

    double field_weight() const;
    double norm() const;
};

/// Initial state alpha|0_F,0_E> + beta|0_F,1_E> on the given grid.
JointState initial_state(const SystemParams& p, const RadialGrid& grid);

}  // namespace blip
