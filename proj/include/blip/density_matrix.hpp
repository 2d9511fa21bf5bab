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

#include <array>
#include <complex>

#include "blip/core.hpp"

namespace blip {

class NotAState : public Error {
  public:
    using Error::Error;
};

/// 2x2 emitter density matrix in the {|0_E>, |1_E>} basis. rho10 is
/// conj(rho01), so Hermiticity holds by construction.
struct DensityMatrix2 {
    double rho00 = 1.0;
    double rho11 = 0.0;
    cplx rho01{};

    double trace() const { return rho00 + rho11; }
    cplx rho10() const { return std::conj(rho01); }

    /// Eigenvalues in ascending order.
    std::array<double, 2> eigenvalues() const;

    /// Throws NotAState unless trace = 1 within tol and eigenvalues >= -tol.
    void check(double tol = 1e-10) const;

    static DensityMatrix2 pure(cplx ground, cplx excited);
};

/// Largest elementwise modulus of a - b.
double max_abs_diff(const DensityMatrix2& a, const DensityMatrix2& b);

}  // namespace blip
