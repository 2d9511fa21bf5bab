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

namespace blip {

class OrderOverflow : public Error {
  public:
    using Error::Error;
};

/// Error of one truncated series against the closed form.
struct ConvergencePoint {
    int order;
    double error;
    double remainder_bound;
};

/**
 * Truncated Dyson series for the emitter and field coefficients.
 *
 * Order M keeps the even terms U_0..U_2M (emitter) or the odd terms
 * U_1..U_2M+1 (field). Each term is the closed per-order expression; the
 * running sum is carried in double-double, so the alternating series keeps
 * full double precision up to gamma t ~ 35 (absolute error about
 * 1e-32 e^{gamma t / 2} beyond).
 */
class DysonExpansion {
  public:
    static constexpr int kMaxOrderLimit = 170;

    /// Throws OrderOverflow if max_order is outside [0, 170].
    DysonExpansion(const SystemParams& p, int max_order = kMaxOrderLimit);

    int max_order() const { return max_order_; }

    cplx c0_partial(double t, int order) const;
    cplx cr_partial(double r, double t, int order) const;

    /// |c0_partial(t, M) - c0_exact(t)| for M = 0..max_order, with the
    /// Taylor remainder bound (gamma t/2)^(M+1)/(M+1)! e^(gamma t/2).
    std::vector<ConvergencePoint> convergence_profile(double t, int max_order) const;

    /// The remainder bound on its own.
    double remainder_bound(double t, int order) const;

  private:
    void check_order(int order) const;

    SystemParams p_;
    int max_order_;
};

namespace detail {

/// sum_{m=0}^{order} x^m / m!, accumulated in double-double.
double truncated_exp(double x, int order);

}  // namespace detail

}  // namespace blip
