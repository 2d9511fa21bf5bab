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
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "blip/core.hpp"

namespace blip::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidationFailed = 1;
inline constexpr int kExitUsage = 2;

/// Bad flag, config line or parameter value; maps to exit code 2.
class UsageError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Resolved key -> value settings. Keys are the long flag names without the
/// leading dashes.
using Settings = std::map<std::string, std::string>;

/// Reads flat `key = value` lines. Blank lines and text after '#' are
/// ignored. Throws UsageError naming `source:line` on malformed input.
Settings parse_config(std::istream& in, const std::string& source);

/// Builds validated parameters from `gamma`, `omega0`, `c-light`, `alpha`
/// and `beta-sq`. Without `alpha`, the ground amplitude is sqrt(1 - beta-sq).
SystemParams params_from(const Settings& s);

struct Check {
    std::string name;
    bool passed;
    double value;
    double limit;
    std::string detail;
};

struct ValidateOptions {
    double dr = 1e-3;
    double t_end = 5.0;
    std::size_t n_traj = 100000;
    std::uint64_t seed = 20240601;
    bool inject_full_cell = false;
};

/// Cross-checks the analytic, Dyson, grid and open-system routes against
/// each other. One entry per invariant.
std::vector<Check> validation_suite(const SystemParams& p, const ValidateOptions& opt);

/// Command-line entry point; `args` excludes the program name. Returns the
/// process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace blip::cli
