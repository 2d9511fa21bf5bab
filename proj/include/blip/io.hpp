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

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "blip/core.hpp"
#include "blip/openquantum.hpp"
#include "blip/propagator.hpp"
#include "blip/spectroscopy.hpp"

namespace blip::io {

/// Fixed 17-significant-digit scientific form; round-trips doubles.
std::string fmt(double v);

/// Column-oriented CSV table.
class CsvTable {
  public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    void add_row(std::span<const double> values);
    void add_row(std::initializer_list<double> values) { add_row(std::span<const double>(values.begin(), values.size())); }

    std::string str() const;
    std::size_t rows() const { return rows_.size(); }

  private:
    std::vector<std::string> header_;
    std::vector<std::vector<double>> rows_;
};

/// Writes `content` to a sibling temp file, then renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// Writes `path` and its metadata sidecar `path` + ".json".
void write_with_sidecar(const std::filesystem::path& path, const std::string& content, const nlohmann::json& meta);

nlohmann::json to_json(const SystemParams& p);
nlohmann::json to_json(const PropagatorConfig& cfg);

/// Common sidecar fields: producer, code version, params.
nlohmann::json metadata(const std::string& producer, const SystemParams& p);

/// `t,r,re_cr,im_cr,abs2_cr`, one row per cell per snapshot.
std::string snapshot_csv(std::span<const JointState> snapshots);

/// `omega,p_omega`.
std::string spectrum_csv(const SpectrumSeries& s);

/// `t,p_excited_mean,p_excited_ci95,rho01_abs_mean`.
std::string ensemble_csv(const EnsembleResult& e);

/// `traj_index,jump_time`, one row per trajectory that jumped.
std::string jump_csv(const EnsembleResult& e);

}  // namespace blip::io
