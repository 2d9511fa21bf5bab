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

#include "blip/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#ifndef BLIP_VERSION
#define BLIP_VERSION "dev"
#endif

namespace blip::io {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

void CsvTable::add_row(std::span<const double> values) {
    if (values.size() != header_.size()) throw Error("CSV row width does not match header");
    rows_.emplace_back(values.begin(), values.end());
}

std::string CsvTable::str() const {
    std::string out;
    for (std::size_t i = 0; i < header_.size(); ++i) {
        if (i) out += ',';
        out += header_[i];
    }
    out += '\n';
    for (const auto& row : rows_) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += fmt(row[i]);
        }
        out += '\n';
    }
    return out;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw Error("cannot open " + tmp.string() + " for writing");
        os << content;
        os.flush();
        if (!os) throw Error("write to " + tmp.string() + " failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw Error("cannot rename " + tmp.string() + ": " + ec.message());
    }
}

void write_with_sidecar(const std::filesystem::path& path, const std::string& content, const nlohmann::json& meta) {
    write_atomic(path, content);
    std::filesystem::path side = path;
    side += ".json";
    write_atomic(side, meta.dump(2) + "\n");
}

nlohmann::json to_json(const SystemParams& p) {
    return {{"omega0", p.omega0()},
            {"gamma", p.gamma()},
            {"c_light", p.c_light()},
            {"g", p.g()},
            {"alpha", {p.alpha().real(), p.alpha().imag()}},
            {"beta", {p.beta().real(), p.beta().imag()}}};
}

nlohmann::json to_json(const PropagatorConfig& cfg) {
    return {{"r_min", cfg.grid.r_min()},
            {"r_max", cfg.grid.r_max()},
            {"n_cells", cfg.grid.size()},
            {"dr", cfg.grid.dr()},
            {"dt", cfg.dt},
            {"t_end", cfg.t_end},
            {"scheme", to_string(cfg.scheme)},
            {"source_convention", to_string(cfg.source_convention)},
            {"norm_budget", std::isfinite(cfg.norm_budget) ? nlohmann::json(cfg.norm_budget) : nlohmann::json("inf")},
            {"coupling_scale", cfg.coupling_scale}};
}

nlohmann::json metadata(const std::string& producer, const SystemParams& p) {
    return {{"producer", producer}, {"code_version", BLIP_VERSION}, {"params", to_json(p)}};
}

std::string snapshot_csv(std::span<const JointState> snapshots) {
    CsvTable t({"t", "r", "re_cr", "im_cr", "abs2_cr"});
    for (const auto& s : snapshots) {
        for (std::size_t i = 0; i < s.cr.size(); ++i) {
            t.add_row({s.t, s.grid.center(i), s.cr[i].real(), s.cr[i].imag(), std::norm(s.cr[i])});
        }
    }
    return t.str();
}

std::string spectrum_csv(const SpectrumSeries& s) {
    CsvTable t({"omega", "p_omega"});
    for (std::size_t j = 0; j < s.omegas.size(); ++j) t.add_row({s.omegas[j], s.density[j]});
    return t.str();
}

std::string ensemble_csv(const EnsembleResult& e) {
    CsvTable t({"t", "p_excited_mean", "p_excited_ci95", "rho01_abs_mean"});
    for (const auto& r : e.rows) t.add_row({r.t, r.p_excited_mean, r.p_excited_ci95, r.rho01_abs_mean});
    return t.str();
}

std::string jump_csv(const EnsembleResult& e) {
    std::string out = "traj_index,jump_time\n";
    for (std::size_t i = 0; i < e.jump_times.size(); ++i) {
        if (std::isfinite(e.jump_times[i])) out += std::to_string(i) + "," + fmt(e.jump_times[i]) + "\n";
    }
    return out;
}

}  // namespace blip::io
