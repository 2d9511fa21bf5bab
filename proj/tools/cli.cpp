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

#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cerrno>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "blip/analytic.hpp"
#include "blip/dyson.hpp"
#include "blip/io.hpp"
#include "blip/openquantum.hpp"
#include "blip/propagator.hpp"
#include "blip/spectroscopy.hpp"

namespace blip::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Settings
// ---------------------------------------------------------------------------

struct Entry {
    std::string key;
    std::string value;
    int line;
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<Entry> read_entries(std::istream& in, const std::string& source) {
    std::vector<Entry> out;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::string text = trim(raw.substr(0, raw.find('#')));
        if (text.empty()) continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos) {
            throw UsageError(source + ":" + std::to_string(line) + ": expected key = value, got '" + text + "'");
        }
        Entry e{trim(text.substr(0, eq)), trim(text.substr(eq + 1)), line};
        if (e.key.empty()) throw UsageError(source + ":" + std::to_string(line) + ": missing key");
        for (const auto& prev : out) {
            if (prev.key == e.key) {
                throw UsageError(source + ":" + std::to_string(line) + ": duplicate key '" + e.key + "' (first on line " +
                                 std::to_string(prev.line) + ")");
            }
        }
        out.push_back(std::move(e));
    }
    return out;
}

struct KeySpec {
    std::string key;
    std::string fallback;  // empty = unset unless given
    std::string help;
    bool is_flag = false;
};

const std::vector<KeySpec>& common_keys() {
    static const std::vector<KeySpec> keys = {
        {"gamma", "1", "spontaneous decay rate"},
        {"omega0", "10", "transition angular frequency"},
        {"c-light", "1", "propagation speed"},
        {"alpha", "", "ground-state amplitude (real); default sqrt(1 - beta-sq)"},
        {"beta-sq", "", "initial excited-state probability; default 1, or 1 - alpha^2"},
        {"t-end", "", "final time"},
        {"dr", "1e-3", "grid spacing"},
        {"dt", "", "time step; default dr / c"},
        {"seed", "20240601", "random seed"},
        {"out-dir", ".", "output directory"},
    };
    return keys;
}

struct Command {
    std::string name;
    std::string help;
    std::vector<KeySpec> keys;
};

const std::vector<Command>& commands() {
    static const std::vector<Command> cmds = {
        {"wavepacket",
         "detection density p_r against r at fixed t and against t at fixed r",
         {{"times", "1,2,3", "times of the r profiles"},
          {"radii", "1,2,3", "distances of the t profiles"},
          {"r-max", "", "largest r sampled; default 4/3 of the last light-cone radius"},
          {"samples", "2000", "points per profile"},
          {"overlay", "", "add a p_r_grid column from the propagator", true}}},
        {"spectrum",
         "asymptotic and transformed photon spectra for several decay rates",
         {{"gammas", "0.5,1,2", "decay rates"},
          {"bins", "801", "frequency samples per spectrum"},
          {"half-width", "10", "window half-width in units of gamma"},
          {"gamma-t", "12", "evaluation time in units of 1/gamma (t-end overrides)"},
          {"source", "analytic", "state to transform: analytic or propagator"}}},
        {"decay",
         "grid integration of emitter and field",
         {{"scheme", "rk2", "rk2 or euler"},
          {"cfl", "1", "Courant number c dt / dr"},
          {"convention", "half", "source read-back: half or full"},
          {"norm-budget", "1e-4", "allowed norm drift (inf disables)"},
          {"snapshots", "", "times of field snapshots; default t-end"},
          {"every", "1", "write every n-th step"}}},
        {"dyson",
         "convergence of the truncated Dyson series",
         {{"times", "1,5,10", "evaluation times"}, {"max-order", "40", "highest order"}}},
        {"master",
         "emitter master equation",
         {{"sample-dt", "0.05", "output spacing"}, {"master-dt", "1e-3", "largest integration step"}}},
        {"mc",
         "photon-counting trajectory ensemble",
         {{"n-traj", "100000", "number of trajectories"},
          {"sampler", "exact", "exact (inverse CDF) or bernoulli"},
          {"bernoulli-dt", "1e-3", "step of the bernoulli sampler"},
          {"sample-dt", "0.05", "output spacing"},
          {"detector-distance", "0", "detector distance added to reported jump times"}}},
        {"validate",
         "cross-check every solution route; exit 1 on any failure",
         {{"n-traj", "100000", "trajectories for the ensemble check"},
          {"report", "validate_report.json", "report file name"},
          {"inject-full-cell", "", "use the full-cell source read-back in the grid checks", true}}},
    };
    return cmds;
}

const Command& find_command(const std::string& name) {
    for (const auto& c : commands()) {
        if (c.name == name) return c;
    }
    throw UsageError("unknown subcommand " + name);
}

/// Settings with the place each value came from, for diagnostics.
class Resolved {
  public:
    void set(const std::string& key, const std::string& value, const std::string& origin) {
        values_[key] = value;
        origin_[key] = origin;
    }

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    const Settings& values() const { return values_; }

    std::string str(const std::string& key) const {
        const auto it = values_.find(key);
        if (it == values_.end()) throw UsageError(key + ": no value");
        return it->second;
    }

    double num(const std::string& key) const { return parse_number(key, str(key)); }

    double positive(const std::string& key) const {
        const double v = num(key);
        if (!(v > 0.0)) fail(key, "must be positive, got " + str(key));
        return v;
    }

    std::size_t count(const std::string& key) const {
        const double v = num(key);
        if (!(v >= 1.0) || v != std::floor(v) || v > 1e12) fail(key, "expected a positive integer, got " + str(key));
        return static_cast<std::size_t>(v);
    }

    std::uint64_t u64(const std::string& key) const {
        const std::string s = str(key);
        char* end = nullptr;
        errno = 0;
        const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
        if (s.empty() || *end != '\0' || errno != 0 || s[0] == '-') fail(key, "expected an unsigned integer, got '" + s + "'");
        return v;
    }

    bool flag(const std::string& key) const {
        if (!has(key)) return false;
        const std::string s = str(key);
        if (s == "true" || s == "1" || s == "yes" || s.empty()) return true;
        if (s == "false" || s == "0" || s == "no") return false;
        fail(key, "expected true or false, got '" + s + "'");
        return false;
    }

    std::vector<double> list(const std::string& key) const {
        std::vector<double> out;
        std::stringstream ss(str(key));
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(parse_number(key, trim(item)));
        if (out.empty()) fail(key, "empty list");
        return out;
    }

    std::string choice(const std::string& key, std::initializer_list<const char*> allowed) const {
        const std::string s = str(key);
        for (const char* a : allowed) {
            if (s == a) return s;
        }
        std::string msg = "expected one of";
        for (const char* a : allowed) msg += std::string(" ") + a;
        fail(key, msg + ", got '" + s + "'");
        return {};
    }

    [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
        const auto it = origin_.find(key);
        const std::string where = it == origin_.end() ? key : it->second;
        throw UsageError(where + ": " + key + ": " + msg);
    }

  private:
    double parse_number(const std::string& key, const std::string& s) const {
        char* end = nullptr;
        const double v = std::strtod(s.c_str(), &end);
        if (s.empty() || *end != '\0' || std::isnan(v)) fail(key, "expected a number, got '" + s + "'");
        return v;
    }

    Settings values_;
    std::map<std::string, std::string> origin_;
};

SystemParams params_from(const Resolved& r) {
    RawParams raw;
    raw.gamma = r.num("gamma");
    raw.omega0 = r.num("omega0");
    raw.c_light = r.num("c-light");
    const bool has_a = r.has("alpha");
    const bool has_b = r.has("beta-sq");
    double b2 = 1.0;
    if (has_b) {
        b2 = r.num("beta-sq");
        if (b2 < 0.0 || b2 > 1.0) r.fail("beta-sq", "must lie in [0, 1], got " + r.str("beta-sq"));
    }
    double a = 0.0;
    if (has_a) {
        a = r.num("alpha");
        if (!has_b) {
            if (a * a > 1.0) r.fail("alpha", "|alpha| must not exceed 1, got " + r.str("alpha"));
            b2 = 1.0 - a * a;
        }
    } else {
        a = std::sqrt(1.0 - b2);
    }
    raw.alpha = {a, 0.0};
    raw.beta = {std::sqrt(b2), 0.0};
    try {
        return validate_params(raw);
    } catch (const NonPositiveRate& e) {
        throw UsageError(std::string("invalid parameters: ") + e.what());
    } catch (const BadNormalization& e) {
        throw UsageError(std::string("invalid parameters: alpha and beta-sq inconsistent: ") + e.what());
    } catch (const Error& e) {
        throw UsageError(std::string("invalid parameters: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Output helpers
// ---------------------------------------------------------------------------

std::string label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

struct Context {
    std::string command;
    Resolved settings;
    SystemParams params;
    fs::path out_dir;
    std::ostream& out;
    std::ostream& err;

    json meta(const json& extra = json::object()) const {
        json m = io::metadata("blip " + command, params);
        m["seed"] = settings.u64("seed");
        m["settings"] = settings.values();
        for (const auto& [k, v] : extra.items()) m[k] = v;
        return m;
    }

    void emit(const std::string& name, const std::string& content, const json& extra = json::object()) const {
        io::write_with_sidecar(out_dir / name, content, meta(extra));
        out << "wrote " << (out_dir / name).string() << "\n";
    }
};

double t_end_or(const Context& ctx, double fallback) {
    return ctx.settings.has("t-end") ? ctx.settings.positive("t-end") : fallback;
}

std::vector<double> with_points(std::vector<double> base, const std::vector<double>& extra) {
    base.insert(base.end(), extra.begin(), extra.end());
    std::sort(base.begin(), base.end());
    base.erase(std::unique(base.begin(), base.end()), base.end());
    return base;
}

std::vector<double> linspace(double lo, double hi, std::size_t intervals) {
    std::vector<double> v(intervals + 1);
    for (std::size_t i = 0; i <= intervals; ++i) {
        v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(intervals);
    }
    v.back() = hi;
    return v;
}

PropagatorConfig grid_config(const Context& ctx, double t_end, double cfl = 1.0, Scheme scheme = Scheme::UpwindRK2) {
    PropagatorConfig cfg = PropagatorConfig::for_run(ctx.params, ctx.settings.positive("dr"), t_end, cfl, scheme);
    if (ctx.settings.has("dt")) cfg.dt = ctx.settings.positive("dt");
    try {
        validate_config(cfg, ctx.params);
    } catch (const Error& e) {
        throw UsageError(std::string("invalid grid: ") + e.what());
    }
    return cfg;
}

// Linear interpolation of |c_r|^2 between cell centres; zero outside.
double density_at(const JointState& s, double r) {
    const double x = (r - s.grid.r_min()) / s.grid.dr() - 0.5;
    if (x < -0.5 || x > static_cast<double>(s.cr.size()) - 0.5) return 0.0;
    const double xc = std::clamp(x, 0.0, static_cast<double>(s.cr.size() - 1));
    const auto i = static_cast<std::size_t>(std::floor(xc));
    const std::size_t j = std::min(i + 1, s.cr.size() - 1);
    const double f = xc - static_cast<double>(i);
    return (1.0 - f) * std::norm(s.cr[i]) + f * std::norm(s.cr[j]);
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

int cmd_wavepacket(const Context& ctx) {
    const SystemParams& p = ctx.params;
    const double c = p.c_light();
    const auto times = ctx.settings.list("times");
    const auto radii = ctx.settings.list("radii");
    const std::size_t samples = ctx.settings.count("samples");
    const double t_last = *std::max_element(times.begin(), times.end());
    const double r_max = ctx.settings.has("r-max") ? ctx.settings.positive("r-max") : 4.0 / 3.0 * c * t_last;
    const double r_last = *std::max_element(radii.begin(), radii.end());
    const double t_end = t_end_or(ctx, 5.0 / p.gamma() + r_last / c);
    const bool overlay = ctx.settings.flag("overlay");
    const AnalyticSolution exact(p);

    std::vector<JointState> snaps;
    if (overlay) {
        const RunResult res = run(p, grid_config(ctx, t_last), times);
        snaps = res.snapshots;
    }

    std::vector<double> fronts;
    for (double t : times) fronts.push_back(c * t);
    const auto rs = with_points(linspace(0.0, r_max, samples), fronts);
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double t = times[k];
        std::vector<std::string> header{"r", "p_r"};
        if (overlay) header.emplace_back("p_r_grid");
        io::CsvTable tab(header);
        for (double r : rs) {
            if (overlay) {
                tab.add_row({r, exact.pr(r, t), density_at(snaps.at(k), r)});
            } else {
                tab.add_row({r, exact.pr(r, t)});
            }
        }
        ctx.emit("pr_vs_r_t" + label(t) + ".csv", tab.str(), {{"t", t}});
    }

    std::vector<double> arrivals;
    for (double r : radii) arrivals.push_back(r / c);
    const auto ts = with_points(linspace(0.0, t_end, samples), arrivals);
    for (double r : radii) {
        io::CsvTable tab({"t", "p_r"});
        for (double t : ts) tab.add_row({t, exact.pr(r, t)});
        ctx.emit("pr_vs_t_r" + label(r) + ".csv", tab.str(), {{"r", r}});
    }
    return kExitOk;
}

SpectrumSeries asymptotic_series(const SystemParams& p, FrequencyWindow w, std::size_t bins) {
    SpectrumSeries s;
    s.window = w;
    s.d_omega = (w.omega_hi - w.omega_lo) / static_cast<double>(bins - 1);
    for (std::size_t j = 0; j < bins; ++j) {
        const double om = w.omega_lo + static_cast<double>(j) * s.d_omega;
        s.omegas.push_back(om);
        s.density.push_back(spectrum_asymptotic(p, om));
    }
    return s;
}

int cmd_spectrum(const Context& ctx) {
    const auto gammas = ctx.settings.list("gammas");
    const std::size_t bins = ctx.settings.count("bins");
    const double half_width = ctx.settings.positive("half-width");
    const std::string source = ctx.settings.choice("source", {"analytic", "propagator"});
    const double dr = ctx.settings.positive("dr");

    io::CsvTable summary({"gamma", "t_eval", "peak_omega", "peak_density", "expected_peak_density", "fwhm",
                          "fwhm_transformed", "max_rel_dev_core", "total_weight", "expected_total_weight"});
    for (double g : gammas) {
        RawParams raw = ctx.params.raw();
        raw.gamma = g;
        SystemParams p = ctx.params;
        try {
            p = validate_params(raw);
        } catch (const Error& e) {
            ctx.settings.fail("gammas", e.what());
        }
        const double t_eval = ctx.settings.has("t-end") ? ctx.settings.positive("t-end")
                                                        : ctx.settings.positive("gamma-t") / g;
        const FrequencyWindow window{p.omega0() - half_width * g, p.omega0() + half_width * g};

        JointState state = [&] {
            if (source == "analytic") {
                return AnalyticSolution(p).sample_state(t_eval, RadialGrid::with_spacing(0.0, p.c_light() * t_eval, dr));
            }
            Context sub{ctx.command, ctx.settings, p, ctx.out_dir, ctx.out, ctx.err};
            const std::array<double, 1> at{t_eval};
            return run(p, grid_config(sub, t_eval), at).snapshots.at(0);
        }();

        SpectrumSeries transformed;
        try {
            transformed = spectrum_from_state(state, p, window, bins);
        } catch (const WindowTooNarrow& e) {
            throw UsageError(std::string("spectrum: ") + e.what());
        }
        const SpectrumSeries asym = asymptotic_series(p, window, bins);
        const LineShape line = analyze_line(asym);
        const LineShape line_t = analyze_line(transformed);
        double dev = 0.0;
        for (std::size_t j = 0; j < bins; ++j) {
            if (std::abs(asym.omegas[j] - p.omega0()) > 3.0 * g) continue;
            const double want = p.excited_weight() * asym.density[j];
            if (want > 0.0) dev = std::max(dev, std::abs(transformed.density[j] - want) / want);
        }
        const double expected_total = -p.excited_weight() * std::expm1(-g * t_eval);
        summary.add_row({g, t_eval, line.peak_omega, line.peak_density, 2.0 / (kPi * g), line.fwhm, line_t.fwhm, dev,
                         transformed.total_weight, expected_total});

        const json extra{{"gamma", g}, {"t_eval", t_eval}, {"window", {window.omega_lo, window.omega_hi}}};
        ctx.emit("spectrum_gamma" + label(g) + ".csv", io::spectrum_csv(asym), extra);
        json extra_t = extra;
        extra_t["source"] = source;
        extra_t["total_weight"] = transformed.total_weight;
        extra_t["negative_weight"] = transformed.negative_weight;
        ctx.emit("spectrum_gamma" + label(g) + "_transformed.csv", io::spectrum_csv(transformed), extra_t);
        ctx.out << "gamma " << g << ": fwhm " << line.fwhm << " (transformed " << line_t.fwhm
                << "), core deviation " << dev << "\n";
    }
    ctx.emit("spectrum_summary.csv", summary.str());
    return kExitOk;
}

int cmd_decay(const Context& ctx) {
    const SystemParams& p = ctx.params;
    const double t_end = t_end_or(ctx, 5.0);
    const std::string scheme = ctx.settings.choice("scheme", {"rk2", "euler"});
    const std::string conv = ctx.settings.choice("convention", {"half", "full"});
    PropagatorConfig cfg = grid_config(ctx, t_end, ctx.settings.positive("cfl"),
                                       scheme == "rk2" ? Scheme::UpwindRK2 : Scheme::UpwindEuler);
    cfg.source_convention = conv == "half" ? SourceConvention::HalfCell : SourceConvention::FullCell;
    cfg.norm_budget = ctx.settings.positive("norm-budget");
    const std::size_t every = ctx.settings.count("every");
    const std::vector<double> snap_times =
        ctx.settings.has("snapshots") ? ctx.settings.list("snapshots") : std::vector<double>{t_end};

    RunResult res;
    try {
        res = run(p, cfg, snap_times);
    } catch (const NormDrift& e) {
        ctx.err << "decay: " << e.what() << "\n";
        return kExitValidationFailed;
    }

    const AnalyticSolution exact(p);
    io::CsvTable tab({"t", "p0_grid", "p0_exact", "norm"});
    double max_err = 0.0;
    for (std::size_t i = 0; i < res.times.size(); ++i) {
        const double t = res.times[i];
        const double p0 = p.ground_weight() + std::norm(res.c0_history[i]);
        max_err = std::max(max_err, std::abs(p0 - exact.p0(t)));
        if (i % every == 0 || i + 1 == res.times.size()) tab.add_row({t, p0, exact.p0(t), res.norm_history[i]});
    }
    const double rate = fitted_decay_rate(res, 0.0, t_end);
    const json results{{"gamma_eff", rate},
                       {"gamma_eff_over_gamma", rate / p.gamma()},
                       {"max_p0_error", max_err},
                       {"max_norm_drift", res.max_norm_drift},
                       {"config", io::to_json(cfg)}};
    ctx.emit("decay.csv", tab.str(), {{"results", results}});
    ctx.emit("snapshots.csv", io::snapshot_csv(res.snapshots), {{"config", io::to_json(cfg)}});
    ctx.out << "gamma_eff / gamma = " << rate / p.gamma() << ", max p0 error = " << max_err
            << ", max norm drift = " << res.max_norm_drift << "\n";
    return kExitOk;
}

int cmd_dyson(const Context& ctx) {
    const SystemParams& p = ctx.params;
    const auto times = ctx.settings.list("times");
    const auto m = ctx.settings.count("max-order");
    if (m > static_cast<std::size_t>(DysonExpansion::kMaxOrderLimit)) {
        ctx.settings.fail("max-order", "must not exceed 170");
    }
    const DysonExpansion d(p, static_cast<int>(m));
    io::CsvTable tab({"t", "order", "error", "remainder_bound"});
    for (double t : times) {
        if (t < 0.0) ctx.settings.fail("times", "times must be non-negative");
        for (const auto& pt : d.convergence_profile(t, static_cast<int>(m))) {
            tab.add_row({t, static_cast<double>(pt.order), pt.error, pt.remainder_bound});
        }
    }
    ctx.emit("dyson_convergence.csv", tab.str());
    return kExitOk;
}

std::vector<double> sample_grid(const Context& ctx, double t_end) {
    const double step = ctx.settings.positive("sample-dt");
    const auto n = static_cast<std::size_t>(std::ceil(t_end / step - 1e-9));
    return linspace(0.0, t_end, std::max<std::size_t>(n, 1));
}

int cmd_master(const Context& ctx) {
    const SystemParams& p = ctx.params;
    const auto ts = sample_grid(ctx, t_end_or(ctx, 5.0));
    const auto rhos =
        master_integrate(p, DensityMatrix2::pure(p.alpha(), p.beta()), ts, ctx.settings.positive("master-dt"));
    const AnalyticSolution exact(p);
    io::CsvTable tab({"t", "rho00", "rho11", "re_rho01", "im_rho01", "max_dev_traced"});
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const auto& r = rhos[i];
        tab.add_row({ts[i], r.rho00, r.rho11, r.rho01.real(), r.rho01.imag(), max_abs_diff(r, exact.rho_emitter(ts[i]))});
    }
    ctx.emit("master.csv", tab.str());
    return kExitOk;
}

int cmd_mc(const Context& ctx) {
    const SystemParams& p = ctx.params;
    const auto ts = sample_grid(ctx, t_end_or(ctx, 5.0));
    EnsembleOptions opts;
    opts.sampler = ctx.settings.choice("sampler", {"exact", "bernoulli"}) == "exact" ? JumpSampler::InverseCdf
                                                                                   : JumpSampler::Bernoulli;
    opts.bernoulli_dt = ctx.settings.positive("bernoulli-dt");
    opts.detector_distance = ctx.settings.num("detector-distance");
    const EnsembleResult e = mc_trajectories(p, ctx.settings.count("n-traj"), ts, ctx.settings.u64("seed"), opts);
    ctx.emit("mc_ensemble.csv", io::ensemble_csv(e));
    ctx.emit("mc_jumps.csv", io::jump_csv(e), {{"time_origin", opts.detector_distance == 0.0 ? "emitter" : "detector"}});
    return kExitOk;
}

int cmd_validate(const Context& ctx) {
    ValidateOptions opt;
    opt.dr = ctx.settings.positive("dr");
    opt.t_end = t_end_or(ctx, 5.0);
    opt.n_traj = ctx.settings.count("n-traj");
    opt.seed = ctx.settings.u64("seed");
    opt.inject_full_cell = ctx.settings.flag("inject-full-cell");

    const auto checks = validation_suite(ctx.params, opt);
    json report{{"passed", true}, {"checks", json::array()}};
    for (const auto& c : checks) {
        report["checks"].push_back(
            {{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"limit", c.limit}, {"detail", c.detail}});
        if (!c.passed) report["passed"] = false;
        ctx.out << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
    }
    const std::string name = ctx.settings.str("report");
    io::write_with_sidecar(ctx.out_dir / name, report.dump(2) + "\n", ctx.meta());
    ctx.out << "wrote " << (ctx.out_dir / name).string() << "\n";
    if (!report["passed"].get<bool>()) {
        for (const auto& c : checks) {
            if (!c.passed) ctx.err << "validation failed: " << c.name << " (" << c.detail << ")\n";
        }
        return kExitValidationFailed;
    }
    return kExitOk;
}

int dispatch(const Context& ctx) {
    if (ctx.command == "wavepacket") return cmd_wavepacket(ctx);
    if (ctx.command == "spectrum") return cmd_spectrum(ctx);
    if (ctx.command == "decay") return cmd_decay(ctx);
    if (ctx.command == "dyson") return cmd_dyson(ctx);
    if (ctx.command == "master") return cmd_master(ctx);
    if (ctx.command == "mc") return cmd_mc(ctx);
    return cmd_validate(ctx);
}

}  // namespace

// ---------------------------------------------------------------------------
// Public entry points
// ---------------------------------------------------------------------------

Settings parse_config(std::istream& in, const std::string& source) {
    Settings s;
    for (const auto& e : read_entries(in, source)) s[e.key] = e.value;
    return s;
}

SystemParams params_from(const Settings& s) {
    Resolved r;
    for (const auto& spec : common_keys()) {
        if (!spec.fallback.empty()) r.set(spec.key, spec.fallback, "default");
    }
    for (const auto& [k, v] : s) r.set(k, v, k);
    return params_from(r);
}

namespace {

std::string fmt_check(double value, const char* op, double limit) {
    std::ostringstream os;
    os.precision(4);
    os << value << " " << op << " " << limit;
    return os.str();
}

Check less_than(std::string name, double value, double limit) {
    const bool ok = std::isfinite(value) && value < limit;
    return {std::move(name), ok, value, limit, fmt_check(value, ok ? "<" : ">=", limit)};
}

// Composite Simpson over [a, b] with an even number of intervals.
double simpson(const std::function<double(double)>& f, double a, double b, std::size_t n) {
    const double h = (b - a) / static_cast<double>(n);
    double s = f(a) + f(b);
    for (std::size_t i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + h * static_cast<double>(i));
    return s * h / 3.0;
}

}  // namespace

std::vector<Check> validation_suite(const SystemParams& p, const ValidateOptions& opt) {
    std::vector<Check> out;
    const double gamma = p.gamma();
    const double c = p.c_light();
    const double w = p.excited_weight();
    const AnalyticSolution exact(p);

    // grid integration
    {
        PropagatorConfig cfg = PropagatorConfig::for_run(p, opt.dr, opt.t_end);
        if (opt.inject_full_cell) {
            cfg.source_convention = SourceConvention::FullCell;
            cfg.norm_budget = std::numeric_limits<double>::infinity();
        }
        const std::array<double, 2> snaps{0.5 * opt.t_end, opt.t_end};
        const RunResult res = run(p, cfg, snaps);

        double p0_err = 0.0;
        for (std::size_t i = 0; i < res.times.size(); ++i) {
            p0_err = std::max(p0_err, std::abs(p.ground_weight() + std::norm(res.c0_history[i]) - exact.p0(res.times[i])));
        }
        out.push_back(less_than("survival_probability", p0_err, 1e-3));

        if (w > 0.0) {
            const double ratio = fitted_decay_rate(res, 0.0, opt.t_end) / gamma;
            Check chk = less_than("decay_rate", std::abs(ratio - 1.0), 5e-3);
            chk.detail = "gamma_eff / gamma = " + fmt_check(ratio, "vs", 1.0) + " (tolerance 0.5%)";
            out.push_back(chk);
        }

        std::size_t leaks = 0;
        for (const auto& s : res.snapshots) {
            const auto first_outside = static_cast<std::size_t>(std::llround(c * s.t / s.grid.dr()));
            for (std::size_t i = first_outside; i < s.cr.size(); ++i) {
                if (s.cr[i].real() != 0.0 || s.cr[i].imag() != 0.0 || std::signbit(s.cr[i].real()) ||
                    std::signbit(s.cr[i].imag())) {
                    ++leaks;
                }
            }
        }
        Check causal{"causality", leaks == 0, static_cast<double>(leaks), 0.0,
                     std::to_string(leaks) + " nonzero cells beyond r = ct"};
        out.push_back(causal);

        if (w > 0.0) {
            const JointState& s = res.snapshots.back();
            double worst = 0.0;
            for (std::size_t i = 0; i < s.cr.size(); ++i) {
                const double r = s.grid.center(i);
                if (r > c * s.t - 10.0 * s.grid.dr()) continue;
                const double want = exact.pr(r, s.t);
                worst = std::max(worst, std::abs(std::norm(s.cr[i]) - want) / want);
            }
            out.push_back(less_than("wavefront_profile", worst, 5e-3));
        }
        out.push_back(less_than("norm_drift", res.max_norm_drift, 1e-4));
    }

    // Dyson series
    {
        const DysonExpansion d(p, 40);
        double worst = 0.0;  // largest error / (bound + floor); <= 1 passes
        for (double gt : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0}) {
            const double t = gt / gamma;
            const double floor = 4.0 * std::numeric_limits<double>::epsilon() * std::abs(exact.c0_exact(t));
            for (const auto& pt : d.convergence_profile(t, 40)) {
                worst = std::max(worst, pt.error / (pt.remainder_bound + floor));
            }
        }
        Check b = less_than("dyson_remainder_bound", worst, 1.0 + 1e-12);
        b.detail = "largest error / bound = " + fmt_check(worst, "<=", 1.0);
        out.push_back(b);
        const double e20 = std::abs(d.c0_partial(1.0 / gamma, 20) - exact.c0_exact(1.0 / gamma));
        out.push_back(less_than("dyson_order20", e20, 1e-14));
    }

    // analytic normalization
    {
        double worst = 0.0;
        for (double gt : {0.5, 1.0, 2.0, 5.0}) {
            const double t = gt / gamma;
            const double field = simpson([&](double r) { return exact.pr(r, t); }, 0.0, c * t, 4000);
            worst = std::max(worst, std::abs(exact.p0(t) + field - 1.0));
        }
        out.push_back(less_than("analytic_normalization", worst, 1e-10));
    }

    // reduced dynamics
    {
        std::vector<double> ts;
        for (double gt : {0.0, 0.5, 1.0, 2.0, 5.0}) ts.push_back(gt / gamma);
        const ConsistencyReport rep = consistency_report(p, ts, opt.n_traj, opt.seed);
        out.push_back(less_than("master_vs_trace", rep.max_master_discrepancy, kMasterAgreement));
        Check e = less_than("ensemble_vs_trace", rep.max_ensemble_sigmas, kEnsembleSigmas);
        e.detail += " binomial sigmas";
        out.push_back(e);
    }

    // spectrum and energy of the propagated photon
    if (w > 0.0) {
        const double t_eval = 12.0 / gamma;
        PropagatorConfig cfg = PropagatorConfig::for_run(p, opt.dr, t_eval);
        if (opt.inject_full_cell) {
            cfg.source_convention = SourceConvention::FullCell;
            cfg.norm_budget = std::numeric_limits<double>::infinity();
        }
        const std::array<double, 1> at{t_eval};
        const JointState s = run(p, cfg, at).snapshots.at(0);
        const FrequencyWindow window{p.omega0() - 10.0 * gamma, p.omega0() + 10.0 * gamma};
        const SpectrumSeries sp = spectrum_from_state(s, p, window, 801);
        const LineShape line = analyze_line(sp);

        Check peak = less_than("spectrum_peak", std::abs(line.peak_omega - p.omega0()), sp.d_omega * (1.0 + 1e-9));
        peak.detail = "|peak - omega0| = " + fmt_check(std::abs(line.peak_omega - p.omega0()), "vs bin", sp.d_omega);
        out.push_back(peak);
        out.push_back(less_than("spectrum_fwhm", std::abs(line.fwhm / gamma - 1.0), 0.03));
        out.push_back(less_than("spectrum_total_weight", std::abs(sp.total_weight + w * std::expm1(-gamma * t_eval)), 1e-4));

        const EnergyReport en = energy_expectation(s, p);
        const double e_ref = w * p.omega0();
        const double e_tol = 0.02 * std::max(std::abs(e_ref), w * gamma);
        out.push_back(less_than("energy_conservation", std::abs(en.total - e_ref), e_tol));
        const double neg_ref = w * (0.5 - std::atan(2.0 * p.omega0() / gamma) / kPi);
        out.push_back(less_than("negative_frequency_weight", std::abs(en.negative_weight - neg_ref), 0.1 * neg_ref));
    }
    return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"blip: spontaneous emission as unitary emitter-field evolution"};
    app.require_subcommand(1, 1);
    app.set_help_all_flag("--help-all", "show help for every subcommand");

    std::map<std::string, std::string> raw;
    std::map<std::string, CLI::Option*> given;
    std::map<std::string, CLI::App*> subs;
    std::map<std::string, std::map<std::string, bool>> flags;
    std::string config_path;

    for (const auto& cmd : commands()) {
        CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
        subs[cmd.name] = sub;
        sub->add_option("--config", config_path, "key = value settings file; flags override it");
        std::vector<KeySpec> keys = common_keys();
        keys.insert(keys.end(), cmd.keys.begin(), cmd.keys.end());
        for (const auto& k : keys) {
            std::string help = k.help;
            if (!k.fallback.empty()) help += " [" + k.fallback + "]";
            const std::string id = cmd.name + "/" + k.key;
            if (k.is_flag) {
                given[id] = sub->add_flag("--" + k.key, flags[cmd.name][k.key], help);
            } else {
                given[id] = sub->add_option("--" + k.key, raw[id], help);
            }
        }
    }

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitUsage;
    }

    std::string name;
    for (const auto& [n, sub] : subs) {
        if (sub->parsed()) name = n;
    }

    try {
        const Command& cmd = find_command(name);
        std::vector<KeySpec> keys = common_keys();
        keys.insert(keys.end(), cmd.keys.begin(), cmd.keys.end());
        Resolved r;
        for (const auto& k : keys) {
            if (!k.fallback.empty()) r.set(k.key, k.fallback, "default");
        }
        if (!config_path.empty()) {
            std::ifstream is(config_path);
            if (!is) throw UsageError("--config: cannot open " + config_path);
            for (const auto& e : read_entries(is, config_path)) {
                const bool known = std::any_of(keys.begin(), keys.end(), [&](const KeySpec& k) { return k.key == e.key; });
                const std::string where = config_path + ":" + std::to_string(e.line);
                if (!known) throw UsageError(where + ": unknown key '" + e.key + "' for " + name);
                r.set(e.key, e.value, where);
            }
        }
        for (const auto& k : keys) {
            const std::string id = name + "/" + k.key;
            if (given[id]->count() == 0) continue;
            r.set(k.key, k.is_flag ? (flags[name][k.key] ? "true" : "false") : raw[id], "--" + k.key);
        }

        const SystemParams p = params_from(r);
        const Context ctx{name, r, p, fs::path(r.str("out-dir")), out, err};
        return dispatch(ctx);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const CFLViolation& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const InvalidGrid& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidationFailed;
    }
}

}  // namespace blip::cli
