// SPDX-License-Identifier: Apache-2.0
//
// sirp-doa: direction finding for MIMO radar in compound-Gaussian clutter
// Copyright (C) 2026 The sirp-doa authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------


#include "sirp/config_io.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace sirp {

namespace {

using json = nlohmann::ordered_json;

// Typed access to one JSON object that remembers which keys were read, so
// leftovers can be reported as unknown.
class Reader
{
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object())
            throw ConfigError(where(), "expected an object");
    }

    bool has(const std::string& key)
    {
        seen_.insert(key);
        return j_.contains(key);
    }

    std::string at(const std::string& key) const { return path_ + "/" + key; }
    const json& raw(const std::string& key) const { return j_.at(key); }

    void number(const std::string& key, double& out)
    {
        if (has(key))
            out = as_number(raw(key), at(key));
    }

    void integer(const std::string& key, int& out)
    {
        if (has(key))
            out = as_int(raw(key), at(key));
    }

    void boolean(const std::string& key, bool& out)
    {
        if (!has(key))
            return;
        if (!raw(key).is_boolean())
            throw ConfigError(at(key), "expected true or false");
        out = raw(key).get<bool>();
    }

    void string(const std::string& key, std::string& out)
    {
        if (!has(key))
            return;
        if (!raw(key).is_string())
            throw ConfigError(at(key), "expected a string");
        out = raw(key).get<std::string>();
    }

    void numbers(const std::string& key, std::vector<double>& out)
    {
        if (!has(key))
            return;
        const json& a = raw(key);
        if (!a.is_array())
            throw ConfigError(at(key), "expected an array of numbers");
        out.clear();
        for (std::size_t i = 0; i < a.size(); ++i)
            out.push_back(as_number(a[i], at(key) + "/" + std::to_string(i)));
    }

    void finish() const
    {
        for (const auto& item : j_.items())
            if (!seen_.count(item.key()))
                throw ConfigError(at(item.key()), "unknown key");
    }

    std::string where() const { return path_.empty() ? "/" : path_; }

    static double as_number(const json& v, const std::string& where)
    {
        if (!v.is_number())
            throw ConfigError(where, "expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x))
            throw ConfigError(where, "expected a finite number");
        return x;
    }

    static int as_int(const json& v, const std::string& where)
    {
        if (v.is_number_integer()) {
            const auto x = v.get<std::int64_t>();
            if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
                throw ConfigError(where, "integer out of range");
            return static_cast<int>(x);
        }
        throw ConfigError(where, "expected an integer");
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

void read_geometry(Reader& r, ArrayGeometry& g)
{
    Reader o(r.raw("geometry"), r.at("geometry"));
    double wavelength = g.wavelength;
    o.number("wavelength", wavelength);
    const bool explicit_tx = o.has("tx_positions");
    const bool explicit_rx = o.has("rx_positions");
    const bool uniform = o.has("tx_elements") || o.has("rx_elements") || o.has("spacing_wavelengths");
    if ((explicit_tx || explicit_rx) && uniform)
        throw ConfigError(o.where(), "give either element counts or explicit positions, not both");
    if (explicit_tx != explicit_rx)
        throw ConfigError(o.where(), "tx_positions and rx_positions go together");
    if (explicit_tx) {
        o.numbers("tx_positions", g.tx_positions);
        o.numbers("rx_positions", g.rx_positions);
        g.wavelength = wavelength;
    } else {
        int m = g.m(), n = g.n();
        double spacing = 0.5;
        o.integer("tx_elements", m);
        o.integer("rx_elements", n);
        o.number("spacing_wavelengths", spacing);
        if (m < 1 || n < 1)
            throw ConfigError(o.where(), "element counts must be >= 1");
        g = ArrayGeometry::uniform(m, n, spacing, wavelength);
    }
    o.finish();
}

void read_targets(Reader& r, Scene& s)
{
    if (!r.has("targets"))
        return;
    const json& a = r.raw("targets");
    const std::string base = r.at("targets");
    if (!a.is_array() || a.empty())
        throw ConfigError(base, "expected a non-empty array of targets");
    s.dod.clear();
    s.doa.clear();
    s.rcs.clear();
    s.doppler.clear();
    for (std::size_t i = 0; i < a.size(); ++i) {
        Reader t(a[i], base + "/" + std::to_string(i));
        for (const char* key : {"dod_deg", "doa_deg", "rcs", "doppler"})
            if (!t.has(key))
                throw ConfigError(t.at(key), "missing");
        double dod = 0.0, doa = 0.0, doppler = 0.0;
        t.number("dod_deg", dod);
        t.number("doa_deg", doa);
        t.number("doppler", doppler);
        std::vector<double> rcs;
        t.numbers("rcs", rcs);
        if (rcs.size() != 2)
            throw ConfigError(t.at("rcs"), "expected [real, imag]");
        t.finish();
        s.dod.push_back(deg2rad(dod));
        s.doa.push_back(deg2rad(doa));
        s.rcs.emplace_back(rcs[0], rcs[1]);
        s.doppler.push_back(doppler);
    }
}

void read_clutter(Reader& r, ExperimentConfig& c)
{
    Reader o(r.raw("clutter"), r.at("clutter"));
    o.has("family");  // consumed up front by the caller
    o.number("shape", c.texture.shape);
    o.number("scale", c.texture.scale);
    o.number("correlation_base", c.cov_base);
    double step_deg = rad2deg(c.cov_phase_step);
    o.number("phase_step_deg", step_deg);
    c.cov_phase_step = deg2rad(step_deg);
    o.finish();
}

void read_sweep(Reader& r, ExperimentConfig& c)
{
    Reader o(r.raw("sweep"), r.at("sweep"));
    std::string axis = std::string(to_string(c.axis));
    o.string("axis", axis);
    if (axis == "scr_db")
        c.axis = SweepAxis::Scr;
    else if (axis == "pulses")
        c.axis = SweepAxis::Pulses;
    else
        throw ConfigError(o.at("axis"), "expected \"scr_db\" or \"pulses\"");
    if (o.has("values"))
        o.numbers("values", c.sweep_values);
    else if (c.axis == SweepAxis::Pulses)
        throw ConfigError(o.at("values"), "a pulses sweep needs its own value list");
    o.number("fixed_scr_db", c.fixed_scr_db);
    o.finish();
}

void read_estimators(Reader& r, ExperimentConfig& c)
{
    if (!r.has("estimators"))
        return;
    const json& a = r.raw("estimators");
    const std::string base = r.at("estimators");
    if (!a.is_array() || a.empty())
        throw ConfigError(base, "expected a non-empty array");
    c.estimators.clear();
    for (std::size_t i = 0; i < a.size(); ++i) {
        const std::string where = base + "/" + std::to_string(i);
        EstimatorSelection sel;
        if (a[i].is_string()) {
            sel.name = a[i].get<std::string>();
        } else {
            Reader e(a[i], where);
            if (!e.has("name"))
                throw ConfigError(e.at("name"), "missing");
            e.string("name", sel.name);
            if (e.has("iterations")) {
                const json& it = e.raw("iterations");
                if (!it.is_array() || it.empty())
                    throw ConfigError(e.at("iterations"), "expected a non-empty array of integers");
                sel.iterations.clear();
                for (std::size_t k = 0; k < it.size(); ++k)
                    sel.iterations.push_back(Reader::as_int(it[k], e.at("iterations") + "/" + std::to_string(k)));
            }
            e.finish();
        }
        try {
            sel.name = canonical_estimator_name(sel.name);
        } catch (const std::invalid_argument& ex) {
            throw ConfigError(where, ex.what());
        }
        c.estimators.push_back(std::move(sel));
    }
}

void read_estimator_config(Reader& r, EstimatorConfig& e)
{
    Reader o(r.raw("estimator_config"), r.at("estimator_config"));
    o.number("coarse_grid_step_deg", e.coarse_grid_step);
    o.number("refine_tol_deg", e.refine_tol);
    o.number("grid_min_deg", e.grid_min);
    o.number("grid_max_deg", e.grid_max);
    o.integer("sweeps", e.sweeps);
    o.boolean("polish", e.polish);
    o.integer("max_outer_iters", e.max_outer_iters);
    o.integer("min_outer_iters", e.min_outer_iters);
    o.integer("sigma_fixed_point_iters", e.sigma_fixed_point_iters);
    o.number("sigma_fixed_point_tol", e.sigma_fixed_point_tol);
    o.number("sigma_loading", e.sigma_loading);
    o.number("a_min", e.a_min);
    o.number("a_max", e.a_max);
    o.number("b_min", e.b_min);
    o.number("b_max", e.b_max);
    o.number("root_tol", e.root_tol);
    o.number("initial_a", e.initial_a);
    o.number("initial_b", e.initial_b);
    o.boolean("music_polish", e.music_polish);
    o.number("quadrature_rel_tol", e.quadrature.rel_tol);
    o.integer("quadrature_max_subdivisions", e.quadrature.max_subdivisions);
    o.finish();
}

std::string syntax_location(const std::string& text, std::size_t byte)
{
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

} // namespace

ExperimentConfig parse_config(const std::string& text)
{
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(syntax_location(text, e.byte), "syntax error");
    }
    Reader r(root, "");

    TextureKind kind = TextureKind::KDistributed;
    if (r.has("clutter") && root.at("clutter").is_object() && root.at("clutter").contains("family")) {
        const json& f = root.at("clutter").at("family");
        if (!f.is_string())
            throw ConfigError("/clutter/family", "expected a string");
        try {
            kind = texture_kind_from_string(f.get<std::string>());
        } catch (const std::invalid_argument& e) {
            throw ConfigError("/clutter/family", e.what());
        }
    }
    ExperimentConfig c = ExperimentConfig::paper_defaults(kind);

    if (r.has("geometry"))
        read_geometry(r, c.geometry);
    read_targets(r, c.scene);
    r.integer("pulses", c.scene.pulses);
    r.integer("snapshots_per_pulse", c.scene.snapshots_per_pulse);
    if (r.has("clutter"))
        read_clutter(r, c);
    if (r.has("sweep"))
        read_sweep(r, c);
    r.integer("trials", c.trials);
    if (r.has("seed")) {
        const json& s = r.raw("seed");
        if (!s.is_number_integer() || (s.is_number_integer() && !s.is_number_unsigned() && s.get<std::int64_t>() < 0))
            throw ConfigError(r.at("seed"), "expected a non-negative integer");
        c.base_seed = s.get<std::uint64_t>();
    }
    read_estimators(r, c);
    if (r.has("estimator_config"))
        read_estimator_config(r, c.estimator);
    r.string("output", c.output_path);
    r.integer("threads", c.threads);
    r.finish();

    try {
        c.validate();
    } catch (const std::exception& e) {
        throw ConfigError("/", e.what());
    }
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("", "cannot open config file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_config(ss.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.where(), e.message());
    }
}

std::string dump_config(const ExperimentConfig& c)
{
    json j;
    j["geometry"] = {{"tx_positions", c.geometry.tx_positions},
                     {"rx_positions", c.geometry.rx_positions},
                     {"wavelength", c.geometry.wavelength}};
    json targets = json::array();
    for (int k = 0; k < c.scene.targets(); ++k)
        targets.push_back({{"dod_deg", rad2deg(c.scene.dod[k])},
                           {"doa_deg", rad2deg(c.scene.doa[k])},
                           {"rcs", {c.scene.rcs[k].real(), c.scene.rcs[k].imag()}},
                           {"doppler", c.scene.doppler[k]}});
    j["targets"] = targets;
    j["pulses"] = c.scene.pulses;
    j["snapshots_per_pulse"] = c.scene.snapshots_per_pulse;
    j["clutter"] = {{"family", std::string(to_string(c.texture.kind))},
                    {"shape", c.texture.shape},
                    {"scale", c.texture.scale},
                    {"correlation_base", c.cov_base},
                    {"phase_step_deg", rad2deg(c.cov_phase_step)}};
    j["sweep"] = {{"axis", std::string(to_string(c.axis))},
                  {"values", c.sweep_values},
                  {"fixed_scr_db", c.fixed_scr_db}};
    j["trials"] = c.trials;
    j["seed"] = c.base_seed;
    json est = json::array();
    for (const auto& e : c.estimators)
        est.push_back({{"name", e.name}, {"iterations", e.iterations}});
    j["estimators"] = est;
    const EstimatorConfig& e = c.estimator;
    j["estimator_config"] = {{"coarse_grid_step_deg", e.coarse_grid_step},
                             {"refine_tol_deg", e.refine_tol},
                             {"grid_min_deg", e.grid_min},
                             {"grid_max_deg", e.grid_max},
                             {"sweeps", e.sweeps},
                             {"polish", e.polish},
                             {"max_outer_iters", e.max_outer_iters},
                             {"min_outer_iters", e.min_outer_iters},
                             {"sigma_fixed_point_iters", e.sigma_fixed_point_iters},
                             {"sigma_fixed_point_tol", e.sigma_fixed_point_tol},
                             {"sigma_loading", e.sigma_loading},
                             {"a_min", e.a_min},
                             {"a_max", e.a_max},
                             {"b_min", e.b_min},
                             {"b_max", e.b_max},
                             {"root_tol", e.root_tol},
                             {"initial_a", e.initial_a},
                             {"initial_b", e.initial_b},
                             {"music_polish", e.music_polish},
                             {"quadrature_rel_tol", e.quadrature.rel_tol},
                             {"quadrature_max_subdivisions", e.quadrature.max_subdivisions}};
    if (!c.output_path.empty())
        j["output"] = c.output_path;
    j["threads"] = c.threads;
    return j.dump(2) + "\n";
}

} // namespace sirp
