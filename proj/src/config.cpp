// SPDX-License-Identifier: Apache-2.0
//
// hmsrelay - reconfigurable Huygens metasurface relay simulator
// Copyright (C) 2026 The hmsrelay authors
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

#include "hms/config.hpp"
#include "hms/embedded_config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace hms
{
    using nlohmann::json;

    json default_config_json() { return json::parse(embedded::kDefaultConfigJson); }

    std::string tool_version() { return embedded::kVersion; }

    json load_config_json(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
            throw config_error("cannot open config file: " + path);
        json user;
        try
        {
            in >> user;
        }
        catch (const json::exception &e)
        {
            throw config_error("cannot parse config file " + path + ": " + e.what());
        }
        if (!user.is_object())
            throw config_error("config file " + path + " must hold a JSON object");
        json doc = default_config_json();
        doc.merge_patch(user);
        return doc;
    }

    void apply_override(json &doc, const std::string &assignment)
    {
        const auto eq = assignment.find('=');
        if (eq == std::string::npos || eq == 0)
            throw config_error("override must look like key.path=value: " + assignment);
        const std::string key = assignment.substr(0, eq);
        const std::string raw = assignment.substr(eq + 1);
        json value;
        try
        {
            value = json::parse(raw);
        }
        catch (const json::exception &)
        {
            value = raw;
        }
        json *node = &doc;
        std::stringstream ss(key);
        std::string part;
        std::vector<std::string> parts;
        while (std::getline(ss, part, '.'))
            parts.push_back(part);
        for (std::size_t i = 0; i < parts.size(); ++i)
        {
            if (!node->is_object() || !node->contains(parts[i]))
                throw config_error("unknown config key: " + key);
            node = &(*node)[parts[i]];
        }
        *node = value;
    }

    namespace
    {
        const json &at(const json &j, const std::string &key, const std::string &path)
        {
            if (!j.is_object() || !j.contains(key))
                throw config_error("missing config key: " + path + key);
            return j.at(key);
        }

        double num(const json &j, const std::string &key, const std::string &path)
        {
            const json &v = at(j, key, path);
            if (!v.is_number())
                throw config_error("config key " + path + key + " must be a number");
            return v.get<double>();
        }

        int integer(const json &j, const std::string &key, const std::string &path)
        {
            const json &v = at(j, key, path);
            if (!v.is_number_integer())
                throw config_error("config key " + path + key + " must be an integer");
            return v.get<int>();
        }

        std::string str(const json &j, const std::string &key, const std::string &path)
        {
            const json &v = at(j, key, path);
            if (!v.is_string())
                throw config_error("config key " + path + key + " must be a string");
            return v.get<std::string>();
        }

        Vec3 vec3(const json &j, const std::string &key, const std::string &path)
        {
            const json &v = at(j, key, path);
            if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() || !v[2].is_number())
                throw config_error("config key " + path + key + " must be [x, y, z]");
            return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
        }

        UnitCellGeometry geometry(const json &j, Side side, const std::string &path)
        {
            UnitCellGeometry g;
            g.R = num(j, "R_m", path);
            g.w = num(j, "w_m", path);
            g.g = num(j, "g_m", path);
            g.t = num(j, "t_m", path);
            g.eps_r = num(j, "eps_r", path);
            g.side = side;
            return g;
        }

        template <class F> auto guarded(const std::string &what, F &&f)
        {
            try
            {
                return f();
            }
            catch (const config_error &)
            {
                throw;
            }
            catch (const std::exception &e)
            {
                throw config_error("invalid " + what + ": " + e.what());
            }
        }
    }

    Config parse_config(const json &doc)
    {
        Config c;
        const json &cell = at(doc, "cell", "");
        c.cell.magnetic = geometry(at(cell, "magnetic", "cell."), Side::Magnetic, "cell.magnetic.");
        c.cell.electric = geometry(at(cell, "electric", "cell."), Side::Electric, "cell.electric.");
        const json &var = at(cell, "varactor", "cell.");
        c.cell.varactor.c_j0 = num(var, "c_j0_F", "cell.varactor.");
        c.cell.varactor.phi_j = num(var, "phi_j_V", "cell.varactor.");
        c.cell.varactor.gamma = num(var, "gamma", "cell.varactor.");
        c.cell.varactor.v_min = num(var, "v_min_V", "cell.varactor.");
        c.cell.varactor.v_max = num(var, "v_max_V", "cell.varactor.");
        const std::string formula = str(cell, "formula", "cell.");
        if (formula == "canonical")
            c.cell.formula = ImpedanceFormula::Canonical;
        else if (formula == "as_typeset")
            c.cell.formula = ImpedanceFormula::AsTypeset;
        else
            throw config_error("cell.formula must be canonical or as_typeset");
        c.cell.insertion_loss_db = num(cell, "insertion_loss_db", "cell.");
        c.design_bias = num(cell, "design_bias_V", "cell.");
        c.design_freq = num(cell, "design_freq_hz", "cell.");
        guarded("cell geometry", [&] {
            c.cell.magnetic.validate();
            c.cell.electric.validate();
            c.cell.varactor.validate();
            return 0;
        });

        const json &lut = at(doc, "lut", "");
        c.lut.center_freq = num(lut, "center_freq_hz", "lut.");
        c.lut.voltage_step = num(lut, "voltage_step_V", "lut.");
        c.lut.phase_step = num(lut, "phase_step_deg", "lut.");
        c.lut.dac.bits = integer(lut, "dac_bits", "lut.");
        c.lut.dac.full_scale = num(lut, "dac_full_scale_V", "lut.");
        c.lut.bandwidth_window = num(lut, "bandwidth_window_hz", "lut.");
        if (!(c.lut.voltage_step > 0.0) || !(c.lut.phase_step > 0.0) || c.lut.dac.bits < 1 || c.lut.dac.bits > 31)
            throw config_error("lut: voltage_step_V, phase_step_deg must be positive and dac_bits in 1..31");

        const json &pat = at(doc, "pattern", "");
        c.pattern.freq_start = num(pat, "freq_start_hz", "pattern.");
        c.pattern.freq_stop = num(pat, "freq_stop_hz", "pattern.");
        c.pattern.freq_points = integer(pat, "freq_points", "pattern.");
        c.pattern.voltage_step = num(pat, "voltage_step_V", "pattern.");
        if (c.pattern.freq_points < 1 || !(c.pattern.freq_start > 0.0) || c.pattern.freq_stop < c.pattern.freq_start ||
            !(c.pattern.voltage_step > 0.0))
            throw config_error("pattern: need freq_points >= 1, 0 < freq_start <= freq_stop, voltage_step_V > 0");

        const json &arr = at(doc, "array", "");
        c.array.n_cols = integer(arr, "n_cols", "array.");
        c.array.m_rows = integer(arr, "m_rows", "array.");
        if (c.array.n_cols < 1 || c.array.m_rows < 1)
            throw config_error(std::string("array.") + (c.array.n_cols < 1 ? "n_cols" : "m_rows") + " must be >= 1");
        c.array.col_spacing = num(arr, "col_spacing_m", "array.");
        c.array.center_freq = num(arr, "center_freq_hz", "array.");
        if (arr.contains("row_spacing_m") && !arr.at("row_spacing_m").is_null())
            c.array.row_spacing = num(arr, "row_spacing_m", "array.");
        else
            c.array.row_spacing = wavelength(c.array.center_freq) / 3.0;
        c.element_q = num(arr, "element_q", "array.");
        guarded("array", [&] {
            c.array.validate();
            return 0;
        });
        if (!(c.element_q > 0.0))
            throw config_error("array.element_q must be positive");

        const json &radio = at(doc, "radio", "");
        c.radio.p_t_dbm = num(radio, "p_t_dbm", "radio.");
        c.radio.g_t_dbi = num(radio, "g_t_dbi", "radio.");
        c.radio.g_r_dbi = num(radio, "g_r_dbi", "radio.");
        c.radio.freq = num(radio, "freq_hz", "radio.");
        c.radio.noise_floor_dbm = num(radio, "noise_floor_dbm", "radio.");
        if (!(c.radio.freq > 0.0))
            throw config_error("radio.freq_hz must be positive");

        const json &beam = at(doc, "beam", "");
        c.beam.mode = parse_mode(str(beam, "mode", "beam."));
        c.beam.incident_deg = num(beam, "incident_deg", "beam.");
        c.beam.grid_step_deg = num(beam, "grid_step_deg", "beam.");
        c.beam.peaks = integer(beam, "peaks", "beam.");
        c.beam.arms.clear();
        const json &arms = at(beam, "arms", "beam.");
        if (!arms.is_array() || arms.empty() || arms.size() > 2)
            throw config_error("beam.arms must list one or two arms");
        for (const json &a : arms)
            c.beam.arms.push_back(BeamArm{num(a, "angle_deg", "beam.arms[]."), num(a, "weight", "beam.arms[].")});

        const json &bud = at(doc, "budget", "");
        c.budget.tx = vec3(bud, "tx_m", "budget.");
        c.budget.rx = vec3(bud, "rx_m", "budget.");
        const json &surf = at(bud, "surface", "budget.");
        c.budget.surface.center = vec3(surf, "center_m", "budget.surface.");
        c.budget.surface.yaw_deg = num(surf, "yaw_deg", "budget.surface.");

        const json &sc = at(doc, "scenario", "");
        c.scenario.file = str(sc, "file", "scenario.");
        c.scenario.trials = integer(sc, "trials", "scenario.");
        const json &betas = at(sc, "beta_grid", "scenario.");
        if (!betas.is_array() || betas.empty())
            throw config_error("scenario.beta_grid must be a non-empty array");
        for (const json &b : betas)
        {
            if (!b.is_number() || b.get<double>() < 0.0 || b.get<double>() > 1.0)
                throw config_error("scenario.beta_grid entries must be numbers in [0, 1]");
            c.scenario.beta_grid.push_back(b.get<double>());
        }
        if (c.scenario.trials < 1)
            throw config_error("scenario.trials must be >= 1");

        const json &pr = at(doc, "protocol", "");
        c.protocol.n_enodeb = integer(pr, "n_enodeb", "protocol.");
        c.protocol.n_surface = integer(pr, "n_surface", "protocol.");
        c.protocol.n_ue = integer(pr, "n_ue", "protocol.");
        c.protocol.n_multiarm = integer(pr, "n_multiarm", "protocol.");
        c.protocol.refine_levels = integer(pr, "refine_levels", "protocol.");
        c.protocol.refine_beams = integer(pr, "refine_beams", "protocol.");
        c.protocol.truth_enodeb_deg = num(pr, "truth_enodeb_deg", "protocol.");
        c.protocol.truth_incident_deg = num(pr, "truth_incident_deg", "protocol.");
        c.protocol.truth_surface_deg = num(pr, "truth_surface_deg", "protocol.");
        c.protocol.truth_ue_deg = num(pr, "truth_ue_deg", "protocol.");
        c.protocol.noise_sigma_db = num(pr, "noise_sigma_db", "protocol.");
        c.protocol.mode = parse_mode(str(pr, "mode", "protocol."));
        c.protocol.tx_power_dbm = num(pr, "tx_power_dbm", "protocol.");
        c.protocol.enodeb_elements = integer(pr, "enodeb_elements", "protocol.");
        c.protocol.ue_elements = integer(pr, "ue_elements", "protocol.");
        c.protocol.d_enodeb_surface = num(pr, "d_enodeb_surface_m", "protocol.");
        c.protocol.d_surface_ue = num(pr, "d_surface_ue_m", "protocol.");
        c.protocol.codebook_span_deg = num(pr, "codebook_span_deg", "protocol.");
        c.protocol.detect_snr_db = num(pr, "detect_snr_db", "protocol.");
        c.protocol.tolerance_deg = num(pr, "tolerance_deg", "protocol.");
        c.protocol.revert_drop_db = num(pr, "revert_drop_db", "protocol.");
        c.protocol.ambiguity_db = num(pr, "ambiguity_db", "protocol.");
        c.protocol.trials = integer(pr, "trials", "protocol.");
        if (c.protocol.enodeb_elements < 1 || c.protocol.ue_elements < 1 || !(c.protocol.d_enodeb_surface > 0.0) ||
            !(c.protocol.d_surface_ue > 0.0) || c.protocol.trials < 1)
            throw config_error("protocol: element counts, distances and trials must be positive");
        if (!(c.protocol.codebook_span_deg >= 0.0) || c.protocol.codebook_span_deg >= 90.0 ||
            !(c.protocol.tolerance_deg > 0.0) || c.protocol.refine_beams % 2 == 0)
            throw config_error("protocol: codebook_span_deg in [0, 90), tolerance_deg > 0, refine_beams odd");
        for (double a : {c.protocol.truth_enodeb_deg, c.protocol.truth_incident_deg, c.protocol.truth_surface_deg,
                         c.protocol.truth_ue_deg})
            if (!(std::abs(a) < 90.0))
                throw config_error("protocol: ground-truth angles must lie in (-90, 90)");
        if (c.protocol.n_enodeb < 1 || c.protocol.n_surface < 1 || c.protocol.n_ue < 1 || c.protocol.n_multiarm < 2 ||
            c.protocol.refine_levels < 0 || c.protocol.refine_beams < 1 || c.protocol.noise_sigma_db < 0.0)
            throw config_error("protocol: codebook sizes must be positive and noise_sigma_db >= 0");
        return c;
    }

    Config default_config() { return parse_config(default_config_json()); }

    std::vector<double> lut_voltage_grid(const Config &c)
    {
        return uniform_grid(c.cell.varactor.v_min, c.cell.varactor.v_max, c.lut.voltage_step);
    }

    PhaseLookupTable build_config_lut(const Config &c, Mode mode)
    {
        const auto grid = lut_voltage_grid(c);
        const HuygensPattern pattern = sweep_pattern(c.cell, {c.lut.center_freq}, grid, grid);
        return build_lut(pattern, mode, c.lut.phase_step, c.lut.center_freq, c.lut.dac);
    }

    ChannelParams channel_params(const Config &c)
    {
        const ProtocolSettings &s = c.protocol;
        ChannelParams p;
        p.array = c.array;
        p.element_q = c.element_q;
        p.radio = c.radio;
        p.radio.p_t_dbm = s.tx_power_dbm;
        p.enodeb_elements = s.enodeb_elements;
        p.ue_elements = s.ue_elements;
        p.d_enodeb_surface = s.d_enodeb_surface;
        p.d_surface_ue = s.d_surface_ue;
        p.geometry_mode = s.mode;
        p.truth_enodeb_deg = s.truth_enodeb_deg;
        p.truth_incident_deg = s.truth_incident_deg;
        p.truth_surface_deg = s.truth_surface_deg;
        p.truth_ue_deg = s.truth_ue_deg;
        return p;
    }

    ProtocolOptions protocol_options(const Config &c)
    {
        ProtocolOptions o;
        o.detect_snr_db = c.protocol.detect_snr_db;
        o.tolerance_deg = c.protocol.tolerance_deg;
        o.revert_drop_db = c.protocol.revert_drop_db;
        o.codebook_span_deg = c.protocol.codebook_span_deg;
        o.refine_beams = c.protocol.refine_beams;
        o.noise_sigma_db = c.protocol.noise_sigma_db;
        o.ambiguity_db = c.protocol.ambiguity_db;
        return o;
    }

    json scenario_document(const Config &c)
    {
        const std::string &f = c.scenario.file;
        const std::string prefix = "builtin:";
        if (f.empty())
            return builtin_scenario_json("indoor");
        if (f.rfind(prefix, 0) == 0)
            return guarded("scenario.file", [&] { return builtin_scenario_json(f.substr(prefix.size())); });
        std::ifstream in(f);
        if (!in)
            throw config_error("cannot open scenario file: " + f);
        try
        {
            json j;
            in >> j;
            return j;
        }
        catch (const json::exception &e)
        {
            throw config_error("cannot parse scenario file " + f + ": " + e.what());
        }
    }

    Scenario config_scenario(const Config &c)
    {
        const json doc = scenario_document(c);
        return guarded("scenario", [&] { return scenario_from_json(doc, c.array, c.radio, c.element_q); });
    }

    std::string config_hash(const json &doc)
    {
        const std::string s = doc.dump();
        std::uint64_t h = 14695981039346656037ull;
        for (unsigned char ch : s)
        {
            h ^= ch;
            h *= 1099511628211ull;
        }
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
        return buf;
    }
}
