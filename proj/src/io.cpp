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

#include "hms/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace hms
{
    using nlohmann::json;

    void atomic_write(const std::string &path, const std::string &content)
    {
        namespace fs = std::filesystem;
        const fs::path target(path);
        if (target.has_parent_path() && !fs::exists(target.parent_path()))
            fs::create_directories(target.parent_path());
        const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out)
                throw std::runtime_error("cannot write " + tmp.string());
            out << content;
            out.flush();
            if (!out)
            {
                out.close();
                std::error_code ec;
                fs::remove(tmp, ec);
                throw std::runtime_error("write failed: " + tmp.string());
            }
        }
        std::error_code ec;
        fs::rename(tmp, target, ec);
        if (ec)
        {
            fs::remove(tmp, ec);
            throw std::runtime_error("cannot rename onto " + path);
        }
    }

    std::string read_text(const std::string &path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw config_error("cannot open file: " + path);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    json lut_to_json(const PhaseLookupTable &lut, const DacSpec &dac, const OutputMeta &meta)
    {
        json entries = json::array();
        for (const LutEntry &e : lut.entries)
        {
            entries.push_back({{"target_deg", e.target_deg},
                               {"u_m_V", e.control.u_m},
                               {"u_e_V", e.control.u_e},
                               {"dac_m", e.control.dac_code_m},
                               {"dac_e", e.control.dac_code_e},
                               {"T", {e.achieved.t_coef.real(), e.achieved.t_coef.imag()}},
                               {"Gamma", {e.achieved.gamma_coef.real(), e.achieved.gamma_coef.imag()}},
                               {"flagged", e.flagged}});
        }
        return json{{"tool_version", meta.tool_version},
                    {"config_hash", meta.config_hash},
                    {"units", {{"frequency", "Hz"}, {"angle", "deg"}, {"voltage", "V"}, {"coefficient", "re,im"}}},
                    {"mode", mode_name(lut.mode)},
                    {"center_freq_hz", lut.center_freq},
                    {"phase_step_deg", lut.phase_step},
                    {"dac", {{"bits", dac.bits}, {"full_scale_V", dac.full_scale}}},
                    {"entries", entries}};
    }

    PhaseLookupTable lut_from_json(const json &j)
    {
        try
        {
            PhaseLookupTable lut;
            lut.mode = parse_mode(j.at("mode").get<std::string>());
            lut.center_freq = j.at("center_freq_hz").get<double>();
            lut.phase_step = j.at("phase_step_deg").get<double>();
            if (!(lut.phase_step > 0.0) || !(lut.center_freq > 0.0))
                throw config_error("lut: phase step and centre frequency must be positive");
            for (const json &e : j.at("entries"))
            {
                LutEntry le;
                le.target_deg = e.at("target_deg").get<double>();
                le.control.u_m = e.at("u_m_V").get<double>();
                le.control.u_e = e.at("u_e_V").get<double>();
                le.control.dac_code_m = e.at("dac_m").get<std::uint32_t>();
                le.control.dac_code_e = e.at("dac_e").get<std::uint32_t>();
                const json &t = e.at("T");
                const json &g = e.at("Gamma");
                le.achieved.t_coef = {t.at(0).get<double>(), t.at(1).get<double>()};
                le.achieved.gamma_coef = {g.at(0).get<double>(), g.at(1).get<double>()};
                le.achieved.freq = lut.center_freq;
                le.flagged = e.at("flagged").get<bool>();
                lut.entries.push_back(le);
            }
            const std::size_t bins = std::size_t(std::lround(360.0 / lut.phase_step));
            if (lut.entries.size() != bins)
                throw config_error("lut: expected " + std::to_string(bins) + " entries");
            return lut;
        }
        catch (const json::exception &e)
        {
            throw config_error(std::string("lut: malformed document: ") + e.what());
        }
    }

    std::string format_number(double v)
    {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.10g", v);
        return buf;
    }

    CsvTable::CsvTable(std::vector<std::string> columns, const OutputMeta &meta) : width_(columns.size())
    {
        out_ = "# hmsrelay " + meta.tool_version + " config " + meta.config_hash + "\n";
        for (std::size_t i = 0; i < columns.size(); ++i)
            out_ += (i ? "," : "") + columns[i];
        out_ += "\n";
    }

    void CsvTable::row(const std::vector<double> &values)
    {
        std::vector<std::string> cells;
        cells.reserve(values.size());
        for (double v : values)
            cells.push_back(format_number(v));
        row(cells);
    }

    void CsvTable::row(const std::vector<std::string> &cells)
    {
        if (cells.size() != width_)
            throw std::invalid_argument("CsvTable: row width does not match the header");
        for (std::size_t i = 0; i < cells.size(); ++i)
            out_ += (i ? "," : "") + cells[i];
        out_ += "\n";
    }

    std::string pattern_csv(const HuygensPattern &pattern, const OutputMeta &meta)
    {
        CsvTable t({"freq_hz", "u_m_V", "u_e_V", "abs_T", "arg_T_deg", "abs_Gamma", "arg_Gamma_deg"}, meta);
        for (std::size_t f = 0; f < pattern.freqs.size(); ++f)
            for (std::size_t m = 0; m < pattern.u_m.size(); ++m)
                for (std::size_t e = 0; e < pattern.u_e.size(); ++e)
                {
                    const ScatterCoefficient &s = pattern.at(f, m, e);
                    t.row({pattern.freqs[f], pattern.u_m[m], pattern.u_e[e], std::abs(s.t_coef), arg_deg(s.t_coef),
                           std::abs(s.gamma_coef), arg_deg(s.gamma_coef)});
                }
        return t.str();
    }

    std::string radiation_csv(const RadiationPattern &pattern, const OutputMeta &meta)
    {
        CsvTable t({"angle_deg", "power_db"}, meta);
        for (std::size_t i = 0; i < pattern.angles_deg.size(); ++i)
            t.row({pattern.angles_deg[i], pattern.power_db[i]});
        return t.str();
    }
}
