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
#include "hms/io.hpp"

#include <catch_amalgamated.hpp>

#include <random>

using namespace hms;
using Catch::Approx;

namespace
{
    double wrap180(double d)
    {
        d = std::fmod(d + 180.0, 360.0);
        return d < 0.0 ? d + 180.0 : d - 180.0;
    }

    const Config &cfg()
    {
        static const Config c = default_config();
        return c;
    }

    const HuygensPattern &center_pattern()
    {
        static const HuygensPattern p = [] {
            const auto grid = lut_voltage_grid(cfg());
            return sweep_pattern(cfg().cell, {cfg().lut.center_freq}, grid, grid);
        }();
        return p;
    }
}

TEST_CASE("single-point sweep matches a direct evaluation", "[lut]")
{
    const HuygensPattern p = sweep_pattern(cfg().cell, {24.5e9}, {3.0}, {5.0});
    REQUIRE(p.data.size() == 1);
    const ScatterCoefficient s = cell_response(cfg().cell, 24.5e9, 3.0, 5.0);
    CHECK(p.at(0, 0, 0).t_coef == s.t_coef);
    CHECK(p.at(0, 0, 0).gamma_coef == s.gamma_coef);
}

TEST_CASE("uniform grid includes both ends", "[lut]")
{
    const auto g = uniform_grid(0.0, 10.0, 0.1);
    CHECK(g.size() == 101);
    CHECK(g.front() == 0.0);
    CHECK(g.back() == Approx(10.0));
}

TEST_CASE("default tables fill every bin", "[lut]")
{
    for (Mode m : {Mode::Lens, Mode::Mirror})
    {
        const PhaseLookupTable lut = build_lut(center_pattern(), m, 15.0, cfg().lut.center_freq);
        CHECK(lut.entries.size() == 24);
        CHECK(lut.flagged_count() == 0);
        CHECK(lut.entries.front().target_deg == -180.0);
        for (const LutEntry &e : lut.entries)
            CHECK(std::abs(wrap180(rad2deg(std::arg(lut.coefficient(e))) - e.target_deg)) <= 7.5);
    }
}

TEST_CASE("table entries are optimal on the grid", "[lut][property]")
{
    const HuygensPattern &p = center_pattern();
    for (Mode m : {Mode::Lens, Mode::Mirror})
    {
        const PhaseLookupTable lut = build_lut(p, m, 15.0, cfg().lut.center_freq);
        bool optimal = true;
        for (std::size_t i = 0; i < p.u_m.size(); ++i)
            for (std::size_t j = 0; j < p.u_e.size(); ++j)
            {
                const cplx c = mode_coefficient(p.at(0, i, j), m);
                const LutEntry &e = lut.lookup(rad2deg(std::arg(c)));
                optimal = optimal && std::abs(c) <= std::abs(lut.coefficient(e));
            }
        CHECK(optimal);
    }
}

TEST_CASE("table build is deterministic", "[lut][property]")
{
    const OutputMeta meta{"0", "test"};
    const auto a = lut_to_json(build_config_lut(cfg(), Mode::Lens), cfg().lut.dac, meta).dump();
    const auto b = lut_to_json(build_config_lut(cfg(), Mode::Lens), cfg().lut.dac, meta).dump();
    CHECK(a == b);
}

TEST_CASE("JSON round trip preserves the table", "[lut]")
{
    const PhaseLookupTable lut = build_config_lut(cfg(), Mode::Mirror);
    const PhaseLookupTable back = lut_from_json(lut_to_json(lut, cfg().lut.dac, {"0", "test"}));
    REQUIRE(back.entries.size() == lut.entries.size());
    CHECK(back.mode == Mode::Mirror);
    for (std::size_t i = 0; i < lut.entries.size(); ++i)
    {
        CHECK(back.entries[i].control.dac_code_m == lut.entries[i].control.dac_code_m);
        CHECK(std::abs(back.entries[i].achieved.gamma_coef - lut.entries[i].achieved.gamma_coef) < 1e-9);
    }
    nlohmann::json bad = lut_to_json(lut, cfg().lut.dac, {"0", "test"});
    bad["entries"].erase(0);
    CHECK_THROWS_AS(lut_from_json(bad), config_error);
}

TEST_CASE("DAC round trip", "[lut][property]")
{
    const DacSpec dac;
    CHECK(dac.lsb() == Approx(10.0 / 65535.0));
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i)
    {
        const double v = u(rng);
        worst = std::max(worst, std::abs(dac.to_volts(dac.to_code(v)) - v));
    }
    CHECK(worst <= 10.0 / 65536.0);
    CHECK(dac.to_code(-1.0) == 0u);
    CHECK(dac.to_code(11.0) == 65535u);
}

TEST_CASE("mirror table from a transparent pattern fails", "[lut]")
{
    HuygensPattern p;
    p.freqs = {24.5e9};
    p.u_m = {0.0, 1.0};
    p.u_e = {0.0, 1.0};
    p.data.assign(4, ScatterCoefficient{cplx(1.0, 0.0), cplx(0.0, 0.0), 24.5e9});
    CHECK_THROWS_AS(build_lut(p, Mode::Mirror, 15.0, 24.5e9), coverage_error);
    CHECK_THROWS_AS(build_lut(HuygensPattern{}, Mode::Lens, 15.0, 24.5e9), std::invalid_argument);
}

TEST_CASE("efficiency limits", "[lut]")
{
    std::vector<cplx> perfect, zero(360);
    for (int d = -180; d < 180; ++d)
        perfect.push_back(std::polar(1.0, deg2rad(d)));
    CHECK(std::abs(efficiency_from_coefficients(perfect)) == Approx(1.0));
    CHECK(std::abs(efficiency_from_coefficients(zero)) == 0.0);
    const double e = std::abs(efficiency(center_pattern(), cfg().lut.center_freq, Mode::Lens));
    CHECK(e > 0.0);
    CHECK(e <= 1.0 + 1e-12);
}

TEST_CASE("bandwidth profile", "[lut]")
{
    const PhaseLookupTable lut = build_config_lut(cfg(), Mode::Lens);
    const double f0 = cfg().lut.center_freq;
    const BandwidthProfile narrow = bandwidth_profile(lut, cfg().cell, uniform_grid(f0 - 100e6, f0 + 100e6, 10e6));
    REQUIRE(narrow.curves.size() == lut.entries.size());
    const std::size_t mid = 10;
    REQUIRE(narrow.freqs[mid] == Approx(f0));
    for (std::size_t i = 0; i < lut.entries.size(); ++i)
    {
        CHECK(std::abs(narrow.curves[i][mid] - lut.entries[i].achieved.t_coef) < 1e-12);
        CHECK(narrow.max_phase_dev_deg[i] <= 15.0);
    }
    const BandwidthProfile wide = bandwidth_profile(lut, cfg().cell, uniform_grid(20e9, 30e9, 0.5e9));
    CHECK(wide.curves.size() == lut.entries.size());
    CHECK(std::is_sorted(wide.freqs.begin(), wide.freqs.end()));
    for (const auto &c : wide.curves)
        CHECK(c.size() == wide.freqs.size());
}

TEST_CASE("tables survive small fabrication perturbations", "[lut][property]")
{
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.98, 1.02);
    const auto grid = lut_voltage_grid(cfg());
    for (int k = 0; k < 3; ++k)
    {
        CellConfig c = cfg().cell;
        for (UnitCellGeometry *g : {&c.magnetic, &c.electric})
        {
            g->R *= u(rng);
            g->w *= u(rng);
            g->g *= u(rng);
            g->t *= u(rng);
        }
        const HuygensPattern p = sweep_pattern(c, {cfg().lut.center_freq}, grid, grid);
        const PhaseLookupTable lut = build_lut(p, Mode::Lens, 15.0, cfg().lut.center_freq);
        int good = 0;
        for (const LutEntry &e : lut.entries)
            good += !e.flagged && std::abs(wrap180(rad2deg(std::arg(lut.coefficient(e))) - e.target_deg)) <= 7.5;
        CHECK(good >= int(std::ceil(0.9 * lut.entries.size())));
    }
}

TEST_CASE("mode names parse back", "[lut]")
{
    CHECK(parse_mode(mode_name(Mode::Lens)) == Mode::Lens);
    CHECK(parse_mode(mode_name(Mode::Mirror)) == Mode::Mirror);
    CHECK_THROWS_AS(parse_mode("prism"), config_error);
}
