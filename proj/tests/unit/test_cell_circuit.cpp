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

#include "hms/acceptance.hpp"
#include "hms/cell_circuit.hpp"
#include "hms/config.hpp"

#include <catch_amalgamated.hpp>

#include <random>

using namespace hms;
using Catch::Approx;

namespace
{
    const CellConfig &cell()
    {
        static const CellConfig c = default_config().cell;
        return c;
    }
}

TEST_CASE("varactor capacitance", "[cell]")
{
    const VaractorModel v = cell().varactor;
    CHECK(varactor_capacitance(v, 0.0) == v.c_j0);
    CHECK(varactor_capacitance(v, 8.0) < varactor_capacitance(v, 0.0));
    double prev = varactor_capacitance(v, 0.0);
    for (double b = 0.1; b <= 10.0; b += 0.1)
    {
        const double c = varactor_capacitance(v, b);
        REQUIRE(c < prev);
        prev = c;
    }
    CHECK_THROWS_AS(varactor_capacitance(v, -0.5), std::out_of_range);
    CHECK_THROWS_AS(varactor_capacitance(v, 10.5), std::out_of_range);
}

TEST_CASE("calibrated design point resonates at 24.5 GHz", "[cell]")
{
    CHECK(std::abs(side_resonance(cell().magnetic, cell().varactor, 4.0) - 24.5e9) < 0.05e9);
    CHECK(std::abs(side_resonance(cell().electric, cell().varactor, 4.0) - 24.5e9) < 0.05e9);
}

TEST_CASE("circuit limits", "[cell]")
{
    UnitCellGeometry g = cell().magnetic;
    g.g = 0.0;
    const CircuitBreakdown b = magnetic_breakdown(g, 0.1e-12);
    CHECK(b.gap_factor == 1.0);
    CHECK(b.params.L == b.L_loop);

    // C_gap + C_surf equal to c_var gives C_m = c/2.
    const CircuitBreakdown m = magnetic_breakdown(cell().magnetic, 0.1e-12);
    const double c = m.C_gap + m.C_surf;
    CHECK(magnetic_circuit(cell().magnetic, c).C == Approx(c / 2.0).epsilon(1e-12));

    const CircuitBreakdown e = electric_breakdown(cell().electric, 0.1e-12);
    const double sum = e.C_gap + e.C_surf;
    CHECK(electric_circuit(cell().electric, 1e6 * sum).C == Approx(2.0 * sum).epsilon(1e-4));

    UnitCellGeometry wide = cell().electric;
    wide.w *= 2.0;
    CHECK(electric_breakdown(wide, 0.1e-12).L_strip < e.L_strip);
}

TEST_CASE("resonant frequency", "[cell]")
{
    CHECK(resonant_frequency({1.0, 1.0, Side::Magnetic}) == Approx(1.0 / (2.0 * kPi)));
    const CircuitParams p{2e-9, 4e-15, Side::Electric};
    CHECK(resonant_frequency({p.L, p.C / 2.0, p.side}) == Approx(resonant_frequency(p) * std::sqrt(2.0)));
    for (const UnitCellGeometry *g : {&cell().magnetic, &cell().electric})
    {
        double prev = 0.0;
        for (double b = 0.0; b <= 10.0; b += 0.5)
        {
            const double f = side_resonance(*g, cell().varactor, b);
            REQUIRE(f > prev);
            prev = f;
        }
    }
}

TEST_CASE("golden circuit parameters", "[cell][golden]")
{
    const Config d = default_config();
    const double cv = varactor_capacitance(d.cell.varactor, d.design_bias);
    CHECK(magnetic_circuit(d.cell.magnetic, cv).L == Approx(golden::kLm).epsilon(1e-4));
    CHECK(magnetic_circuit(d.cell.magnetic, cv).C == Approx(golden::kCm).epsilon(1e-4));
    CHECK(electric_circuit(d.cell.electric, cv).L == Approx(golden::kLe).epsilon(1e-4));
    CHECK(electric_circuit(d.cell.electric, cv).C == Approx(golden::kCe).epsilon(1e-4));
}

TEST_CASE("immittance at resonance", "[cell]")
{
    const double cv = varactor_capacitance(cell().varactor, 2.0);
    const CircuitParams mag = magnetic_circuit(cell().magnetic, cv);
    const CircuitParams ele = electric_circuit(cell().electric, cv);
    const SurfaceImmittance at_e = surface_immittance(resonant_frequency(ele), ele, mag);
    CHECK(std::abs(at_e.z_e) < 1e-9);
    CHECK(surface_immittance(resonant_frequency(mag), ele, mag).y_m_pole);
    for (double f : {20e9, 23.1e9, 24.5e9, 27e9})
    {
        const SurfaceImmittance s = surface_immittance(f, ele, mag);
        CHECK(s.z_e.real() == 0.0);
        CHECK(s.y_m.real() == 0.0);
    }
}

TEST_CASE("scatter coefficients special cases", "[cell]")
{
    const ScatterCoefficient clear = scatter_coefficients(SurfaceImmittance{}, 24.5e9);
    CHECK(clear.t_coef == cplx(1.0, 0.0));
    CHECK(clear.gamma_coef == cplx(0.0, 0.0));

    // Huygens matched condition.
    SurfaceImmittance m;
    m.z_e = cplx(0.0, 0.7) * kEta0;
    m.y_m = cplx(0.0, 0.7) / kEta0;
    const ScatterCoefficient h = scatter_coefficients(m, 24.5e9);
    CHECK(std::abs(h.gamma_coef) < 1e-12);
    CHECK(std::abs(h.t_coef) == Approx(1.0).epsilon(1e-12));

    // y_m z_e = 4 blocks transmission.
    SurfaceImmittance b;
    b.z_e = cplx(0.0, 2.0) * kEta0;
    b.y_m = cplx(0.0, -2.0) / kEta0;
    CHECK(std::abs(scatter_coefficients(b, 24.5e9).t_coef) < 1e-12);
}

TEST_CASE("energy conservation for reactive sheets", "[cell][property]")
{
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    double worst = 0.0;
    for (int i = 0; i < 100000; ++i)
    {
        SurfaceImmittance s;
        s.z_e = cplx(0.0, u(rng)) * kEta0;
        s.y_m = cplx(0.0, u(rng)) / kEta0;
        const ScatterCoefficient c = scatter_coefficients(s, 24.5e9);
        worst = std::max(worst, std::abs(std::norm(c.t_coef) + std::norm(c.gamma_coef) - 1.0));
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("cell response through the magnetic pole stays finite and lossless", "[cell]")
{
    const double f_m = side_resonance(cell().magnetic, cell().varactor, 4.0);
    const ScatterCoefficient s = cell_response(cell(), f_m, 4.0, 6.0);
    CHECK(std::isfinite(std::abs(s.t_coef)));
    CHECK(std::norm(s.t_coef) + std::norm(s.gamma_coef) == Approx(1.0).margin(1e-9));
}

TEST_CASE("insertion loss scales both coefficients", "[cell]")
{
    CellConfig lossy = cell();
    lossy.insertion_loss_db = 1.0;
    const ScatterCoefficient a = cell_response(cell(), 24.5e9, 3.0, 5.0);
    const ScatterCoefficient b = cell_response(lossy, 24.5e9, 3.0, 5.0);
    CHECK(std::abs(b.t_coef) / std::abs(a.t_coef) == Approx(std::pow(10.0, -1.0 / 20.0)));
}

TEST_CASE("geometry sensitivity on the magnetic side", "[cell][property]")
{
    const UnitCellGeometry g0 = cell().magnetic;
    const VaractorModel &v = cell().varactor;
    const double f0 = side_resonance(g0, v, 4.0);
    auto shift = [&](double UnitCellGeometry::*field) {
        UnitCellGeometry hi = g0, lo = g0;
        hi.*field *= 1.05;
        lo.*field *= 0.95;
        return std::abs(side_resonance(hi, v, 4.0) - side_resonance(lo, v, 4.0)) / 2.0;
    };
    CHECK(shift(&UnitCellGeometry::R) > shift(&UnitCellGeometry::g));
    for (auto field : {&UnitCellGeometry::R, &UnitCellGeometry::w, &UnitCellGeometry::g, &UnitCellGeometry::t})
        CHECK(shift(field) / f0 < 0.04);
}

TEST_CASE("as-typeset formula is selectable and still finite", "[cell]")
{
    CellConfig c = cell();
    c.formula = ImpedanceFormula::AsTypeset;
    const ScatterCoefficient s = cell_response(c, 24.0e9, 3.0, 5.0);
    CHECK(std::isfinite(std::abs(s.t_coef)));
}

TEST_CASE("invalid geometry is rejected", "[cell]")
{
    UnitCellGeometry g = cell().magnetic;
    g.R = -1.0;
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
    g = cell().magnetic;
    g.g = 7.0 * g.R;
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
}
