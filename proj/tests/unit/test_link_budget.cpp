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
#include "hms/config.hpp"

#include <catch_amalgamated.hpp>

#include <random>

using namespace hms;
using Catch::Approx;

namespace
{
    const Config &cfg()
    {
        static const Config c = default_config();
        return c;
    }

    RadioParams unit_radio()
    {
        RadioParams r;
        r.p_t_dbm = 0.0;
        r.g_t_dbi = 0.0;
        r.g_r_dbi = 0.0;
        return r;
    }

    SurfaceArray toy(int n, int m)
    {
        SurfaceArray a = cfg().array;
        a.n_cols = n;
        a.m_rows = m;
        return a;
    }

    Vec3 polar_point(const SurfacePose &pose, double d, double deg)
    {
        return d * (std::cos(deg2rad(deg)) * pose.normal() + std::sin(deg2rad(deg)) * pose.tangent());
    }

    // Coefficients that cancel every element's propagation phase for the geometry.
    std::vector<cplx> matched(const SurfaceArray &a, const LinkGeometry &g, double mag = 1.0)
    {
        const double k = 2.0 * kPi / a.lambda();
        std::vector<cplx> out;
        for (const Vec3 &p : element_positions(a, g.surface))
            out.push_back(std::polar(mag, k * (norm(g.tx - p) + norm(g.rx - p))));
        return out;
    }
}

TEST_CASE("Friis", "[budget]")
{
    const RadioParams r = unit_radio();
    CHECK(friis_dbm(r, 2.0) - friis_dbm(r, 1.0) == Approx(-6.0206).margin(1e-4));
    CHECK(friis_dbm(r, 1.0) == Approx(golden::kFriis1m).epsilon(1e-9));
    RadioParams e;
    e.p_t_dbm = 6.0;
    e.g_t_dbi = 25.0;
    CHECK(e.eirp_dbm() == 31.0);
}

TEST_CASE("single-element exact sum", "[budget]")
{
    const SurfaceArray a = toy(1, 1);
    const SurfacePose pose{};
    const double di = 2.0, ds = 3.0;
    const LinkGeometry g{polar_point(pose, di, 0.0), polar_point(pose, ds, 0.0), pose};
    const RadioParams r = cfg().radio;
    const double lam = r.lambda();
    const double gw = 4.0 * kPi * a.element_area() / (lam * lam);
    const double expected = r.p_t_dbm + r.g_t_dbi + r.g_r_dbi + 20.0 * std::log10(lam / (4.0 * kPi * di)) +
                            20.0 * std::log10(lam / (4.0 * kPi * ds)) + 20.0 * std::log10(gw);
    CHECK(received_power_exact_dbm(r, g, a, {cplx(1.0, 0.0)}, cfg().element_q) == Approx(expected).epsilon(1e-12));
}

TEST_CASE("zero coefficients give no power", "[budget]")
{
    const SurfaceArray a = toy(4, 4);
    const SurfacePose pose{};
    const LinkGeometry g{polar_point(pose, 2.0, 10.0), polar_point(pose, 2.0, -30.0), pose};
    const std::vector<cplx> zero(16, cplx(0.0, 0.0));
    CHECK(std::isinf(received_power_exact_dbm(cfg().radio, g, a, zero)));
    CHECK(received_power_exact_dbm(cfg().radio, g, a, zero) < 0.0);
    CHECK(std::isinf(received_power_farfield_dbm(cfg().radio, 2.0, 2.0, 10.0, -30.0, a, zero)));
}

TEST_CASE("matched phases beat random phases on a toy array", "[budget][property]")
{
    const SurfaceArray a = toy(4, 4);
    const SurfacePose pose{};
    const LinkGeometry g{polar_point(pose, 1.5, -25.0), polar_point(pose, 2.5, 40.0), pose};
    const double best = received_power_exact_dbm(cfg().radio, g, a, matched(a, g));
    const double half = received_power_exact_dbm(cfg().radio, g, a, matched(a, g, 0.5));
    CHECK(best - half == Approx(6.0206).margin(1e-4));
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ph(-kPi, kPi);
    for (int t = 0; t < 200; ++t)
    {
        std::vector<cplx> c;
        for (int i = 0; i < 16; ++i)
            c.push_back(std::polar(1.0, ph(rng)));
        REQUIRE(received_power_exact_dbm(cfg().radio, g, a, c) <= best + 1e-9);
    }
}

TEST_CASE("far-field matched sum collapses to (NM)^2", "[budget]")
{
    const SurfaceArray a = toy(8, 6);
    const SurfacePose pose{};
    const double d = 50.0;
    const LinkGeometry g{polar_point(pose, d, 20.0), polar_point(pose, d, -35.0), pose};
    const RadioParams r = unit_radio();
    const double p = received_power_farfield_dbm(r, d, d, 20.0, -35.0, a, matched(a, g), cfg().element_q);
    const double amp = a.element_area() / (4.0 * kPi * d * d);
    const double expected = 10.0 * std::log10(amp * amp * element_pattern(20.0, cfg().element_q) *
                                              element_pattern(-35.0, cfg().element_q) * 48.0 * 48.0);
    CHECK(p == Approx(expected).epsilon(1e-9));
}

TEST_CASE("far-field form is reciprocal", "[budget][property]")
{
    const BeamCommand cmd = steering_command(cfg().array, build_config_lut(cfg(), Mode::Lens), 25.0, -15.0);
    const auto c = replicate_columns(cmd.coefficients, cfg().array.m_rows);
    const double a = received_power_farfield_dbm(cfg().radio, 4.0, 9.0, -15.0, 25.0, cfg().array, c);
    const double b = received_power_farfield_dbm(cfg().radio, 9.0, 4.0, 25.0, -15.0, cfg().array, c);
    CHECK(a == b);
}

TEST_CASE("exact and far-field agree at twenty apertures", "[budget]")
{
    const PhaseLookupTable lut = build_config_lut(cfg(), Mode::Lens);
    const SurfacePose pose{};
    const double d = 20.0 * aperture_size(cfg().array);
    for (double ti : {-30.0, 0.0, 20.0})
        for (double ts : {-45.0, 0.0, 30.0})
        {
            const auto c = replicate_columns(steering_command(cfg().array, lut, ts, ti).coefficients, cfg().array.m_rows);
            const LinkGeometry g{polar_point(pose, d, ti), polar_point(pose, d, ts), pose};
            const double ex = received_power_exact_dbm(cfg().radio, g, cfg().array, c, cfg().element_q);
            const double ff = received_power_farfield_dbm(cfg().radio, d, d, ti, ts, cfg().array, c, cfg().element_q);
            CHECK(std::abs(ex - ff) <= 0.1);
        }
    CHECK(farfield_distance_ok(cfg().array, d, d));
    CHECK_FALSE(farfield_distance_ok(cfg().array, d, aperture_size(cfg().array)));
}

TEST_CASE("exact sum never exceeds the matched bound", "[budget][property]")
{
    const SurfaceArray a = toy(6, 5);
    const SurfacePose pose{{0.3, -0.2, 0.0}, 30.0};
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> ph(-kPi, kPi), mag(0.0, 1.0), ang(-70.0, 70.0), dist(0.5, 5.0);
    for (int t = 0; t < 100; ++t)
    {
        const LinkGeometry g{pose.center + polar_point(pose, dist(rng), ang(rng)),
                             pose.center + polar_point(pose, dist(rng), ang(rng)), pose};
        std::vector<cplx> c, bound = matched(a, g);
        for (std::size_t i = 0; i < bound.size(); ++i)
        {
            c.push_back(std::polar(mag(rng), ph(rng)));
            bound[i] *= std::abs(c.back());
        }
        REQUIRE(received_power_exact_dbm(cfg().radio, g, a, c) <= received_power_exact_dbm(cfg().radio, g, a, bound) + 1e-9);
    }
}

TEST_CASE("surface path loss", "[budget]")
{
    const SurfaceArray a = cfg().array;
    const std::vector<cplx> ones(std::size_t(a.n_cols) * a.m_rows, cplx(1.0, 0.0));
    CHECK(surface_path_loss_db(3.0, 3.0, 0.0, 0.0, a, ones) == Approx(golden::kPathLoss76x28At3m).epsilon(1e-6));

    const std::vector<cplx> halves(ones.size(), cplx(0.5, 0.0));
    CHECK(surface_path_loss_db(3.0, 3.0, 0.0, 0.0, a, halves) - surface_path_loss_db(3.0, 3.0, 0.0, 0.0, a, ones) ==
          Approx(6.0206).margin(1e-4));

    SurfaceArray big = a;
    big.n_cols *= 2;
    big.m_rows *= 2;
    const std::vector<cplx> big_ones(std::size_t(big.n_cols) * big.m_rows, cplx(1.0, 0.0));
    CHECK(surface_path_loss_db(3.0, 3.0, 0.0, 0.0, big, big_ones) - surface_path_loss_db(3.0, 3.0, 0.0, 0.0, a, ones) ==
          Approx(-12.0412).margin(1e-3));
}

TEST_CASE("path loss scales as 1/(NM)^2", "[budget][property]")
{
    std::vector<double> x, y;
    for (int n : {4, 8, 16, 32, 64, 128})
    {
        const SurfaceArray a = toy(n, std::max(1, n / 2));
        const std::vector<cplx> ones(std::size_t(a.n_cols) * a.m_rows, cplx(1.0, 0.0));
        x.push_back(std::log10(double(a.n_cols) * a.m_rows));
        y.push_back(-surface_path_loss_db(5.0, 5.0, 10.0, 10.0, a, ones));
    }
    const double n = double(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
        syy += y[i] * y[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double r = (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
    CHECK(slope == Approx(20.0).margin(1e-6));
    CHECK(r * r > 0.9999);
}

TEST_CASE("aperture capacity", "[budget]")
{
    const double lam = wavelength(24.5e9);
    CHECK(aperture_capacity_dbi(lam * lam / (4.0 * kPi), lam) == Approx(0.0).margin(1e-12));
    CHECK(aperture_capacity_dbi(0.02, lam) == Approx(golden::kCapacity10x20).epsilon(1e-9));
}

TEST_CASE("surface gain never exceeds capacity", "[budget][property]")
{
    const PhaseLookupTable lut = build_config_lut(cfg(), Mode::Lens);
    const double lam = cfg().array.lambda();
    for (int cm = 10; cm <= 50; cm += 10)
    {
        SurfaceArray a = cfg().array;
        a.n_cols = int(std::lround(cm * 0.01 / a.col_spacing));
        a.m_rows = int(std::lround(cm * 0.01 / a.row_spacing));
        const double cap = aperture_capacity_dbi(a.n_cols * a.m_rows * a.element_area(), lam);
        for (double ts : {-50.0, -20.0, 0.0, 35.0})
            for (double ti : {-30.0, 0.0, 15.0})
            {
                const auto c = replicate_columns(steering_command(a, lut, ts, ti).coefficients, a.m_rows);
                for (double probe : {ts, ts + 3.0, 0.0})
                    CHECK(surface_gain_dbi(a, c, ti, probe, lam, cfg().element_q) <= cap + 1e-6);
            }
    }
}

TEST_CASE("surface pose geometry", "[budget]")
{
    const SurfacePose p{{1.0, 2.0, 0.0}, 90.0};
    CHECK(p.normal().y == Approx(1.0));
    CHECK(p.side({1.0, 5.0, 0.0}) == 1);
    CHECK(p.side({1.0, -5.0, 0.0}) == -1);
    CHECK(p.signed_angle({1.0, 5.0, 0.0}) == Approx(0.0).margin(1e-12));
    CHECK(std::abs(p.signed_angle({0.0, 3.0, 0.0})) == Approx(45.0));
}

TEST_CASE("coincident endpoints are rejected", "[budget]")
{
    const SurfaceArray a = toy(1, 1);
    const SurfacePose pose{};
    CHECK_THROWS_AS(received_power_exact_dbm(cfg().radio, LinkGeometry{pose.center, {1.0, 0.0, 0.0}, pose}, a, {1.0}),
                    std::domain_error);
    CHECK_THROWS_AS(received_power_farfield_dbm(cfg().radio, 0.0, 1.0, 0.0, 0.0, a, {1.0}), std::invalid_argument);
}
