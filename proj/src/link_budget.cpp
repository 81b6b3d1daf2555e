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

#include "hms/link_budget.hpp"

#include <limits>

namespace hms
{
    Vec3 SurfacePose::normal() const
    {
        const double y = deg2rad(yaw_deg);
        return {std::cos(y), std::sin(y), 0.0};
    }

    Vec3 SurfacePose::tangent() const
    {
        const double y = deg2rad(yaw_deg);
        return {-std::sin(y), std::cos(y), 0.0};
    }

    double SurfacePose::signed_angle(Vec3 p) const
    {
        const Vec3 v = p - center;
        return rad2deg(std::atan2(dot(tangent(), v), std::abs(dot(normal(), v))));
    }

    int SurfacePose::side(Vec3 p) const
    {
        const double s = dot(normal(), p - center);
        return s > 0.0 ? 1 : (s < 0.0 ? -1 : 0);
    }

    std::vector<Vec3> element_positions(const SurfaceArray &array, const SurfacePose &pose)
    {
        array.validate();
        const Vec3 u = pose.tangent();
        const Vec3 up{0.0, 0.0, 1.0};
        std::vector<Vec3> out;
        out.reserve(std::size_t(array.n_cols) * array.m_rows);
        for (int n = 0; n < array.n_cols; ++n)
        {
            const double un = (double(n) - 0.5 * (array.n_cols - 1)) * array.col_spacing;
            for (int m = 0; m < array.m_rows; ++m)
            {
                const double vm = (double(m) - 0.5 * (array.m_rows - 1)) * array.row_spacing;
                out.push_back(pose.center + un * u + vm * up);
            }
        }
        return out;
    }

    std::vector<cplx> replicate_columns(const std::vector<cplx> &per_column, int m_rows)
    {
        std::vector<cplx> out;
        out.reserve(per_column.size() * std::size_t(m_rows));
        for (const cplx &c : per_column)
            for (int m = 0; m < m_rows; ++m)
                out.push_back(c);
        return out;
    }

    namespace
    {
        double to_dbm(double watts)
        {
            return watts > 0.0 ? 10.0 * std::log10(watts) + 30.0 : -std::numeric_limits<double>::infinity();
        }

        double dbm_to_w(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

        void check_size(const SurfaceArray &array, const std::vector<cplx> &c)
        {
            if (c.size() != std::size_t(array.n_cols) * std::size_t(array.m_rows))
                throw std::invalid_argument("coefficient grid does not match the array dimensions");
        }

        double angle_from_normal(const SurfacePose &pose, Vec3 element, Vec3 p)
        {
            const Vec3 v = p - element;
            const double c = std::abs(dot(pose.normal(), v)) / norm(v);
            return rad2deg(std::acos(std::min(1.0, c)));
        }
    }

    double friis_dbm(const RadioParams &params, double d)
    {
        if (!(d > 0.0))
            throw std::invalid_argument("friis: distance must be positive");
        return params.p_t_dbm + params.g_t_dbi + params.g_r_dbi + 20.0 * std::log10(params.lambda() / (4.0 * kPi * d));
    }

    double received_power_exact_dbm(const RadioParams &params, const LinkGeometry &geom, const SurfaceArray &array,
                                    const std::vector<cplx> &coefficients, double q)
    {
        check_size(array, coefficients);
        const double lam = params.lambda();
        const double k = 2.0 * kPi / lam;
        const double gw0 = 4.0 * kPi / (lam * lam) * array.element_area();
        const double base = dbm_to_w(params.p_t_dbm) * db_to_lin(params.g_t_dbi) * db_to_lin(params.g_r_dbi);
        const auto pos = element_positions(array, geom.surface);
        cplx acc{0.0, 0.0};
        for (std::size_t i = 0; i < pos.size(); ++i)
        {
            const double di = norm(geom.tx - pos[i]);
            const double ds = norm(geom.rx - pos[i]);
            if (!(di > 0.0) || !(ds > 0.0))
                throw std::domain_error("received_power_exact: endpoint coincides with an element");
            const double gi = gw0 * element_pattern(angle_from_normal(geom.surface, pos[i], geom.tx), q);
            const double gs = gw0 * element_pattern(angle_from_normal(geom.surface, pos[i], geom.rx), q);
            const double fi = lam / (4.0 * kPi * di);
            const double fs = lam / (4.0 * kPi * ds);
            const double p_elem = base * gi * gs * fi * fi * fs * fs;
            acc += coefficients[i] * std::sqrt(p_elem) * std::polar(1.0, -k * (di + ds));
        }
        return to_dbm(std::norm(acc));
    }

    double received_power_farfield_dbm(const RadioParams &params, double d_i, double d_s, double theta_i_deg,
                                       double theta_s_deg, const SurfaceArray &array,
                                       const std::vector<cplx> &coefficients, double q)
    {
        check_size(array, coefficients);
        if (!(d_i > 0.0) || !(d_s > 0.0))
            throw std::invalid_argument("received_power_farfield: distances must be positive");
        const double lam = params.lambda();
        const double k = 2.0 * kPi / lam;
        const SurfacePose pose{};
        const Vec3 n = pose.normal();
        const Vec3 u = pose.tangent();
        const double ti = deg2rad(theta_i_deg);
        const double ts = deg2rad(theta_s_deg);
        const Vec3 tx = d_i * (std::cos(ti) * n + std::sin(ti) * u);
        const Vec3 rx = d_s * (std::cos(ts) * n + std::sin(ts) * u);
        const auto pos = element_positions(array, pose);
        cplx acc{0.0, 0.0};
        for (std::size_t i = 0; i < pos.size(); ++i)
            acc += coefficients[i] * std::polar(1.0, -k * (norm(tx - pos[i]) + norm(rx - pos[i])));
        // Symmetric groupings keep an endpoint swap bit-identical.
        const double a = array.element_area() / (4.0 * kPi * (d_i * d_s));
        const double f = element_pattern(theta_i_deg, q) * element_pattern(theta_s_deg, q);
        const double w = dbm_to_w(params.p_t_dbm) * db_to_lin(params.g_t_dbi) * db_to_lin(params.g_r_dbi) * a * a *
                         f * std::norm(acc);
        return to_dbm(w);
    }

    double aperture_size(const SurfaceArray &array)
    {
        return std::max(array.n_cols * array.col_spacing, array.m_rows * array.row_spacing);
    }

    bool farfield_distance_ok(const SurfaceArray &array, double d_i, double d_s)
    {
        const double a = aperture_size(array);
        return d_i >= 10.0 * a && d_s >= 10.0 * a;
    }

    double surface_path_loss_db(double d_i, double d_s, double theta_i_deg, double theta_s_deg,
                                const SurfaceArray &array, const std::vector<cplx> &coefficients, double q)
    {
        check_size(array, coefficients);
        double sum = 0.0;
        for (const cplx &c : coefficients)
            sum += std::abs(c);
        const double a = array.element_area() / (4.0 * kPi * d_i * d_s);
        const double inv_l = a * a * element_pattern(theta_i_deg, q) * element_pattern(theta_s_deg, q) * sum * sum;
        return -10.0 * std::log10(inv_l);
    }

    double surface_gain_dbi(const SurfaceArray &array, const std::vector<cplx> &coefficients, double theta_i_deg,
                            double theta_s_deg, double lambda, double q)
    {
        check_size(array, coefficients);
        const double k = 2.0 * kPi / lambda;
        const double s = std::sin(deg2rad(theta_i_deg)) + std::sin(deg2rad(theta_s_deg));
        cplx acc{0.0, 0.0};
        for (int n = 0; n < array.n_cols; ++n)
        {
            const double un = (double(n) - 0.5 * (array.n_cols - 1)) * array.col_spacing;
            const cplx ph = std::polar(1.0, k * un * s);
            for (int m = 0; m < array.m_rows; ++m)
                acc += coefficients[std::size_t(n) * array.m_rows + m] * ph;
        }
        const double g = 4.0 * kPi / (lambda * lambda) * array.element_area() *
                         std::sqrt(element_pattern(theta_i_deg, q) * element_pattern(theta_s_deg, q)) * std::abs(acc);
        return 10.0 * std::log10(g);
    }

    double aperture_capacity_dbi(double area, double lambda)
    {
        if (!(area > 0.0) || !(lambda > 0.0))
            throw std::invalid_argument("aperture_capacity: area and wavelength must be positive");
        return 10.0 * std::log10(4.0 * kPi * area / (lambda * lambda));
    }
}
