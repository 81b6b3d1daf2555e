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

#ifndef hms_link_budget_H
#define hms_link_budget_H

#include "hms/beamform.hpp"

#include <vector>

namespace hms
{
    struct Vec3
    {
        double x = 0.0, y = 0.0, z = 0.0;
    };

    inline Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    inline Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    inline Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
    inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
    inline double norm(Vec3 a) { return std::sqrt(dot(a, a)); }

    // Surface placement: center plus yaw about the vertical axis.
    // Normal (cos yaw, sin yaw, 0); columns advance along (-sin yaw, cos yaw, 0); rows along z.
    struct SurfacePose
    {
        Vec3 center;
        double yaw_deg = 0.0;

        Vec3 normal() const;
        Vec3 tangent() const;
        // Signed angle (deg) of `p` from the normal, positive towards the tangent. Either side.
        double signed_angle(Vec3 p) const;
        // +1 in front of the surface, -1 behind, 0 on the plane.
        int side(Vec3 p) const;
    };

    struct RadioParams
    {
        double p_t_dbm = 6.0;
        double g_t_dbi = 25.0;
        double g_r_dbi = 15.0;
        double freq = 24.5e9; // Hz
        double noise_floor_dbm = -80.0;

        double lambda() const { return wavelength(freq); }
        double eirp_dbm() const { return p_t_dbm + g_t_dbi; }
    };

    struct LinkGeometry
    {
        Vec3 tx;
        Vec3 rx;
        SurfacePose surface;
    };

    // Element positions, column-major: index n * m_rows + m.
    std::vector<Vec3> element_positions(const SurfaceArray &array, const SurfacePose &pose);

    // Per-column coefficients copied to every row (column-major layout).
    std::vector<cplx> replicate_columns(const std::vector<cplx> &per_column, int m_rows);

    double friis_dbm(const RadioParams &params, double d);

    // Coherent element-by-element sum with true distances and angles for every element.
    double received_power_exact_dbm(const RadioParams &params, const LinkGeometry &geom, const SurfaceArray &array,
                                    const std::vector<cplx> &coefficients, double q = 0.5611);

    // Far-field form: amplitudes from the center distances and angles, phases from
    // per-element path lengths of endpoints placed at (d, theta) from the surface center.
    double received_power_farfield_dbm(const RadioParams &params, double d_i, double d_s, double theta_i_deg,
                                       double theta_s_deg, const SurfaceArray &array,
                                       const std::vector<cplx> &coefficients, double q = 0.5611);

    // Far-field formula is intended for distances of at least ten apertures.
    bool farfield_distance_ok(const SurfaceArray &array, double d_i, double d_s);
    double aperture_size(const SurfaceArray &array);

    // Path loss (positive dB) of a correctly reconfigured surface, sum of |C| coherent.
    double surface_path_loss_db(double d_i, double d_s, double theta_i_deg, double theta_s_deg,
                                const SurfaceArray &array, const std::vector<cplx> &coefficients, double q = 0.5611);

    // Plane-wave relay gain (dBi) for given incident and outgoing angles.
    double surface_gain_dbi(const SurfaceArray &array, const std::vector<cplx> &coefficients, double theta_i_deg,
                            double theta_s_deg, double lambda, double q = 0.5611);

    double aperture_capacity_dbi(double area, double lambda);
}

#endif
