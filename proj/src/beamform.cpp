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

#include "hms/beamform.hpp"

#include <algorithm>

namespace hms
{
    void SurfaceArray::validate() const
    {
        if (n_cols < 1 || m_rows < 1)
            throw std::invalid_argument("SurfaceArray: counts must be >= 1");
        if (!(col_spacing > 0.0) || !(row_spacing > 0.0) || !(center_freq > 0.0))
            throw std::invalid_argument("SurfaceArray: spacings and frequency must be positive");
    }

    double element_pattern(double theta_deg, double q)
    {
        if (!(q > 0.0))
            throw std::invalid_argument("element_pattern: q must be positive");
        if (std::abs(theta_deg) >= 90.0)
            return 0.0;
        return std::pow(std::cos(deg2rad(theta_deg)), q);
    }

    double column_phase_deg(const SurfaceArray &array, int n, double theta_s_deg, double incident_deg)
    {
        const double s = std::sin(deg2rad(theta_s_deg)) + std::sin(deg2rad(incident_deg));
        return wrap_deg(-360.0 * double(n) * array.col_spacing / array.lambda() * s);
    }

    namespace
    {
        void check_angle(double a, const char *what)
        {
            if (!(std::abs(a) < 90.0))
                throw std::invalid_argument(std::string(what) + " must lie in (-90, 90) degrees");
        }

        void check_lut(const PhaseLookupTable &lut)
        {
            if (lut.entries.empty())
                throw std::invalid_argument("beam command: empty lookup table");
        }

        void resolve(BeamCommand &cmd, const PhaseLookupTable &lut, const std::vector<double> &targets)
        {
            const std::size_t n = targets.size();
            cmd.per_column_phase.resize(n);
            cmd.controls.resize(n);
            cmd.coefficients.resize(n);
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i)
            {
                const LutEntry &e = lut.lookup(targets[i]);
                cmd.per_column_phase[i] = e.target_deg;
                cmd.controls[i] = e.control;
                cmd.coefficients[i] = lut.coefficient(e);
                const double r = std::abs(cmd.coefficients[i]) - cmd.desired_magnitude[i];
                acc += r * r;
            }
            cmd.amplitude_residual_rms = n ? std::sqrt(acc / double(n)) : 0.0;
        }
    }

    BeamCommand steering_command(const SurfaceArray &array, const PhaseLookupTable &lut, double theta_s_deg,
                                 double incident_deg)
    {
        array.validate();
        check_lut(lut);
        check_angle(theta_s_deg, "steering angle");
        check_angle(incident_deg, "incident angle");
        BeamCommand cmd;
        cmd.mode = lut.mode;
        cmd.arms = {BeamArm{theta_s_deg, 1.0}};
        cmd.incident_deg = incident_deg;
        cmd.desired_magnitude.assign(array.n_cols, 1.0);
        std::vector<double> targets(array.n_cols);
        for (int n = 0; n < array.n_cols; ++n)
            targets[n] = column_phase_deg(array, n, theta_s_deg, incident_deg);
        resolve(cmd, lut, targets);
        return cmd;
    }

    BeamCommand multibeam_command(const SurfaceArray &array, const PhaseLookupTable &lut,
                                  const std::vector<BeamArm> &arms, double incident_deg)
    {
        if (arms.size() == 1)
            return steering_command(array, lut, arms[0].angle_deg, incident_deg);
        if (arms.size() != 2)
            throw std::invalid_argument("multibeam_command: one or two arms supported");
        const BeamArm &a = arms[0];
        const BeamArm &b = arms[1];
        check_angle(a.angle_deg, "arm angle");
        check_angle(b.angle_deg, "arm angle");
        if (a.angle_deg == b.angle_deg)
            throw std::invalid_argument("multibeam_command: coincident arm angles, use steering_command");
        if (a.weight < 0.0 || b.weight < 0.0 || (a.weight == 0.0 && b.weight == 0.0))
            throw std::invalid_argument("multibeam_command: weights must be >= 0 and not both zero");
        // A zero-weight arm leaves the other beam's phases untouched.
        if (a.weight == 0.0 || b.weight == 0.0)
        {
            BeamCommand cmd = steering_command(array, lut, a.weight == 0.0 ? b.angle_deg : a.angle_deg, incident_deg);
            cmd.arms = arms;
            return cmd;
        }
        array.validate();
        check_lut(lut);
        check_angle(incident_deg, "incident angle");

        BeamCommand cmd;
        cmd.mode = lut.mode;
        cmd.arms = arms;
        cmd.incident_deg = incident_deg;
        std::vector<cplx> e(array.n_cols);
        double peak = 0.0;
        for (int n = 0; n < array.n_cols; ++n)
        {
            e[n] = a.weight * std::polar(1.0, deg2rad(column_phase_deg(array, n, a.angle_deg, incident_deg))) +
                   b.weight * std::polar(1.0, deg2rad(column_phase_deg(array, n, b.angle_deg, incident_deg)));
            peak = std::max(peak, std::abs(e[n]));
        }
        std::vector<double> targets(array.n_cols);
        cmd.desired_magnitude.resize(array.n_cols);
        for (int n = 0; n < array.n_cols; ++n)
        {
            cmd.desired_magnitude[n] = std::abs(e[n]) / peak;
            targets[n] = arg_deg(e[n]);
        }
        resolve(cmd, lut, targets);
        return cmd;
    }

    BeamCommand profile_command(const SurfaceArray &array, const PhaseLookupTable &lut,
                                const std::vector<double> &phases_deg, double incident_deg)
    {
        array.validate();
        check_lut(lut);
        if (phases_deg.size() != std::size_t(array.n_cols))
            throw std::invalid_argument("profile_command: one phase per column required");
        BeamCommand cmd;
        cmd.mode = lut.mode;
        cmd.incident_deg = incident_deg;
        cmd.desired_magnitude.assign(array.n_cols, 1.0);
        resolve(cmd, lut, phases_deg);
        return cmd;
    }

    BeamCommand ideal_command(Mode mode, const std::vector<double> &phases_deg)
    {
        BeamCommand cmd;
        cmd.mode = mode;
        cmd.per_column_phase = phases_deg;
        cmd.desired_magnitude.assign(phases_deg.size(), 1.0);
        cmd.coefficients.resize(phases_deg.size());
        cmd.controls.resize(phases_deg.size());
        for (std::size_t i = 0; i < phases_deg.size(); ++i)
            cmd.coefficients[i] = std::polar(1.0, deg2rad(phases_deg[i]));
        return cmd;
    }

    std::vector<double> default_angle_grid(double step_deg)
    {
        return uniform_grid(-90.0, 90.0, step_deg);
    }

    cplx pattern_field(const SurfaceArray &array, const std::vector<cplx> &coefficients, double theta_i_deg,
                       double theta_deg, double q)
    {
        const double amp = std::sqrt(element_pattern(theta_i_deg, q) * element_pattern(theta_deg, q));
        if (amp == 0.0)
            return {0.0, 0.0};
        const double k_d = 2.0 * kPi * array.col_spacing / array.lambda();
        const double s = std::sin(deg2rad(theta_i_deg)) + std::sin(deg2rad(theta_deg));
        cplx acc{0.0, 0.0};
        for (std::size_t n = 0; n < coefficients.size(); ++n)
            acc += coefficients[n] * std::polar(1.0, k_d * double(n) * s);
        return amp * acc;
    }

    RadiationPattern radiation_pattern(const SurfaceArray &array, const BeamCommand &cmd, double theta_i_deg,
                                       const std::vector<double> &angles_deg, double q)
    {
        RadiationPattern p;
        p.angles_deg = angles_deg;
        p.field.resize(angles_deg.size());
        double peak = 0.0;
        for (std::size_t i = 0; i < angles_deg.size(); ++i)
        {
            p.field[i] = pattern_field(array, cmd.coefficients, theta_i_deg, angles_deg[i], q);
            peak = std::max(peak, std::abs(p.field[i]));
        }
        p.power_db.resize(angles_deg.size());
        for (std::size_t i = 0; i < angles_deg.size(); ++i)
        {
            const double m = std::abs(p.field[i]);
            p.power_db[i] = (peak > 0.0 && m > 0.0) ? std::max(-300.0, 20.0 * std::log10(m / peak)) : -300.0;
        }
        return p;
    }

    std::vector<Peak> peak_detect(const RadiationPattern &pattern, std::size_t k, double guard_deg)
    {
        if (k < 1)
            throw std::invalid_argument("peak_detect: k must be >= 1");
        const auto &p = pattern.power_db;
        const std::size_t n = p.size();
        std::vector<std::size_t> maxima;
        for (std::size_t i = 0; i < n; ++i)
        {
            if (std::abs(pattern.field[i]) == 0.0)
                continue;
            const bool left = i == 0 || p[i] > p[i - 1];
            const bool right = i + 1 == n || p[i] >= p[i + 1];
            if (left && right)
                maxima.push_back(i);
        }
        std::stable_sort(maxima.begin(), maxima.end(), [&](std::size_t a, std::size_t b) { return p[a] > p[b]; });
        std::vector<Peak> out;
        for (std::size_t i : maxima)
        {
            const double a = pattern.angles_deg[i];
            const bool clear = std::none_of(out.begin(), out.end(),
                                            [&](const Peak &pk) { return std::abs(pk.angle_deg - a) < guard_deg; });
            if (!clear)
                continue;
            out.push_back(Peak{a, p[i]});
            if (out.size() == k)
                break;
        }
        return out;
    }

    bool grating_lobe_free(double spacing_m, double lambda_m, double theta_s_deg)
    {
        if (!(spacing_m > 0.0) || !(lambda_m > 0.0))
            throw std::invalid_argument("grating_lobe_free: spacing and wavelength must be positive");
        return lambda_m / spacing_m > 1.0 + std::abs(std::sin(deg2rad(theta_s_deg)));
    }
}
