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

#ifndef hms_beamform_H
#define hms_beamform_H

#include "hms/huygens_lut.hpp"

#include <vector>

namespace hms
{
    // Column-steered element grid. Columns run along the surface tangent, rows are stacked vertically.
    struct SurfaceArray
    {
        int n_cols = 76;
        int m_rows = 28;
        double col_spacing = 2.6e-3;              // m
        double row_spacing = kC0 / 24.5e9 / 3.0;  // m
        double center_freq = 24.5e9;              // Hz

        double lambda() const { return wavelength(center_freq); }
        double element_area() const { return col_spacing * row_spacing; }
        void validate() const;
    };

    struct BeamArm
    {
        double angle_deg = 0.0; // from broadside
        double weight = 1.0;
    };

    struct BeamCommand
    {
        Mode mode = Mode::Lens;
        std::vector<BeamArm> arms;
        double incident_deg = 0.0;
        std::vector<double> per_column_phase;   // quantized target phase (deg), one per column
        std::vector<ControlState> controls;      // one per column
        std::vector<cplx> coefficients;          // achieved coefficient per column
        std::vector<double> desired_magnitude;   // |e_n| after rescaling, 1 for single beams
        double amplitude_residual_rms = 0.0;     // rms of |coefficient| - desired_magnitude
    };

    struct RadiationPattern
    {
        std::vector<double> angles_deg;
        std::vector<cplx> field;
        std::vector<double> power_db; // normalised to 0 dB peak, floored at -300 dB
    };

    struct Peak
    {
        double angle_deg = 0.0;
        double power_db = 0.0;
    };

    // cos^q(theta) for |theta| <= 90 deg, zero outside.
    double element_pattern(double theta_deg, double q);

    // Ideal (continuous) per-column phase in degrees for a steered beam, wrapped to [-180, 180).
    double column_phase_deg(const SurfaceArray &array, int n, double theta_s_deg, double incident_deg = 0.0);

    BeamCommand steering_command(const SurfaceArray &array, const PhaseLookupTable &lut, double theta_s_deg,
                                 double incident_deg = 0.0);

    // Two-arm synthesis e_n = a e^{j phi1,n} + b e^{j phi2,n}, phase resolved through the table.
    BeamCommand multibeam_command(const SurfaceArray &array, const PhaseLookupTable &lut,
                                  const std::vector<BeamArm> &arms, double incident_deg = 0.0);

    // Command built from arbitrary unit-magnitude phases (deg), without a table. Used as the
    // continuous-phase reference and by the protocol's sector beams.
    BeamCommand ideal_command(Mode mode, const std::vector<double> &phases_deg);

    // Quantizes an arbitrary per-column phase profile (deg) through the table.
    BeamCommand profile_command(const SurfaceArray &array, const PhaseLookupTable &lut,
                                const std::vector<double> &phases_deg, double incident_deg = 0.0);

    std::vector<double> default_angle_grid(double step_deg = 0.5);

    RadiationPattern radiation_pattern(const SurfaceArray &array, const BeamCommand &cmd, double theta_i_deg,
                                       const std::vector<double> &angles_deg, double q = 0.5611);

    // Complex far-field of the column sum at a single outgoing angle.
    cplx pattern_field(const SurfaceArray &array, const std::vector<cplx> &coefficients, double theta_i_deg,
                       double theta_deg, double q = 0.5611);

    // Top-k local maxima separated by at least guard_deg, sorted by decreasing power.
    std::vector<Peak> peak_detect(const RadiationPattern &pattern, std::size_t k, double guard_deg = 5.0);

    // True when no grating lobe enters visible space for the command angle.
    bool grating_lobe_free(double spacing_m, double lambda_m, double theta_s_deg);
}

#endif
