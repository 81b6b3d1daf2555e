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

#ifndef hms_common_H
#define hms_common_H

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hms
{
    using cplx = std::complex<double>;

    inline constexpr double kPi = std::numbers::pi;
    inline constexpr double kC0 = 299792458.0;          // speed of light (m/s)
    inline constexpr double kMu0 = 1.25663706212e-6;    // vacuum permeability (H/m)
    inline constexpr double kEps0 = 8.8541878128e-12;   // vacuum permittivity (F/m)
    inline constexpr double kEta0 = 376.730313668;      // free-space wave impedance (Ohm)

    // Raised for malformed configuration input. The CLI maps it to exit code 2.
    class config_error : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // Raised when a search or table build cannot cover the requested phase range.
    class coverage_error : public std::domain_error
    {
    public:
        using std::domain_error::domain_error;
    };

    // Raised when a coefficient denominator collapses numerically.
    class singularity_error : public std::domain_error
    {
    public:
        using std::domain_error::domain_error;
    };

    inline double deg2rad(double deg) { return deg * kPi / 180.0; }
    inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

    // Wraps an angle to [-180, 180).
    inline double wrap_deg(double deg)
    {
        double x = std::fmod(deg + 180.0, 360.0);
        if (x < 0.0)
            x += 360.0;
        if (x >= 360.0)
            x -= 360.0;
        return x - 180.0;
    }

    inline double wavelength(double freq_hz) { return kC0 / freq_hz; }

    inline double lin_to_db(double power_ratio) { return 10.0 * std::log10(power_ratio); }
    inline double db_to_lin(double db) { return std::pow(10.0, db / 10.0); }

    // Phase of a complex value in degrees, wrapped to [-180, 180).
    inline double arg_deg(cplx z) { return wrap_deg(rad2deg(std::arg(z))); }
}

#endif
