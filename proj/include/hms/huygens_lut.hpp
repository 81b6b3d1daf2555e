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

#ifndef hms_huygens_lut_H
#define hms_huygens_lut_H

#include "hms/cell_circuit.hpp"

#include <cstdint>
#include <vector>

namespace hms
{
    enum class Mode
    {
        Lens,  // transmit through the surface, uses T
        Mirror // reflect off the surface, uses Gamma
    };

    const char *mode_name(Mode m);
    Mode parse_mode(const std::string &s); // throws config_error

    // Uniform DAC over [0, full_scale]; LSB = full_scale / (2^bits - 1).
    struct DacSpec
    {
        int bits = 16;
        double full_scale = 10.0; // V

        double lsb() const;
        std::uint32_t to_code(double volts) const; // clamps to the code range
        double to_volts(std::uint32_t code) const;
    };

    struct ControlState
    {
        double u_m = 0.0; // V
        double u_e = 0.0; // V
        std::uint32_t dac_code_m = 0;
        std::uint32_t dac_code_e = 0;
    };

    ControlState make_control(double u_m, double u_e, const DacSpec &dac = {});

    // Coefficient tensor indexed [freq][u_m][u_e].
    struct HuygensPattern
    {
        std::vector<double> freqs;
        std::vector<double> u_m;
        std::vector<double> u_e;
        std::vector<ScatterCoefficient> data;

        const ScatterCoefficient &at(std::size_t i_f, std::size_t i_m, std::size_t i_e) const
        {
            return data[(i_f * u_m.size() + i_m) * u_e.size() + i_e];
        }
        std::size_t freq_index(double f) const; // exact match within 1 Hz, throws std::invalid_argument
    };

    // Inclusive uniform grid lo, lo+step, ..., hi (hi included when it lies on the grid).
    std::vector<double> uniform_grid(double lo, double hi, double step);

    // Evaluates the cell at every grid point. Errors are rethrown with grid coordinates attached.
    HuygensPattern sweep_pattern(const CellConfig &cell, const std::vector<double> &freqs,
                                 const std::vector<double> &u_m, const std::vector<double> &u_e);

    struct LutEntry
    {
        double target_deg = 0.0;
        ControlState control;
        ScatterCoefficient achieved;
        bool flagged = false; // no candidate in the bin, filled from the nearest phase
    };

    struct PhaseLookupTable
    {
        Mode mode = Mode::Lens;
        double center_freq = 0.0;
        double phase_step = 15.0;
        std::vector<LutEntry> entries; // sorted by target, first target is -180

        std::size_t bin_index(double phase_deg) const;
        const LutEntry &lookup(double phase_deg) const { return entries[bin_index(phase_deg)]; }
        std::size_t flagged_count() const;
        cplx coefficient(const LutEntry &e) const
        {
            return mode == Mode::Lens ? e.achieved.t_coef : e.achieved.gamma_coef;
        }
    };

    inline cplx mode_coefficient(const ScatterCoefficient &s, Mode m)
    {
        return m == Mode::Lens ? s.t_coef : s.gamma_coef;
    }

    // Exhaustive per-bin maximisation of |T| (Lens) or |Gamma| (Mirror) at center_freq.
    // Throws std::invalid_argument on an empty pattern and coverage_error when more than
    // 25% of the bins had no candidate.
    PhaseLookupTable build_lut(const HuygensPattern &pattern, Mode mode, double phase_step, double center_freq,
                               const DacSpec &dac = {});

    // Mean of c(phi) e^{-j phi} over integer phases -180..179, with c the best coefficient
    // per 1-degree bin (empty bins take the nearest-phase candidate).
    cplx efficiency(const HuygensPattern &pattern, double freq, Mode mode);
    cplx efficiency_from_coefficients(const std::vector<cplx> &per_degree);

    struct BandwidthProfile
    {
        std::vector<double> freqs;
        std::vector<std::vector<cplx>> curves; // [entry][freq]
        std::vector<double> max_phase_dev_deg; // within +-window of center, per entry
        double window_hz = 0.0;
    };

    BandwidthProfile bandwidth_profile(const PhaseLookupTable &lut, const CellConfig &cell,
                                       const std::vector<double> &freqs, double window_hz = 100e6);
}

#endif
