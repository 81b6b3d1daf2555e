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

#ifndef hms_acceptance_H
#define hms_acceptance_H

#include "hms/config.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace hms
{
    // Reference values from tests/oracle/golden_values.py (30-digit evaluation of the default config).
    namespace golden
    {
        inline constexpr double kLm = 5.23253527546e-9;         // H, magnetic side at the design bias
        inline constexpr double kCm = 8.06484323034e-15;        // F
        inline constexpr double kLe = 4.39277848602e-9;         // H, electric side
        inline constexpr double kCe = 9.60657971444e-15;        // F
        inline constexpr double kColumnIncrement = -38.2464591554; // deg, 30 deg steer, 2.6 mm, 24.5 GHz
        inline constexpr double kCapacity10x20 = 32.2493062256;    // dBi at 24.5 GHz
        inline constexpr double kFriis1m = -60.2311049092;          // dB at 24.5 GHz
        inline constexpr double kPathLoss76x28At3m = 73.9994807605; // dB, broadside, |C| = 1
    }

    struct CriterionResult
    {
        int id = 0;
        std::string name;
        bool pass = false;
        std::string detail;
        double seconds = 0.0;
    };

    struct AcceptanceOptions
    {
        int energy_samples = 100000;
        int scenario_trials = 10000;
        int protocol_trials = 100;
        std::uint64_t seed = 0;
    };

    std::vector<CriterionResult> run_acceptance(const Config &config, const AcceptanceOptions &options = {});

    // "PASS [ 3] steering accuracy: ..." style line.
    std::string format_result(const CriterionResult &r);
}

#endif
