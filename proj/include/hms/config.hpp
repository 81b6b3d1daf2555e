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

#ifndef hms_config_H
#define hms_config_H

#include "hms/protocol.hpp"
#include "hms/scenario.hpp"

#include <json.hpp>
#include <string>
#include <vector>

namespace hms
{
    struct LutSettings
    {
        double center_freq = 24.5e9;
        double voltage_step = 0.1;
        double phase_step = 15.0;
        DacSpec dac;
        double bandwidth_window = 100e6;
    };

    struct PatternSettings
    {
        double freq_start = 20e9;
        double freq_stop = 30e9;
        int freq_points = 11;
        double voltage_step = 0.5;
    };

    struct BeamSettings
    {
        Mode mode = Mode::Lens;
        double incident_deg = 0.0;
        std::vector<BeamArm> arms{BeamArm{30.0, 1.0}};
        double grid_step_deg = 0.5;
        int peaks = 2;
    };

    struct BudgetSettings
    {
        Vec3 tx{-1.0, 2.0, 0.0};
        Vec3 rx{2.5, -1.5, 0.0};
        SurfacePose surface;
    };

    struct ScenarioSettings
    {
        std::string file; // path, or builtin:indoor / builtin:outdoor
        std::vector<double> beta_grid;
        int trials = 10000;
    };

    struct ProtocolSettings
    {
        int n_enodeb = 8;
        int n_surface = 8;
        int n_ue = 8;
        int n_multiarm = 64;
        int refine_levels = 2;
        int refine_beams = 5;
        double truth_enodeb_deg = 12.0;
        double truth_incident_deg = -20.0;
        double truth_surface_deg = 25.0;
        double truth_ue_deg = -8.0;
        double noise_sigma_db = 0.0;
        Mode mode = Mode::Lens;
        double tx_power_dbm = 20.0;
        int enodeb_elements = 16;
        int ue_elements = 16;
        double d_enodeb_surface = 6.3; // m
        double d_surface_ue = 3.0;     // m
        double codebook_span_deg = 60.0;
        double detect_snr_db = 10.0;
        double tolerance_deg = 3.0;
        double revert_drop_db = 3.0;
        double ambiguity_db = 2.0;
        int trials = 100;
    };

    struct Config
    {
        CellConfig cell;
        double design_bias = 4.0;
        double design_freq = 24.5e9;
        LutSettings lut;
        PatternSettings pattern;
        SurfaceArray array;
        double element_q = 0.5611;
        RadioParams radio;
        BeamSettings beam;
        BudgetSettings budget;
        ScenarioSettings scenario;
        ProtocolSettings protocol;
    };

    // Default configuration document (the embedded config/default.json).
    nlohmann::json default_config_json();

    // Reads a file and merges it over the defaults. Throws config_error on I/O or parse failure.
    nlohmann::json load_config_json(const std::string &path);

    // Applies "a.b.c=value" overrides. The value is parsed as JSON when possible, else kept as a string.
    void apply_override(nlohmann::json &doc, const std::string &assignment);

    // Converts and validates. Throws config_error with the offending key.
    Config parse_config(const nlohmann::json &doc);

    Config default_config();

    // 64-bit FNV-1a of the compact JSON dump, as 16 hex digits.
    std::string config_hash(const nlohmann::json &doc);

    std::string tool_version();

    // Objects derived from a validated configuration.
    std::vector<double> lut_voltage_grid(const Config &c);
    PhaseLookupTable build_config_lut(const Config &c, Mode mode);
    ChannelParams channel_params(const Config &c);
    ProtocolOptions protocol_options(const Config &c);
    nlohmann::json scenario_document(const Config &c); // throws config_error for an unreadable file
    Scenario config_scenario(const Config &c);
}

#endif
