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

#ifndef hms_io_H
#define hms_io_H

#include "hms/beamform.hpp"

#include <json.hpp>
#include <string>
#include <vector>

namespace hms
{
    // Provenance stamped into every output file.
    struct OutputMeta
    {
        std::string config_hash;
        std::string tool_version;
    };

    // Writes to a temporary sibling and renames over the target. No partial file is left on failure.
    void atomic_write(const std::string &path, const std::string &content);

    std::string read_text(const std::string &path);

    nlohmann::json lut_to_json(const PhaseLookupTable &lut, const DacSpec &dac, const OutputMeta &meta);

    // Throws config_error on a malformed document.
    PhaseLookupTable lut_from_json(const nlohmann::json &j);

    // Minimal CSV builder: a "# tool version, config hash" comment line, a header, then rows.
    class CsvTable
    {
    public:
        CsvTable(std::vector<std::string> columns, const OutputMeta &meta);
        void row(const std::vector<double> &values);
        void row(const std::vector<std::string> &cells);
        std::string str() const { return out_; }

    private:
        std::size_t width_;
        std::string out_;
    };

    std::string format_number(double v);

    std::string pattern_csv(const HuygensPattern &pattern, const OutputMeta &meta);
    std::string radiation_csv(const RadiationPattern &pattern, const OutputMeta &meta);
}

#endif
