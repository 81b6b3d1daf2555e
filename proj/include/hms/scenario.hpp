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

#ifndef hms_scenario_H
#define hms_scenario_H

#include "hms/link_budget.hpp"

#include <cstdint>
#include <json.hpp>
#include <limits>
#include <string>
#include <vector>

namespace hms
{
    // Floor-plan coordinates (m). Everything is evaluated in the horizontal plane z = 0;
    // surface rows extend vertically and only enter through the element sums.
    struct Point2
    {
        double x = 0.0, y = 0.0;
    };

    enum class SegmentKind
    {
        Exterior,
        Window,
        Interior,
        Obstacle // opaque
    };

    struct WallSegment
    {
        std::string name;
        Point2 a, b;
        double loss_db = 0.0;
        SegmentKind kind = SegmentKind::Interior;
    };

    struct Reflector
    {
        std::string name;
        Point2 a, b;
        double loss_db = 10.0;
    };

    struct SurfaceSite
    {
        std::string name;
        Point2 center;
        double yaw_deg = 0.0; // normal direction in the floor plane
        double steer_range_deg = 60.0;
    };

    struct MetalSheet
    {
        std::string name;
        Point2 center;
        double yaw_deg = 0.0;
        double width = 0.6;  // m, in plane
        double height = 0.6; // m, vertical
    };

    // Directional transmit antenna: peak gain g_t_dbi of the radio parameters on boresight,
    // parabolic roll-off in dB down to a sidelobe floor.
    struct Transmitter
    {
        std::string name;
        Point2 pos;
        double boresight_deg = 0.0; // direction in the floor plane
        double hpbw_deg = 360.0;    // >= 360 means isotropic at g_t_dbi
        double sidelobe_db = 30.0;  // floor below peak

        double gain_offset_db(Point2 towards) const;
    };

    struct ModulationTier
    {
        std::string name;
        double min_snr_db = 0.0;
    };

    struct Scenario
    {
        std::string name;
        Point2 bounds_min, bounds_max;
        std::vector<WallSegment> walls;
        std::vector<Reflector> reflectors;
        std::vector<Transmitter> tx;
        std::vector<Point2> rx;
        std::vector<SurfaceSite> surfaces;
        std::vector<MetalSheet> metal_sheets;
        SurfaceArray array;
        RadioParams radio;
        double element_q = 0.5611;
        double detect_snr_db = 10.0;   // a candidate below this is not a usable link
        double coverage_snr_db = 30.0; // threshold for coverage fractions
        double steer_step_deg = 0.5;
        std::vector<ModulationTier> tiers; // sorted by decreasing min_snr_db

        void validate() const;
    };

    // Reads the scenario schema. Array, radio and q come from the caller's configuration.
    Scenario scenario_from_json(const nlohmann::json &j, const SurfaceArray &array, const RadioParams &radio, double q);

    // Bundled fixtures: "indoor" (mirror-mode relay, metal-sheet baseline) and "outdoor" (lens-mode relay).
    nlohmann::json builtin_scenario_json(const std::string &name);

    enum class PathKind
    {
        LoS,
        EnvReflection,
        SurfaceLens,
        SurfaceMirror,
        MetalSheet
    };

    const char *path_kind_name(PathKind k);

    struct PathCandidate
    {
        PathKind kind = PathKind::LoS;
        int path_id = 0; // stable id used for blockage draws
        int element = -1; // reflector, surface or sheet index
        std::vector<Point2> vertices;
        double snr_db = -std::numeric_limits<double>::infinity();
        double penetration_loss_db = 0.0;
        double theta_in_deg = 0.0;
        double theta_out_deg = 0.0;
        double command_deg = 0.0; // quantized steering command (surface paths)
        bool blocked = false;
    };

    // Which optional scatterers are present. Surfaces are taken in listing order.
    struct Deployment
    {
        int surfaces = -1; // -1 = all
        bool metal_sheets = false;
    };

    class ScenarioEngine
    {
    public:
        ScenarioEngine(Scenario scenario, PhaseLookupTable lens, PhaseLookupTable mirror);

        const Scenario &scenario() const { return sc_; }

        // All geometric candidates for the pair, including every surface and sheet.
        std::vector<PathCandidate> enumerate_paths(Point2 tx, std::size_t tx_index, Point2 rx) const;
        std::vector<PathCandidate> enumerate_paths(std::size_t tx_index, Point2 rx) const
        {
            return enumerate_paths(sc_.tx.at(tx_index).pos, tx_index, rx);
        }

        int path_id_count() const;
        bool included(const PathCandidate &p, const Deployment &d) const;

    private:
        Scenario sc_;
        PhaseLookupTable lens_;
        PhaseLookupTable mirror_;

        double penetration_db(Point2 a, Point2 b) const;
        void add_surface_path(std::vector<PathCandidate> &out, std::size_t tx_index, Point2 tx, Point2 rx,
                              std::size_t s) const;
        void add_sheet_path(std::vector<PathCandidate> &out, std::size_t tx_index, Point2 tx, Point2 rx,
                            std::size_t s) const;
    };

    struct LinkChoice
    {
        double snr_db = -std::numeric_limits<double>::infinity();
        bool linked = false;
        PathCandidate path;
    };

    LinkChoice best_link_snr(const ScenarioEngine &eng, std::size_t tx_index, Point2 rx, bool with_surfaces);
    LinkChoice best_link(const std::vector<PathCandidate> &paths, const ScenarioEngine &eng, const Deployment &d);

    struct CoverageEntry
    {
        Point2 rx;
        double snr_db = -std::numeric_limits<double>::infinity();
        std::string tier; // empty when below every tier
        std::string path_kind;
    };

    std::vector<CoverageEntry> coverage_map(const ScenarioEngine &eng, std::size_t tx_index, const Deployment &d);

    // Fraction of (tx, rx) pairs with best SNR at or above `threshold_db`.
    double coverage_fraction(const ScenarioEngine &eng, const Deployment &d, double threshold_db);

    struct BlockageCurve
    {
        int surfaces = 0;
        std::vector<double> failure;
        std::vector<double> ci_low;
        std::vector<double> ci_high;
    };

    struct BlockageResult
    {
        std::vector<double> beta;
        int trials = 0;
        std::uint64_t seed = 0;
        std::vector<BlockageCurve> curves; // one per surface count 0..n_surfaces
    };

    // Monte-Carlo failure probability. One uniform per (trial, tx, rx, path id) shared across
    // beta values and deployments; per-trial streams are seeded from (seed, trial).
    BlockageResult blockage_failure_rate(const ScenarioEngine &eng, const std::vector<double> &beta, int trials,
                                         std::uint64_t seed);
}

#endif
